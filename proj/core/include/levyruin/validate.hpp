#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "levyruin/fluctuation.hpp"
#include "levyruin/model.hpp"
#include "levyruin/simulate.hpp"
#include "levyruin/stats.hpp"

namespace levyruin {

// One named check: statistic, threshold, verdict, and enough metadata to
// replay it (seeds, levels, bias bounds). The category separates identity
// failures (bugs) from asymptotic-slack failures (finite-u effects).
struct ComparisonReport {
    std::string name;
    std::string category; // "identity" | "asymptotic"
    std::vector<double> u_levels;
    std::uint64_t n = 0;
    std::string statistic_kind;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    double wasserstein = -1.0; // reported alongside KS where computed
    double bias_bound = 0.0;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string note;
};

// Thresholds and run sizes for the suites. Tests construct this instead of
// hard-coding tolerances in their logic.
struct ValidateConfig {
    std::uint64_t seed = 20200513;
    int workers = 0; // 0 = hardware concurrency
    std::uint64_t event_budget = 100000000;
    double cutoff_override = 0.0; // 0 = default 20/alpha

    // identity suite
    double wh_tol = 1e-10;
    double c2_tol = 1e-4;
    double qvinf_tol = 1e-6;
    double lundberg_tol = 1e-10;
    double pk_sigma = 3.0;
    std::vector<double> pk_u = {1.0, 2.0, 5.0};
    std::size_t pk_n = 1000000;

    // marginal limit suite
    double ks_ruin_time_tol = 0.05;
    double ks_overshoot_tol = 0.05;
    double ks_undershoot_tol = 0.07;
    double trend_se_mult = 2.0;

    // transform comparison
    double transform_sigma = 3.0;
    double transform_slack = 0.1;

    std::size_t underpowered_n = 1000;

    double cutoff(const ModelSpec& m) const {
        if (cutoff_override > 0.0) return cutoff_override;
        const double a = m.alpha_declared ? m.alpha : m.mgf_boundary();
        return 20.0 / a;
    }
};

struct ConditionedRun {
    double u = 0.0;
    std::vector<RuinPathSample> samples;
    EnsembleReport report;
};

ConditionedRun make_conditioned_run(const ModelSpec& m, const RenewalTable& table, double u,
                                    std::size_t n_target, const ValidateConfig& cfg);

// Wiener-Hopf grid, c2 normalization, qV(inf), Lundberg residuals, and the
// Pollaczek-Khintchine vs Monte Carlo comparison.
std::vector<ComparisonReport> identity_suite(const ModelSpec& m, const RenewalTable& table,
                                             const ValidateConfig& cfg);

// Empirical conditioned transform E e^{-zeta tau - eta overshoot} against the
// closed-form limit, with 3 SE + relative slack.
ComparisonReport transform_compare(const ModelSpec& m, const ConditionedRun& run, double zeta,
                                   double eta, const ValidateConfig& cfg);

// Conditioned marginals (ruin time, overshoot, undershoots) against the
// limit laws for each run, plus monotone-improvement checks across levels.
std::vector<ComparisonReport> marginal_limit_suite(const ModelSpec& m, const RenewalTable& table,
                                                   const std::vector<ConditionedRun>& runs,
                                                   const MgfEstimate& msup,
                                                   const ValidateConfig& cfg);

} // namespace levyruin
