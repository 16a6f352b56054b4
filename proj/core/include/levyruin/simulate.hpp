#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "levyruin/fluctuation.hpp"
#include "levyruin/model.hpp"
#include "levyruin/rng.hpp"

namespace levyruin {

// One first-passage record. For sigma = 0 every field is exact: between
// claims the path is linear with slope -premium, so suprema, their times and
// crossing levels are closed-form per segment.
struct RuinPathSample {
    std::uint32_t stream_id = 0;
    bool ruined = false;
    double tau = 0.0;            // ruin time
    double g_prior = 0.0;        // G_{tau-}, time of last supremum before ruin
    double tau_minus_g = 0.0;    // tau - G_{tau-}
    double overshoot = 0.0;      // X_tau - u
    double undershoot = 0.0;     // u - X_{tau-}
    double max_undershoot = 0.0; // u - Xbar_{tau-}
    double xbar_prior = 0.0;     // Xbar_{tau-}
};

struct HorizonPolicy {
    double hopeless_cutoff = 0.0;          // abandon when position < -cutoff
    std::uint64_t event_budget = 100000000; // claim events per path
};

// Default cutoff 20/alpha (20/mgf-boundary when no alpha is declared).
HorizonPolicy default_policy(const ModelSpec& m);

RuinPathSample first_passage(const ModelSpec& m, double u, Rng& rng,
                             const HorizonPolicy& policy);

struct VariableSummary {
    std::uint64_t n = 0;
    double mean = 0.0, sd = 0.0, min = 0.0, max = 0.0;
};

struct EnsembleReport {
    double u = 0.0;
    double cutoff = 0.0;
    std::uint64_t n_attempted = 0;
    std::uint64_t n_ruined = 0;
    std::uint64_t event_count = 0;
    double bias_bound = 0.0; // qVbar(u+L)/qVbar(u), from the renewal table
    std::uint64_t master_seed = 0;
    int workers = 1;
    VariableSummary tau, overshoot, undershoot, max_undershoot;
};

// Conditioned-on-ruin ensemble by rejection: every stream runs first_passage
// with the hopeless rule and keeps ruined paths until its quota is met.
// Streams are merged in stream order, so (seed, workers) fully determines the
// output. Throws BudgetError when attempts exhaust the event budget, with the
// achieved count in the message.
std::pair<std::vector<RuinPathSample>, EnsembleReport> conditioned_ensemble(
    const ModelSpec& m, const RenewalTable& table, double u, std::size_t n_target,
    double cutoff, std::uint64_t master_seed, int workers,
    std::uint64_t event_budget = 100000000);

// Fixed number of attempts; returns every path (ruined or not) in
// deterministic stream order. Used by the plain Monte Carlo checks and the
// CLI `simulate` command.
std::pair<std::vector<RuinPathSample>, EnsembleReport> simulate_ensemble(
    const ModelSpec& m, const RenewalTable* table_for_bias, double u,
    std::size_t n_attempts, double cutoff, std::uint64_t master_seed, int workers,
    std::uint64_t event_budget = 100000000);

struct MgfEstimate {
    std::vector<double> t;
    std::vector<double> m;  // estimate of E e^{alpha Xbar_t}
    std::vector<double> se; // standard errors (heavy-tailed; see docs)
};

// Plain Monte Carlo for M(t) = E e^{alpha Xbar_t} on a time grid, sigma = 0.
// In the convolution-equivalent regime e^{alpha Xbar} has distribution-tail
// index exactly 1: the mean is finite but the variance is not, so these
// standard errors understate the fluctuation of the deep tail.
MgfEstimate running_sup_mgf(const ModelSpec& m, double alpha,
                            const std::vector<double>& t_grid, std::size_t n_paths,
                            std::uint64_t master_seed, int workers);

struct MgfLimit {
    double value = 0.0;    // estimate of M(inf) = E e^{alpha Xbar_inf}
    double se = 0.0;       // from the capped Monte Carlo part only
    double tail_exact = 0.0; // int_{x0}^inf alpha e^{alpha x} qVbar(x) dx, from the table
};

// Finite-variance estimate of M(inf): the contribution of {Xbar <= x0} by
// bounded Monte Carlo at a horizon long enough that records below x0 have
// stopped, plus the exact excess integral from the tilted renewal table.
MgfLimit running_sup_mgf_limit(const ModelSpec& m, const RenewalTable& table, double horizon,
                               double x0, std::size_t n_paths, std::uint64_t master_seed,
                               int workers);

enum class TiltFunctional {
    ConstantOne,   // E 1 (likelihood-ratio normalization check)
    ExpAlphaXt,    // E e^{alpha X_t} at fixed horizon
    RuinIndicator, // P(tau(u) < infty), requires upward-drifting tilt
};

struct TiltedEstimate {
    double value = 0.0;           // unbiased weighted estimate
    double se = 0.0;
    double self_normalized = 0.0; // sum(f w)/sum(w)
    double weight_mean = 0.0;
    std::size_t n = 0;
};

// Importance sampling by exponential change of measure: simulates the tilted
// model and reweights by e^{-theta X + t psi(theta)}. A variance-reduction
// option; the conditioned ensembles above stay the primary estimator.
TiltedEstimate tilted_sample(const ModelSpec& m, double theta, TiltFunctional functional,
                             double param, std::size_t n, std::uint64_t master_seed,
                             int workers);

void write_samples_csv(const std::string& path, const std::vector<RuinPathSample>& samples);

} // namespace levyruin
