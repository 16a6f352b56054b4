#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "levyruin/fluctuation.hpp"
#include "levyruin/model.hpp"
#include "levyruin/rng.hpp"
#include "levyruin/simulate.hpp"

namespace levyruin {

// An evaluable limiting distribution on [0, inf): optional atom at zero, a
// density on (0, inf) and the complementary CDF. total_mass < 1 marks a
// defective law (the remaining mass escapes to +infinity).
struct LimitLaw {
    std::string name;     // overshoot | undershoot | max-undershoot
    double atom_at_zero = 0.0;
    double total_mass = 1.0;
    std::function<double(double)> density;
    std::function<double(double)> tail; // mass of (x, inf)
    double cdf(double x) const { return x < 0.0 ? 0.0 : total_mass - tail(x); }
};

// Marginal limit of the overshoot X_tau - u under the conditioned law
// (sigma = 0, so the creeping atom vanishes and the law is proper).
LimitLaw overshoot_limit(const ModelSpec& m);

// Marginal limits of the undershoot u - X_{tau-} and the maximum undershoot
// u - Xbar_{tau-}; both defective with mass 1 - B escaping to +infinity.
std::pair<LimitLaw, LimitLaw> undershoot_limits(const ModelSpec& m);

void write_law_csv(const std::string& path, const LimitLaw& law,
                   const std::vector<double>& grid);

// Limiting ruin-time CDF: B * int_0^t A e^{-A s} M(t-s) ds with M the
// running-sup mgf estimates; the integral is exact for the piecewise-linear
// interpolant of M. Requires M's grid to start at 0 and cover [0, t].
double ruin_time_limit_cdf(const ModelSpec& m, double t, const MgfEstimate& M);

// Named closed-form transform limits (expected discounted penalty functions
// and related Laplace transforms), evaluated as rational expressions in the
// ladder exponents. Parameter fields beyond a transform's arity are ignored.
struct EdpfParams {
    double nu = 0.0;
    double zeta = 0.0;
    double eta = 0.0;
    double lambda_pen = 0.0; // exponential rate on the undershoot-of-max terms
    double theta_pen = 0.0;  // rate on the position prior to ruin (gseg forms)
};
// Transforms: ltlt0, ltltu, ltjt1, ltto, pm1, pm11, gseg1, gseg2.
double edpf_limits(const ModelSpec& m, const std::string& transform, const EdpfParams& p);
std::vector<std::string> edpf_transform_names();

// One draw of the limiting path decomposition: the tilted process run to an
// independent Exp(A) time rho, the large jump landing at W0, and (when
// W0 <= 0) the conditioned-to-cross continuation W.
struct DecompositionSample {
    std::uint32_t stream_id = 0;
    double rho = 0.0;      // jump time
    double z_g_prior = 0.0; // G^Z_{rho-}
    double z_prejump = 0.0; // Z_{rho-}
    double z_max = 0.0;     // Zbar_{rho-}
    double w0 = 0.0;
    double w_tau = 0.0;     // tau_0^W (0 when w0 > 0)
    double w_g_prior = 0.0; // G^W_{tau(0)-}
    double w_end = 0.0;     // W_{tau(0)}   (= w0 when w0 > 0)
    double w_prev = 0.0;    // W_{tau(0)-}  (= w0 when w0 > 0)
    double w_max = 0.0;     // Wbar_{tau(0)-}
    double ruin_time() const { return rho + (w0 <= 0.0 ? w_tau : 0.0); }
    double overshoot() const { return w0 > 0.0 ? w0 : w_end; }
};

// Sampler for the limiting decomposition. The W continuation is drawn from
// the exact conditioned dynamics (Doob h-transform with h = qVbar evaluated
// from the renewal table) rather than by rejection; see the class notes in
// the implementation.
class DecompositionSampler {
  public:
    DecompositionSampler(const ModelSpec& m, const RenewalTable& table);

    DecompositionSample sample(Rng& rng) const;
    double sample_w0(Rng& rng) const;
    double w0_cdf(double z) const;     // analytic, for marginal tests
    double w0_total_mass() const;      // B(1 + I): 1 up to table tolerance
    const FluctConstants& constants() const { return fc_; }

  private:
    double draw_jump_time(double depth, Rng& rng) const;
    double psi_at(double depth) const;
    double runmax_psi(double depth) const;
    double cum_psi(double depth) const;

    const ModelSpec* m_;
    const RenewalTable* table_;
    FluctConstants fc_;
    ModelSpec tilted_; // Esscher tilt at alpha (the pre-jump process Z)
    std::vector<double> runmax_; // running max of psi_alpha from the right
};

std::vector<DecompositionSample> decomposition_ensemble(const DecompositionSampler& sampler,
                                                        std::size_t n,
                                                        std::uint64_t master_seed,
                                                        int workers);

void write_decomposition_csv(const std::string& path,
                             const std::vector<DecompositionSample>& samples);

// Factorization checks on a decomposition ensemble: the jump time marginal
// against Exp(A), the W0 marginal against its analytic CDF, and squared
// distance correlations on a subsample. The pre-jump pair (rho, Z_{rho-}) is
// jointly one factor and W0 the other, so only the *_w0 statistics are
// independence claims; dcor_rho_z measures the within-factor dependence and
// is reported for context.
struct JointJumpLawReport {
    std::size_t n = 0;
    std::size_t dcor_subsample = 0;
    double ks_rho = 0.0;
    double ks_w0 = 0.0;
    double dcor_rho_z = 0.0;
    double dcor_rho_w0 = 0.0;
    double dcor_z_w0 = 0.0;
};
JointJumpLawReport joint_jump_law_check(const DecompositionSampler& sampler,
                                        const std::vector<DecompositionSample>& samples,
                                        std::size_t dcor_subsample = 2000);

} // namespace levyruin
