#pragma once
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "levyruin/errors.hpp"
#include "levyruin/rng.hpp"

#include <nlohmann/json_fwd.hpp>

namespace levyruin {

enum class ClaimVariant { PolyTiltedExp, Exponential };

// Claim-size distribution. Two concrete families:
//   PolyTiltedExp(rate, p): f(x) = K (1+x)^{-p} e^{-rate x} on x > 0.
//     rate > 0 puts the tail in the convolution-equivalent class with index
//     rate; rate == 0 is the plain Pareto shape that appears after a full
//     Esscher tilt (then p > 1 for integrability, p > 2 for a finite mean).
//   Exponential(mu): f(x) = mu e^{-mu x}. Not convolution equivalent; kept as
//     the closed-form control case for the ladder machinery.
class ClaimFamily {
  public:
    static ClaimFamily poly_tilted_exp(double rate, double p);
    static ClaimFamily exponential(double mu);

    ClaimVariant variant() const { return variant_; }
    double rate() const { return rate_; }
    double power() const { return p_; }
    double mu() const { return mu_; }
    double norm_const() const { return K_; }
    double mean() const { return mean_; }
    bool convolution_equivalent() const {
        return variant_ == ClaimVariant::PolyTiltedExp && rate_ > 0.0;
    }

    double density(double x) const;
    double tail(double x) const; // complementary CDF
    double cdf(double x) const { return 1.0 - tail(x); }

    // E e^{theta U}. Finite for theta <= rate (PolyTiltedExp; equality allowed)
    // or theta < mu (Exponential). DomainError outside.
    double mgf(double theta) const;
    // E U e^{theta U}; at theta == rate finite only when p > 2.
    double mgf_derivative(double theta) const;

    // e^{theta y} * tail(y), computed without overflow for theta up to the mgf
    // boundary. This is the workhorse for all tilted tail integrals.
    double tilted_tail(double theta, double y) const;

    double sample(Rng& rng) const;

    ClaimFamily esscher(double theta) const;

  private:
    ClaimFamily() = default;

    ClaimVariant variant_ = ClaimVariant::Exponential;
    double rate_ = 0.0; // PolyTiltedExp exponential rate (>= 0)
    double p_ = 0.0;    // PolyTiltedExp power (> 1)
    int p_int_ = 0;     // p when integral and small, else 0 (fast pow path)
    double mu_ = 0.0;   // Exponential rate
    double K_ = 0.0;    // PolyTiltedExp normalizing constant
    double mean_ = 0.0;

    mutable std::mutex mgf_mutex_;
    mutable std::map<double, double> mgf_cache_;

  public:
    ClaimFamily(const ClaimFamily& o)
        : variant_(o.variant_), rate_(o.rate_), p_(o.p_), p_int_(o.p_int_), mu_(o.mu_),
          K_(o.K_), mean_(o.mean_) {}
    ClaimFamily& operator=(const ClaimFamily& o) {
        variant_ = o.variant_;
        rate_ = o.rate_;
        p_ = o.p_;
        p_int_ = o.p_int_;
        mu_ = o.mu_;
        K_ = o.K_;
        mean_ = o.mean_;
        return *this;
    }
};

// Claim-surplus process X_t = sum claims - premium*t + sigma*B_t, fully
// parameterized and admissibility-checked. Immutable after construction.
struct ModelSpec {
    ClaimFamily claim;
    double lambda = 0.0;  // claim intensity
    double premium = 0.0; // premium rate r
    double sigma = 0.0;   // Gaussian coefficient
    double alpha = 0.0;   // tilt index (0 when none declared)
    bool alpha_declared = false;
    bool admissibility_checked = false; // false for Esscher-tilted specs

    // Laplace exponent psi(theta) = sigma^2 theta^2/2 - r theta + lambda(mgf-1)
    double psi(double theta) const;
    double psi_prime(double theta) const; // analytic derivative
    double mean_drift() const { return lambda * claim.mean() - premium; } // psi'(0)
    double mgf_boundary() const;          // sup of the finite-psi domain
    bool mgf_boundary_attained() const;   // true for PolyTiltedExp

    double require_alpha() const {
        if (!alpha_declared) throw DomainError("model has no declared tilt index alpha");
        return alpha;
    }
};

struct FluctConstants {
    double alpha = 0.0;
    double q = 0.0;   // killing rate, -psi'(0)
    double d_H = 0.0; // ladder-height drift, sigma^2/2
    double A = 0.0;   // -ln E e^{alpha X_1} = -psi(alpha)
    double B = 0.0;   // kappa(0,-alpha)/q = A/(alpha q)
    double C = 0.0;   // A*B
};

// Validating factory: parses the JSON model config, computes the normalizing
// constant by adaptive quadrature, and asserts every ModelSpec invariant
// (psi(0)=0, convexity on a grid, condition psi(alpha)<0, net drift < 0).
ModelSpec build_model(const nlohmann::json& config);

// Same checks applied to an already-built spec (used by build_model and tests).
void check_admissibility(ModelSpec& m);

double laplace_exponent(const ModelSpec& m, double theta);

FluctConstants constants(const ModelSpec& m);

// Exponential change of measure at theta in (0, alpha]: returns the tilted
// model (intensity lambda*mgf(theta), claim density e^{theta x}f(x)/mgf(theta),
// premium r - sigma^2 theta). The tilted Laplace exponent is verified against
// psi(theta+s) - psi(theta) on a grid to 1e-10.
ModelSpec esscher_tilt(const ModelSpec& m, double theta);

inline double sample_claim(const ModelSpec& m, Rng& rng) { return m.claim.sample(rng); }

} // namespace levyruin
