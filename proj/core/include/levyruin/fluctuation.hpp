#pragma once
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "levyruin/model.hpp"

namespace levyruin {

// Ascending-ladder Laplace exponents under the normalization that fixes the
// Wiener-Hopf factorization kappa(a,-z) kappa_hat(a,z) = a - psi(z).
//
// The dual -X is spectrally negative for this model family, so its ladder
// height creeps and kappa_hat(a,b) = Phi_hat(a) + b, where Phi_hat(a) is the
// unique root >= 0 of psi(-t) = a. kappa is then the Wiener-Hopf quotient
// (a - psi(-b)) / (Phi_hat(a) - b), with the removable singularity at
// b = Phi_hat(a) filled by -psi'(-b). Consequences of this normalization:
// q = -psi'(0), d_H = sigma^2/2, and Pi_H = lambda*Fbar_U for sigma = 0.
class LadderExponents {
  public:
    explicit LadderExponents(const ModelSpec& m) : m_(&m) {}

    double phi_hat(double a) const;
    double kappa(double a, double b) const;
    double kappa_hat(double a, double b) const { return phi_hat(a) + b; }
    const ModelSpec& model() const { return *m_; }

  private:
    const ModelSpec* m_;
    mutable std::mutex mutex_;
    mutable std::map<double, double> phi_cache_;
};

double phi_hat(const ModelSpec& m, double a);
double kappa(const ModelSpec& m, double a, double b);
double kappa_hat(const ModelSpec& m, double a, double b);

// Unique eta >= 0 with kappa_hat(zeta, -eta) = 0, i.e. eta = Phi_hat(zeta);
// satisfies the martingale identity psi(-eta) = zeta.
double lundberg_root(const ModelSpec& m, double zeta);

// Ladder-height Levy measure for sigma = 0: density lambda*Fbar_U(x), zero
// drift, total mass lambda*EU.
struct LadderLevyMeasure {
    const ModelSpec* m = nullptr;
    double drift = 0.0;
    double total_mass = 0.0;
    double density(double x) const;
    double tail(double x) const; // lambda * int_x^inf Fbar_U
};
LadderLevyMeasure ladder_levy_measure(const ModelSpec& m);

struct RenewalOptions {
    double h = 0.005;          // grid step
    double tol = 1e-6;         // stop when qVbar < tol
    double x_min = 0.0;        // extend at least this far regardless of tol
    double x_cap = 5000.0;     // GridError if tol not reached by here
    bool build_tilted = true;  // tilted extension when alpha is declared
    double tilt_tail_tol = 1e-5; // stop tilted grid when est. integral tail < this
    double tilt_x_min = 0.0;
    double tilt_x_cap = 5000.0;
};

// Discretized renewal function of the ladder height process, built from the
// defective renewal equation of the Pollaczek-Khintchine sum (trapezoid
// marching, success probability phi = lambda*EU/r).
//
// For models with a declared tilt index the table also carries the tilted
// solution psi_alpha(x) = e^{alpha x} qVbar(x) on a longer grid, which keeps
// relative accuracy uniform deep into the tail (plain qVbar underflows its
// own accuracy there). Beyond the tilted grid, evaluations extrapolate
// log-linearly with the empirical end slope; the switch point and slope are
// stored so consumers can report what was used.
struct RenewalTable {
    // plain grid
    double h = 0.0;
    double q = 0.0;
    double phi = 0.0; // ladder success probability
    std::vector<double> qvbar;

    // tilted extension
    bool has_tilt = false;
    double alpha = 0.0;
    std::vector<double> psi_alpha; // e^{alpha x} qVbar(x), same h
    std::vector<double> cum_psi;   // int_0^x alpha*psi_alpha, trapezoid
    double tail_slope = 0.0;       // log-linear end slope beta
    double tail_mass = 0.0;        // int_{end}^inf alpha*psi_alpha under the extension

    double x_max() const { return h * (qvbar.empty() ? 0 : qvbar.size() - 1); }
    double tilt_x_max() const { return h * (psi_alpha.empty() ? 0 : psi_alpha.size() - 1); }

    double qvbar_plain(double u) const;  // GridError beyond the plain grid
    double qvbar_at(double u) const;     // tilted/extrapolated when available
    double psi_alpha_at(double x) const; // with log-linear extension
    double cum_psi_at(double x) const;   // with closed-form extension tail
    double cum_psi_total() const;        // int_0^inf alpha*psi_alpha
    double inv_cum_psi(double c) const;  // inverse of cum_psi_at
    double V(double x) const { return x < 0.0 ? 0.0 : (1.0 - qvbar_at(x)) / q; }

    void write_csv(const std::string& path) const; // columns: x,V,qVbar
};

RenewalTable renewal_table(const ModelSpec& m, const RenewalOptions& opt = {});

// qVbar(u) with interpolation; GridError beyond the covered range.
double ruin_probability(const RenewalTable& table, double u);

// Ratios Pi_X^+(u) / (q Vbar(u)) along u_list together with the target C.
struct AsymptoticRatioReport {
    std::vector<double> u;
    std::vector<double> ratio;
    double C = 0.0;
};
AsymptoticRatioReport asymptotic_constant_check(const ModelSpec& m, const RenewalTable& table,
                                                const std::vector<double>& u_list);

// B * (1 + int_0^inf alpha e^{alpha z} qVbar(z) dz); equals 1 exactly in the
// continuum.
double c2_normalization(const RenewalTable& table, const FluctConstants& fc);

} // namespace levyruin
