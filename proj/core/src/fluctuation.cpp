#include "levyruin/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "levyruin/quadrature.hpp"
#include "levyruin/rootfind.hpp"

namespace levyruin {

double LadderExponents::phi_hat(double a) const {
    if (a < 0.0) throw DomainError("phi_hat: a must be >= 0");
    if (a == 0.0) return 0.0;
    {
        std::lock_guard<std::mutex> lk(mutex_);
        auto it = phi_cache_.find(a);
        if (it != phi_cache_.end()) return it->second;
    }
    const ModelSpec& m = *m_;
    auto g = [&](double t) { return m.psi(-t) - a; };
    // psi(-t) is strictly increasing in t (psi' < 0 left of 0), so the root is
    // unique; expand the bracket geometrically, then solve.
    const double hi = expand_upper_bracket(g, 0.0, std::max(1.0, a / m.premium), 1000);
    const double root = solve_increasing(g, 0.0, hi, 1e-12 * (1.0 + std::abs(a)));
    {
        std::lock_guard<std::mutex> lk(mutex_);
        phi_cache_[a] = root;
    }
    return root;
}

double LadderExponents::kappa(double a, double b) const {
    if (a < 0.0) throw DomainError("kappa: a must be >= 0");
    if (m_->alpha_declared && b < -m_->alpha - 1e-12)
        throw DomainError("kappa: b must be >= -alpha");
    const double ph = phi_hat(a);
    if (std::abs(ph - b) < 1e-8) return -m_->psi_prime(-b);
    return (a - m_->psi(-b)) / (ph - b);
}

double phi_hat(const ModelSpec& m, double a) { return LadderExponents(m).phi_hat(a); }
double kappa(const ModelSpec& m, double a, double b) { return LadderExponents(m).kappa(a, b); }
double kappa_hat(const ModelSpec& m, double a, double b) {
    return LadderExponents(m).kappa_hat(a, b);
}

double lundberg_root(const ModelSpec& m, double zeta) {
    if (zeta < 0.0) throw DomainError("lundberg_root: zeta must be >= 0");
    return phi_hat(m, zeta);
}

double LadderLevyMeasure::density(double x) const { return m->lambda * m->claim.tail(x); }

double LadderLevyMeasure::tail(double x) const {
    if (x < 0.0) x = 0.0;
    const ClaimFamily& c = m->claim;
    if (c.variant() == ClaimVariant::Exponential)
        return m->lambda * std::exp(-c.mu() * x) / c.mu();
    // int_x^inf Fbar_U(s) ds = int_0^inf w f_U(x+w) dw
    auto g = [&](double w) { return w * c.density(x + w); };
    return m->lambda * integrate_exp_tail(g, 0.0, c.rate(), 4.0 / c.rate(), 1e-13);
}

LadderLevyMeasure ladder_levy_measure(const ModelSpec& m) {
    if (m.sigma != 0.0)
        throw UnsupportedModel("ladder_levy_measure: density-level objects need sigma = 0");
    return LadderLevyMeasure{&m, 0.0, m.lambda * m.claim.mean()};
}

namespace {

// Marching solution of psi(x_j) = forc(x_j) + h * conv(kern, psi)(x_j) with
// trapezoid weights; forc/kern are evaluated lazily and cached per index.
// A reversed copy of psi keeps the convolution a contiguous forward dot
// product, which the compiler can vectorize.
class RenewalMarch {
  public:
    RenewalMarch(std::function<double(double)> kern, std::function<double(double)> forc,
                 double h)
        : kern_fn_(std::move(kern)), forc_fn_(std::move(forc)), h_(h) {}

    // Extends the solution so it has at least n+1 points.
    void extend(std::size_t n) {
        reserve(n + 1);
        while (psi_.size() <= n) {
            const std::size_t j = psi_.size();
            const double x = h_ * static_cast<double>(j);
            kern_.push_back(kern_fn_(x));
            double value;
            if (j == 0) {
                value = forc_fn_(0.0);
            } else {
                // sum_{i=1}^{j-1} psi[i] kern[j-i] = dot(kern[1..j-1], rev slice)
                const double* kp = kern_.data() + 1;
                const double* rp = psi_rev_.data() + (cap_ - j);
                double s = 0.0;
                for (std::size_t l = 0; l + 1 < j; ++l) s += kp[l] * rp[l];
                s += 0.5 * psi_[0] * kern_[j];
                value = (forc_fn_(x) + h_ * s) / (1.0 - 0.5 * h_ * kern_[0]);
            }
            psi_.push_back(value);
            psi_rev_[cap_ - 1 - j] = value;
        }
    }

    const std::vector<double>& values() const { return psi_; }

  private:
    void reserve(std::size_t n) {
        if (n <= cap_) return;
        std::size_t cap = cap_ == 0 ? 65536 : cap_;
        while (cap < n) cap *= 2;
        std::vector<double> rev(cap, 0.0);
        for (std::size_t i = 0; i < psi_.size(); ++i) rev[cap - 1 - i] = psi_[i];
        psi_rev_ = std::move(rev);
        cap_ = cap;
    }

    std::function<double(double)> kern_fn_, forc_fn_;
    double h_;
    std::vector<double> kern_;
    std::vector<double> psi_;
    std::vector<double> psi_rev_;
    std::size_t cap_ = 0;
};

double interp(const std::vector<double>& v, double h, double x) {
    if (x <= 0.0) return v.front();
    const double t = x / h;
    const auto j = static_cast<std::size_t>(t);
    if (j + 1 >= v.size()) return v.back();
    const double w = t - static_cast<double>(j);
    return v[j] * (1.0 - w) + v[j + 1] * w;
}

} // namespace

RenewalTable renewal_table(const ModelSpec& m, const RenewalOptions& opt) {
    if (m.sigma != 0.0)
        throw UnsupportedModel("renewal_table: density-level objects need sigma = 0");
    if (opt.h > 0.01 || opt.h <= 0.0) throw DomainError("renewal_table: need 0 < h <= 0.01");

    RenewalTable tab;
    tab.h = opt.h;
    tab.q = -m.psi_prime(0.0);
    tab.phi = m.lambda * m.claim.mean() / m.premium;

    const double lr = m.lambda / m.premium;
    const ClaimFamily& claim = m.claim;

    // Plain system: kern = (lambda/r) Fbar_U, forc = (lambda/r) int_x^inf Fbar_U.
    auto plain_kern = [&claim, lr](double x) { return lr * claim.tail(x); };
    auto plain_forc = [&claim, lr](double x) {
        if (claim.variant() == ClaimVariant::Exponential)
            return lr * std::exp(-claim.mu() * x) / claim.mu();
        // int_x^inf Fbar_U(s) ds = int_0^inf w f_U(x+w) dw
        auto g = [&](double w) { return w * claim.density(x + w); };
        const double scale = std::max(claim.density(x), 1e-280);
        return lr * integrate_exp_tail(g, 0.0, claim.rate(), 4.0 / claim.rate(),
                                       std::max(1e-15, 1e-12 * scale));
    };

    RenewalMarch plain(plain_kern, plain_forc, opt.h);
    const auto j_min = static_cast<std::size_t>(std::ceil(opt.x_min / opt.h));
    const auto j_cap = static_cast<std::size_t>(std::ceil(opt.x_cap / opt.h));
    std::size_t j_end = 0;
    for (std::size_t block = 256;; block = std::min<std::size_t>(block * 2, 65536)) {
        const std::size_t target = std::min(j_cap, j_end + block);
        plain.extend(target);
        const auto& v = plain.values();
        bool done = false;
        for (std::size_t j = j_end; j <= target; ++j) {
            if (j >= j_min && v[j] < opt.tol) {
                j_end = j;
                done = true;
                break;
            }
        }
        if (done) break;
        j_end = target;
        if (j_end >= j_cap)
            throw GridError("renewal_table: x_cap reached before qVbar dropped below tol");
    }
    tab.qvbar.assign(plain.values().begin(), plain.values().begin() + j_end + 1);

    if (opt.build_tilted && m.alpha_declared) {
        const double a = m.alpha;
        if (claim.variant() == ClaimVariant::PolyTiltedExp && claim.rate() != a)
            throw UnsupportedModel("renewal_table: tilt index must match the claim rate");
        tab.has_tilt = true;
        tab.alpha = a;
        // Tilted system: kern = (lambda/r) e^{a y}Fbar_U(y), forc likewise for
        // the integrated tail. Both are O(1)-scaled, so the marching keeps
        // uniform relative accuracy however deep the grid goes.
        auto tilt_kern = [&claim, lr, a](double y) { return lr * claim.tilted_tail(a, y); };
        auto tilt_forc = [&claim, lr, a](double y) {
            if (claim.variant() == ClaimVariant::Exponential)
                return lr * std::exp((a - claim.mu()) * y) / claim.mu();
            // e^{a y} int_y^inf Fbar_U = int_0^inf w e^{a y} f_U(y+w) dw, and
            // e^{a y} f_U(y+w) = K(1+y+w)^{-p} e^{-a w} for rate == a, which
            // sidesteps the overflow of the two factors separately. The
            // integrand is normalized by its scale so the tolerance is
            // relative.
            const double p = claim.power();
            const double K = claim.norm_const();
            const double scale = std::pow(1.0 + y, -p);
            auto stable = [&](double w) {
                return w * std::pow((1.0 + y + w) / (1.0 + y), -p) * std::exp(-a * w);
            };
            return lr * K * scale * integrate(stable, 0.0, 50.0 / a, 1e-11 / (a * a));
        };
        RenewalMarch tilt(tilt_kern, tilt_forc, opt.h);
        const auto tj_min = static_cast<std::size_t>(std::ceil(opt.tilt_x_min / opt.h));
        const auto tj_cap = static_cast<std::size_t>(std::ceil(opt.tilt_x_cap / opt.h));
        const auto slope_lag = static_cast<std::size_t>(std::ceil(1.0 / opt.h));
        std::size_t tj_end = 0;
        for (std::size_t block = 1024;; block = std::min<std::size_t>(block * 2, 65536)) {
            const std::size_t target = std::min(tj_cap, tj_end + block);
            tilt.extend(target);
            const auto& v = tilt.values();
            bool done = false;
            for (std::size_t j = std::max(tj_end, slope_lag + 1); j <= target; ++j) {
                if (j < tj_min) continue;
                const double beta = -std::log(v[j] / v[j - slope_lag]) /
                                    (opt.h * static_cast<double>(slope_lag));
                if (beta > 0.0 && a * v[j] / beta < opt.tilt_tail_tol) {
                    tj_end = j;
                    done = true;
                    break;
                }
            }
            if (done) break;
            tj_end = target;
            if (tj_end >= tj_cap)
                throw GridError("renewal_table: tilted grid cap reached before tail tolerance");
        }
        tab.psi_alpha.assign(tilt.values().begin(), tilt.values().begin() + tj_end + 1);
        tab.cum_psi.resize(tab.psi_alpha.size());
        tab.cum_psi[0] = 0.0;
        for (std::size_t j = 1; j < tab.psi_alpha.size(); ++j)
            tab.cum_psi[j] = tab.cum_psi[j - 1] +
                             0.5 * opt.h * a * (tab.psi_alpha[j - 1] + tab.psi_alpha[j]);
        const auto n = tab.psi_alpha.size();
        tab.tail_slope = -std::log(tab.psi_alpha[n - 1] / tab.psi_alpha[n - 1 - slope_lag]) /
                         (opt.h * static_cast<double>(slope_lag));
        tab.tail_mass = a * tab.psi_alpha.back() / tab.tail_slope;
    }
    return tab;
}

double RenewalTable::qvbar_plain(double u) const {
    if (u < 0.0) throw DomainError("qvbar: u must be >= 0");
    if (u > x_max()) throw GridError("qvbar: u beyond the plain grid");
    return interp(qvbar, h, u);
}

double RenewalTable::psi_alpha_at(double x) const {
    if (!has_tilt) throw UnsupportedModel("psi_alpha: table has no tilted extension");
    if (x < 0.0) x = 0.0;
    if (x <= tilt_x_max()) return interp(psi_alpha, h, x);
    return psi_alpha.back() * std::exp(-tail_slope * (x - tilt_x_max()));
}

double RenewalTable::qvbar_at(double u) const {
    if (u < 0.0) throw DomainError("qvbar: u must be >= 0");
    if (u <= x_max()) return interp(qvbar, h, u);
    if (has_tilt) return std::exp(-alpha * u) * psi_alpha_at(u);
    throw GridError("qvbar: u beyond the grid and no tilted extension");
}

double RenewalTable::cum_psi_at(double x) const {
    if (!has_tilt) throw UnsupportedModel("cum_psi: table has no tilted extension");
    if (x <= 0.0) return 0.0;
    if (x <= tilt_x_max()) return interp(cum_psi, h, x);
    const double extra = tail_mass * (1.0 - std::exp(-tail_slope * (x - tilt_x_max())));
    return cum_psi.back() + extra;
}

double RenewalTable::cum_psi_total() const {
    if (!has_tilt) throw UnsupportedModel("cum_psi: table has no tilted extension");
    return cum_psi.back() + tail_mass;
}

double RenewalTable::inv_cum_psi(double c) const {
    if (!has_tilt) throw UnsupportedModel("inv_cum_psi: table has no tilted extension");
    if (c <= 0.0) return 0.0;
    if (c >= cum_psi_total()) return tilt_x_max() + 40.0 / tail_slope;
    if (c <= cum_psi.back()) {
        const auto it = std::lower_bound(cum_psi.begin(), cum_psi.end(), c);
        const auto j = static_cast<std::size_t>(it - cum_psi.begin());
        if (j == 0) return 0.0;
        const double c0 = cum_psi[j - 1];
        const double c1 = cum_psi[j];
        const double w = (c1 > c0) ? (c - c0) / (c1 - c0) : 0.0;
        return h * (static_cast<double>(j - 1) + w);
    }
    const double rem = c - cum_psi.back();
    return tilt_x_max() - std::log(1.0 - rem / tail_mass) / tail_slope;
}

void RenewalTable::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << "x,V,qVbar\n";
    char buf[128];
    for (std::size_t j = 0; j < qvbar.size(); ++j) {
        const double x = h * static_cast<double>(j);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, (1.0 - qvbar[j]) / q,
                      qvbar[j]);
        out << buf;
    }
}

double ruin_probability(const RenewalTable& table, double u) {
    const double v = table.qvbar_at(u);
    return std::min(1.0, std::max(0.0, v));
}

AsymptoticRatioReport asymptotic_constant_check(const ModelSpec& m, const RenewalTable& table,
                                                const std::vector<double>& u_list) {
    if (m.sigma != 0.0) throw UnsupportedModel("asymptotic_constant_check: needs sigma = 0");
    const FluctConstants fc = constants(m);
    AsymptoticRatioReport rep;
    rep.u = u_list;
    rep.C = fc.C;
    for (double u : u_list) {
        // Pi_X^+(u)/(q Vbar(u)) evaluated on the tilted scale where both
        // factors are O(1).
        const double num = m.lambda * m.claim.tilted_tail(fc.alpha, u);
        const double den = table.psi_alpha_at(u);
        rep.ratio.push_back(num / den);
    }
    return rep;
}

double c2_normalization(const RenewalTable& table, const FluctConstants& fc) {
    return fc.B * (1.0 + table.cum_psi_total());
}

} // namespace levyruin
