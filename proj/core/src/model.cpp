#include "levyruin/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "levyruin/quadrature.hpp"

namespace levyruin {

namespace {

double pow_neg_p(double one_plus_x, double p, int p_int) {
    if (p_int > 0) {
        double t = 1.0 / one_plus_x;
        double r = 1.0;
        for (int i = 0; i < p_int; ++i) r *= t;
        return r;
    }
    return std::pow(one_plus_x, -p);
}

} // namespace

ClaimFamily ClaimFamily::poly_tilted_exp(double rate, double p) {
    if (rate < 0.0) throw DomainError("PolyTiltedExp: rate must be >= 0");
    if (p <= 1.0) throw DomainError("PolyTiltedExp: power p must be > 1");
    if (rate == 0.0 && p <= 2.0)
        throw DomainError("PolyTiltedExp: rate 0 needs p > 2 for a finite mean");
    ClaimFamily c;
    c.variant_ = ClaimVariant::PolyTiltedExp;
    c.rate_ = rate;
    c.p_ = p;
    c.p_int_ = (p == std::floor(p) && p <= 16.0) ? static_cast<int>(p) : 0;

    if (rate == 0.0) {
        c.K_ = p - 1.0;
        c.mean_ = 1.0 / (p - 2.0); // int x (p-1)(1+x)^{-p} dx
    } else {
        auto base = [&](double x) { return pow_neg_p(1.0 + x, p, c.p_int_) * std::exp(-rate * x); };
        const double z = integrate_exp_tail(base, 0.0, rate, 1.0, 1e-12);
        c.K_ = 1.0 / z;
        auto xbase = [&](double x) { return x * base(x); };
        c.mean_ = c.K_ * integrate_exp_tail(xbase, 0.0, rate, 4.0 / rate, 1e-12);
        // Normalization invariant: integral of the density must be 1.
        const double total = c.K_ * integrate_exp_tail(base, 0.0, rate, 1.0, 1e-12);
        if (std::abs(total - 1.0) > 1e-8) {
            std::ostringstream os;
            os << "PolyTiltedExp normalization off by " << total - 1.0;
            throw NormalizationError(os.str());
        }
    }
    return c;
}

ClaimFamily ClaimFamily::exponential(double mu) {
    if (mu <= 0.0) throw DomainError("Exponential: rate mu must be > 0");
    ClaimFamily c;
    c.variant_ = ClaimVariant::Exponential;
    c.mu_ = mu;
    c.mean_ = 1.0 / mu;
    return c;
}

double ClaimFamily::density(double x) const {
    if (x < 0.0) return 0.0;
    if (variant_ == ClaimVariant::Exponential) return mu_ * std::exp(-mu_ * x);
    return K_ * pow_neg_p(1.0 + x, p_, p_int_) * std::exp(-rate_ * x);
}

double ClaimFamily::tail(double x) const {
    if (x <= 0.0) return 1.0;
    if (variant_ == ClaimVariant::Exponential) return std::exp(-mu_ * x);
    if (rate_ == 0.0) return std::pow(1.0 + x, 1.0 - p_);
    return std::exp(-rate_ * x) * tilted_tail(rate_, x);
}

double ClaimFamily::tilted_tail(double theta, double y) const {
    if (y < 0.0) y = 0.0;
    if (variant_ == ClaimVariant::Exponential) {
        if (theta >= mu_) throw DomainError("tilted_tail: theta beyond exponential boundary");
        return std::exp((theta - mu_) * y);
    }
    if (theta > rate_) throw DomainError("tilted_tail: theta beyond PolyTiltedExp boundary");
    if (rate_ == 0.0) return std::exp(theta * y) * std::pow(1.0 + y, 1.0 - p_);
    // e^{theta y} tail(y) = e^{(theta-rate) y} K int_0^inf (1+y+s)^{-p} e^{-rate s} ds;
    // the integrand is normalized by its peak so the tolerance is relative.
    const double scale = pow_neg_p(1.0 + y, p_, p_int_);
    auto g = [&](double s) {
        return pow_neg_p((1.0 + y + s) / (1.0 + y), p_, p_int_) * std::exp(-rate_ * s);
    };
    const double core = K_ * scale * integrate(g, 0.0, 40.0 / rate_ + 4.0, 1e-11);
    return std::exp((theta - rate_) * y) * core;
}

double ClaimFamily::mgf(double theta) const {
    if (variant_ == ClaimVariant::Exponential) {
        if (theta >= mu_) throw DomainError("mgf: theta >= mu for exponential claims");
        return mu_ / (mu_ - theta);
    }
    if (theta > rate_) throw DomainError("mgf: theta beyond PolyTiltedExp boundary");
    if (theta == rate_) return K_ / (p_ - 1.0);
    if (theta == 0.0) return 1.0;
    {
        std::lock_guard<std::mutex> lk(mgf_mutex_);
        auto it = mgf_cache_.find(theta);
        if (it != mgf_cache_.end()) return it->second;
    }
    const double decay = rate_ - theta;
    auto g = [&](double x) { return pow_neg_p(1.0 + x, p_, p_int_) * std::exp(-decay * x); };
    // Truncation point from whichever tail bound bites first: the exponential
    // factor or the polynomial tail (1+x)^{1-p}/(p-1), which still decays
    // when theta sits against the boundary.
    const double cut_exp = std::log(1.0 / (decay * 1e-13)) / decay;
    const double cut_poly = std::pow(1e13 / (p_ - 1.0), 1.0 / (p_ - 1.0));
    const double cut = std::min(cut_exp, cut_poly);
    const double v = K_ * integrate(g, 0.0, cut, 1e-12, 100000);
    {
        std::lock_guard<std::mutex> lk(mgf_mutex_);
        mgf_cache_[theta] = v;
    }
    return v;
}

double ClaimFamily::mgf_derivative(double theta) const {
    if (variant_ == ClaimVariant::Exponential) {
        if (theta >= mu_) throw DomainError("mgf_derivative: theta >= mu");
        const double d = mu_ - theta;
        return mu_ / (d * d);
    }
    if (theta > rate_) throw DomainError("mgf_derivative: theta beyond boundary");
    if (theta == rate_) {
        if (p_ <= 2.0)
            throw DomainError("mgf_derivative: infinite at the boundary for p <= 2");
        // K int x (1+x)^{-p} dx = K (1/(p-2) - 1/(p-1))
        return K_ * (1.0 / (p_ - 2.0) - 1.0 / (p_ - 1.0));
    }
    const double decay = rate_ - theta;
    if (decay < 1e-9 && p_ <= 2.0)
        throw DomainError("mgf_derivative: diverges approaching the boundary for p <= 2");
    auto g = [&](double x) { return x * pow_neg_p(1.0 + x, p_, p_int_) * std::exp(-decay * x); };
    const double cut_exp = std::log(1.0 / (decay * 1e-13)) / decay + 4.0 / decay;
    const double cut_poly =
        p_ > 2.0 ? std::pow(1e13 / (p_ - 2.0), 1.0 / (p_ - 2.0)) : cut_exp;
    const double cut = std::min(cut_exp, cut_poly);
    return K_ * integrate(g, 0.0, cut, 1e-12, 100000);
}

double ClaimFamily::sample(Rng& rng) const {
    if (variant_ == ClaimVariant::Exponential) return rng.exponential(mu_);
    if (rate_ == 0.0) {
        // Inverse CDF of the Pareto shape.
        return std::pow(rng.uniform01(), -1.0 / (p_ - 1.0)) - 1.0;
    }
    // Rejection against the Exp(rate) proposal; acceptance (1+x)^{-p} <= 1.
    for (;;) {
        const double x = rng.exponential(rate_);
        const double u = rng.uniform01();
        if (u < pow_neg_p(1.0 + x, p_, p_int_)) return x;
    }
}

ClaimFamily ClaimFamily::esscher(double theta) const {
    if (variant_ == ClaimVariant::Exponential) {
        if (theta >= mu_) throw DomainError("esscher: theta >= mu");
        return exponential(mu_ - theta);
    }
    if (theta > rate_) throw DomainError("esscher: theta beyond PolyTiltedExp boundary");
    return poly_tilted_exp(rate_ - theta, p_);
}

double ModelSpec::psi(double theta) const {
    return 0.5 * sigma * sigma * theta * theta - premium * theta +
           lambda * (claim.mgf(theta) - 1.0);
}

double ModelSpec::psi_prime(double theta) const {
    return sigma * sigma * theta - premium + lambda * claim.mgf_derivative(theta);
}

double ModelSpec::mgf_boundary() const {
    return claim.variant() == ClaimVariant::Exponential ? claim.mu() : claim.rate();
}

bool ModelSpec::mgf_boundary_attained() const {
    return claim.variant() == ClaimVariant::PolyTiltedExp;
}

void check_admissibility(ModelSpec& m) {
    if (m.lambda <= 0.0) throw AdmissibilityError("lambda must be > 0");
    if (m.premium <= 0.0) throw AdmissibilityError("premium must be > 0");
    if (m.sigma < 0.0) throw AdmissibilityError("sigma must be >= 0");
    if (m.mean_drift() >= 0.0)
        throw AdmissibilityError("net drift lambda*EU - r must be negative");
    if (std::abs(m.psi(0.0)) > 1e-14) throw AdmissibilityError("psi(0) != 0");
    if (m.alpha_declared) {
        const double a = m.alpha;
        if (a <= 0.0) throw AdmissibilityError("declared alpha must be > 0");
        if (a > m.mgf_boundary() || (a == m.mgf_boundary() && !m.mgf_boundary_attained()))
            throw AdmissibilityError("declared alpha outside the finite-mgf domain");
        const double pa = m.psi(a);
        if (!(pa < 0.0)) {
            std::ostringstream os;
            os << "condition (c1) fails: psi(alpha) = " << pa << " >= 0";
            throw AdmissibilityError(os.str());
        }
        // Convexity spot-check on a grid reaching into the negative half line.
        // The last node is snapped to alpha exactly so the boundary branch of
        // the mgf is used there.
        const double lo = -5.0;
        const int n = 41;
        std::vector<double> grid(n);
        for (int i = 0; i < n; ++i) grid[i] = lo + (a - lo) * i / (n - 1);
        grid[n - 1] = a;
        std::vector<double> vals(n);
        for (int i = 0; i < n; ++i) vals[i] = m.psi(grid[i]);
        for (int i = 1; i + 1 < n; ++i) {
            const double second = vals[i - 1] - 2.0 * vals[i] + vals[i + 1];
            if (second < -1e-9 * (1.0 + std::abs(vals[i])))
                throw AdmissibilityError("psi fails the convexity grid check");
        }
    }
    m.admissibility_checked = true;
}

ModelSpec build_model(const nlohmann::json& config) {
    using nlohmann::json;
    if (!config.is_object()) throw ConfigError("model config must be a JSON object");
    for (auto it = config.begin(); it != config.end(); ++it) {
        const std::string& k = it.key();
        if (k != "claim" && k != "lambda" && k != "premium" && k != "sigma")
            throw ConfigError("unknown model config key: " + k);
    }
    if (!config.contains("claim")) throw ConfigError("missing key: claim");
    const json& cj = config.at("claim");
    if (!cj.is_object()) throw ConfigError("claim must be an object");
    for (auto it = cj.begin(); it != cj.end(); ++it) {
        const std::string& k = it.key();
        if (k != "variant" && k != "alpha" && k != "p" && k != "mu")
            throw ConfigError("unknown model config key: claim." + k);
    }
    const std::string variant = cj.value("variant", std::string{});
    if (variant.empty()) throw ConfigError("missing key: claim.variant");

    ModelSpec m{ClaimFamily::exponential(1.0), 0, 0, 0};
    if (variant == "poly_tilted_exp") {
        if (!cj.contains("alpha")) throw ConfigError("missing key: claim.alpha");
        if (!cj.contains("p")) throw ConfigError("missing key: claim.p");
        if (cj.contains("mu")) throw ConfigError("claim.mu not valid for poly_tilted_exp");
        const double a = cj.at("alpha").get<double>();
        const double p = cj.at("p").get<double>();
        if (a <= 0.0) throw ConfigError("claim.alpha must be > 0");
        if (p <= 1.0) throw ConfigError("claim.p must be > 1");
        m.claim = ClaimFamily::poly_tilted_exp(a, p);
        m.alpha = a;
        m.alpha_declared = true;
    } else if (variant == "exponential") {
        if (!cj.contains("mu")) throw ConfigError("missing key: claim.mu");
        if (cj.contains("p")) throw ConfigError("claim.p not valid for exponential");
        const double mu = cj.at("mu").get<double>();
        if (mu <= 0.0) throw ConfigError("claim.mu must be > 0");
        m.claim = ClaimFamily::exponential(mu);
        if (cj.contains("alpha")) {
            m.alpha = cj.at("alpha").get<double>();
            m.alpha_declared = true;
        }
    } else {
        throw ConfigError("claim.variant must be poly_tilted_exp or exponential");
    }
    if (!config.contains("lambda")) throw ConfigError("missing key: lambda");
    if (!config.contains("premium")) throw ConfigError("missing key: premium");
    m.lambda = config.at("lambda").get<double>();
    m.premium = config.at("premium").get<double>();
    m.sigma = config.value("sigma", 0.0);
    check_admissibility(m);
    return m;
}

double laplace_exponent(const ModelSpec& m, double theta) { return m.psi(theta); }

FluctConstants constants(const ModelSpec& m) {
    FluctConstants c;
    c.alpha = m.require_alpha();
    c.q = -m.psi_prime(0.0);
    c.d_H = 0.5 * m.sigma * m.sigma;
    c.A = -m.psi(c.alpha);
    if (!(c.A > 0.0))
        throw AdmissibilityError("constants: psi(alpha) >= 0, condition (c1) fails");
    c.B = c.A / (c.alpha * c.q);
    c.C = c.A * c.B;
    return c;
}

ModelSpec esscher_tilt(const ModelSpec& m, double theta) {
    const double bound = m.mgf_boundary();
    if (theta <= 0.0 || theta > bound || (theta == bound && !m.mgf_boundary_attained()))
        throw DomainError("esscher_tilt: theta outside (0, alpha]");
    const double mgf_t = m.claim.mgf(theta);
    ModelSpec t{m.claim.esscher(theta), m.lambda * mgf_t, m.premium - m.sigma * m.sigma * theta,
                m.sigma};
    t.alpha = 0.0;
    t.alpha_declared = false;
    t.admissibility_checked = false;
    // Tilt identity psi_tilted(s) = psi(theta+s) - psi(theta) on a grid.
    const double pt = m.psi(theta);
    const double s_hi = bound - theta;
    for (int i = 0; i <= 8; ++i) {
        const double s = -2.0 + 0.125 * i * (2.0 + s_hi);
        if (s > s_hi || (s == s_hi && !m.mgf_boundary_attained())) continue;
        const double lhs = t.psi(s);
        const double rhs = m.psi(theta + s) - pt;
        if (std::abs(lhs - rhs) > 1e-10 * (1.0 + std::abs(rhs)))
            throw NormalizationError("esscher_tilt: tilted Laplace exponent mismatch");
    }
    return t;
}

} // namespace levyruin
