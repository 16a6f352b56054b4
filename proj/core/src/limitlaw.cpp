#include "levyruin/limitlaw.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "levyruin/parallel.hpp"
#include "levyruin/quadrature.hpp"
#include "levyruin/stats.hpp"

namespace levyruin {

namespace {

void require_s_alpha(const ModelSpec& m, const char* who) {
    if (m.sigma != 0.0)
        throw UnsupportedModel(std::string(who) + ": density-level laws need sigma = 0");
    if (!m.claim.convolution_equivalent())
        throw UnsupportedModel(std::string(who) +
                               ": claim family is not convolution equivalent");
    if (m.claim.rate() != m.require_alpha())
        throw UnsupportedModel(std::string(who) + ": tilt index must match the claim rate");
}

// int_gamma^inf e^{alpha s} Fbar_U(s) ds for the PolyTiltedExp family with
// rate == alpha: equals (K(1+g)^{1-p}/(p-1) - t_alpha(g)) / alpha.
double s_talpha(const ClaimFamily& c, double a, double g) {
    const double head = c.norm_const() * std::pow(1.0 + g, 1.0 - c.power()) / (c.power() - 1.0);
    return (head - c.tilted_tail(a, g)) / a;
}

// T_alpha(y) = e^{alpha y} int_y^inf Fbar_U = K int_0^inf w(1+y+w)^{-p}e^{-a w} dw.
double t_cap_alpha(const ClaimFamily& c, double a, double y) {
    const double p = c.power();
    const double K = c.norm_const();
    const double scale = std::pow(1.0 + y, -p);
    auto g = [&](double w) {
        return w * std::pow((1.0 + y + w) / (1.0 + y), -p) * std::exp(-a * w);
    };
    return K * scale * integrate(g, 0.0, 50.0 / a, 1e-11 / (a * a));
}

} // namespace

LimitLaw overshoot_limit(const ModelSpec& m) {
    require_s_alpha(m, "overshoot_limit");
    const FluctConstants fc = constants(m);
    const ClaimFamily claim = m.claim;
    const double a = fc.alpha;
    const double lq = m.lambda / fc.q;
    LimitLaw law;
    law.name = "overshoot";
    law.atom_at_zero = 0.0; // d_H = 0 when sigma = 0: no creeping atom
    law.total_mass = 1.0;
    law.density = [claim, fc, a, lq](double g) {
        if (g < 0.0) return 0.0;
        return std::exp(-a * g) * a * (fc.B + lq * s_talpha(claim, a, g));
    };
    law.tail = [claim, fc, a, lq](double x) {
        if (x < 0.0) return 1.0;
        return std::exp(-a * x) *
               (fc.B + lq * (s_talpha(claim, a, x) - t_cap_alpha(claim, a, x)));
    };
    return law;
}

std::pair<LimitLaw, LimitLaw> undershoot_limits(const ModelSpec& m) {
    require_s_alpha(m, "undershoot_limits");
    const FluctConstants fc = constants(m);
    const ClaimFamily claim = m.claim;
    const double a = fc.alpha;
    const double lq = m.lambda / fc.q;

    LimitLaw u;
    u.name = "undershoot";
    u.atom_at_zero = 0.0;
    u.total_mass = 1.0 - fc.B;
    u.density = [claim, a, lq](double x) {
        if (x <= 0.0) return 0.0;
        return lq * claim.tilted_tail(a, x) * (1.0 - std::exp(-a * x));
    };
    u.tail = [claim, a, lq](double x) {
        if (x < 0.0) x = 0.0;
        return lq * (s_talpha(claim, a, x) - std::exp(-a * x) * t_cap_alpha(claim, a, x));
    };

    LimitLaw mu;
    mu.name = "max-undershoot";
    mu.atom_at_zero = 0.0;
    mu.total_mass = 1.0 - fc.B;
    mu.density = [claim, a, lq](double y) {
        if (y < 0.0) return 0.0;
        return lq * a * t_cap_alpha(claim, a, y);
    };
    mu.tail = [claim, a, lq](double y) {
        if (y < 0.0) y = 0.0;
        return lq * (s_talpha(claim, a, y) - t_cap_alpha(claim, a, y));
    };
    return {std::move(u), std::move(mu)};
}

void write_law_csv(const std::string& path, const LimitLaw& law,
                   const std::vector<double>& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << "x,atom,density,tail\n";
    char buf[160];
    for (double x : grid) {
        const int atom = (x == 0.0 && law.atom_at_zero > 0.0) ? 1 : 0;
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g\n", x, atom, law.density(x),
                      law.tail(x));
        out << buf;
    }
}

double ruin_time_limit_cdf(const ModelSpec& m, double t, const MgfEstimate& M) {
    if (t < 0.0) throw DomainError("ruin_time_limit_cdf: t must be >= 0");
    if (t == 0.0) return 0.0;
    if (M.t.empty() || std::abs(M.t.front()) > 1e-12)
        throw GridError("ruin_time_limit_cdf: running-sup grid must start at 0");
    if (t > M.t.back() + 1e-12)
        throw GridError("ruin_time_limit_cdf: running-sup grid does not cover t");
    const FluctConstants fc = constants(m);
    const double A = fc.A;
    // B A e^{-A t} int_0^t e^{A v} M(v) dv, exact on the piecewise-linear M.
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < M.t.size() && M.t[j] < t; ++j) {
        const double v0 = M.t[j];
        const double v1 = std::min(M.t[j + 1], t);
        const double m0 = M.m[j];
        const double slope = (M.m[j + 1] - M.m[j]) / (M.t[j + 1] - M.t[j]);
        const double m1 = m0 + slope * (v1 - v0);
        const double e0 = std::exp(A * (v0 - t));
        const double e1 = std::exp(A * (v1 - t));
        acc += (e1 * m1 - e0 * m0) / A - slope * (e1 - e0) / (A * A);
    }
    return fc.B * A * acc;
}

std::vector<std::string> edpf_transform_names() {
    return {"ltlt0", "ltltu", "ltjt1", "ltto", "pm1", "pm11", "gseg1", "gseg2"};
}

double edpf_limits(const ModelSpec& m, const std::string& transform, const EdpfParams& p) {
    const double a = m.require_alpha();
    const FluctConstants fc = constants(m);
    LadderExponents lad(m);
    std::string t;
    t.reserve(transform.size());
    for (char c : transform) t.push_back(static_cast<char>(std::tolower(c)));

    auto need = [](bool ok, const char* cond) {
        if (!ok) throw DomainError(std::string("edpf_limits: requires ") + cond);
    };
    const double nu = p.nu, zeta = p.zeta, eta = p.eta;

    if (t == "ltto" || (t == "ltjt1" && p.nu == p.zeta)) {
        need(zeta >= 0.0, "zeta >= 0");
        need(eta > -a, "eta > -alpha");
        // Factored so the zero-parameter collapse is exact in floating point.
        return (fc.A / (fc.A + zeta)) * (a / (a + eta)) * (lad.kappa(zeta, eta) / fc.q) *
               (lad.kappa(0.0, -a) / lad.kappa(zeta, -a));
    }
    if (t == "ltjt1") {
        need(nu >= 0.0 && zeta >= 0.0, "nu >= 0 and zeta >= 0");
        need(eta > -a, "eta > -alpha");
        const double kza = lad.kappa(zeta, -a);
        const double bracket = kza / (fc.A + zeta) + (lad.kappa(zeta, eta) - kza) / (fc.A + nu);
        return fc.C * a / ((a + eta) * lad.kappa(nu, -a)) * bracket;
    }
    if (t == "ltlt0") {
        need(nu >= 0.0 && zeta >= 0.0, "nu >= 0 and zeta >= 0");
        need(eta > -a, "eta > -alpha");
        need(p.lambda_pen > 0.0, "lambda_pen > 0");
        return fc.C * a * lad.kappa(zeta, -a) /
               ((a + eta) * (zeta + fc.A) * lad.kappa(nu, p.lambda_pen - a));
    }
    if (t == "ltltu") {
        need(nu >= 0.0 && zeta >= 0.0, "nu >= 0 and zeta >= 0");
        need(eta > -a, "eta > -alpha");
        need(p.lambda_pen > 0.0, "lambda_pen > 0");
        need(p.lambda_pen != a + eta, "lambda_pen != alpha + eta");
        return fc.C * a * (lad.kappa(zeta, p.lambda_pen - a) - lad.kappa(zeta, eta)) /
               ((fc.A + nu) * (p.lambda_pen - a - eta) * lad.kappa(nu, -a));
    }
    if (t == "pm1") {
        need(p.lambda_pen > 0.0, "lambda_pen > 0");
        return fc.B * lad.kappa(0.0, -a) / lad.kappa(0.0, p.lambda_pen - a);
    }
    if (t == "pm11") {
        need(p.lambda_pen > 0.0, "lambda_pen > 0");
        need(p.lambda_pen != a, "lambda_pen != alpha");
        return a * (lad.kappa(0.0, p.lambda_pen - a) - fc.q) / ((p.lambda_pen - a) * fc.q);
    }
    if (t == "gseg1" || t == "gseg2") {
        const double th = p.theta_pen;
        need(eta > -a, "eta > -alpha");
        need(th > 0.0 && th < a, "0 < theta_pen < alpha");
        need(th - eta < a, "theta_pen - eta < alpha");
        if (t == "gseg1") {
            need(nu >= 0.0 && zeta >= 0.0, "nu >= 0 and zeta >= 0");
            return fc.C * a /
                   ((a + eta) * lad.kappa(nu, th - a) * lad.kappa_hat(zeta, a - th));
        }
        need(zeta >= 0.0, "zeta >= 0");
        return fc.C * a / ((a + eta) * (zeta - m.psi(a - th)));
    }
    throw DomainError("edpf_limits: unknown transform '" + transform + "' (known: " +
                      [] {
                          std::string s;
                          for (const auto& n : edpf_transform_names()) {
                              if (!s.empty()) s += ", ";
                              s += n;
                          }
                          return s;
                      }() +
                      ")");
}

DecompositionSampler::DecompositionSampler(const ModelSpec& m, const RenewalTable& table)
    : m_(&m), table_(&table), fc_(levyruin::constants(m)),
      tilted_(esscher_tilt(m, m.require_alpha())) {
    require_s_alpha(m, "decomposition_sampler");
    if (!table.has_tilt)
        throw UnsupportedModel("decomposition_sampler: renewal table lacks the tilted grid");
    runmax_.resize(table.psi_alpha.size());
    double run = table.psi_alpha.back();
    for (std::size_t j = table.psi_alpha.size(); j-- > 0;) {
        run = std::max(run, table.psi_alpha[j]);
        runmax_[j] = run;
    }
}

double DecompositionSampler::psi_at(double depth) const { return table_->psi_alpha_at(depth); }

double DecompositionSampler::runmax_psi(double depth) const {
    if (depth <= 0.0) return runmax_.front();
    const double hh = table_->h;
    const auto j = static_cast<std::size_t>(depth / hh);
    if (j >= runmax_.size()) return psi_at(depth);
    return runmax_[j];
}

double DecompositionSampler::cum_psi(double depth) const { return table_->cum_psi_at(depth); }

double DecompositionSampler::sample_w0(Rng& rng) const {
    const double neg = fc_.B * table_->cum_psi_total();
    const double total = fc_.B + neg;
    const double u = rng.uniform01() * total;
    if (u < fc_.B) return rng.exponential(fc_.alpha);
    const double c = (u - fc_.B) / fc_.B;
    return -table_->inv_cum_psi(c);
}

double DecompositionSampler::w0_total_mass() const {
    return fc_.B * (1.0 + table_->cum_psi_total());
}

double DecompositionSampler::w0_cdf(double z) const {
    const double I = table_->cum_psi_total();
    const double total = fc_.B * (1.0 + I);
    if (z >= 0.0) return (fc_.B * I + fc_.B * (1.0 - std::exp(-fc_.alpha * z))) / total;
    return fc_.B * (I - table_->cum_psi_at(-z)) / total;
}

// Conditional time to the next claim from depth d: the crossing-conditioned
// chain has survival S(t) = e^{-(lambda+alpha r)t} Psi(d+rt)/Psi(d), solved
// for S(t) = U by bracketed bisection on the log scale.
double DecompositionSampler::draw_jump_time(double depth, Rng& rng) const {
    const double lam = m_->lambda;
    const double r = m_->premium;
    const double a = fc_.alpha;
    const double w = -std::log(rng.uniform01());
    const double lp0 = std::log(psi_at(depth));
    auto f = [&](double t) {
        return (lam + a * r) * t + lp0 - std::log(psi_at(depth + r * t));
    };
    double hi = w / (lam + a * r);
    int guard = 0;
    while (f(hi) < w) {
        hi *= 2.0;
        if (++guard > 200)
            throw ConvergenceError("decomposition_sampler: jump-time bracket failed");
    }
    double lo = 0.0;
    for (int it = 0; it < 64; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < w ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

DecompositionSample DecompositionSampler::sample(Rng& rng) const {
    DecompositionSample s;
    s.rho = rng.exponential(fc_.A);

    // Z: the tilted process run on [0, rho).
    {
        double t = 0.0, z = 0.0, zbar = 0.0, g = 0.0;
        for (;;) {
            const double dt = rng.exponential(tilted_.lambda);
            if (t + dt >= s.rho) {
                z -= tilted_.premium * (s.rho - t);
                break;
            }
            t += dt;
            z -= tilted_.premium * dt;
            z += tilted_.claim.sample(rng);
            if (z > zbar) {
                zbar = z;
                g = t;
            }
        }
        s.z_prejump = z;
        s.z_max = zbar;
        s.z_g_prior = g;
    }

    s.w0 = sample_w0(rng);
    if (s.w0 > 0.0) {
        s.w_tau = 0.0;
        s.w_g_prior = 0.0;
        s.w_end = s.w0;
        s.w_prev = s.w0;
        s.w_max = s.w0;
        return s;
    }

    // W: the crossing-conditioned continuation from w0 <= 0, simulated under
    // its exact h-transform dynamics (h = qVbar). The jump kernel from depth
    // d splits into the crossing part Fbar_U(d) and the continuation part
    // int_0^d f_U(v) qVbar(d-v) dv; on the tilted scale these are t_alpha(d)
    // and J(d) below, and the continuation density (1+v)^{-p} Psi(d-v) is
    // drawn by composite rejection against a Pareto piece near v=0 and a
    // Psi-distributed piece near v=d.
    const ClaimFamily& claim = m_->claim;
    const double a = fc_.alpha;
    const double r = m_->premium;
    const double K = claim.norm_const();
    const double p = claim.power();
    double d = -s.w0;
    double t = 0.0, min_depth = d, g = 0.0;
    for (int jump = 0; jump < 1000000; ++jump) {
        const double dt = draw_jump_time(d, rng);
        t += dt;
        d += r * dt;

        const double ta = claim.tilted_tail(a, d);
        const double m2 = 0.5 * d;
        const double head_a = (1.0 - std::pow(1.0 + m2, 1.0 - p)) / (p - 1.0);
        const double wa = K * runmax_psi(m2) * head_a;
        const double wb = K * std::pow(1.0 + m2, -p) * cum_psi(m2) / a;
        double J = 0.0;
        if (d > 0.0 && wa + wb > 0.0) {
            auto integrand = [&](double v) {
                return K * std::pow(1.0 + v, -p) * psi_at(d - v);
            };
            J = integrate(integrand, 0.0, d, 1e-8 * (wa + wb) + 1e-300);
        }
        if (rng.uniform01() * (ta + J) < ta) {
            // Crossing jump: v from f_U conditioned on v > d.
            double v;
            for (;;) {
                v = d + rng.exponential(a);
                const double acc = std::pow((1.0 + d) / (1.0 + v), p);
                if (rng.uniform01() < acc) break;
            }
            s.w_tau = t;
            s.w_g_prior = g;
            s.w_prev = -d;
            s.w_end = v - d;
            s.w_max = -min_depth;
            return s;
        }
        // Continuation jump: v on (0, d) with density prop to (1+v)^{-p} Psi(d-v).
        double v = 0.0;
        for (int tries = 0;; ++tries) {
            if (tries > 100000)
                throw BudgetError("decomposition_sampler: continuation rejection exhausted");
            if (rng.uniform01() * (wa + wb) < wa) {
                const double c = rng.uniform01() * (1.0 - std::pow(1.0 + m2, 1.0 - p));
                v = std::pow(1.0 - c, -1.0 / (p - 1.0)) - 1.0;
                if (rng.uniform01() * runmax_psi(m2) < psi_at(d - v)) break;
            } else {
                const double c = rng.uniform01() * cum_psi(m2);
                const double wdepth = table_->inv_cum_psi(c);
                v = d - wdepth;
                if (rng.uniform01() < std::pow((1.0 + m2) / (1.0 + v), p)) break;
            }
        }
        d -= v;
        if (d < min_depth) {
            min_depth = d;
            g = t;
        }
    }
    throw BudgetError("decomposition_sampler: continuation failed to cross within budget");
}

std::vector<DecompositionSample> decomposition_ensemble(const DecompositionSampler& sampler,
                                                        std::size_t n,
                                                        std::uint64_t master_seed,
                                                        int workers) {
    workers = clamp_workers(workers);
    const auto w = static_cast<std::size_t>(workers);
    std::vector<std::vector<DecompositionSample>> buf(w);
    run_workers(w, [&](std::size_t s) {
        Rng rng(master_seed, s);
        const std::size_t quota = n / w + (s < n % w ? 1 : 0);
        buf[s].reserve(quota);
        for (std::size_t i = 0; i < quota; ++i) {
            DecompositionSample d = sampler.sample(rng);
            d.stream_id = static_cast<std::uint32_t>(s);
            buf[s].push_back(d);
        }
    });
    std::vector<DecompositionSample> out;
    out.reserve(n);
    for (auto& b : buf) out.insert(out.end(), b.begin(), b.end());
    return out;
}

void write_decomposition_csv(const std::string& path,
                             const std::vector<DecompositionSample>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << "stream_id,ruined,tau,g_prior,tau_minus_g,overshoot,undershoot,max_undershoot,"
           "xbar_prior,jump_time,w0\n";
    const double inf = std::numeric_limits<double>::infinity();
    char buf[380];
    for (const auto& s : samples) {
        const bool esc = s.w0 > 0.0;
        const double gp = esc ? s.z_g_prior : s.rho + s.w_g_prior;
        const double tmg = esc ? s.rho - s.z_g_prior : s.w_tau - s.w_g_prior;
        std::snprintf(buf, sizeof buf,
                      "%u,1,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      s.stream_id, s.ruin_time(), gp, tmg, s.overshoot(),
                      esc ? inf : -s.w_prev, esc ? inf : -s.w_max, esc ? s.z_max : inf,
                      s.rho, s.w0);
        out << buf;
    }
}

JointJumpLawReport joint_jump_law_check(const DecompositionSampler& sampler,
                                        const std::vector<DecompositionSample>& samples,
                                        std::size_t dcor_subsample) {
    if (samples.empty()) throw EmptyInput("joint_jump_law_check: no samples");
    JointJumpLawReport rep;
    rep.n = samples.size();
    const double A = sampler.constants().A;
    std::vector<double> rho, z, w0;
    rho.reserve(samples.size());
    for (const auto& s : samples) {
        rho.push_back(s.rho);
        z.push_back(s.z_prejump);
        w0.push_back(s.w0);
    }
    rep.ks_rho = ks_vs_cdf(rho, [A](double t) { return t <= 0.0 ? 0.0 : 1.0 - std::exp(-A * t); });
    rep.ks_w0 = ks_vs_cdf(w0, [&](double x) { return sampler.w0_cdf(x); });
    const std::size_t msub = std::min(dcor_subsample, samples.size());
    rep.dcor_subsample = msub;
    std::vector<double> rs(rho.begin(), rho.begin() + msub);
    std::vector<double> zs(z.begin(), z.begin() + msub);
    std::vector<double> ws(w0.begin(), w0.begin() + msub);
    rep.dcor_rho_z = distance_correlation_sq(rs, zs);
    rep.dcor_rho_w0 = distance_correlation_sq(rs, ws);
    rep.dcor_z_w0 = distance_correlation_sq(zs, ws);
    return rep;
}

} // namespace levyruin
