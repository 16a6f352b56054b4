#include "levyruin/simulate.hpp"

#include "levyruin/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace levyruin {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void fill_not_ruined(RuinPathSample& s) {
    s.ruined = false;
    s.tau = s.g_prior = s.tau_minus_g = kNaN;
    s.overshoot = s.undershoot = s.max_undershoot = s.xbar_prior = kNaN;
}

// sigma = 0: exact event-driven walk. Position drifts down linearly between
// claims, so the hopeless test and all record fields are exact at jump times.
RuinPathSample run_exact(const ModelSpec& m, double u, Rng& rng, const HorizonPolicy& pol,
                         std::uint64_t& events) {
    const double lam = m.lambda;
    const double r = m.premium;
    const double floor_pos = -pol.hopeless_cutoff;
    const ClaimFamily& claim = m.claim;

    RuinPathSample s;
    double t = 0.0, x = 0.0, xbar = 0.0, g = 0.0;
    for (std::uint64_t ev = 0;; ++ev) {
        if (ev >= pol.event_budget)
            throw PolicyError("first_passage: event budget exhausted before termination");
        ++events;
        const double dt = rng.exponential(lam);
        t += dt;
        x -= r * dt;
        if (x < floor_pos) {
            fill_not_ruined(s);
            return s;
        }
        const double c = claim.sample(rng);
        const double xpre = x;
        x += c;
        if (x > u) {
            s.ruined = true;
            s.tau = t;
            s.g_prior = g;
            s.tau_minus_g = t - g;
            s.overshoot = x - u;
            s.undershoot = u - xpre;
            s.max_undershoot = u - xbar;
            s.xbar_prior = xbar;
            return s;
        }
        if (x > xbar) {
            xbar = x;
            g = t;
        }
    }
}

// sigma > 0: Euler skeleton with Brownian-bridge crossing and bridge-maximum
// sampling per sub-step. Approximate by construction; crossing times are
// placed at the sub-step midpoint. Claim jumps stay exact.
RuinPathSample run_diffusive(const ModelSpec& m, double u, Rng& rng, const HorizonPolicy& pol,
                             std::uint64_t& events) {
    const double lam = m.lambda;
    const double r = m.premium;
    const double sig = m.sigma;
    const double delta = 1e-3;
    const double floor_pos = -pol.hopeless_cutoff;
    const ClaimFamily& claim = m.claim;

    RuinPathSample s;
    double t = 0.0, x = 0.0, xbar = 0.0, g = 0.0;
    for (std::uint64_t ev = 0;; ++ev) {
        if (ev >= pol.event_budget)
            throw PolicyError("first_passage: event budget exhausted before termination");
        ++events;
        const double dt = rng.exponential(lam);
        // Diffuse from t to t+dt in sub-steps.
        double remaining = dt;
        bool terminated = false;
        while (remaining > 0.0) {
            const double step = std::min(delta, remaining);
            remaining -= step;
            const double sdt = sig * std::sqrt(step);
            const double x1 = x - r * step + sdt * rng.normal();
            // Bridge maximum over the sub-step.
            const double lu = std::log(rng.uniform01());
            const double diff = x1 - x;
            const double msub =
                0.5 * (x + x1 + std::sqrt(diff * diff - 2.0 * sig * sig * step * lu));
            t += step;
            if (msub > u) {
                s.ruined = true;
                s.tau = t - 0.5 * step;
                s.g_prior = g;
                s.tau_minus_g = s.tau - g;
                s.overshoot = 0.0; // creeping: continuous crossing
                s.undershoot = u - std::max(x, x1);
                s.max_undershoot = std::max(0.0, u - xbar);
                s.xbar_prior = xbar;
                return s;
            }
            if (msub > xbar) {
                xbar = msub;
                g = t - 0.5 * step;
            }
            x = x1;
            if (x < floor_pos) {
                terminated = true;
                break;
            }
        }
        if (terminated) {
            fill_not_ruined(s);
            return s;
        }
        const double c = claim.sample(rng);
        const double xpre = x;
        x += c;
        if (x > u) {
            s.ruined = true;
            s.tau = t;
            s.g_prior = g;
            s.tau_minus_g = t - g;
            s.overshoot = x - u;
            s.undershoot = u - xpre;
            s.max_undershoot = u - xbar;
            s.xbar_prior = xbar;
            return s;
        }
        if (x > xbar) {
            xbar = x;
            g = t;
        }
    }
}

VariableSummary summarize(const std::vector<RuinPathSample>& v, double RuinPathSample::*f) {
    VariableSummary s;
    double sum = 0.0, sumsq = 0.0;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    for (const auto& r : v) {
        if (!r.ruined) continue;
        const double x = r.*f;
        ++s.n;
        sum += x;
        sumsq += x * x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    if (s.n > 0) {
        s.mean = sum / static_cast<double>(s.n);
        const double var = std::max(0.0, sumsq / static_cast<double>(s.n) - s.mean * s.mean);
        s.sd = std::sqrt(var);
    } else {
        s.min = s.max = 0.0;
    }
    return s;
}

} // namespace

HorizonPolicy default_policy(const ModelSpec& m) {
    const double a = m.alpha_declared ? m.alpha : m.mgf_boundary();
    return HorizonPolicy{20.0 / a, 100000000};
}

RuinPathSample first_passage(const ModelSpec& m, double u, Rng& rng,
                             const HorizonPolicy& policy) {
    if (u <= 0.0) throw DomainError("first_passage: level u must be > 0");
    if (policy.hopeless_cutoff <= 0.0)
        throw DomainError("first_passage: hopeless cutoff must be > 0");
    std::uint64_t events = 0;
    return m.sigma == 0.0 ? run_exact(m, u, rng, policy, events)
                          : run_diffusive(m, u, rng, policy, events);
}

std::pair<std::vector<RuinPathSample>, EnsembleReport> conditioned_ensemble(
    const ModelSpec& m, const RenewalTable& table, double u, std::size_t n_target,
    double cutoff, std::uint64_t master_seed, int workers, std::uint64_t event_budget) {
    if (u <= 0.0) throw DomainError("conditioned_ensemble: level u must be > 0");
    workers = clamp_workers(workers);
    const auto w = static_cast<std::size_t>(workers);
    const std::uint64_t budget_share = event_budget / w;

    std::vector<std::vector<RuinPathSample>> buf(w);
    std::vector<std::uint64_t> attempts(w, 0), events(w, 0);
    std::vector<char> blown(w, 0);
    HorizonPolicy pol{cutoff, event_budget};

    auto work = [&](std::size_t s) {
        Rng rng(master_seed, s);
        const std::size_t quota = n_target / w + (s < n_target % w ? 1 : 0);
        buf[s].reserve(quota);
        while (buf[s].size() < quota) {
            if (events[s] >= budget_share) {
                blown[s] = 1;
                return;
            }
            ++attempts[s];
            RuinPathSample r = m.sigma == 0.0 ? run_exact(m, u, rng, pol, events[s])
                                              : run_diffusive(m, u, rng, pol, events[s]);
            if (r.ruined) {
                r.stream_id = static_cast<std::uint32_t>(s);
                buf[s].push_back(r);
            }
        }
    };
    run_workers(w, work);

    std::vector<RuinPathSample> samples;
    EnsembleReport rep;
    for (std::size_t s = 0; s < w; ++s) {
        samples.insert(samples.end(), buf[s].begin(), buf[s].end());
        rep.n_attempted += attempts[s];
        rep.event_count += events[s];
    }
    rep.n_ruined = samples.size();
    rep.u = u;
    rep.cutoff = cutoff;
    rep.master_seed = master_seed;
    rep.workers = workers;
    rep.bias_bound = table.qvbar_at(u + cutoff) / table.qvbar_at(u);
    rep.tau = summarize(samples, &RuinPathSample::tau);
    rep.overshoot = summarize(samples, &RuinPathSample::overshoot);
    rep.undershoot = summarize(samples, &RuinPathSample::undershoot);
    rep.max_undershoot = summarize(samples, &RuinPathSample::max_undershoot);
    for (std::size_t s = 0; s < w; ++s) {
        if (blown[s]) {
            std::ostringstream os;
            os << "conditioned_ensemble: event budget exhausted with " << rep.n_ruined
               << " of " << n_target << " ruined paths collected";
            throw BudgetError(os.str());
        }
    }
    return {std::move(samples), rep};
}

std::pair<std::vector<RuinPathSample>, EnsembleReport> simulate_ensemble(
    const ModelSpec& m, const RenewalTable* table_for_bias, double u, std::size_t n_attempts,
    double cutoff, std::uint64_t master_seed, int workers, std::uint64_t event_budget) {
    if (u <= 0.0) throw DomainError("simulate_ensemble: level u must be > 0");
    workers = clamp_workers(workers);
    const auto w = static_cast<std::size_t>(workers);

    std::vector<std::vector<RuinPathSample>> buf(w);
    std::vector<std::uint64_t> events(w, 0);
    HorizonPolicy pol{cutoff, event_budget};

    auto work = [&](std::size_t s) {
        Rng rng(master_seed, s);
        const std::size_t quota = n_attempts / w + (s < n_attempts % w ? 1 : 0);
        buf[s].reserve(quota);
        for (std::size_t i = 0; i < quota; ++i) {
            RuinPathSample r = m.sigma == 0.0 ? run_exact(m, u, rng, pol, events[s])
                                              : run_diffusive(m, u, rng, pol, events[s]);
            r.stream_id = static_cast<std::uint32_t>(s);
            buf[s].push_back(r);
        }
    };
    run_workers(w, work);

    std::vector<RuinPathSample> samples;
    EnsembleReport rep;
    for (std::size_t s = 0; s < w; ++s) {
        samples.insert(samples.end(), buf[s].begin(), buf[s].end());
        rep.event_count += events[s];
    }
    rep.n_attempted = n_attempts;
    for (const auto& r : samples) rep.n_ruined += r.ruined ? 1 : 0;
    rep.u = u;
    rep.cutoff = cutoff;
    rep.master_seed = master_seed;
    rep.workers = workers;
    if (table_for_bias != nullptr)
        rep.bias_bound = table_for_bias->qvbar_at(u + cutoff) / table_for_bias->qvbar_at(u);
    rep.tau = summarize(samples, &RuinPathSample::tau);
    rep.overshoot = summarize(samples, &RuinPathSample::overshoot);
    rep.undershoot = summarize(samples, &RuinPathSample::undershoot);
    rep.max_undershoot = summarize(samples, &RuinPathSample::max_undershoot);
    return {std::move(samples), rep};
}

MgfEstimate running_sup_mgf(const ModelSpec& m, double alpha, const std::vector<double>& t_grid,
                            std::size_t n_paths, std::uint64_t master_seed, int workers) {
    if (m.sigma != 0.0) throw UnsupportedModel("running_sup_mgf: needs sigma = 0");
    if (t_grid.empty()) throw EmptyInput("running_sup_mgf: empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] <= t_grid[i - 1]) throw DomainError("running_sup_mgf: grid not increasing");
    workers = clamp_workers(workers);
    const auto w = static_cast<std::size_t>(workers);
    const std::size_t nt = t_grid.size();
    const double t_max = t_grid.back();

    std::vector<std::vector<double>> sums(w, std::vector<double>(nt, 0.0));
    std::vector<std::vector<double>> sumsqs(w, std::vector<double>(nt, 0.0));

    auto work = [&](std::size_t s) {
        Rng rng(master_seed, s);
        const std::size_t quota = n_paths / w + (s < n_paths % w ? 1 : 0);
        auto& sum = sums[s];
        auto& sumsq = sumsqs[s];
        for (std::size_t i = 0; i < quota; ++i) {
            double t = 0.0, x = 0.0, xbar = 0.0;
            std::size_t k = 0;
            while (k < nt) {
                const double dt = rng.exponential(m.lambda);
                const double t_next = t + dt;
                while (k < nt && t_grid[k] < t_next) {
                    const double v = std::exp(alpha * xbar);
                    sum[k] += v;
                    sumsq[k] += v * v;
                    ++k;
                }
                if (k >= nt) break;
                t = t_next;
                x -= m.premium * dt;
                x += m.claim.sample(rng);
                if (x > xbar) xbar = x;
            }
        }
    };
    run_workers(w, work);

    MgfEstimate est;
    est.t = t_grid;
    est.m.resize(nt);
    est.se.resize(nt);
    const auto n = static_cast<double>(n_paths);
    for (std::size_t k = 0; k < nt; ++k) {
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t s = 0; s < w; ++s) {
            sum += sums[s][k];
            sumsq += sumsqs[s][k];
        }
        est.m[k] = sum / n;
        const double var = std::max(0.0, sumsq / n - est.m[k] * est.m[k]);
        est.se[k] = std::sqrt(var / n);
    }
    return est;
}

MgfLimit running_sup_mgf_limit(const ModelSpec& m, const RenewalTable& table, double horizon,
                               double x0, std::size_t n_paths, std::uint64_t master_seed,
                               int workers) {
    if (m.sigma != 0.0) throw UnsupportedModel("running_sup_mgf_limit: needs sigma = 0");
    const double alpha = m.require_alpha();
    if (!table.has_tilt)
        throw UnsupportedModel("running_sup_mgf_limit: renewal table lacks the tilted grid");
    workers = clamp_workers(workers);
    const auto w = static_cast<std::size_t>(workers);
    const double cap = std::exp(alpha * x0);

    std::vector<double> sums(w, 0.0), sumsqs(w, 0.0);
    run_workers(w, [&](std::size_t s) {
        Rng rng(master_seed, s);
        const std::size_t quota = n_paths / w + (s < n_paths % w ? 1 : 0);
        for (std::size_t i = 0; i < quota; ++i) {
            double t = 0.0, x = 0.0, xbar = 0.0;
            while (t < horizon && xbar <= x0) {
                const double dt = rng.exponential(m.lambda);
                t += dt;
                if (t >= horizon) break;
                x -= m.premium * dt;
                x += m.claim.sample(rng);
                if (x > xbar) xbar = x;
            }
            const double v = std::min(std::exp(alpha * xbar), cap);
            sums[s] += v;
            sumsqs[s] += v * v;
        }
    });
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t s = 0; s < w; ++s) {
        sum += sums[s];
        sumsq += sumsqs[s];
    }
    MgfLimit out;
    const auto n = static_cast<double>(n_paths);
    const double mean = sum / n;
    out.tail_exact = table.cum_psi_total() - table.cum_psi_at(x0);
    out.value = mean + out.tail_exact;
    out.se = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
    return out;
}

TiltedEstimate tilted_sample(const ModelSpec& m, double theta, TiltFunctional functional,
                             double param, std::size_t n, std::uint64_t master_seed,
                             int workers) {
    const ModelSpec tilted = esscher_tilt(m, theta);
    const double psi_theta = m.psi(theta);
    if (functional == TiltFunctional::RuinIndicator && tilted.mean_drift() <= 0.0)
        throw PolicyError("tilted_sample: ruin-indicator needs an upward-drifting tilt");
    if (functional == TiltFunctional::ExpAlphaXt) m.require_alpha();
    workers = clamp_workers(workers);
    const auto w = static_cast<std::size_t>(workers);

    std::vector<double> fw_sum(w, 0.0), fw_sumsq(w, 0.0), w_sum(w, 0.0);

    auto work = [&](std::size_t s) {
        Rng rng(master_seed, s);
        const std::size_t quota = n / w + (s < n % w ? 1 : 0);
        for (std::size_t i = 0; i < quota; ++i) {
            double t = 0.0, x = 0.0;
            if (functional == TiltFunctional::RuinIndicator) {
                const double u = param;
                for (std::uint64_t ev = 0;; ++ev) {
                    if (ev >= 100000000ull)
                        throw PolicyError("tilted_sample: path exceeded the event budget");
                    const double dt = rng.exponential(tilted.lambda);
                    t += dt;
                    x -= tilted.premium * dt;
                    x += tilted.claim.sample(rng);
                    if (x > u) break;
                }
            } else {
                const double horizon = param;
                for (;;) {
                    const double dt = rng.exponential(tilted.lambda);
                    if (t + dt > horizon) {
                        x -= tilted.premium * (horizon - t);
                        t = horizon;
                        break;
                    }
                    t += dt;
                    x -= tilted.premium * dt;
                    x += tilted.claim.sample(rng);
                }
            }
            const double weight = std::exp(-theta * x + psi_theta * t);
            double f = 1.0;
            if (functional == TiltFunctional::ExpAlphaXt) f = std::exp(m.alpha * x);
            const double fw = f * weight;
            fw_sum[s] += fw;
            fw_sumsq[s] += fw * fw;
            w_sum[s] += weight;
        }
    };
    run_workers(w, work);

    double fw = 0.0, fw2 = 0.0, wsum = 0.0;
    for (std::size_t s = 0; s < w; ++s) {
        fw += fw_sum[s];
        fw2 += fw_sumsq[s];
        wsum += w_sum[s];
    }
    TiltedEstimate est;
    est.n = n;
    const auto dn = static_cast<double>(n);
    est.value = fw / dn;
    est.weight_mean = wsum / dn;
    est.self_normalized = wsum > 0.0 ? fw / wsum : 0.0;
    const double var = std::max(0.0, fw2 / dn - est.value * est.value);
    est.se = std::sqrt(var / dn);
    return est;
}

void write_samples_csv(const std::string& path, const std::vector<RuinPathSample>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << "stream_id,ruined,tau,g_prior,tau_minus_g,overshoot,undershoot,max_undershoot,"
           "xbar_prior\n";
    char buf[320];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%u,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      s.stream_id, s.ruined ? 1 : 0, s.tau, s.g_prior, s.tau_minus_g,
                      s.overshoot, s.undershoot, s.max_undershoot, s.xbar_prior);
        out << buf;
    }
}

} // namespace levyruin
