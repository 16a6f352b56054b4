#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "levyruin/fluctuation.hpp"
#include "levyruin/model.hpp"
#include "levyruin/rng.hpp"
#include "reference_models.hpp"

#include <nlohmann/json.hpp>

// Property-style checks over randomly generated admissible models. The
// generator draws parameters from wide ranges and keeps the draws that pass
// admissibility, so the invariants get exercised far from the two reference
// models.
using namespace levyruin;
using Catch::Approx;

namespace {

struct ModelGen {
    Rng rng{987654321, 0};

    double uniform(double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

    // Draws until admissible; p > 2 keeps every moment the machinery touches
    // finite at the boundary.
    ModelSpec heavy() {
        for (;;) {
            const double alpha = uniform(0.4, 2.5);
            const double p = uniform(2.2, 5.0);
            const double lambda = uniform(0.3, 2.0);
            nlohmann::json cfg{
                {"claim", {{"variant", "poly_tilted_exp"}, {"alpha", alpha}, {"p", p}}},
                {"lambda", lambda},
                {"premium", 1.0},
                {"sigma", 0.0}};
            // pick a premium that makes psi(alpha) < 0 with some slack
            ModelSpec probe{ClaimFamily::poly_tilted_exp(alpha, p), lambda, 1.0, 0.0};
            const double need = lambda * (probe.claim.mgf(alpha) - 1.0) / alpha;
            cfg["premium"] = need * uniform(1.15, 2.5);
            try {
                return build_model(cfg);
            } catch (const AdmissibilityError&) {
            }
        }
    }
};

} // namespace

TEST_CASE("random admissible models satisfy the ladder identities") {
    ModelGen gen;
    for (int rep = 0; rep < 12; ++rep) {
        const ModelSpec m = gen.heavy();
        const double a = m.alpha;
        LadderExponents lad(m);
        const FluctConstants fc = constants(m);
        CHECK(fc.A > 0.0);
        CHECK(fc.B > 0.0);
        CHECK(fc.C == fc.A * fc.B);
        CHECK(fc.q > 0.0);

        // Wiener-Hopf identity on random (a, z) points
        for (int k = 0; k < 6; ++k) {
            const double av = gen.uniform(0.0, 3.0);
            const double z = gen.uniform(0.0, a);
            const double rhs = av - m.psi(z);
            const double lhs = lad.kappa(av, -z) * lad.kappa_hat(av, z);
            CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(rhs)));
        }
        // kappa positive on the admissible strip
        for (double av : {0.0, 0.1, 1.0, 10.0}) CHECK(lad.kappa(av, -a) > 0.0);
        // Phi_hat solves its equation and is monotone
        double prev = -1.0;
        for (double av : {0.0, 0.3, 1.1, 2.7}) {
            const double root = lad.phi_hat(av);
            CHECK(root > prev);
            prev = root;
            CHECK(std::abs(m.psi(-root) - av) <= 1e-9 * (1.0 + av));
        }
        // Esscher tilt consistency at a random interior point
        const double th = gen.uniform(0.2 * a, a);
        const ModelSpec t = esscher_tilt(m, th);
        for (double s : {-0.8, -0.2, 0.0}) {
            CHECK(t.psi(s) == Approx(m.psi(th + s) - m.psi(th)).margin(1e-9));
        }
    }
}

TEST_CASE("random models: renewal table mass identities") {
    ModelGen gen;
    for (int rep = 0; rep < 3; ++rep) {
        const ModelSpec m = gen.heavy();
        RenewalOptions opt;
        opt.h = 0.01;
        opt.tilt_tail_tol = 1e-4; // keep the property run quick
        const RenewalTable table = renewal_table(m, opt);
        const FluctConstants fc = constants(m);
        CHECK(table.qvbar.front() ==
              Approx(m.lambda * m.claim.mean() / m.premium).margin(1e-7));
        CHECK(table.qvbar.back() <= opt.tol);
        CHECK(std::abs(c2_normalization(table, fc) - 1.0) <= 2e-3);
        for (std::size_t j = 1; j < table.qvbar.size(); ++j)
            CHECK(table.qvbar[j] <= table.qvbar[j - 1] + 1e-14);
    }
}

TEST_CASE("claim sampler agreement with the analytic tail at random parameters") {
    ModelGen gen;
    for (int rep = 0; rep < 3; ++rep) {
        const ModelSpec m = gen.heavy();
        Rng rng(55 + static_cast<std::uint64_t>(rep), 1);
        const int n = 20000;
        int above = 0;
        const double x0 = m.claim.mean(); // threshold inside the bulk
        for (int i = 0; i < n; ++i) above += m.claim.sample(rng) > x0 ? 1 : 0;
        const double p_hat = static_cast<double>(above) / n;
        const double p_true = m.claim.tail(x0);
        const double se = std::sqrt(p_true * (1.0 - p_true) / n);
        CHECK(std::abs(p_hat - p_true) <= 4.0 * se);
    }
}
