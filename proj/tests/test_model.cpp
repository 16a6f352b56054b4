#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "levyruin/model.hpp"
#include "levyruin/quadrature.hpp"
#include "levyruin/rng.hpp"
#include "levyruin/stats.hpp"
#include "reference_models.hpp"

using namespace levyruin;
using Catch::Approx;
namespace rm = refmodels;

TEST_CASE("poly-tilted-exp normalization and moments match the quadrature oracle") {
    const ModelSpec m0 = rm::m0();
    const ClaimFamily& c = m0.claim;
    CHECK(c.norm_const() == Approx(rm::kM0_K).epsilon(1e-10));
    CHECK(c.mean() == Approx(rm::kM0_EU).epsilon(1e-10));
    CHECK(c.mgf(1.0) == Approx(rm::kM0_delta_alpha).epsilon(1e-12)); // K/(p-1), exact branch
    // Density integrates to one.
    const double total = integrate_exp_tail([&](double x) { return c.density(x); }, 0.0, 1.0,
                                            rm::kM0_K, 1e-12);
    CHECK(total == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("m1 laplace exponent closed forms") {
    const ModelSpec m1 = rm::m1();
    CHECK(m1.psi(0.0) == 0.0);
    CHECK(m1.psi(-1.0) == Approx(1.5).epsilon(1e-14));
    CHECK(m1.psi_prime(0.0) == Approx(-1.0).epsilon(1e-14)); // q = 1
    const FluctConstants fc = constants(m1);
    CHECK(fc.q == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("m0 constants against the oracle") {
    const ModelSpec m0 = rm::m0();
    CHECK(m0.psi(1.0) == Approx(-rm::kM0_A).epsilon(1e-10));
    CHECK(m0.psi(0.5) == Approx(rm::kM0_psi_half).epsilon(1e-10));
    const FluctConstants fc = constants(m0);
    CHECK(fc.q == Approx(rm::kM0_q).epsilon(1e-10));
    CHECK(fc.A == Approx(rm::kM0_A).epsilon(1e-10));
    CHECK(fc.B == Approx(rm::kM0_B).epsilon(1e-10));
    CHECK(fc.C == Approx(rm::kM0_C).epsilon(1e-10));
    CHECK(fc.d_H == 0.0);
    CHECK(fc.C == fc.A * fc.B); // exact by definition
}

TEST_CASE("condition c1 is enforced") {
    // premium too small: psi(alpha) = lambda(K/2 - 1) - 0.3 > 0.
    auto cfg = rm::m0_config();
    cfg["premium"] = 0.3;
    CHECK_THROWS_AS(build_model(cfg), AdmissibilityError);
    // boundary case: M1 with alpha = 0.5 has psi(alpha) = 0 exactly.
    auto cfg1 = rm::m1_config();
    cfg1["claim"]["alpha"] = 0.5;
    CHECK_THROWS_AS(build_model(cfg1), AdmissibilityError);
    // net drift must be negative.
    auto cfg2 = rm::m1_config();
    cfg2["premium"] = 0.9;
    cfg2["claim"].erase("alpha");
    CHECK_THROWS_AS(build_model(cfg2), AdmissibilityError);
}

TEST_CASE("config schema rejects unknown and missing keys") {
    auto cfg = rm::m0_config();
    cfg["extra"] = 1.0;
    CHECK_THROWS_AS(build_model(cfg), ConfigError);
    cfg = rm::m0_config();
    cfg["claim"]["mu"] = 1.0;
    CHECK_THROWS_AS(build_model(cfg), ConfigError);
    cfg = rm::m0_config();
    cfg["claim"].erase("p");
    CHECK_THROWS_AS(build_model(cfg), ConfigError);
    cfg = rm::m1_config();
    cfg["claim"].erase("mu");
    CHECK_THROWS_AS(build_model(cfg), ConfigError);
}

TEST_CASE("psi is convex with negative drift at zero") {
    const ModelSpec m0 = rm::m0();
    CHECK(m0.psi_prime(0.0) < 0.0);
    CHECK(m0.mean_drift() == Approx(m0.psi_prime(0.0)).epsilon(1e-12));
    double prev_slope = -1e300;
    for (double th = -5.0; th <= 1.0; th += 0.25) {
        const double slope = m0.psi_prime(th);
        CHECK(slope >= prev_slope - 1e-9);
        prev_slope = slope;
    }
}

TEST_CASE("laplace exponent domain errors") {
    const ModelSpec m0 = rm::m0();
    CHECK_THROWS_AS(m0.psi(1.5), DomainError);
    const ModelSpec m1 = rm::m1();
    CHECK_THROWS_AS(m1.psi(1.0), DomainError); // boundary not attained
    CHECK_NOTHROW(m1.psi(0.999));
}

TEST_CASE("esscher tilt closed forms and consistency") {
    const ModelSpec m1 = rm::m1();
    const ModelSpec t1 = esscher_tilt(m1, 0.5);
    CHECK(t1.claim.mu() == Approx(0.5).epsilon(1e-14));
    CHECK(t1.lambda == Approx(2.0).epsilon(1e-14));
    CHECK(t1.psi(0.0) == 0.0);

    const ModelSpec m0 = rm::m0();
    const ModelSpec t0 = esscher_tilt(m0, 1.0);
    CHECK(t0.lambda == Approx(rm::kM0_K / 2.0).epsilon(1e-10));
    CHECK(t0.claim.rate() == 0.0);
    CHECK(t0.claim.power() == 3.0);
    // tilted density is (p-1)(1+x)^{-p}
    CHECK(t0.claim.density(1.0) == Approx(2.0 / 8.0).epsilon(1e-12));
    // tilt identity on a grid, checked against psi directly
    for (double s : {-1.5, -0.5, -0.1, 0.0}) {
        CHECK(t0.psi(s) == Approx(m0.psi(1.0 + s) - m0.psi(1.0)).margin(1e-10));
    }
    CHECK_THROWS_AS(esscher_tilt(m0, 1.2), DomainError);
}

TEST_CASE("claim tail ratio behaves like the convolution-equivalent class") {
    // Fbar(u+x)/Fbar(u) -> e^{-alpha x}; the polynomial factor decays like
    // p x/(1+u), so 5% accuracy needs u of a few hundred for p = 3.
    const ModelSpec m0 = rm::m0();
    for (double x : {1.0, 2.0}) {
        double prev_err = 1e300;
        for (double u : {20.0, 40.0, 200.0, 400.0}) {
            const double ratio = m0.claim.tail(u + x) / m0.claim.tail(u);
            const double err = std::abs(ratio / std::exp(-x) - 1.0);
            CHECK(err < prev_err);
            prev_err = err;
            if (u >= 200.0) CHECK(err <= 0.05);
        }
    }
    // control: the exponential family is flagged non convolution equivalent
    CHECK(!rm::m1().claim.convolution_equivalent());
    CHECK(rm::m0().claim.convolution_equivalent());
}

TEST_CASE("exponential sampling transform is the inverse CDF") {
    CHECK(Rng::exp_from_uniform(0.5, 1.0) == Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("claim sampler matches the quadrature CDF") {
    const ModelSpec m0 = rm::m0();
    Rng rng(7, 0);
    const std::size_t n = 100000;
    std::vector<double> draws;
    draws.reserve(n);
    double mean = 0.0;
    std::size_t nonpositive = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = sample_claim(m0, rng);
        nonpositive += x > 0.0 ? 0 : 1;
        draws.push_back(x);
        mean += x;
    }
    CHECK(nonpositive == 0);
    mean /= static_cast<double>(n);
    // second moment by quadrature for the standard error
    const double ex2 = rm::kM0_K *
                       integrate_exp_tail([](double x) { return x * x * std::pow(1.0 + x, -3.0) *
                                                                std::exp(-x); },
                                          0.0, 1.0, 8.0, 1e-12);
    const double se = std::sqrt((ex2 - rm::kM0_EU * rm::kM0_EU) / static_cast<double>(n));
    CHECK(std::abs(mean - rm::kM0_EU) < 4.0 * se);

    const double ks = ks_vs_cdf(draws, [&](double x) { return m0.claim.cdf(x); });
    CHECK(ks <= 0.01);
}

TEST_CASE("pareto branch of the tilted family samples by inverse CDF") {
    const ModelSpec m0 = rm::m0();
    const ModelSpec t0 = esscher_tilt(m0, 1.0);
    Rng rng(11, 3);
    std::vector<double> draws;
    for (int i = 0; i < 50000; ++i) draws.push_back(t0.claim.sample(rng));
    const double ks = ks_vs_cdf(draws, [&](double x) { return t0.claim.cdf(x); });
    CHECK(ks <= 0.012);
}

TEST_CASE("rng streams are deterministic and split by stream id") {
    Rng a(42, 0), b(42, 0), c(42, 1);
    for (int i = 0; i < 16; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
    }
}
