#pragma once
#include <nlohmann/json.hpp>

#include "levyruin/model.hpp"

// Shared reference models and frozen oracle values. The M0 constants were
// computed beforehand with 30-digit adaptive quadrature and hand algebra on
// psi; tests assert against these instead of re-deriving them from the code
// under test.
namespace refmodels {

inline nlohmann::json m0_config() {
    return nlohmann::json{
        {"claim", {{"variant", "poly_tilted_exp"}, {"alpha", 1.0}, {"p", 3.0}}},
        {"lambda", 1.0},
        {"premium", 2.0},
        {"sigma", 0.0}};
}

// Exponential claims; alpha = 0.3 declared for the kappa machinery (any value
// in (0, 0.5) keeps psi(alpha) < 0 for these parameters).
inline nlohmann::json m1_config() {
    return nlohmann::json{
        {"claim", {{"variant", "exponential"}, {"mu", 1.0}, {"alpha", 0.3}}},
        {"lambda", 1.0},
        {"premium", 2.0},
        {"sigma", 0.0}};
}

inline levyruin::ModelSpec m0() { return levyruin::build_model(m0_config()); }
inline levyruin::ModelSpec m1() { return levyruin::build_model(m1_config()); }

// M0 oracle values (30-digit quadrature; see the derivations in the tests).
inline constexpr double kM0_K = 3.35375005635740174;
inline constexpr double kM0_EU = 0.35375005635740174;
inline constexpr double kM0_delta_alpha = 1.67687502817870087;
inline constexpr double kM0_q = 1.64624994364259826;
inline constexpr double kM0_A = 1.32312497182129913;
inline constexpr double kM0_B = 0.80372058746660784;
inline constexpr double kM0_C = 1.06342277964395349;
inline constexpr double kM0_phi = 0.17687502817870087;      // lambda EU / r
inline constexpr double kM0_psi_half = -0.77466103769750502; // psi(0.5)
inline constexpr double kM0_phi_hat_half = 0.29684403892224717; // root of psi(-t)=0.5

// M1 closed forms: psi(th) = -2 th + th/(1-th), q = 1, ruin prob 0.5 e^{-u/2}.
inline constexpr double kM1_phi_hat_1 = 0.70710678118654752; // 1/sqrt(2)

} // namespace refmodels
