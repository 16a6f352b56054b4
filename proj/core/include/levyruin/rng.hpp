#pragma once
#include <cmath>
#include <cstdint>

namespace levyruin {

// xoshiro256++ with SplitMix64 seeding.
//
// Stream splitting rule (the replay contract): stream k of a run with master
// seed S is seeded from SplitMix64 initialised at S + (k+1)*0x9E3779B97F4A7C15,
// drawing four words for the xoshiro state. Identical (seed, stream) pairs
// reproduce identical draws on every platform; none of the std::<random>
// distributions are used anywhere.
class Rng {
  public:
    Rng() : Rng(0, 0) {}
    Rng(std::uint64_t master_seed, std::uint64_t stream_id) {
        std::uint64_t x = master_seed + (stream_id + 1) * 0x9E3779B97F4A7C15ull;
        bool nonzero = false;
        for (auto& w : s_) {
            w = splitmix64(x);
            nonzero |= (w != 0);
        }
        if (!nonzero) s_[0] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on the open interval (0,1); never returns an endpoint, so the
    // inverse-CDF transforms below stay finite and strictly positive.
    double uniform01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double exponential(double rate) { return exp_from_uniform(uniform01(), rate); }

    // Box-Muller, second deviate cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // Exposed so tests can pin the transform itself: u=0.5, rate=1 -> ln 2.
    static double exp_from_uniform(double u, double rate) { return -std::log(u) / rate; }

  private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace levyruin
