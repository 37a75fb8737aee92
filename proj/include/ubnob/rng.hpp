#pragma once

// Deterministic random streams.
//
// All stochastic code in the library draws from RngStream, a xoshiro256**
// generator seeded through splitmix64.  The standard-library distributions
// are deliberately avoided: their output is implementation-defined, and the
// sweep outputs here are contractually byte-identical for a given seed.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ubnob {

namespace detail {

inline std::uint64_t splitmix64_finalize(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

// Combine a stream seed with a sub-stream index (lambda index, trial index,
// ...) into a fresh seed.  Fixed arithmetic so derived streams are stable
// across platforms and releases.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return detail::splitmix64_finalize(a + detail::splitmix64_finalize(b));
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x = detail::splitmix64_finalize(x);
            word = x;
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard complex normal: independent N(0,1) real and imaginary parts
    // from one Box-Muller pair.
    std::complex<double> complex_normal() {
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    // Binomial(n, q) by Bernoulli summation.  n stays at tomography shot
    // counts (<= 1e6 in practice), so the linear cost is acceptable and the
    // draw sequence is trivially reproducible.
    std::uint64_t binomial(std::uint64_t n, double q) {
        if (q < 0.0 || q > 1.0) throw std::invalid_argument("binomial: q outside [0,1]");
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            if (uniform01() < q) ++hits;
        }
        return hits;
    }

    // Multinomial(n, probs) by inverse-CDF walk, one uniform per trial.
    // probs must be non-negative; they are normalized by their running sum so
    // rounding in the caller's table cannot leak counts.
    std::vector<std::uint64_t> multinomial(std::uint64_t n, const std::vector<double>& probs) {
        if (probs.empty()) throw std::invalid_argument("multinomial: empty bucket list");
        double total = 0.0;
        for (double q : probs) {
            if (!(q >= 0.0)) throw std::invalid_argument("multinomial: negative bucket");
            total += q;
        }
        if (!(total > 0.0)) throw std::invalid_argument("multinomial: zero mass");
        std::vector<std::uint64_t> counts(probs.size(), 0);
        for (std::uint64_t i = 0; i < n; ++i) {
            const double u = uniform01() * total;
            double cum = 0.0;
            std::size_t bucket = probs.size() - 1;
            for (std::size_t k = 0; k < probs.size(); ++k) {
                cum += probs[k];
                if (u < cum) {
                    bucket = k;
                    break;
                }
            }
            ++counts[bucket];
        }
        return counts;
    }

private:
    std::uint64_t state_[4];
};

} // namespace ubnob
