#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace siis {

/// Seedable random source used everywhere randomness is needed.
///
/// std::mt19937_64 is bit-specified by the standard, so raw draws reproduce
/// across platforms. The distribution transforms live here because the
/// standard library's distribution objects are implementation-defined and
/// would break cross-platform reproducibility of reports.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). Unbiased via rejection.
    std::uint64_t below(std::uint64_t bound) {
        // threshold = 2^64 mod bound
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal, Box-Muller, second value cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    /// k distinct values from {0,...,n-1} via partial Fisher-Yates.
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> pool(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            const auto j = static_cast<int>(below(static_cast<std::uint64_t>(n - i))) + i;
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
            out.push_back(pool[static_cast<std::size_t>(i)]);
        }
        return out;
    }

private:
    std::mt19937_64 gen_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

/// Deterministic fan-out of one root seed into independent streams.
/// Used so that every repetition / noise level / purpose gets its own seed
/// while the whole experiment stays reproducible from a single value.
inline std::uint64_t fanout_seed(std::uint64_t root, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = detail::splitmix64(root);
    s = detail::splitmix64(s ^ detail::splitmix64(a + 0x1000));
    s = detail::splitmix64(s ^ detail::splitmix64(b + 0x2000));
    s = detail::splitmix64(s ^ detail::splitmix64(c + 0x3000));
    return s;
}

} // namespace siis
