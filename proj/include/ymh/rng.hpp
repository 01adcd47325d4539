#pragma once

#include <cmath>
#include <cstdint>

#include "ymh/common.hpp"

namespace ymh {

namespace detail {
// splitmix64 update (Vigna); also used as a mixing function for keying.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Small counter-keyed generator. Streams are derived from
/// (seed, step, kind, index) so every lattice component gets its own
/// reproducible noise stream regardless of evaluation order or threading.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // decorrelate trivially related seeds
        detail::splitmix64(state_);
        detail::splitmix64(state_);
    }

    static Rng keyed(std::uint64_t seed, std::uint64_t step, std::uint32_t kind,
                     std::uint64_t index) {
        std::uint64_t s = seed;
        detail::splitmix64(s);
        s ^= 0x632be59bd9b4e019ULL * (step + 1);
        detail::splitmix64(s);
        s ^= 0x9e6c63d0a161e2c1ULL * (static_cast<std::uint64_t>(kind) + 1);
        s ^= 0xd6e8feb86659fd93ULL * (index + 1);
        detail::splitmix64(s);
        return Rng(s, Tag{});
    }

    std::uint64_t next_u64() { return detail::splitmix64(state_); }

    /// Uniform on (0,1): never returns 0 or 1, safe for log().
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller, pairs cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n) { return next_u64() % n; }

private:
    struct Tag {};
    Rng(std::uint64_t raw_state, Tag) : state_(raw_state) {}

    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ymh
