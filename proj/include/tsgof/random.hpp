#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tsgof/error.hpp"
#include "tsgof/series.hpp"

namespace tsgof {

/// Key of one reproducible random stream. Replicate i of a run uses {base_seed, i}.
struct RngSeed {
    std::uint64_t base_seed = 0;
    std::uint64_t stream_index = 0;

    /// Independent family of streams tagged by `tag`, e.g. one per Monte Carlo panel.
    [[nodiscard]] RngSeed substream(std::uint64_t tag) const noexcept;

    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

namespace detail {

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

inline RngSeed RngSeed::substream(std::uint64_t tag) const noexcept {
    return {detail::splitmix64(base_seed ^ detail::splitmix64(tag + 0x5851F42D4C957F2DULL)),
            stream_index};
}

/// Counter-derived stream: the engine state depends only on (base_seed, stream_index),
/// never on how many other streams were drawn before. All variates are produced from raw
/// 64-bit engine output so sequences are identical across standard libraries.
class Rng {
public:
    explicit Rng(RngSeed seed)
        : engine_(detail::splitmix64(detail::splitmix64(seed.base_seed) ^
                                     detail::splitmix64(~seed.stream_index))) {}

    [[nodiscard]] std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    [[nodiscard]] double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform index in [0, bound).
    [[nodiscard]] std::size_t index(std::size_t bound) {
        // Lemire's nearly-divisionless method on 64-bit words.
        const auto b = static_cast<std::uint64_t>(bound);
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * b;
        auto low = static_cast<std::uint64_t>(m);
        if (low < b) {
            const std::uint64_t threshold = (0 - b) % b;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * b;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::size_t>(m >> 64);
    }

    /// Standard normal via the Marsaglia polar method.
    [[nodiscard]] double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Gamma(shape, 1) by Marsaglia and Tsang; shape < 1 uses the U^(1/shape) boost.
    [[nodiscard]] double gamma(double shape) {
        if (!(shape > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma shape must be positive");
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = 0.0;
            double v = 0.0;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    [[nodiscard]] double chi_square(double df) { return 2.0 * gamma(0.5 * df); }

    /// Student t as a normal over the root of a scaled chi-square.
    [[nodiscard]] double student_t(double df) {
        const double z = normal();
        return z / std::sqrt(chi_square(df) / df);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

[[nodiscard]] inline Series draw_normal(std::size_t n, RngSeed seed) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = rng.normal();
    return Series(std::move(out));
}

[[nodiscard]] inline Series draw_student_t(double df, std::size_t n, RngSeed seed) {
    if (!(df > 0.0)) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = rng.student_t(df);
    return Series(std::move(out));
}

}  // namespace tsgof
