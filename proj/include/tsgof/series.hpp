#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsgof/error.hpp"

namespace tsgof {

/// Ordered, non-empty sequence of finite observations.
class Series {
public:
    Series() = default;

    explicit Series(std::vector<double> values) : values_(std::move(values)) { check(); }

    Series(std::initializer_list<double> values) : values_(values) { check(); }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::span<const double> view() const noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] auto begin() const noexcept { return values_.begin(); }
    [[nodiscard]] auto end() const noexcept { return values_.end(); }

    operator std::span<const double>() const noexcept { return values_; }  // NOLINT

    friend bool operator==(const Series&, const Series&) = default;

private:
    void check() const {
        if (values_.empty()) {
            throw Error(ErrorCode::InvalidArgument, "series must contain at least one observation");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw Error(ErrorCode::InvalidArgument,
                            "series element " + std::to_string(i) + " is not finite");
            }
        }
    }

    std::vector<double> values_;
};

namespace stats {

[[nodiscard]] inline double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

/// Unbiased sample variance (divisor n-1).
[[nodiscard]] inline double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

[[nodiscard]] inline double mean_square(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

}  // namespace stats

}  // namespace tsgof
