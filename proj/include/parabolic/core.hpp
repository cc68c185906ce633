#ifndef PARABOLIC_CORE_HPP
#define PARABOLIC_CORE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace parabolic {

inline constexpr std::size_t kMaxDim = 8;
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad argument: non-finite coordinates, out-of-range parameters, unknown names.
struct invalid_input : error {
    using error::error;
};

/// A documented precondition of an operator does not hold for this input.
struct precondition_error : error {
    using error::error;
};

/// Two quadrature resolutions disagree by more than the configured tolerance.
struct accuracy_error : error {
    accuracy_error(const std::string& what, double coarse_value, double fine_value)
        : error(what + " (coarse=" + std::to_string(coarse_value) +
                ", fine=" + std::to_string(fine_value) + ")"),
          coarse(coarse_value),
          fine(fine_value)
    {
    }
    double coarse;
    double fine;
};

/// A limit (principal value, improper integral) failed its Cauchy test.
struct divergence_error : error {
    using error::error;
};

// ---------------------------------------------------------------------------
// Point
// ---------------------------------------------------------------------------

/// Point of R^n with n <= kMaxDim, stored inline so it can be created freely
/// inside quadrature loops.
class Point {
public:
    Point() = default;

    explicit Point(std::size_t n) : n_(n)
    {
        if (n > kMaxDim) {
            throw invalid_input("point dimension " + std::to_string(n) + " exceeds " +
                                std::to_string(kMaxDim));
        }
    }

    Point(std::initializer_list<double> values) : Point(values.size())
    {
        std::copy(values.begin(), values.end(), c_.begin());
    }

    static Point from(std::span<const double> values)
    {
        Point p(values.size());
        std::copy(values.begin(), values.end(), p.c_.begin());
        return p;
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    double& operator[](std::size_t i) noexcept { return c_[i]; }
    double operator[](std::size_t i) const noexcept { return c_[i]; }

    [[nodiscard]] const double* begin() const noexcept { return c_.data(); }
    [[nodiscard]] const double* end() const noexcept { return c_.data() + n_; }
    double* begin() noexcept { return c_.data(); }
    double* end() noexcept { return c_.data() + n_; }

    [[nodiscard]] std::span<const double> coords() const noexcept { return {c_.data(), n_}; }

    [[nodiscard]] bool finite() const noexcept
    {
        return std::all_of(begin(), end(), [](double v) { return std::isfinite(v); });
    }

    [[nodiscard]] bool is_zero() const noexcept
    {
        return std::all_of(begin(), end(), [](double v) { return v == 0.0; });
    }

    Point& operator+=(const Point& o) noexcept
    {
        for (std::size_t i = 0; i < n_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Point& operator-=(const Point& o) noexcept
    {
        for (std::size_t i = 0; i < n_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Point& operator*=(double s) noexcept
    {
        for (std::size_t i = 0; i < n_; ++i) c_[i] *= s;
        return *this;
    }

    friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
    friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
    friend Point operator*(double s, Point a) noexcept { return a *= s; }
    friend Point operator-(Point a) noexcept { return a *= -1.0; }

    friend bool operator==(const Point& a, const Point& b) noexcept
    {
        return a.n_ == b.n_ && std::equal(a.begin(), a.end(), b.begin());
    }

private:
    std::array<double, kMaxDim> c_{};
    std::size_t n_ = 0;
};

inline double squared_norm(const Point& p) noexcept
{
    double s = 0.0;
    for (double v : p) s += v * v;
    return s;
}

inline double euclidean_norm(const Point& p) noexcept { return std::sqrt(squared_norm(p)); }

inline Point zero_point(std::size_t n) { return Point(n); }

// ---------------------------------------------------------------------------
// Small numeric helpers
// ---------------------------------------------------------------------------

/// Relative difference guarded by an absolute scale: |a-b| / max(|a|,|b|,scale).
inline double relative_difference(double a, double b, double scale = 0.0) noexcept
{
    const double denom = std::max({std::abs(a), std::abs(b), scale});
    return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

} // namespace parabolic

#endif // PARABOLIC_CORE_HPP
