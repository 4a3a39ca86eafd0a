#pragma once

// Certified enclosures of series whose tail follows e^{c + rho n} n^{-q}.

#include <cfloat>
#include <cmath>
#include <limits>
#include <string_view>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "types.hpp"

namespace thermoform {

enum class TailMethod { Geometric, IntegralTest, Zero };

inline std::string_view to_string(TailMethod m) {
    switch (m) {
    case TailMethod::Geometric: return "geometric";
    case TailMethod::IntegralTest: return "integral-test";
    case TailMethod::Zero: return "zero";
    }
    return "?";
}

/// Enclosure of an infinite series; `upper` is +inf when divergence is certified.
struct CertifiedSum {
    double lower = 0.0;
    double upper = 0.0;
    long n_terms = 0;   ///< terms summed explicitly before the tail bound
    TailMethod tail_method = TailMethod::Zero;

    bool diverges() const { return std::isinf(upper); }
    double width() const { return upper - lower; }
    double mid() const { return diverges() ? upper : 0.5 * (lower + upper); }
    Interval enclosure() const { return {lower, upper}; }
};

/// Upper incomplete gamma function Gamma(s, x) for real s and x > 0.
inline double upper_incomplete_gamma(double s, double x) {
    if (!(x > 0.0)) throw std::domain_error("upper_incomplete_gamma: x must be positive");
    if (s > 0.0) return boost::math::tgamma(s, x);
    if (s == 0.0) return boost::math::expint(1, x);
    if (x >= 1.0) {
        // Modified Lentz evaluation of the continued fraction.
        constexpr double tiny = 1e-300;
        double b = x + 1.0 - s;
        double c = 1.0 / tiny;
        double d = 1.0 / b;
        double h = d;
        for (int i = 1; i < 100000; ++i) {
            const double an = -i * (i - s);
            b += 2.0;
            d = an * d + b;
            if (std::abs(d) < tiny) d = tiny;
            c = b + an / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double delta = d * c;
            h *= delta;
            if (std::abs(delta - 1.0) < 1e-16) break;
        }
        return std::exp(-x + s * std::log(x)) * h;
    }
    // x < 1: climb to s + k in (0, 1], then recur down.
    const double k = std::ceil(-s);
    double a = s + k;
    double g = a == 0.0 ? boost::math::expint(1, x) : boost::math::tgamma(a, x);
    while (a > s) {
        a -= 1.0;
        g = (g - std::pow(x, a) * std::exp(-x)) / a;
    }
    return g;
}

namespace detail {

/// log of integral_a^inf e^{rho x} x^{-q} dx for rho <= 0 (q > 1 when rho = 0).
inline double log_envelope_integral(long double rho, double q, double a) {
    if (rho == 0.0L) return (1.0 - q) * std::log(a) - std::log(q - 1.0);
    const double b = static_cast<double>(-rho);
    const double s = 1.0 - q;
    const double g = upper_incomplete_gamma(s, b * a);
    if (g <= 0.0) return -kInf;
    return -s * std::log(b) + std::log(g);
}

} // namespace detail

/// Enclosure of sum_{n >= M} e^{c + rho n} n^{-q}, padded by a relative 1e-12.
/// Returns upper = +inf when the series diverges (rho > 0, or rho = 0 and q <= 1).
inline Interval envelope_tail(double c, long double rho, double q, long M) {
    constexpr double pad = 1e-12;
    if (rho > 0.0L || (rho == 0.0L && q <= 1.0)) return {0.0, kInf};
    const double m = static_cast<double>(M);
    const auto f = [&](double x) { return std::exp(c + static_cast<double>(rho) * x - q * std::log(x)); };
    double lo, hi;
    if (q >= 0.0) {
        // e^{rho x} x^{-q} is convex and decreasing.
        lo = std::exp(c + detail::log_envelope_integral(rho, q, m)) + 0.5 * f(m);
        hi = std::exp(c + detail::log_envelope_integral(rho, q, m - 0.5));
    } else {
        // Decreasing beyond the mode -q/|rho|; the caller guarantees M sits there.
        const double integral = std::exp(c + detail::log_envelope_integral(rho, q, m));
        lo = integral;
        hi = integral + f(m);
    }
    return {lo * (1.0 - pad), hi * (1.0 + pad)};
}

/// Smallest index from which e^{rho x} x^{-q} is non-increasing.
inline long envelope_monotone_from(long double rho, double q) {
    if (q >= 0.0 || rho >= 0.0L) return 1;
    const double mode = q / static_cast<double>(rho);
    return static_cast<long>(std::ceil(mode)) + 1;
}

/// Compensated (Neumaier) accumulator carrying a rounding-error bound.
struct CompensatedSum {
    long double sum = 0.0L;
    long double carry = 0.0L;
    long double error = 0.0L;

    /// Adds a term computed as exp(log_term) (padding covers the exp rounding).
    void add(long double term, double log_magnitude) {
        const long double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term))
            carry += (sum - t) + term;
        else
            carry += (term - t) + sum;
        sum = t;
        error += std::fabs(term) * (std::fabs(log_magnitude) * 4.0L + 4.0L) * LDBL_EPSILON;
    }

    long double value() const { return sum + carry; }
    long double bound() const { return error + std::fabs(value()) * 4.0L * LDBL_EPSILON; }
};

} // namespace thermoform
