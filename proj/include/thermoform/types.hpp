#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace thermoform {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed enclosure [lower, upper] of a real quantity. upper may be +inf.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    static Interval point(double x) { return {x, x}; }

    double mid() const { return std::isinf(upper) ? upper : 0.5 * (lower + upper); }
    double width() const { return upper - lower; }
    bool contains(double x) const { return lower <= x && x <= upper; }
    bool finite() const { return std::isfinite(lower) && std::isfinite(upper); }
};

enum class Recurrence { PositiveRecurrent, NullRecurrent, Transient };

inline std::string_view to_string(Recurrence r) {
    switch (r) {
    case Recurrence::PositiveRecurrent: return "PositiveRecurrent";
    case Recurrence::NullRecurrent: return "NullRecurrent";
    case Recurrence::Transient: return "Transient";
    }
    return "?";
}

enum class Smoothness { C1, FirstOrder };

inline std::string_view to_string(Smoothness s) { return s == Smoothness::C1 ? "C1" : "first-order"; }

enum class TransitionKind { OnsetOfFlat, EndOfFlat, ComponentSwitch };

inline std::string_view to_string(TransitionKind k) {
    switch (k) {
    case TransitionKind::OnsetOfFlat: return "onset-of-flat";
    case TransitionKind::EndOfFlat: return "end-of-flat";
    case TransitionKind::ComponentSwitch: return "component-switch";
    }
    return "?";
}

/// Derivative of the pressure at one parameter value.
struct Derivative {
    enum class Kind {
        Finite,   ///< `value` encloses Dp
        ZeroLimit,///< expected return time diverges; Dp tends to 0 (C1 side)
        Flat,     ///< inside a flat interval, Dp = 0
    };
    Kind kind = Kind::Finite;
    Interval value{};
};

struct Transition {
    double t = 0.0;
    Interval bracket{};
    TransitionKind kind = TransitionKind::OnsetOfFlat;
    Smoothness smoothness = Smoothness::FirstOrder;
};

struct PressureCurve {
    std::vector<double> t;
    std::vector<double> p;
    std::vector<double> bad_set_pressure;   ///< floor p_B(t); -inf when there is none
    std::vector<Recurrence> classes;
    std::vector<Derivative> derivatives;
    std::vector<Interval> g_values;         ///< induced series at (t, p(t)); empty for finite shifts
    std::vector<double> enclosure_width;    ///< width of the certified bracket on p(t)
    std::vector<Transition> transitions;
};

/// Smallest second divided difference (scaled to a second derivative) of the
/// curve; convexity means this is >= -tolerance.
inline double min_second_difference(std::span<const double> t, std::span<const double> p) {
    double worst = kInf;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const double left = (p[i] - p[i - 1]) / (t[i] - t[i - 1]);
        const double right = (p[i + 1] - p[i]) / (t[i + 1] - t[i]);
        worst = std::min(worst, 2.0 * (right - left) / (t[i + 1] - t[i - 1]));
    }
    return worst;
}

inline std::vector<double> linspace(double a, double b, int steps) {
    std::vector<double> out;
    if (steps <= 1) return {a};
    out.reserve(steps);
    for (int i = 0; i < steps; ++i) out.push_back(a + (b - a) * static_cast<double>(i) / (steps - 1));
    return out;
}

} // namespace thermoform
