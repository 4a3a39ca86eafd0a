#pragma once

// Renewal (first-return) models: the induced series
//   G(t, p) = sum_n m_n exp(t s_n - n p)
// with certified tails, the pressure root, recurrence classes, derivatives,
// flat intervals and the transience witnesses built on top of it.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"
#include "series.hpp"
#include "symbolic.hpp"
#include "types.hpp"

namespace thermoform {

/// Asymptotic form s_n = slope n - log_power log n + offset + eps_n with
/// |eps_n| <= slack for every n >= start.
struct TailForm {
    double slope = 0.0;
    double log_power = 0.0;
    double offset = 0.0;
    double slack = 0.0;
    long start = 1;
};

inline constexpr long kNoLimit = std::numeric_limits<long>::max() / 4;

struct RenewalSpec {
    double log_base = 0.0;   ///< log m_n = log_base + log_rate * n
    double log_rate = 0.0;
    std::function<double(long)> induced;  ///< s_n for 1 <= n <= explicit_limit
    long explicit_limit = kNoLimit;
    TailForm tail{};
    double bad_entropy = 0.0;    ///< p_B(t) = bad_entropy + t * bad_potential
    double bad_potential = 0.0;
    std::optional<long> max_level;  ///< finite truncation: levels beyond are absent
    std::string label;
};

class RenewalModel {
public:
    explicit RenewalModel(RenewalSpec spec) : spec_(std::move(spec)) { validate(); }

    double log_multiplicity(long n) const { return spec_.log_base + spec_.log_rate * static_cast<double>(n); }
    double induced_value(long n) const {
        if (n < 1 || n > spec_.explicit_limit)
            throw std::domain_error("induced_value: level " + std::to_string(n) + " outside the explicit range");
        return spec_.induced(n);
    }
    double bad_set_pressure(double t) const { return spec_.bad_entropy + t * spec_.bad_potential; }

    double log_base() const noexcept { return spec_.log_base; }
    double log_rate() const noexcept { return spec_.log_rate; }
    long explicit_limit() const noexcept { return spec_.explicit_limit; }
    const TailForm& tail() const noexcept { return spec_.tail; }
    const std::optional<long>& max_level() const noexcept { return spec_.max_level; }
    const std::string& label() const noexcept { return spec_.label; }
    const RenewalSpec& spec() const noexcept { return spec_; }

    /// Envelope in combined form log m_n + s_n = A n - B log n + kappa + eps_n.
    double A() const { return spec_.log_rate + spec_.tail.slope; }
    double B() const { return spec_.tail.log_power; }
    double kappa() const { return spec_.log_base + spec_.tail.offset; }

    /// Adds u to every induced value (one visit to the base per return), so G becomes e^u G.
    RenewalModel with_base_bonus(double u) const {
        RenewalSpec s = spec_;
        s.log_base += u;
        return RenewalModel(std::move(s));
    }

    /// Same model cut off after `levels` levels.
    RenewalModel truncated(long levels) const {
        RenewalSpec s = spec_;
        s.max_level = levels;
        return RenewalModel(std::move(s));
    }

private:
    void validate() const {
        if (!spec_.induced) throw std::domain_error("RenewalModel: missing induced values");
        if (spec_.max_level) {
            if (*spec_.max_level < 1 || *spec_.max_level > spec_.explicit_limit)
                throw std::domain_error("RenewalModel: max_level outside the explicit range");
            return;
        }
        const TailForm& tf = spec_.tail;
        if (tf.start < 1 || !(tf.slack >= 0.0))
            throw std::domain_error("RenewalModel: tail envelope needs start >= 1 and slack >= 0");
        if (tf.start > spec_.explicit_limit + 1)
            throw std::domain_error("RenewalModel: tail envelope starts beyond the explicit data; supply more levels");
        const long last = std::min(tf.start + 1000, spec_.explicit_limit);
        for (long n = tf.start; n <= last; ++n) {
            const double s = spec_.induced(n);
            if (!std::isfinite(s)) throw std::domain_error("RenewalModel: non-finite induced value at level " + std::to_string(n));
            const double env = tf.slope * n - tf.log_power * std::log(static_cast<double>(n)) + tf.offset;
            if (std::abs(s - env) > tf.slack + 1e-12 * (1.0 + std::abs(s) + std::abs(tf.slope) * n))
                throw std::domain_error("RenewalModel: tail envelope fails at level " + std::to_string(n) +
                                        "; supply a larger envelope start or slack");
        }
    }

    RenewalSpec spec_;
};

enum class Family { Hofbauer, Grid };

inline std::string_view to_string(Family f) { return f == Family::Grid ? "grid" : "hofbauer"; }

/// s_n = -c n. Hofbauer: m_n = 1, p_B = 0. Grid: m_n = 2^{n-1}, p_B = log 2.
inline RenewalModel geometric_model(Family family, double c) {
    RenewalSpec s;
    if (family == Family::Grid) {
        s.log_base = -std::log(2.0);
        s.log_rate = std::log(2.0);
        s.bad_entropy = std::log(2.0);
    }
    s.induced = [c](long n) { return -c * static_cast<double>(n); };
    s.tail = {-c, 0.0, 0.0, 0.0, 1};
    s.label = std::string(to_string(family)) + "-geometric";
    return RenewalModel(std::move(s));
}

struct EngineOptions {
    double root_tol = 1e-10;
    double sum_tol = 1e-14;
    double boundary_tol = 1e-10;  ///< |G - 1| below this at p_B counts as the flat boundary
    long max_terms = 1L << 20;
    int max_iterations = 200;
};

enum class Moment {
    Mass,        ///< sum w_n
    ReturnTime,  ///< sum n w_n
    Induced,     ///< sum s_n w_n
};

/// Certified enclosure of sum_n g_n w_n with w_n = m_n exp(t s_n - n p), where
/// g_n is 1, n or s_n according to `moment`.
inline CertifiedSum weighted_sum(const RenewalModel& model, double t, double p, Moment moment,
                                 const EngineOptions& opt = {}) {
    CompensatedSum acc;
    const auto add_terms = [&](long from, long to) {
        for (long n = from; n < to; ++n) {
            const double s = model.induced_value(n);
            const long double nl = static_cast<long double>(n);
            long double log_term = static_cast<long double>(model.log_base()) +
                                   static_cast<long double>(model.log_rate()) * nl +
                                   static_cast<long double>(t) * s - static_cast<long double>(p) * nl;
            long double term = std::exp(log_term);
            if (moment == Moment::ReturnTime) term *= nl;
            if (moment == Moment::Induced) term *= s;
            acc.add(term, static_cast<double>(log_term));
        }
    };
    const auto finish = [&](long n_terms, Interval tail, TailMethod method) {
        const long double v = acc.value(), e = acc.bound();
        CertifiedSum out;
        out.lower = static_cast<double>(v - e) + tail.lower;
        out.upper = static_cast<double>(v + e) + tail.upper;
        if (moment != Moment::Induced) out.lower = std::max(0.0, out.lower);
        out.lower = std::nextafter(out.lower, -kInf);
        out.upper = std::nextafter(out.upper, kInf);
        out.n_terms = n_terms;
        out.tail_method = method;
        return out;
    };

    if (model.max_level()) {
        add_terms(1, *model.max_level() + 1);
        return finish(*model.max_level(), {0.0, 0.0}, TailMethod::Zero);
    }

    const TailForm& tf = model.tail();
    const long double rho = static_cast<long double>(model.log_rate()) + static_cast<long double>(t) * tf.slope -
                            static_cast<long double>(p);
    const double q = t * tf.log_power;
    const double q_decay = moment == Moment::Mass ? q : q - 1.0;
    const double c = model.log_base() + t * tf.offset;
    const double spread = std::exp(std::abs(t) * tf.slack);
    const TailMethod method = rho < 0.0L ? TailMethod::Geometric : TailMethod::IntegralTest;
    const long limit = std::min(model.explicit_limit() + 1, opt.max_terms);
    long M = std::max({tf.start, envelope_monotone_from(rho, q_decay), 64L});

    if (rho > 0.0L || (rho == 0.0L && q_decay <= 1.0)) {
        const long n = std::min({M, limit, 256L});
        add_terms(1, n);
        auto out = finish(n - 1, {0.0, 0.0}, method);
        out.upper = kInf;
        return out;
    }
    if (M > limit)
        throw IndeterminateError("weighted_sum: the tail envelope is only monotone beyond level " + std::to_string(M) +
                                 "; raise the term cap");

    const auto tail_at = [&](long m) -> Interval {
        if (moment != Moment::Induced) {
            const Interval raw = envelope_tail(c, rho, q_decay, m);
            return {raw.lower / spread, raw.upper * spread};
        }
        // |s_n| <= (|slope| + |log_power| / M) n + |log_power| (log M - 1) + |offset| + slack
        // from the tangent line of log at M.
        const double md = static_cast<double>(m);
        const double c1 = std::abs(tf.slope) + std::abs(tf.log_power) / md;
        const double c0 = std::abs(tf.log_power) * std::max(0.0, std::log(md) - 1.0) + std::abs(tf.offset) + tf.slack;
        const Interval g = envelope_tail(c, rho, q, m);
        const Interval h = envelope_tail(c, rho, q - 1.0, m);
        const double bound = spread * (c1 * h.upper + c0 * g.upper);
        return {-bound, bound};
    };

    long done = 1;
    for (;;) {
        M = std::min(M, limit);
        add_terms(done, M);
        done = M;
        const Interval tail = tail_at(M);
        const double scale = std::max(1.0, std::abs(static_cast<double>(acc.value())));
        const double width = 2.0 * static_cast<double>(acc.bound()) + tail.width();
        if (width <= opt.sum_tol * scale || M >= limit) return finish(M - 1, tail, method);
        M *= 2;
    }
}

inline CertifiedSum certified_G(const RenewalModel& model, double t, double p, const EngineOptions& opt = {}) {
    return weighted_sum(model, t, p, Moment::Mass, opt);
}

/// sum_n n m_n exp(t s_n - n p): the expected return time before normalisation.
inline CertifiedSum certified_H(const RenewalModel& model, double t, double p, const EngineOptions& opt = {}) {
    return weighted_sum(model, t, p, Moment::ReturnTime, opt);
}

struct PressureSolution {
    enum class Regime {
        Root,      ///< G(t, p) = 1 at some p > p_B(t)
        Boundary,  ///< G(t, p_B) = 1 within tolerance
        Flat,      ///< G(t, p_B) < 1: pressure pinned at p_B
    };
    double t = 0.0;
    double p = 0.0;
    Interval bracket{};
    double bad_set_pressure = 0.0;
    Regime regime = Regime::Root;
    CertifiedSum g;   ///< G(t, p)
    int iterations = 0;

    bool flat() const { return regime != Regime::Root; }
};

inline std::string_view to_string(PressureSolution::Regime r) {
    switch (r) {
    case PressureSolution::Regime::Root: return "root";
    case PressureSolution::Regime::Boundary: return "boundary";
    case PressureSolution::Regime::Flat: return "flat";
    }
    return "?";
}

/// p(t): p_B(t) when G(t, p_B) <= 1, else the root of G(t, p) = 1 above p_B by
/// bisection (G is strictly decreasing in p).
inline PressureSolution solve_pressure(const RenewalModel& model, double t, const EngineOptions& opt = {}) {
    PressureSolution sol;
    sol.t = t;
    const double pb = model.bad_set_pressure(t);
    sol.bad_set_pressure = pb;
    const CertifiedSum g0 = certified_G(model, t, pb, opt);
    const double btol = opt.boundary_tol;
    if (!g0.diverges() && g0.lower <= 1.0 + btol) {
        sol.p = pb;
        sol.bracket = Interval::point(pb);
        sol.g = g0;
        if (g0.upper < 1.0 - btol) {
            sol.regime = PressureSolution::Regime::Flat;
            return sol;
        }
        if (g0.width() > btol)
            throw IndeterminateError("solve_pressure: G(t, p_B) encloses 1 with width " + short_number(g0.width()) +
                                     " at t = " + short_number(t) + "; tighten sum_tol");
        sol.regime = PressureSolution::Regime::Boundary;
        return sol;
    }

    double lo = pb, step = 1.0, hi = pb + step;
    for (int k = 0;; ++k) {
        const CertifiedSum g = certified_G(model, t, hi, opt);
        if (!g.diverges() && g.upper < 1.0) break;
        if (g.lower > 1.0 || g.diverges()) {
            lo = hi;
        } else {
            break;  // straddles 1: the root sits next to hi
        }
        step *= 2.0;
        hi = pb + step;
        if (k > 200) throw ConvergenceError("solve_pressure: no upper bracket for the root", step);
    }
    int it = 0;
    for (; it < opt.max_iterations && hi - lo > opt.root_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const CertifiedSum g = certified_G(model, t, mid, opt);
        if (g.diverges() || g.lower > 1.0) {
            lo = mid;
        } else if (g.upper < 1.0) {
            hi = mid;
        } else {
            // Enclosure straddles 1: the root is resolved to the sum tolerance.
            lo = hi = mid;
            break;
        }
    }
    sol.regime = PressureSolution::Regime::Root;
    sol.bracket = {lo, hi};
    sol.p = 0.5 * (lo + hi);
    sol.iterations = it;
    sol.g = certified_G(model, t, sol.p, opt);
    return sol;
}

struct Classification {
    Recurrence recurrence = Recurrence::PositiveRecurrent;
    PressureSolution pressure;
    CertifiedSum g;                          ///< G(t, p(t))
    std::optional<CertifiedSum> return_time; ///< H(t, p(t)); absent for Transient
};

inline Classification classify(const RenewalModel& model, double t, const EngineOptions& opt = {}) {
    Classification c;
    c.pressure = solve_pressure(model, t, opt);
    c.g = c.pressure.g;
    if (c.pressure.regime == PressureSolution::Regime::Flat) {
        c.recurrence = Recurrence::Transient;
        return c;
    }
    const CertifiedSum h = certified_H(model, t, c.pressure.bracket.lower, opt);
    c.return_time = h;
    c.recurrence = h.diverges() ? Recurrence::NullRecurrent : Recurrence::PositiveRecurrent;
    return c;
}

namespace detail {

inline Interval divide(const CertifiedSum& num, const CertifiedSum& den) {
    if (!(den.lower > 0.0)) throw IndeterminateError("pressure_derivative: return-time enclosure reaches 0");
    const double q[] = {num.lower / den.lower, num.lower / den.upper, num.upper / den.lower, num.upper / den.upper};
    return {*std::min_element(std::begin(q), std::end(q)), *std::max_element(std::begin(q), std::end(q))};
}

} // namespace detail

/// Dp(t) = sum s_n w_n / sum n w_n. At a flat boundary this is the one-sided
/// derivative from the non-flat side.
inline Derivative pressure_derivative(const RenewalModel& model, double t, const EngineOptions& opt = {}) {
    const PressureSolution sol = solve_pressure(model, t, opt);
    if (sol.regime == PressureSolution::Regime::Flat) return {Derivative::Kind::Flat, Interval::point(model.spec().bad_potential)};
    Interval out{kInf, -kInf};
    const double ends[] = {sol.bracket.lower, sol.bracket.upper};
    for (double p : ends) {
        const CertifiedSum h = certified_H(model, t, p, opt);
        if (h.diverges()) return {Derivative::Kind::ZeroLimit, Interval::point(model.spec().bad_potential)};
        const CertifiedSum num = weighted_sum(model, t, p, Moment::Induced, opt);
        const Interval d = detail::divide(num, h);
        out.lower = std::min(out.lower, d.lower);
        out.upper = std::max(out.upper, d.upper);
        if (sol.bracket.width() == 0.0) break;
    }
    return {Derivative::Kind::Finite, out};
}

/// Flat interval {t : G(t, p_B(t)) <= 1} inside a bracket. Either end may be
/// unbounded within the bracket, in which case its flag is set.
struct FlatInterval {
    Interval left;    ///< encloses t0
    Interval right;   ///< encloses t1; meaningless when right_unbounded
    bool left_unbounded = false;
    bool right_unbounded = false;

    double t0() const { return left.mid(); }
    double t1() const { return right_unbounded ? kInf : right.mid(); }
};

inline std::optional<FlatInterval> locate_flat_interval(const RenewalModel& model, Interval bracket, double tol = 1e-10,
                                                        const EngineOptions& opt = {}, int scan_points = 64) {
    if (!(bracket.lower < bracket.upper)) throw std::domain_error("locate_flat_interval: empty bracket");
    // G(t, p_B(t)) is convex in t, so the sublevel set below 1 is an interval.
    enum class Side { Inside, Outside, Edge };
    const auto side = [&](double t) {
        const CertifiedSum g = certified_G(model, t, model.bad_set_pressure(t), opt);
        if (!g.diverges() && g.upper < 1.0) return Side::Inside;
        if (g.diverges() || g.lower > 1.0) return Side::Outside;
        return Side::Edge;
    };
    const auto grid = linspace(bracket.lower, bracket.upper, std::max(scan_points, 3));
    std::vector<Side> sides(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { sides[i] = side(grid[i]); });
    std::optional<std::size_t> first, last;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (sides[i] != Side::Inside) continue;
        if (!first) first = i;
        last = i;
    }
    if (!first) return std::nullopt;

    // Bisect between an outside point a and an inside point b.
    const auto edge = [&](double a, double b) -> Interval {
        for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
            const double mid = 0.5 * (a + b);
            switch (side(mid)) {
            case Side::Inside: b = mid; break;
            case Side::Outside: a = mid; break;
            case Side::Edge: return Interval::point(mid);
            }
        }
        return {std::min(a, b), std::max(a, b)};
    };
    FlatInterval out;
    if (*first == 0) {
        out.left_unbounded = true;
        out.left = Interval::point(grid.front());
    } else {
        out.left = edge(grid[*first - 1], grid[*first]);
    }
    if (*last + 1 == grid.size()) {
        out.right_unbounded = true;
        out.right = {grid.back(), kInf};
    } else {
        out.right = edge(grid[*last + 1], grid[*last]);
    }
    return out;
}

struct SmoothnessVerdict {
    Smoothness smoothness = Smoothness::FirstOrder;
    CertifiedSum return_time;   ///< H at (t*, p_B(t*))
};

/// First-order iff the expected return time is finite at the transition.
inline SmoothnessVerdict smoothness_at_transition(const RenewalModel& model, double t_star, const EngineOptions& opt = {}) {
    SmoothnessVerdict v;
    v.return_time = certified_H(model, t_star, model.bad_set_pressure(t_star), opt);
    v.smoothness = v.return_time.diverges() ? Smoothness::C1 : Smoothness::FirstOrder;
    return v;
}

struct TransitionPair {
    SmoothnessVerdict onset;
    SmoothnessVerdict end;
    bool agree = false;
};

/// Smoothness verdicts at both ends of a bounded flat interval.
inline TransitionPair smoothness_at_flat_ends(const RenewalModel& model, const FlatInterval& flat, const EngineOptions& opt = {}) {
    if (flat.right_unbounded || flat.left_unbounded)
        throw std::domain_error("smoothness_at_flat_ends: flat interval is not bounded inside the bracket");
    TransitionPair out;
    out.onset = smoothness_at_transition(model, flat.t0(), opt);
    out.end = smoothness_at_transition(model, flat.t1(), opt);
    out.agree = out.onset.smoothness == out.end.smoothness;
    return out;
}

enum class AtomVerdict { Dissipative, Conservative };

inline std::string_view to_string(AtomVerdict v) { return v == AtomVerdict::Dissipative ? "dissipative" : "conservative"; }

/// Level masses of the conformal measure and the atom left on the bad set.
struct AtomReport {
    double t = 0.0;
    double p = 0.0;
    CertifiedSum level_total;
    Interval atom{};
    AtomVerdict verdict = AtomVerdict::Conservative;

    /// Mass of level n (any n within the explicit range).
    double level_mass(const RenewalModel& model, long n) const {
        return std::exp(model.log_multiplicity(n) + t * model.induced_value(n) - static_cast<double>(n) * p);
    }
    /// Mass of the k-th preimage of the atom along the bad-set branch: atom * e^{t s_k - k p}.
    Interval preimage_mass(const RenewalModel& model, long k) const {
        const double f = std::exp(t * model.induced_value(k) - static_cast<double>(k) * p);
        return {atom.lower * f, atom.upper * f};
    }
};

inline AtomReport conformal_atom_masses(const RenewalModel& model, double t, const EngineOptions& opt = {}) {
    const PressureSolution sol = solve_pressure(model, t, opt);
    AtomReport r;
    r.t = t;
    r.p = sol.p;
    r.level_total = sol.g;
    if (sol.regime == PressureSolution::Regime::Flat) {
        r.atom = {1.0 - sol.g.upper, 1.0 - sol.g.lower};
        r.verdict = AtomVerdict::Dissipative;
    } else {
        r.atom = Interval::point(0.0);
        r.verdict = AtomVerdict::Conservative;
    }
    return r;
}

struct TransienceWitness {
    double t = 0.0;
    double p = 0.0;
    Interval u0{};          ///< -log G(t, p(t)); 0 when recurrent
    bool transient = false;
    double probe_small = 0.0;   ///< bonus tried below u0 (u0 / 2 when transient)
    double probe_large = 0.0;   ///< bonus tried above u0 (2 u0, or a small positive bonus when recurrent)
    double shift_small = 0.0;   ///< p change under probe_small
    double shift_large = 0.0;   ///< p change under probe_large
};

/// Adding u on the base cylinder leaves p unchanged for u < u0 and raises it
/// for u > u0.
inline TransienceWitness cyr_sarig_witness(const RenewalModel& model, double t, const EngineOptions& opt = {},
                                           double recurrent_probe = 1e-3) {
    const PressureSolution sol = solve_pressure(model, t, opt);
    TransienceWitness w;
    w.t = t;
    w.p = sol.p;
    w.transient = sol.regime == PressureSolution::Regime::Flat;
    if (w.transient) {
        w.u0 = {-std::log(sol.g.upper), -std::log(sol.g.lower)};
        w.probe_small = 0.5 * w.u0.lower;
        w.probe_large = 2.0 * w.u0.upper;
    } else {
        w.u0 = Interval::point(0.0);
        w.probe_small = 0.0;
        w.probe_large = recurrent_probe;
    }
    w.shift_small = w.probe_small == 0.0 ? 0.0 : solve_pressure(model.with_base_bonus(w.probe_small), t, opt).p - sol.p;
    w.shift_large = solve_pressure(model.with_base_bonus(w.probe_large), t, opt).p - sol.p;
    return w;
}

struct InducedWeights {
    double t = 0.0;
    double p = 0.0;
    std::vector<double> level;          ///< w_n / G, n = 1..n_max (index n-1)
    std::vector<double> per_cylinder;   ///< level weight divided by m_n
    std::vector<double> raw_gibbs;      ///< e^{t s_n}, unnormalised
    CertifiedSum total;                 ///< G(t, p(t)) before renormalisation
    CertifiedSum return_time;           ///< integral of tau (upper = inf when divergent)
    bool potential_integrable = true;   ///< integral of the normalised induced potential is finite
};

inline InducedWeights induced_equilibrium_weights(const RenewalModel& model, double t, long n_max,
                                                  const EngineOptions& opt = {}) {
    const Classification c = classify(model, t, opt);
    if (c.recurrence == Recurrence::Transient)
        throw std::domain_error("induced_equilibrium_weights: potential is transient at t = " + short_number(t));
    InducedWeights w;
    w.t = t;
    w.p = c.pressure.p;
    w.total = c.g;
    w.return_time = certified_H(model, t, w.p, opt);
    const double g = c.g.mid();
    for (long n = 1; n <= n_max; ++n) {
        const double s = model.induced_value(n);
        const double lm = model.log_multiplicity(n);
        const double wn = std::exp(lm + t * s - static_cast<double>(n) * w.p) / g;
        w.level.push_back(wn);
        w.per_cylinder.push_back(wn * std::exp(-lm));
        w.raw_gibbs.push_back(std::exp(t * s));
    }
    // t s_n - n p: the n p part needs a finite return time unless p = 0, and the
    // log n part of s_n needs sum log n w_n, which is finite whenever the series
    // decays geometrically or polynomially faster than n^{-1}.
    const TailForm& tf = model.tail();
    const double rho = model.log_rate() + t * tf.slope - w.p;
    const bool log_moment_finite = model.max_level() || rho < 0.0 || t * tf.log_power > 1.0;
    const bool linear_needed = w.p != 0.0 || tf.slope != 0.0;
    w.potential_integrable = !w.return_time.diverges() || (!linear_needed && log_moment_finite);
    return w;
}

/// Z_n on the base cylinder: u_0 = 1, u_n = sum_{k=1}^n f_k u_{n-k}, f_k = m_k e^{t s_k}.
inline std::vector<double> partition_sums(const RenewalModel& model, double t, int n_max) {
    std::vector<double> f(n_max + 1, 0.0), u(n_max + 1, 0.0);
    const long top = model.max_level() ? *model.max_level() : model.explicit_limit();
    for (int k = 1; k <= n_max && k <= top; ++k) f[k] = std::exp(model.log_multiplicity(k) + t * model.induced_value(k));
    u[0] = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        double s = 0.0;
        for (int k = 1; k <= n; ++k) s += f[k] * u[n - k];
        u[n] = s;
    }
    return u;
}

inline double partition_sum(const RenewalModel& model, double t, int n) { return partition_sums(model, t, n)[n]; }

/// Finite Markov shift realising the first `levels` levels of the model at
/// parameter t: the renewal shift on {0..levels-1} with a depth-2 potential
/// carrying log m_{k+1} + t s_{k+1} on the transition 0 -> k.
inline std::pair<FiniteShift, LocallyConstantPotential> truncated_realization(const RenewalModel& model, double t, int levels) {
    if (levels < 1) throw std::domain_error("truncated_realization: need at least one level");
    const FiniteShift shift = FiniteShift::renewal(levels - 1);
    std::map<Word, double> values;
    for (auto& w : admissible_words(shift, 2)) {
        const double v = w[0] == 0 ? model.log_multiplicity(w[1] + 1) + t * model.induced_value(w[1] + 1) : 0.0;
        values.emplace(std::move(w), v);
    }
    return {shift, LocallyConstantPotential(shift, 2, std::move(values))};
}

/// Pressure curve of a renewal model on a t-grid, with flat-interval transitions.
inline PressureCurve pressure_curve(const RenewalModel& model, std::span<const double> t_grid, const EngineOptions& opt = {},
                                    double convexity_tol = 1e-9) {
    PressureCurve c;
    const std::size_t n = t_grid.size();
    c.t.assign(t_grid.begin(), t_grid.end());
    c.p.resize(n);
    c.bad_set_pressure.resize(n);
    c.classes.resize(n);
    c.derivatives.resize(n);
    c.g_values.resize(n);
    c.enclosure_width.resize(n);
    parallel_for(n, [&](std::size_t i) {
        const double t = t_grid[i];
        const Classification cl = classify(model, t, opt);
        c.p[i] = cl.pressure.p;
        c.bad_set_pressure[i] = cl.pressure.bad_set_pressure;
        c.classes[i] = cl.recurrence;
        c.g_values[i] = cl.g.enclosure();
        c.enclosure_width[i] = cl.pressure.bracket.width();
        c.derivatives[i] = pressure_derivative(model, t, opt);
    });
    if (n >= 3 && min_second_difference(c.t, c.p) < -convexity_tol)
        throw std::runtime_error("pressure_curve: computed curve fails the convexity check");
    if (n >= 2) {
        if (const auto flat = locate_flat_interval(model, {c.t.front(), c.t.back()}, opt.root_tol, opt,
                                                   std::max<int>(64, static_cast<int>(n)))) {
            if (!flat->left_unbounded) {
                const double t0 = flat->t0();
                c.transitions.push_back({t0, flat->left, TransitionKind::OnsetOfFlat,
                                         smoothness_at_transition(model, t0, opt).smoothness});
            }
            if (!flat->right_unbounded) {
                const double t1 = flat->t1();
                c.transitions.push_back({t1, flat->right, TransitionKind::EndOfFlat,
                                         smoothness_at_transition(model, t1, opt).smoothness});
            }
        }
    }
    return c;
}

} // namespace thermoform
