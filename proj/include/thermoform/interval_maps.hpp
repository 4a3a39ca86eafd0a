#pragma once

// Two-branch interval maps on [0, 1): Chebyshev 4x(1-x), Manneville-Pomeau
// x(1 + 2^a x^a) | 2x - 1, and the doubling map carrying a grid potential.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "renewal.hpp"
#include "sequences.hpp"
#include "symbolic.hpp"

namespace thermoform {

inline double chebyshev_pressure_exact(double t) {
    return std::max(-t * std::log(4.0), (1.0 - t) * std::log(2.0));
}

class IntervalMap {
public:
    enum class Kind { Chebyshev, MannevillePomeau, DoublingGrid };

    static IntervalMap chebyshev() { return IntervalMap(Kind::Chebyshev, 0.0, std::nullopt); }

    static IntervalMap manneville_pomeau(double alpha) {
        if (!(alpha > 0.0)) throw std::domain_error("manneville_pomeau: alpha must be positive");
        return IntervalMap(Kind::MannevillePomeau, alpha, std::nullopt);
    }

    /// Doubling map with phi = a_k on [2^{-k-1}, 2^{-k}) and phi(0) = 0.
    static IntervalMap doubling_grid(RealizedSequence seq) {
        return IntervalMap(Kind::DoublingGrid, 0.0, std::move(seq));
    }

    Kind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    const std::optional<RealizedSequence>& sequence() const noexcept { return seq_; }

    /// Branches are [0, 1/2) and [1/2, 1).
    int branch_of(double x) const { return x < 0.5 ? 0 : 1; }

    double apply(double x) const {
        switch (kind_) {
        case Kind::Chebyshev: return 4.0 * x * (1.0 - x);
        case Kind::MannevillePomeau: return x < 0.5 ? x * (1.0 + std::pow(2.0 * x, alpha_)) : 2.0 * x - 1.0;
        case Kind::DoublingGrid: return x < 0.5 ? 2.0 * x : 2.0 * x - 1.0;
        }
        return 0.0;
    }

    double log_abs_derivative(double x) const {
        switch (kind_) {
        case Kind::Chebyshev: return std::log(std::abs(4.0 - 8.0 * x));
        case Kind::MannevillePomeau:
            return x < 0.5 ? std::log1p((1.0 + alpha_) * std::pow(2.0 * x, alpha_)) : std::log(2.0);
        case Kind::DoublingGrid: return std::log(2.0);
        }
        return 0.0;
    }

    /// Preimage of y in [0, 1] under the given branch.
    double inverse(int branch, double y) const {
        switch (kind_) {
        case Kind::Chebyshev: {
            const double r = std::sqrt(std::max(0.0, 1.0 - y));
            return branch == 0 ? 0.5 * (1.0 - r) : 0.5 * (1.0 + r);
        }
        case Kind::MannevillePomeau: return branch == 0 ? mp_left_inverse(y) : 0.5 * (y + 1.0);
        case Kind::DoublingGrid: return branch == 0 ? 0.5 * y : 0.5 * (y + 1.0);
        }
        return 0.0;
    }

    /// Solves x (1 + (2x)^alpha) = y on [0, 1/2] (safeguarded Newton).
    double mp_left_inverse(double y) const {
        if (y <= 0.0) return 0.0;
        if (y >= 1.0) return 0.5;
        double lo = 0.0, hi = 0.5, x = 0.5 * y;
        for (int it = 0; it < 200; ++it) {
            const double px = std::pow(2.0 * x, alpha_);
            const double f = x * (1.0 + px) - y;
            if (f > 0.0) hi = x; else lo = x;
            if (f == 0.0) return x;
            const double df = 1.0 + (1.0 + alpha_) * px;
            double next = x - f / df;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - x) <= 1e-17 + 1e-16 * x) return next;
            x = next;
        }
        return x;
    }

    std::string name() const {
        switch (kind_) {
        case Kind::Chebyshev: return "chebyshev";
        case Kind::MannevillePomeau: return "manneville-pomeau";
        case Kind::DoublingGrid: return "doubling-grid";
        }
        return "?";
    }

private:
    IntervalMap(Kind k, double alpha, std::optional<RealizedSequence> seq) : kind_(k), alpha_(alpha), seq_(std::move(seq)) {}

    Kind kind_;
    double alpha_;
    std::optional<RealizedSequence> seq_;
};

struct PeriodicOrbitSample {
    enum class Status {
        Regular,
        Parabolic,  ///< indifferent fixed point (|Df^n| = 1)
        Boundary,   ///< the point x = 1, outside [0, 1)
    };
    Word itinerary;
    double point = 0.0;
    double log_deriv = 0.0;       ///< log |Df^n(point)|
    double potential_sum = 0.0;   ///< S_n phi for grid potentials; -log_deriv otherwise
    Status status = Status::Regular;
};

struct PeriodicPoints {
    int n = 0;
    std::vector<PeriodicOrbitSample> samples;   ///< one per itinerary, lexicographic
    int skipped = 0;                            ///< cells without a bracketed root
};

namespace detail {

inline Word itinerary_of(std::uint64_t code, int n) {
    Word w(n);
    for (int i = 0; i < n; ++i) w[i] = static_cast<int>((code >> (n - 1 - i)) & 1u);
    return w;
}

/// S_n phi at the periodic point with this itinerary: each position reads the
/// run of zeros that follows it cyclically.
inline double grid_birkhoff(const RealizedSequence& seq, const Word& w) {
    const int n = static_cast<int>(w.size());
    if (std::all_of(w.begin(), w.end(), [](int s) { return s == 0; })) return 0.0;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        int k = 0;
        while (w[(i + k) % n] == 0) ++k;
        sum += seq.a(k);
    }
    return sum;
}

} // namespace detail

/// Periodic points of period n (dividing n), one per length-n itinerary.
inline PeriodicPoints periodic_points(const IntervalMap& map, int n, int n_max = 24) {
    if (n < 1 || n > n_max) throw std::domain_error("periodic_points: n must lie in [1, " + std::to_string(n_max) + "]");
    const std::uint64_t count = std::uint64_t{1} << n;
    PeriodicPoints out;
    out.n = n;
    out.samples.resize(count);
    std::vector<char> skipped(count, 0);
    parallel_for(count, [&](std::size_t code) {
        PeriodicOrbitSample& s = out.samples[code];
        s.itinerary = detail::itinerary_of(code, n);
        const Word& w = s.itinerary;
        const bool all_zero = std::all_of(w.begin(), w.end(), [](int b) { return b == 0; });
        const bool all_one = std::all_of(w.begin(), w.end(), [](int b) { return b == 1; });
        if (map.kind() == IntervalMap::Kind::DoublingGrid) {
            long double num = static_cast<long double>(code);
            s.point = all_one ? 1.0 : static_cast<double>(num / (std::ldexp(1.0L, n) - 1.0L));
            s.log_deriv = n * std::log(2.0);
            s.potential_sum = detail::grid_birkhoff(*map.sequence(), w);
            s.status = all_one ? PeriodicOrbitSample::Status::Boundary : PeriodicOrbitSample::Status::Regular;
            return;
        }
        // g = f_{w0}^{-1} o ... o f_{w_{n-1}}^{-1} maps [0,1] onto the cell of w; solve g(y) = y.
        std::vector<double> chain(n);
        const auto g = [&](double y) {
            for (int i = n - 1; i >= 0; --i) chain[i] = y = map.inverse(w[i], y);
            return y;
        };
        double lo = 0.0, hi = 1.0;
        double klo = g(lo) - lo, khi = g(hi) - hi;
        if (klo < 0.0 || khi > 0.0) {
            skipped[code] = 1;
            return;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double k = g(mid) - mid;
            if (k == 0.0) { lo = hi = mid; break; }
            (k > 0.0 ? lo : hi) = mid;
        }
        const double y = 0.5 * (lo + hi);
        s.point = g(y);
        double ld = 0.0;
        for (int i = 0; i < n; ++i) ld += map.log_abs_derivative(chain[i]);
        s.log_deriv = ld;
        s.potential_sum = -ld;
        if (map.kind() == IntervalMap::Kind::MannevillePomeau && all_zero) s.status = PeriodicOrbitSample::Status::Parabolic;
        if (map.kind() == IntervalMap::Kind::MannevillePomeau && all_one) s.status = PeriodicOrbitSample::Status::Boundary;
    });
    out.skipped = static_cast<int>(std::count(skipped.begin(), skipped.end(), 1));
    if (out.skipped) {
        std::vector<PeriodicOrbitSample> kept;
        for (std::size_t i = 0; i < count; ++i)
            if (!skipped[i]) kept.push_back(std::move(out.samples[i]));
        out.samples = std::move(kept);
    }
    return out;
}

/// Base set for Z_n: a half-open interval [lower, upper) of [0, 1), or a
/// symbolic cylinder (which also sees the boundary point x = 1).
struct ZnBase {
    enum class Kind { Interval, Cylinder };
    Kind kind = Kind::Interval;
    double lower = 0.0;
    double upper = 1.0;
    Word cylinder;

    static ZnBase interval(double a, double b) { return {Kind::Interval, a, b, {}}; }
    static ZnBase whole() { return interval(0.0, 1.0); }
    static ZnBase of_cylinder(Word w) { return {Kind::Cylinder, 0.0, 1.0, std::move(w)}; }

    bool contains(const PeriodicOrbitSample& s) const {
        if (kind == Kind::Cylinder) {
            const std::size_t n = s.itinerary.size();
            for (std::size_t i = 0; i < cylinder.size(); ++i)
                if (s.itinerary[i % n] != cylinder[i]) return false;
            return true;
        }
        if (s.status == PeriodicOrbitSample::Status::Boundary) return false;
        return lower <= s.point && s.point < upper;
    }
};

struct ZnValue {
    double value = 0.0;
    int included = 0;
    int skipped = 0;
};

/// Z_n = sum over periodic points in the base of e^{t S_n phi}; phi = -log|f'|
/// for Chebyshev and Manneville-Pomeau, the grid potential for doubling maps.
inline ZnValue zn_sum(const PeriodicPoints& points, double t, const ZnBase& base) {
    ZnValue z;
    z.skipped = points.skipped;
    std::vector<double> terms;
    for (const auto& s : points.samples) {
        if (!base.contains(s)) continue;
        terms.push_back(std::exp(t * s.potential_sum));
        ++z.included;
    }
    std::sort(terms.begin(), terms.end());
    z.value = std::accumulate(terms.begin(), terms.end(), 0.0);
    return z;
}

inline ZnValue zn_sum(const IntervalMap& map, double t, int n, const ZnBase& base) {
    return zn_sum(periodic_points(map, n), t, base);
}

/// Delta-squared extrapolation of the last three terms of a sequence.
inline double aitken(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 3) return n ? x.back() : 0.0;
    const double d1 = x[n - 1] - x[n - 2];
    const double d2 = x[n - 2] - x[n - 3];
    const double den = d1 - d2;
    if (den == 0.0 || !std::isfinite(den)) return x[n - 1];
    return x[n - 1] - d1 * d1 / den;
}

struct GurevichEstimate {
    std::vector<double> raw;     ///< (1/n) log Z_n for n = 1..n_max
    double extrapolated = 0.0;
    double spread = 0.0;         ///< max - min over the last three raw terms
};

inline GurevichEstimate gurevich_estimate(std::span<const PeriodicPoints> table, double t, const ZnBase& base = ZnBase::whole()) {
    if (table.size() < 4) throw std::domain_error("gurevich_estimate: need n_max >= 4");
    GurevichEstimate g;
    for (const auto& pts : table) g.raw.push_back(std::log(zn_sum(pts, t, base).value) / pts.n);
    g.extrapolated = aitken(g.raw);
    const auto last = std::span<const double>(g.raw).last(3);
    g.spread = *std::max_element(last.begin(), last.end()) - *std::min_element(last.begin(), last.end());
    return g;
}

inline std::vector<PeriodicPoints> periodic_table(const IntervalMap& map, int n_max) {
    std::vector<PeriodicPoints> table;
    for (int n = 1; n <= n_max; ++n) table.push_back(periodic_points(map, n));
    return table;
}

inline GurevichEstimate gurevich_estimate(const IntervalMap& map, double t, int n_max, const ZnBase& base = ZnBase::whole()) {
    const auto table = periodic_table(map, n_max);
    return gurevich_estimate(table, t, base);
}

struct KinkFit {
    double kink = 0.0;
    double slope_left = 0.0, intercept_left = 0.0;
    double slope_right = 0.0, intercept_right = 0.0;
    double sse = 0.0;
};

namespace detail {

struct LineFit {
    double slope = 0.0, intercept = 0.0, sse = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        f.sse += r * r;
    }
    return f;
}

} // namespace detail

/// Best two-line least-squares fit over split points; the kink is where the lines cross.
inline KinkFit fit_two_slopes(std::span<const double> t, std::span<const double> p) {
    if (t.size() != p.size() || t.size() < 4) throw std::domain_error("fit_two_slopes: need at least 4 matched points");
    KinkFit best;
    best.sse = kInf;
    for (std::size_t split = 2; split + 2 <= t.size(); ++split) {
        const auto l = detail::fit_line(t.first(split), p.first(split));
        const auto r = detail::fit_line(t.subspan(split), p.subspan(split));
        if (l.sse + r.sse < best.sse && l.slope != r.slope) {
            best.sse = l.sse + r.sse;
            best.slope_left = l.slope;
            best.intercept_left = l.intercept;
            best.slope_right = r.slope;
            best.intercept_right = r.intercept;
            best.kink = (r.intercept - l.intercept) / (l.slope - r.slope);
        }
    }
    return best;
}

enum class SeriesVerdict { RecurrentLike, TransientLike, Inconclusive };

inline std::string_view to_string(SeriesVerdict v) {
    switch (v) {
    case SeriesVerdict::RecurrentLike: return "recurrent-like";
    case SeriesVerdict::TransientLike: return "transient-like";
    case SeriesVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct SeriesDiagnostic {
    SeriesVerdict verdict = SeriesVerdict::Inconclusive;
    double rate = 0.0;           ///< fitted exponential rate of lambda_n
    double rate_se = 0.0;
    double power = 0.0;          ///< fitted exponent of n
    double constant = 0.0;
    int first_n = 0, last_n = 0;
    std::vector<double> log_lambda;   ///< log lambda_n, n = 1..n_max
};

struct DiagnosticOptions {
    double z = 3.0;              ///< width of the confidence band in standard errors
    double min_rate = 1e-3;      ///< decay slower than this counts as no decay
};

/// Least squares of log lambda_n on (1, n, log n) over the second half of the range.
inline SeriesDiagnostic sarig_series_diagnostic(std::span<const double> lambda, const DiagnosticOptions& opt = {}) {
    const int n_max = static_cast<int>(lambda.size());
    if (n_max < 8) throw std::domain_error("sarig_series_diagnostic: need at least 8 terms");
    SeriesDiagnostic d;
    for (double v : lambda) d.log_lambda.push_back(v > 0.0 ? std::log(v) : -kInf);
    d.first_n = n_max / 2;
    d.last_n = n_max;
    // Normal equations in centred columns for (1, n, log n).
    double sum[3][3] = {}, rhs[3] = {};
    int m = 0;
    for (int n = d.first_n; n <= n_max; ++n) {
        const double y = d.log_lambda[n - 1];
        if (!std::isfinite(y)) {
            d.verdict = SeriesVerdict::TransientLike;
            d.rate = -kInf;
            return d;
        }
        const double x[3] = {1.0, static_cast<double>(n), std::log(static_cast<double>(n))};
        for (int i = 0; i < 3; ++i) {
            rhs[i] += x[i] * y;
            for (int j = 0; j < 3; ++j) sum[i][j] += x[i] * x[j];
        }
        ++m;
    }
    // 3x3 inverse by cofactors.
    const auto& a = sum;
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    double inv[3][3];
    inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    double beta[3] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) beta[i] += inv[i][j] * rhs[j];
    double rss = 0.0;
    for (int n = d.first_n; n <= n_max; ++n) {
        const double r = d.log_lambda[n - 1] - (beta[0] + beta[1] * n + beta[2] * std::log(static_cast<double>(n)));
        rss += r * r;
    }
    const double sigma2 = m > 3 ? rss / (m - 3) : 0.0;
    d.constant = beta[0];
    d.rate = beta[1];
    d.power = beta[2];
    d.rate_se = std::sqrt(std::max(0.0, sigma2 * inv[1][1]));
    if (d.rate + opt.z * d.rate_se < -opt.min_rate)
        d.verdict = SeriesVerdict::TransientLike;
    else if (d.rate - opt.z * d.rate_se > -opt.min_rate)
        d.verdict = SeriesVerdict::RecurrentLike;
    else
        d.verdict = SeriesVerdict::Inconclusive;
    return d;
}

/// First-return terms lambda_n = m_n e^{t s_n - n P} of a renewal model.
inline SeriesDiagnostic sarig_series_diagnostic(const RenewalModel& model, double t, double P, int n_max,
                                                const DiagnosticOptions& opt = {}) {
    std::vector<double> lambda;
    for (int n = 1; n <= n_max; ++n)
        lambda.push_back(std::exp(model.log_multiplicity(n) + t * model.induced_value(n) - n * P));
    return sarig_series_diagnostic(lambda, opt);
}

/// lambda_n = e^{-n P} Z_n on the given base.
inline SeriesDiagnostic sarig_series_diagnostic(std::span<const PeriodicPoints> table, double t, double P, const ZnBase& base,
                                                const DiagnosticOptions& opt = {}) {
    std::vector<double> lambda;
    for (const auto& pts : table) lambda.push_back(zn_sum(pts, t, base).value * std::exp(-pts.n * P));
    return sarig_series_diagnostic(lambda, opt);
}

/// m_n = 1, p_B = 0 model of the first return to [1/2, 1) under the doubling map.
inline RenewalModel hofbauer_doubling_model(const RealizedSequence& seq) { return realize_model(seq, Family::Hofbauer); }

struct InducedMapModel {
    RenewalModel model;
    std::vector<double> ladder;   ///< xi_0 = 1/2 > xi_1 > ... with f(xi_{k+1}) = xi_k
    std::vector<double> induced;  ///< s_n for n = 1..levels
    double fitted_power = 0.0;    ///< s_n ~ -fitted_power log n + kappa
    double kappa = 0.0;
    double slack = 0.0;           ///< max fit residual on the fitted window
};

/// First-return model of Manneville-Pomeau to [1/2, 1): level n holds the points
/// whose image under 2x - 1 needs n - 1 left-branch steps to come back. s_n is
/// -log|DF| at the level's fixed point.
inline InducedMapModel mp_induced_model(double alpha, int levels) {
    if (levels < 8) throw std::domain_error("mp_induced_model: need at least 8 levels");
    const IntervalMap map = IntervalMap::manneville_pomeau(alpha);
    InducedMapModel out{geometric_model(Family::Hofbauer, 1.0), {}, {}, 0.0, 0.0, 0.0};
    out.ladder.push_back(0.5);
    for (int k = 1; k <= levels; ++k) {
        const double xi = map.mp_left_inverse(out.ladder.back());
        if (!(xi > 0.0 && xi < out.ladder.back()))
            throw std::runtime_error("mp_induced_model: ladder root failed at level " + std::to_string(k));
        out.ladder.push_back(xi);
    }
    out.induced.resize(levels);
    parallel_for(static_cast<std::size_t>(levels), [&](std::size_t idx) {
        const int n = static_cast<int>(idx) + 1;
        // Fixed point of x -> (L^{-(n-1)}(x) + 1) / 2, a contraction on [1/2, 1].
        std::vector<double> chain(n);
        double x = 0.75;
        for (int it = 0; it < 200; ++it) {
            double y = x;
            for (int j = 1; j < n; ++j) chain[j] = y = map.mp_left_inverse(y);
            const double next = 0.5 * (y + 1.0);
            const bool done = std::abs(next - x) <= 1e-16;
            x = next;
            if (done) break;
        }
        double y = x;
        for (int j = 1; j < n; ++j) chain[j] = y = map.mp_left_inverse(y);
        double ld = std::log(2.0);
        for (int j = 1; j < n; ++j) ld += map.log_abs_derivative(chain[j]);
        if (!std::isfinite(ld)) throw std::runtime_error("mp_induced_model: derivative failed at level " + std::to_string(n));
        out.induced[idx] = -ld;
    });
    // Envelope s_n = -B log n + kappa on [levels/2, levels].
    const int first = levels / 2;
    std::vector<double> x, y;
    for (int n = first; n <= levels; ++n) {
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(out.induced[n - 1]);
    }
    const auto fit = detail::fit_line(x, y);
    out.fitted_power = -fit.slope;
    out.kappa = fit.intercept;
    for (std::size_t i = 0; i < x.size(); ++i) out.slack = std::max(out.slack, std::abs(y[i] - (fit.intercept + fit.slope * x[i])));

    RenewalSpec spec;
    spec.induced = [s = out.induced](long n) { return s[n - 1]; };
    spec.explicit_limit = levels;
    spec.tail = {0.0, out.fitted_power, out.kappa, out.slack * (1.0 + 1e-9), first};
    spec.label = "manneville-pomeau-induced";
    out.model = RenewalModel(std::move(spec));
    return out;
}

} // namespace thermoform
