#pragma once

// Ruelle-Perron-Frobenius data for finite Markov shifts with locally constant
// potentials: pressure, eigenfunction, conformal weights, equilibrium weights.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"
#include "symbolic.hpp"
#include "types.hpp"

namespace thermoform {

/// Transfer operator restricted to functions of the first `depth` symbols.
/// States are admissible depth-words in lexicographic order; the entry from
/// C to C' is exp(phi(C')) when C' is a one-step successor of C.
struct TransferMatrix {
    struct Entry {
        int col;
        double weight;
    };

    std::vector<Word> states;
    std::vector<std::vector<Entry>> rows;

    int size() const noexcept { return static_cast<int>(rows.size()); }

    double entry(int i, int j) const {
        for (const auto& e : rows[i])
            if (e.col == j) return e.weight;
        return 0.0;
    }

    BooleanMatrix pattern() const {
        const int n = size();
        BooleanMatrix b(static_cast<std::size_t>(n) * n, 0);
        for (int i = 0; i < n; ++i)
            for (const auto& e : rows[i]) b[i * n + e.col] = 1;
        return b;
    }

    /// y = T x
    void apply(std::span<const double> x, std::span<double> y) const {
        for (int i = 0; i < size(); ++i) {
            double s = 0.0;
            for (const auto& e : rows[i]) s += e.weight * x[e.col];
            y[i] = s;
        }
    }

    /// y = x T
    void apply_left(std::span<const double> x, std::span<double> y) const {
        std::fill(y.begin(), y.end(), 0.0);
        for (int i = 0; i < size(); ++i)
            for (const auto& e : rows[i]) y[e.col] += x[i] * e.weight;
    }

    /// Principal submatrix on the given state indices (kept in that order).
    TransferMatrix restricted(std::span<const int> keep) const {
        std::vector<int> index(size(), -1);
        for (std::size_t k = 0; k < keep.size(); ++k) index[keep[k]] = static_cast<int>(k);
        TransferMatrix sub;
        for (int i : keep) {
            sub.states.push_back(states[i]);
            auto& row = sub.rows.emplace_back();
            for (const auto& e : rows[i])
                if (index[e.col] >= 0) row.push_back({index[e.col], e.weight});
        }
        return sub;
    }
};

inline TransferMatrix build_transfer_matrix(const FiniteShift& shift, const LocallyConstantPotential& potential) {
    if (!(potential.shift() == shift)) throw std::domain_error("build_transfer_matrix: potential defined on a different shift");
    const int k = potential.depth();
    TransferMatrix tm;
    tm.states = admissible_words(shift, k);
    if (tm.states.empty()) throw std::domain_error("build_transfer_matrix: empty state set");
    std::map<Word, int> index;
    for (std::size_t i = 0; i < tm.states.size(); ++i) index.emplace(tm.states[i], static_cast<int>(i));
    tm.rows.resize(tm.states.size());
    Word next(k);
    for (std::size_t i = 0; i < tm.states.size(); ++i) {
        const Word& c = tm.states[i];
        for (Symbol x = 0; x < shift.alphabet_size(); ++x) {
            if (!shift.allows(c.back(), x)) continue;
            std::copy(c.begin() + 1, c.end(), next.begin());
            next.back() = x;
            const int j = index.at(next);
            tm.rows[i].push_back({j, std::exp(potential.value(next))});
        }
    }
    return tm;
}

namespace detail {

inline std::vector<std::vector<int>> adjacency(const TransferMatrix& m) {
    std::vector<std::vector<int>> adj(m.size());
    for (int i = 0; i < m.size(); ++i)
        for (const auto& e : m.rows[i])
            if (e.weight > 0.0) adj[i].push_back(e.col);
    return adj;
}

/// Tarjan's strongly connected components; components listed in order of
/// their smallest vertex, vertices sorted within each.
inline std::vector<std::vector<int>> strongly_connected(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    std::vector<std::vector<int>> comps;
    int counter = 0;
    // Iterative to survive long renewal chains.
    struct Frame {
        int v;
        std::size_t next;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.next < adj[f.v].size()) {
                const int w = adj[f.v][f.next++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const int v = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                std::vector<int> comp;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
        }
    }
    std::sort(comps.begin(), comps.end());
    return comps;
}

/// gcd of cycle lengths of a strongly connected graph (BFS level method).
inline int period(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<long> level(n, -1);
    std::vector<int> queue{0};
    level[0] = 0;
    long g = 0;
    for (std::size_t q = 0; q < queue.size(); ++q) {
        const int u = queue[q];
        for (int v : adj[u]) {
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                g = std::gcd(g, std::labs(level[u] + 1 - level[v]));
            }
        }
    }
    return static_cast<int>(g);
}

} // namespace detail

struct Primitivity {
    bool irreducible = false;
    int period = 0;
    bool primitive() const { return irreducible && period == 1; }
};

/// Irreducibility via strongly connected components; aperiodicity via the gcd
/// of cycle lengths.
inline Primitivity check_primitive(const TransferMatrix& m) {
    const auto adj = detail::adjacency(m);
    const auto comps = detail::strongly_connected(adj);
    Primitivity out;
    out.irreducible = comps.size() == 1;
    if (out.irreducible) out.period = detail::period(adj);
    return out;
}

struct RPFSolution {
    double pressure = 0.0;          ///< log of the Perron root (nats)
    double eigenvalue = 0.0;
    Interval eigenvalue_bounds{};   ///< Collatz-Wielandt bracket at the final iterate
    std::vector<double> h;          ///< right eigenvector, normalised so sum(m * h) = 1
    std::vector<double> m;          ///< left eigenvector, probability vector
    std::vector<double> mu;         ///< equilibrium weights h * m on the states
    double residual = 0.0;          ///< eigen-residuals |Th - lambda h|, |mT - lambda m| relative to lambda |h|, lambda |m| (sup norms)
    long iterations = 0;
};

struct RPFOptions {
    double tol = 1e-12;
    long max_iterations = 1'000'000;
};

namespace detail {

/// Power iteration on T + shift * I; the shift makes irreducible periodic
/// matrices primitive without moving the eigenvectors.
inline RPFSolution perron(const TransferMatrix& tm, const RPFOptions& opt, double shift) {
    const int n = tm.size();
    std::vector<double> h(n, 1.0), m(n, 1.0), y(n), z(n);
    RPFSolution sol;
    double lambda = 0.0;
    auto normalise_sup = [](std::vector<double>& v) {
        const double s = *std::max_element(v.begin(), v.end());
        for (double& x : v) x /= s;
    };
    for (long it = 1; it <= opt.max_iterations; ++it) {
        tm.apply(h, y);
        tm.apply_left(m, z);
        double lo = kInf, hi = 0.0;
        for (int i = 0; i < n; ++i) {
            y[i] += shift * h[i];
            z[i] += shift * m[i];
            const double r = y[i] / h[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        lambda = 0.5 * (lo + hi);
        double res_h = 0.0, res_m = 0.0;
        for (int i = 0; i < n; ++i) {
            res_h = std::max(res_h, std::abs(y[i] - lambda * h[i]));
            res_m = std::max(res_m, std::abs(z[i] - lambda * m[i]));
        }
        const double m_scale = *std::max_element(m.begin(), m.end());
        const double residual = std::max(res_h, res_m / m_scale) / lambda;
        sol.iterations = it;
        sol.eigenvalue_bounds = {lo - shift, hi - shift};
        if (residual <= opt.tol && it > 1) break;
        if (it == opt.max_iterations)
            throw ConvergenceError("solve_rpf: no convergence within " + std::to_string(opt.max_iterations) +
                                       " iterations (residual " + short_number(residual) + ")",
                                   residual);
        h.swap(y);
        m.swap(z);
        normalise_sup(h);
        normalise_sup(m);
    }
    lambda -= shift;
    const double msum = std::accumulate(m.begin(), m.end(), 0.0);
    for (double& x : m) x /= msum;
    double mh = 0.0;
    for (int i = 0; i < n; ++i) mh += m[i] * h[i];
    for (double& x : h) x /= mh;

    tm.apply(h, y);
    tm.apply_left(m, z);
    double res_h = 0.0, res_m = 0.0;
    for (int i = 0; i < n; ++i) {
        res_h = std::max(res_h, std::abs(y[i] - lambda * h[i]));
        res_m = std::max(res_m, std::abs(z[i] - lambda * m[i]));
    }
    const double res = std::max(res_h / *std::max_element(h.begin(), h.end()), res_m / *std::max_element(m.begin(), m.end())) / lambda;

    sol.eigenvalue = lambda;
    sol.pressure = std::log(lambda);
    sol.mu.resize(n);
    double musum = 0.0;
    for (int i = 0; i < n; ++i) musum += (sol.mu[i] = h[i] * m[i]);
    for (double& x : sol.mu) x /= musum;
    sol.h = std::move(h);
    sol.m = std::move(m);
    sol.residual = res;
    return sol;
}

} // namespace detail

/// Perron data of a primitive transfer matrix by power iteration on T and its
/// transpose with sup-norm renormalisation.
inline RPFSolution solve_rpf(const TransferMatrix& matrix, double tol = 1e-12) {
    const auto prim = check_primitive(matrix);
    if (!prim.irreducible)
        throw std::domain_error("solve_rpf: matrix is reducible; use decompose_components / component_pressure");
    if (prim.period != 1)
        throw std::domain_error("solve_rpf: matrix has period " + std::to_string(prim.period) +
                                "; use decompose_components / component_pressure");
    return detail::perron(matrix, RPFOptions{tol}, 0.0);
}

/// Markov chain P(C -> C') = T(C, C') h(C') / (lambda h(C)) whose stationary law is mu.
inline double equilibrium_transition(const TransferMatrix&, const RPFSolution& s, int from, const TransferMatrix::Entry& e) {
    return e.weight * s.h[e.col] / (s.eigenvalue * s.h[from]);
}

/// Entropy of the equilibrium weights viewed as a stationary Markov chain.
inline double equilibrium_entropy(const TransferMatrix& tm, const RPFSolution& s) {
    double h = 0.0;
    for (int i = 0; i < tm.size(); ++i) {
        for (const auto& e : tm.rows[i]) {
            const double p = equilibrium_transition(tm, s, i, e);
            if (p > 0.0) h -= s.mu[i] * p * std::log(p);
        }
    }
    return h;
}

/// Integral of the potential against the equilibrium weights. Equals Dp(t)
/// when the potential is the derivative direction of the pressure curve.
inline double equilibrium_integral(const TransferMatrix& tm, const RPFSolution& s, const LocallyConstantPotential& potential) {
    double v = 0.0;
    for (int i = 0; i < tm.size(); ++i) v += s.mu[i] * potential.value(tm.states[i]);
    return v;
}

/// Equilibrium mass of the cylinder [word]. Words shorter than the depth are
/// summed over their extensions; longer words use the Markov extension.
inline double cylinder_mass(const TransferMatrix& tm, const RPFSolution& s, const Word& word) {
    if (tm.states.empty()) return 0.0;
    const std::size_t k = tm.states.front().size();
    if (word.size() < k) {
        double v = 0.0;
        for (int i = 0; i < tm.size(); ++i)
            if (std::equal(word.begin(), word.end(), tm.states[i].begin())) v += s.mu[i];
        return v;
    }
    const auto find = [&](const Word& w) -> int {
        const auto it = std::lower_bound(tm.states.begin(), tm.states.end(), w);
        return (it != tm.states.end() && *it == w) ? static_cast<int>(it - tm.states.begin()) : -1;
    };
    int cur = find(Word(word.begin(), word.begin() + k));
    if (cur < 0) return 0.0;
    double mass = s.mu[cur];
    for (std::size_t pos = 1; pos + k <= word.size(); ++pos) {
        const int nxt = find(Word(word.begin() + pos, word.begin() + pos + k));
        if (nxt < 0) return 0.0;
        double p = 0.0;
        for (const auto& e : tm.rows[cur])
            if (e.col == nxt) p = equilibrium_transition(tm, s, cur, e);
        mass *= p;
        cur = nxt;
    }
    return mass;
}

/// Gibbs constant estimate: the largest of mu(C)/exp(S phi - n P) and its
/// reciprocal over admissible cylinders of length depth..n_max. S phi sums the
/// contexts fully determined by the cylinder.
inline double gibbs_constant_check(const RPFSolution& solution, const FiniteShift& shift,
                                   const LocallyConstantPotential& potential, int n_max) {
    const auto tm = build_transfer_matrix(shift, potential);
    const int k = potential.depth();
    double worst = 1.0;
    for (int n = k; n <= n_max; ++n) {
        for (const auto& w : admissible_words(shift, n)) {
            double sum = 0.0;
            for (int i = 0; i + k <= n; ++i) sum += potential.value(Word(w.begin() + i, w.begin() + i + k));
            const int terms = n - k + 1;
            const double ratio = cylinder_mass(tm, solution, w) / std::exp(sum - terms * solution.pressure);
            worst = std::max({worst, ratio, 1.0 / ratio});
        }
    }
    return worst;
}

/// Pressure of t * potential on a grid; Dp(t) is the equilibrium integral of
/// the potential, which is exact on a finite mixing shift.
inline PressureCurve pressure_curve_finite(const FiniteShift& shift, const LocallyConstantPotential& potential,
                                           std::span<const double> t_grid, double tol = 1e-12,
                                           double convexity_tol = 1e-9) {
    const auto verdict = is_topologically_mixing(shift, shift.alphabet_size() * shift.alphabet_size());
    if (!verdict.mixing) throw std::domain_error("pressure_curve_finite: shift is not topologically mixing");
    PressureCurve c;
    const std::size_t n = t_grid.size();
    c.t.assign(t_grid.begin(), t_grid.end());
    c.p.resize(n);
    c.bad_set_pressure.assign(n, -kInf);
    c.classes.assign(n, Recurrence::PositiveRecurrent);
    c.derivatives.resize(n);
    c.enclosure_width.resize(n);
    parallel_for(n, [&](std::size_t i) {
        const auto tm = build_transfer_matrix(shift, potential.scaled(t_grid[i]));
        const auto s = solve_rpf(tm, tol);
        c.p[i] = s.pressure;
        c.enclosure_width[i] = std::log(s.eigenvalue_bounds.upper) - std::log(s.eigenvalue_bounds.lower);
        const double d = equilibrium_integral(tm, s, potential);
        c.derivatives[i] = {Derivative::Kind::Finite, Interval::point(d)};
    });
    if (n >= 3 && min_second_difference(c.t, c.p) < -convexity_tol)
        throw std::runtime_error("pressure_curve_finite: computed curve fails the convexity check");
    return c;
}

/// Nontrivial irreducible components (those carrying a cycle) of the symbol graph.
inline std::vector<std::vector<Symbol>> decompose_components(const FiniteShift& shift) {
    const int n = shift.alphabet_size();
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (shift.allows(i, j)) adj[i].push_back(j);
    std::vector<std::vector<Symbol>> out;
    for (auto& comp : detail::strongly_connected(adj)) {
        const bool cycle = comp.size() > 1 || shift.allows(comp[0], comp[0]);
        if (cycle) out.push_back(std::move(comp));
    }
    return out;
}

struct ComponentPressure {
    struct Component {
        std::vector<int> states;      ///< indices into the full transfer matrix
        std::vector<Symbol> symbols;  ///< symbols appearing in those states
        int period = 1;
        RPFSolution solution;         ///< Perron data of the restricted operator
    };
    std::vector<Component> components;
    double pressure = -kInf;             ///< max over components
    std::vector<std::size_t> maximizers; ///< components attaining the max (within tolerance)
};

/// Pressure of a possibly non-mixing shift: the maximum over its irreducible
/// components. Several maximizers means several equilibrium states.
inline ComponentPressure component_pressure(const FiniteShift& shift, const LocallyConstantPotential& potential,
                                            double tol = 1e-12, double tie_tol = 1e-9) {
    const auto tm = build_transfer_matrix(shift, potential);
    const auto adj = detail::adjacency(tm);
    ComponentPressure out;
    for (auto& comp : detail::strongly_connected(adj)) {
        const bool cycle = comp.size() > 1 || std::find(adj[comp[0]].begin(), adj[comp[0]].end(), comp[0]) != adj[comp[0]].end();
        if (!cycle) continue;
        ComponentPressure::Component c;
        const auto sub = tm.restricted(comp);
        c.period = detail::period(detail::adjacency(sub));
        c.solution = c.period == 1 ? detail::perron(sub, RPFOptions{tol}, 0.0) : detail::perron(sub, RPFOptions{tol}, 1.0);
        for (int s : comp)
            for (Symbol x : tm.states[s]) c.symbols.push_back(x);
        std::sort(c.symbols.begin(), c.symbols.end());
        c.symbols.erase(std::unique(c.symbols.begin(), c.symbols.end()), c.symbols.end());
        c.states = std::move(comp);
        out.pressure = std::max(out.pressure, c.solution.pressure);
        out.components.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < out.components.size(); ++i)
        if (out.components[i].solution.pressure >= out.pressure - tie_tol) out.maximizers.push_back(i);
    return out;
}

/// Pressure curve of a possibly non-mixing shift via the component rule. A
/// change of maximizing component between grid points is reported as a
/// transition located by bisection.
inline PressureCurve pressure_curve_components(const FiniteShift& shift, const LocallyConstantPotential& potential,
                                               std::span<const double> t_grid, double tol = 1e-12) {
    PressureCurve c;
    const std::size_t n = t_grid.size();
    c.t.assign(t_grid.begin(), t_grid.end());
    c.p.resize(n);
    c.bad_set_pressure.assign(n, -kInf);
    c.classes.assign(n, Recurrence::PositiveRecurrent);
    c.derivatives.resize(n);
    c.enclosure_width.assign(n, 0.0);
    std::vector<std::size_t> leader(n);
    const auto tm = build_transfer_matrix(shift, potential);
    auto evaluate = [&](double t) { return component_pressure(shift, potential.scaled(t), tol); };
    auto slope = [&](const ComponentPressure& cp, std::size_t k) {
        const auto sub = tm.restricted(cp.components[k].states);
        double d = 0.0;
        for (int i = 0; i < sub.size(); ++i) d += cp.components[k].solution.mu[i] * potential.value(sub.states[i]);
        return d;
    };
    parallel_for(n, [&](std::size_t i) {
        const auto cp = evaluate(t_grid[i]);
        c.p[i] = cp.pressure;
        leader[i] = cp.maximizers.front();
        if (cp.maximizers.size() == 1) {
            const double d = slope(cp, leader[i]);
            c.derivatives[i] = {Derivative::Kind::Finite, Interval::point(d)};
        } else {
            // One-sided derivatives differ; report their hull.
            double lo = kInf, hi = -kInf;
            for (auto k : cp.maximizers) {
                const double d = slope(cp, k);
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            c.derivatives[i] = {Derivative::Kind::Finite, {lo, hi}};
        }
    });
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (leader[i] == leader[i + 1]) continue;
        double a = t_grid[i], b = t_grid[i + 1];
        const std::size_t left = leader[i];
        for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
            const double mid = 0.5 * (a + b);
            const auto cp = evaluate(mid);
            const bool left_wins = cp.components[left].solution.pressure >= cp.pressure - 1e-14;
            (left_wins ? a : b) = mid;
        }
        c.transitions.push_back({0.5 * (a + b), {a, b}, TransitionKind::ComponentSwitch, Smoothness::FirstOrder});
    }
    return c;
}

} // namespace thermoform
