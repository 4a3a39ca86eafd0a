// Acceptance checks: one PASS/FAIL line per criterion with its runtime budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "thermoform/thermoform.hpp"

using namespace thermoform;

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& s) {
        if (!detail.empty()) detail += "; ";
        detail += s;
    }
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

LocallyConstantPotential bernoulli(double p) {
    const std::vector<double> phi = {std::log(p), std::log(1.0 - p)};
    return LocallyConstantPotential::from_symbols(FiniteShift::full(2), phi);
}

SequenceBuild grid_dfu(double gamma, double delta) {
    SequenceSpec spec;
    spec.gamma = gamma;
    spec.delta = delta;
    return realize(spec);
}

SequenceBuild hofbauer_row(double gamma, double head, std::optional<double> target) {
    SequenceSpec spec;
    spec.family = Family::Hofbauer;
    spec.gamma = gamma;
    spec.head = {head};
    spec.normalized = target.has_value();
    spec.normalization_target = target;
    return realize(spec);
}

Check rpf_exactness() {
    Check c;
    const auto full = FiniteShift::full(2);
    const auto s = solve_rpf(build_transfer_matrix(full, LocallyConstantPotential::zero(full)));
    c.require(std::abs(s.pressure - kLog2) <= 1e-12, "full shift |P - log 2| = " + fmt("%.3g", std::abs(s.pressure - kLog2)));
    double worst_p = 0.0, worst_w = 0.0;
    for (double p : {0.3, 0.5, 0.9}) {
        const auto tm = build_transfer_matrix(full, bernoulli(p));
        const auto sol = solve_rpf(tm);
        worst_p = std::max(worst_p, std::abs(sol.pressure));
        for (int n = 1; n <= 6; ++n)
            for (const auto& w : admissible_words(full, n)) {
                double prod = 1.0;
                for (Symbol x : w) prod *= x == 0 ? p : 1.0 - p;
                worst_w = std::max(worst_w, std::abs(cylinder_mass(tm, sol, w) - prod));
            }
    }
    c.require(worst_p <= 1e-10, "Bernoulli |P| = " + fmt("%.3g", worst_p));
    c.require(worst_w <= 1e-10, "cylinder weight error " + fmt("%.3g", worst_w));
    c.note("max |P| " + fmt("%.2g", worst_p) + ", max weight error " + fmt("%.2g", worst_w));
    return c;
}

Check nonmixing() {
    Check c;
    const FiniteShift shift({{1, 1, 0, 0}, {1, 1, 1, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}});
    c.require(decompose_components(shift).size() == 2, "expected two components");
    const std::vector<double> psi = {-1.0, -1.0, -2.0, -2.0};
    const auto pot = LocallyConstantPotential::from_symbols(shift, psi);
    const auto grid = linspace(-2.0, 2.0, 11);
    const auto curve = pressure_curve_components(shift, pot, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) err = std::max(err, std::abs(curve.p[i] - (std::max(-grid[i], -2.0 * grid[i]) + kLog2)));
    c.require(err <= 1e-10, "curve error " + fmt("%.3g", err));
    const auto at0 = component_pressure(shift, pot.scaled(0.0));
    c.require(at0.maximizers.size() == 2, "maximizers at t = 0: " + std::to_string(at0.maximizers.size()));
    c.note("max error " + fmt("%.2g", err) + ", " + std::to_string(at0.maximizers.size()) + " maximizing components at t = 0");
    return c;
}

Check renewal_oracles() {
    Check c;
    double err = 0.0, kink_err = 0.0;
    for (double rate : {0.5, 1.3}) {
        const auto hof = geometric_model(Family::Hofbauer, rate);
        const auto grid = geometric_model(Family::Grid, rate);
        for (double t : linspace(-2.0, 4.0, 101)) {
            err = std::max(err, std::abs(solve_pressure(hof, t).p - std::max(0.0, kLog2 - t * rate)));
            err = std::max(err, std::abs(solve_pressure(grid, t).p - std::max(kLog2, kLog3 - t * rate)));
        }
        const auto fh = locate_flat_interval(hof, {-2.0, 4.0});
        const auto fg = locate_flat_interval(grid, {-2.0, 4.0});
        if (!fh || !fg) {
            c.require(false, "flat interval not found");
            continue;
        }
        kink_err = std::max(kink_err, std::abs(fh->t0() - kLog2 / rate));
        kink_err = std::max(kink_err, std::abs(fg->t0() - (kLog3 - kLog2) / rate));
    }
    c.require(err <= 1e-9, "pressure error " + fmt("%.3g", err));
    c.require(kink_err <= 1e-6, "kink error " + fmt("%.3g", kink_err));
    c.note("max pressure error " + fmt("%.2g", err) + ", max kink error " + fmt("%.2g", kink_err));
    return c;
}

Check hofbauer_table() {
    Check c;
    // Expected class from the row semantics: sum e^{s_n} against 1, then a
    // finite return time iff the tail exponent exceeds 2.
    const auto expected = [](const SequenceBuild& b, double total) {
        if (total > 1.0 + 1e-9) return Recurrence::PositiveRecurrent;
        if (total < 1.0 - 1e-9) return Recurrence::Transient;
        return b.sequence.beta() > 2.0 ? Recurrence::PositiveRecurrent : Recurrence::NullRecurrent;
    };
    const std::pair<const char*, SequenceBuild> specs[] = {
        {"sum > 1, sum a_k finite", hofbauer_row(0.0, 0.0, std::nullopt)},
        {"sum > 1, sum a_k infinite", hofbauer_row(3.0, 0.0, std::nullopt)},
        {"sum = 1, finite return", hofbauer_row(3.0, -1.0, 1.0)},
        {"sum = 1, infinite return", hofbauer_row(1.5, -1.0, 1.0)},
        {"sum < 1", hofbauer_row(3.0, -1.0, 0.5)},
    };
    const Recurrence semantic[] = {Recurrence::PositiveRecurrent, Recurrence::PositiveRecurrent, Recurrence::PositiveRecurrent,
                                   Recurrence::NullRecurrent, Recurrence::Transient};
    int i = 0;
    std::string got;
    for (const auto& [name, b] : specs) {
        const auto total = exp_sum(b.sequence);
        const double mid = total.diverges() ? kInf : total.mid();
        const Recurrence want = expected(b, mid);
        c.require(want == semantic[i], std::string(name) + ": construction missed its row");
        const auto cls = classify(b.model, 1.0);
        c.require(cls.recurrence == want, std::string(name) + ": classify gave " + std::string(to_string(cls.recurrence)));
        c.require(cls.pressure.g.lower <= cls.pressure.g.upper, std::string(name) + ": no enclosure");
        got += (i ? ", " : "") + std::string(to_string(cls.recurrence));
        ++i;
    }
    c.note(got);
    return c;
}

Check main_grid_cases() {
    Check c;
    const double h = 1e-3;
    {
        const auto b = grid_dfu(3.0, 0.2);
        const auto flat = locate_flat_interval(b.model, {0.0, 10.0});
        if (!flat || flat->right_unbounded) {
            c.require(false, "gamma = 3: no bounded flat interval");
            return c;
        }
        c.require(std::abs(flat->t0() - 1.0) <= 1e-6, "gamma = 3: t0 = " + fmt("%.10g", flat->t0()));
        c.require(flat->t1() > 1.0 + 1e-3, "gamma = 3: t1 = " + fmt("%.10g", flat->t1()));
        const auto d = pressure_derivative(b.model, 1.0 - h);
        c.require(d.kind == Derivative::Kind::Finite && d.value.upper <= -0.01, "gamma = 3: Dp(1 - h) = " + fmt("%.4g", d.value.mid()));
        const double probes[] = {0.5, 0.5 * (1.0 + flat->t1()), flat->t1() + 0.5};
        const Recurrence want[] = {Recurrence::PositiveRecurrent, Recurrence::Transient, Recurrence::PositiveRecurrent};
        for (int k = 0; k < 3; ++k)
            c.require(classify(b.model, probes[k]).recurrence == want[k], "gamma = 3: class at t = " + fmt("%.4g", probes[k]));
        const auto ends = smoothness_at_flat_ends(b.model, *flat);
        c.require(ends.agree, "gamma = 3: smoothness at t0 and t1 differ");
        c.note("gamma = 3: flat [" + fmt("%.6f", flat->t0()) + ", " + fmt("%.6f", flat->t1()) + "], Dp(1-h) = " + fmt("%.4f", d.value.mid()) +
               ", ends " + std::string(to_string(ends.onset.smoothness)) + "/" + std::string(to_string(ends.end.smoothness)));
    }
    {
        const auto b = grid_dfu(1.5, 0.2);
        double prev = kInf;
        std::string seq;
        for (double hh : {1e-1, 1e-2, 1e-3, 1e-4}) {
            const double d = std::abs(pressure_derivative(b.model, 1.0 - hh).value.mid());
            c.require(d < prev, "gamma = 1.5: |Dp(1 - h)| not decreasing at h = " + fmt("%g", hh));
            prev = d;
            seq += (seq.empty() ? "" : " > ") + fmt("%.3g", d);
        }
        c.require(classify(b.model, 1.0).recurrence == Recurrence::NullRecurrent, "gamma = 1.5: classify(1) is not NullRecurrent");
        const auto flat = locate_flat_interval(b.model, {0.0, 10.0});
        if (!flat || flat->right_unbounded) {
            c.require(false, "gamma = 1.5: no bounded flat interval");
        } else {
            const auto ends = smoothness_at_flat_ends(b.model, *flat);
            c.require(ends.agree, "gamma = 1.5: t0 is " + std::string(to_string(ends.onset.smoothness)) + " (H diverges) but t1 = " +
                                      fmt("%.6f", flat->t1()) + " is " + std::string(to_string(ends.end.smoothness)) + " (H = " +
                                      fmt("%.6g", ends.end.return_time.mid()) + ")");
        }
        c.note("gamma = 1.5: |Dp(1-h)| " + seq);
    }
    return c;
}

Check dissipativity() {
    Check c;
    const auto b = hofbauer_row(3.0, -1.0, 0.5);
    const auto total = exp_sum(b.sequence);
    c.require(std::abs(total.lower - 0.5) <= 1e-8 && std::abs(total.upper - 0.5) <= 1e-8, "sum e^{s_n} not certified to 0.5 +- 1e-8");
    const auto r = conformal_atom_masses(b.model, 1.0);
    c.require(r.verdict == AtomVerdict::Dissipative, "verdict is not dissipative");
    c.require(std::abs(r.atom.lower - 0.5) <= 1e-8 && std::abs(r.atom.upper - 0.5) <= 1e-8, "atom " + fmt("%.12g", r.atom.mid()));
    const double want = r.atom.mid() * std::exp(b.sequence.a(0));
    const auto pre = r.preimage_mass(b.model, 1);
    c.require(std::abs(pre.mid() - want) <= 1e-12, "level-1 preimage mass " + fmt("%.12g", pre.mid()));
    c.note("atom " + fmt("%.12f", r.atom.mid()) + ", preimage " + fmt("%.12f", pre.mid()));
    return c;
}

Check cyr_sarig() {
    Check c;
    struct Case {
        RenewalModel model;
        std::function<bool(double)> transient;
    };
    const double rate = 0.9;
    const auto dfu = grid_dfu(3.0, 0.2);
    const auto flat = locate_flat_interval(dfu.model, {0.0, 10.0});
    if (!flat) {
        c.require(false, "no flat interval for the DFU model");
        return c;
    }
    const double t1 = flat->t1();
    const Case cases[] = {
        {geometric_model(Family::Hofbauer, rate), [&](double t) { return t > kLog2 / rate; }},
        {geometric_model(Family::Grid, rate), [&](double t) { return t > (kLog3 - kLog2) / rate; }},
        {dfu.model, [&](double t) { return t > 1.0 && t < t1; }},
    };
    int checked = 0, transient = 0;
    double worst_small = 0.0, least_large = kInf;
    for (const auto& cs : cases) {
        for (double t : linspace(-1.0, 4.5, 56)) {
            const bool want = cs.transient(t);
            const auto w = cyr_sarig_witness(cs.model, t);
            ++checked;
            c.require((w.u0.lower > 0.0) == want, cs.model.label() + ": u0 sign wrong at t = " + fmt("%.3g", t));
            if (!want) continue;
            ++transient;
            worst_small = std::max(worst_small, std::abs(w.shift_small));
            least_large = std::min(least_large, w.shift_large);
        }
    }
    c.require(worst_small <= 1e-8, "constancy violated: |dp| = " + fmt("%.3g", worst_small));
    c.require(least_large >= 1e-6, "no strict increase: dp = " + fmt("%.3g", least_large));
    c.note(std::to_string(checked) + " points, " + std::to_string(transient) + " transient; max |dp(u0/2)| " + fmt("%.2g", worst_small) +
           ", min dp(2u0) " + fmt("%.2g", least_large));
    return c;
}

Check chebyshev() {
    Check c;
    const auto table = periodic_table(IntervalMap::chebyshev(), 14);
    double raw_err = 0.0, ext_err = 0.0;
    for (double t : {-2.0, 0.5, 2.0}) {
        const auto g = gurevich_estimate(table, t);
        raw_err = std::max(raw_err, std::abs(g.raw.back() - chebyshev_pressure_exact(t)));
        ext_err = std::max(ext_err, std::abs(g.extrapolated - chebyshev_pressure_exact(t)));
    }
    const auto grid = linspace(-3.0, 1.0, 41);
    std::vector<double> p;
    for (double t : grid) p.push_back(gurevich_estimate(table, t).raw.back());
    const auto fit = fit_two_slopes(grid, p);
    c.require(raw_err <= 0.2, "raw error " + fmt("%.3g", raw_err));
    c.require(ext_err <= 0.05, "extrapolated error " + fmt("%.3g", ext_err));
    c.require(std::abs(fit.kink + 1.0) <= 0.05, "kink at " + fmt("%.4g", fit.kink));
    c.note("raw error " + fmt("%.3f", raw_err) + ", extrapolated error " + fmt("%.2g", ext_err) + ", kink " + fmt("%.4f", fit.kink));
    return c;
}

Check manneville_pomeau() {
    Check c;
    const auto m = mp_induced_model(0.5, 200);
    const auto grid = linspace(0.0, 1.5, 31);
    std::vector<double> p;
    for (double t : grid) p.push_back(solve_pressure(m.model, t).p);
    const double p1 = solve_pressure(m.model, 1.0).p;
    c.require(std::abs(p1) <= 0.05, "p(1) = " + fmt("%.4g", p1));
    for (std::size_t i = 1; i < p.size(); ++i)
        c.require(p[i] <= p[i - 1] + 1e-12, "p increases at t = " + fmt("%.3g", grid[i]));
    for (double t : {1.2, 1.5}) {
        const double v = solve_pressure(m.model, t).p;
        c.require(std::abs(v) <= 0.02, "p(" + fmt("%.2g", t) + ") = " + fmt("%.4g", v));
    }
    c.note("p(0) = " + fmt("%.4f", p.front()) + ", p(1) = " + fmt("%.4f", p1) + ", p(1.5) = " + fmt("%.4f", p.back()));
    return c;
}

Check base_set() {
    Check c;
    const RealizedSequence seq(hofbauer_head(-std::log(4.0), 30), 3.0);
    const auto model = hofbauer_doubling_model(seq);
    const auto cls = classify(model, 1.0);
    c.require(cls.recurrence == Recurrence::Transient, "model is not transient");
    const auto table = periodic_table(IntervalMap::doubling_grid(seq), 20);
    double least = kInf;
    for (const auto& pts : table) least = std::min(least, zn_sum(pts, 1.0, ZnBase::interval(0.0, 0.5)).value);
    c.require(least >= 1.0, "Z_n on [0, 1/2) dips to " + fmt("%.4g", least));
    const auto d = sarig_series_diagnostic(table, 1.0, cls.pressure.p, ZnBase::interval(0.5, 1.0));
    c.require(d.rate <= -0.01, "rate on [1/2, 1) = " + fmt("%.4g", d.rate));
    c.note("min Z_n on [0, 1/2) " + fmt("%.4g", least) + ", rate on [1/2, 1) " + fmt("%.4f", d.rate));
    return c;
}

Check cross_route() {
    Check c;
    const auto m = geometric_model(Family::Hofbauer, 0.5);
    const double t = 0.5;
    const double root = solve_pressure(m, t).p;
    double prev = -kInf, last = 0.0;
    for (int depth : {5, 10, 20, 40, 80, 160, 400}) {
        const auto [shift, pot] = truncated_realization(m, t, depth);
        const double q = solve_rpf(build_transfer_matrix(shift, pot)).pressure;
        c.require(q >= prev - 1e-12, "not monotone at depth " + std::to_string(depth));
        prev = last = q;
    }
    c.require(std::abs(last - root) <= 1e-4, "gap " + fmt("%.3g", std::abs(last - root)));
    c.note("depth 400 gap " + fmt("%.2g", std::abs(last - root)));
    return c;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget;
        std::function<Check()> run;
    };
    const Criterion criteria[] = {
        {"RPF exactness", 1.0, rpf_exactness},
        {"non-mixing components", 1.0, nonmixing},
        {"closed-form renewal oracles", 5.0, renewal_oracles},
        {"Hofbauer recurrence table", 10.0, hofbauer_table},
        {"grid transitions", 60.0, main_grid_cases},
        {"dissipativity witness", 5.0, dissipativity},
        {"transience witness", 10.0, cyr_sarig},
        {"Chebyshev periodic orbits", 60.0, chebyshev},
        {"Manneville-Pomeau properties", 120.0, manneville_pomeau},
        {"base-set pathology", 30.0, base_set},
        {"cross-route consistency", 60.0, cross_route},
    };
    int failed = 0, index = 0;
    for (const auto& cr : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Check c;
        try {
            c = cr.run();
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        c.require(secs < cr.budget, "over budget");
        if (!c.ok) ++failed;
        std::printf("%s %2d %s (%.2f s < %.0f s): %s\n", c.ok ? "PASS" : "FAIL", index, cr.name, secs, cr.budget, c.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", index - failed, index);
    return failed ? 1 : 0;
}
