// thermoform command-line front end.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "demos.hpp"

namespace fs = std::filesystem;
using namespace thermoform;
using namespace thermoform::cli;

namespace {

constexpr double kFloorTol = 1e-12;
constexpr double kConvexityTol = 1e-9;

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// JSON has no infinities; they go out as strings.
json num(double x) {
    if (std::isfinite(x)) return x;
    return fmt(x);
}

json interval_json(const Interval& i) { return json::array({num(i.lower), num(i.upper)}); }

json sum_json(const CertifiedSum& s) {
    return {{"enclosure", interval_json(s.enclosure())}, {"terms", s.n_terms}, {"tail", to_string(s.tail_method)}};
}

std::string_view derivative_kind(Derivative::Kind k) {
    switch (k) {
    case Derivative::Kind::Finite: return "finite";
    case Derivative::Kind::ZeroLimit: return "zero-limit";
    case Derivative::Kind::Flat: return "flat";
    }
    return "?";
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

/// Everything a run produces, assembled in a fixed order.
struct Output {
    json report = json::object();
    json transitions = json::array();
    json warnings = json::array();
    std::vector<std::pair<std::string, std::string>> files;   ///< extra files, name -> content
    std::optional<std::string> curve_csv;
    std::vector<std::string> lines;                           ///< printed to stdout
};

/// The pieces of a model each task needs; built once per run.
struct Model {
    std::string kind;
    std::optional<FiniteShift> shift;
    std::optional<LocallyConstantPotential> potential;
    std::optional<RenewalModel> renewal;
    std::optional<IntervalMap> map;
    std::optional<RealizedSequence> sequence;
    json info = json::object();
};

json sequence_info(const SequenceBuild& b) {
    json j = {{"cut", b.sequence.cut()}, {"beta", num(b.sequence.beta())}, {"slope", num(b.sequence.slope())},
              {"kappa", num(b.sequence.kappa())}};
    if (b.normalization)
        j["normalization"] = {{"shift_a1", num(b.normalization->shift)}, {"sum_exp_s", sum_json(b.normalization->total)}};
    if (b.perturbation)
        j["perturbation"] = {{"delta", num(b.perturbation->delta)},
                             {"delta_prime", num(b.perturbation->delta_prime)},
                             {"half_sum_exp_s", sum_json(b.perturbation->half_total)}};
    return j;
}

std::string sequence_table(const RealizedSequence& seq, long n_max) {
    std::ostringstream os;
    seq.write_table(os, n_max);
    return os.str();
}

Model build_model(const ModelConfig& cfg, const EngineOptions& opt, Output& out) {
    Model m;
    if (const auto* fs_cfg = std::get_if<FiniteShiftConfig>(&cfg)) {
        m.kind = "finite_shift";
        m.shift.emplace(fs_cfg->transitions);
        m.potential.emplace(*m.shift, fs_cfg->depth, fs_cfg->values);
        const auto verdict = is_topologically_mixing(*m.shift, m.shift->alphabet_size() * m.shift->alphabet_size());
        m.info = {{"alphabet", m.shift->alphabet_size()}, {"mixing", verdict.mixing}};
        if (verdict.mixing) m.info["mixing_exponent"] = verdict.exponent;
        else m.info["components"] = decompose_components(*m.shift);
        return m;
    }
    const auto from_sequence = [&](const SequenceConfig& sc) {
        if (sc.geometric_rate) {
            m.renewal = geometric_model(sc.spec.family, *sc.geometric_rate);
            m.info["geometric_rate"] = num(*sc.geometric_rate);
            return;
        }
        const SequenceBuild b = realize(sc.spec, opt);
        m.sequence = b.sequence;
        m.renewal = b.model;
        m.info["sequence"] = sequence_info(b);
        out.files.emplace_back("sequence.csv", sequence_table(b.sequence, 64));
    };
    if (const auto* sc = std::get_if<SequenceConfig>(&cfg)) {
        m.kind = "renewal";
        m.info["family"] = to_string(sc->spec.family);
        from_sequence(*sc);
        return m;
    }
    const auto& ic = std::get<IntervalConfig>(cfg);
    m.kind = "interval";
    switch (ic.kind) {
    case IntervalConfig::Kind::Chebyshev:
        m.map = IntervalMap::chebyshev();
        break;
    case IntervalConfig::Kind::MannevillePomeau: {
        m.map = IntervalMap::manneville_pomeau(ic.alpha);
        const InducedMapModel im = mp_induced_model(ic.alpha, ic.levels);
        m.renewal = im.model;
        m.info["induced"] = {{"levels", ic.levels}, {"fitted_power", num(im.fitted_power)}, {"kappa", num(im.kappa)},
                             {"slack", num(im.slack)}};
        break;
    }
    case IntervalConfig::Kind::DoublingGrid:
        m.info["family"] = "hofbauer";
        from_sequence(*ic.sequence);
        m.renewal = hofbauer_doubling_model(*m.sequence);
        m.map = IntervalMap::doubling_grid(*m.sequence);
        break;
    }
    m.info["map"] = m.map->name();
    return m;
}

[[noreturn]] void unsupported(const std::string& task, const std::string& kind) {
    throw ValidationError("config.task." + task + ": not available for " + kind + " models");
}

/// Rejects a curve that dips below the floor or fails convexity.
void check_curve(const PressureCurve& c, const std::string& where) {
    for (std::size_t i = 0; i < c.t.size(); ++i)
        if (c.p[i] < c.bad_set_pressure[i] - kFloorTol)
            throw std::runtime_error(where + ": p(" + fmt(c.t[i]) + ") lies below the bad-set floor");
    if (c.t.size() >= 3 && min_second_difference(c.t, c.p) < -kConvexityTol)
        throw std::runtime_error(where + ": curve fails the convexity check");
}

json transition_json(const Transition& tr) {
    return {{"t", num(tr.t)}, {"bracket", interval_json(tr.bracket)}, {"kind", to_string(tr.kind)},
            {"smoothness", to_string(tr.smoothness)}};
}

void emit_curve(const PressureCurve& c, std::span<const std::string> classes, Output& out) {
    std::string csv = "t,p,class,Dp,G,enclosure_width\n";
    json rows = json::array();
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        const Derivative& d = c.derivatives[i];
        const bool has_g = !c.g_values.empty();
        csv += fmt(c.t[i]) + "," + fmt(c.p[i]) + "," + classes[i] + "," + fmt(d.value.mid()) + "," +
               (has_g ? fmt(c.g_values[i].mid()) : std::string("")) + "," + fmt(c.enclosure_width[i]) + "\n";
        json row = {{"t", num(c.t[i])}, {"p", num(c.p[i])}, {"p_enclosure_width", num(c.enclosure_width[i])},
                    {"bad_set_pressure", num(c.bad_set_pressure[i])}, {"class", classes[i]},
                    {"Dp", interval_json(d.value)}, {"Dp_kind", derivative_kind(d.kind)}};
        if (has_g) row["G"] = interval_json(c.g_values[i]);
        rows.push_back(std::move(row));
    }
    out.curve_csv = csv;
    out.report["outputs"]["pressure_curve"] = {{"points", std::move(rows)},
                                               {"min_second_difference", num(c.t.size() >= 3 ? min_second_difference(c.t, c.p) : 0.0)}};
    for (const auto& tr : c.transitions) out.transitions.push_back(transition_json(tr));
}

std::vector<std::string> class_names(const PressureCurve& c) {
    std::vector<std::string> out;
    for (auto r : c.classes) out.emplace_back(to_string(r));
    return out;
}

void gnuplot_script(Output& out, const std::string& title) {
    out.files.emplace_back("plot.gp", "set datafile separator ','\n"
                                      "set key autotitle columnhead\n"
                                      "set xlabel 't'\n"
                                      "set ylabel 'p(t)'\n"
                                      "set title '" + title + "'\n"
                                      "set terminal pngcairo size 900,600\n"
                                      "set output 'curve.png'\n"
                                      "plot 'curve.csv' using 1:2 with linespoints pt 7 ps 0.5 title 'p(t)'\n");
}

/// Pressure curve of the Chebyshev map from periodic-orbit sums. The curve
/// carries the raw (1/n) log Z_n, which is convex in t; the Aitken value goes
/// to the report. Dp by central differences.
PressureCurve chebyshev_curve(const IntervalMap& map, const CurveTask& task, Output& out) {
    const auto table = periodic_table(map, task.n_max);
    const auto grid = linspace(task.t_min, task.t_max, task.steps);
    PressureCurve c;
    c.t = grid;
    c.p.resize(grid.size());
    c.enclosure_width.resize(grid.size());
    c.bad_set_pressure.assign(grid.size(), -kInf);
    std::vector<double> extrapolated(grid.size()), exact(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const auto g = gurevich_estimate(table, grid[i]);
        c.p[i] = g.raw.back();
        c.enclosure_width[i] = g.spread;
        extrapolated[i] = g.extrapolated;
        exact[i] = chebyshev_pressure_exact(grid[i]);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == grid.size() ? i : i + 1;
        const double d = grid.size() > 1 ? (c.p[b] - c.p[a]) / (grid[b] - grid[a]) : 0.0;
        c.derivatives.push_back({Derivative::Kind::Finite, Interval::point(d)});
    }
    json reference = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i)
        reference.push_back({{"t", num(grid[i])}, {"extrapolated", num(extrapolated[i])}, {"exact", num(exact[i])}});
    out.report["outputs"]["chebyshev_reference"] = std::move(reference);
    if (grid.size() >= 6) {
        const KinkFit k = fit_two_slopes(c.t, c.p);
        Transition tr{k.kink, {k.kink, k.kink}, TransitionKind::ComponentSwitch, Smoothness::FirstOrder};
        json j = transition_json(tr);
        j["kind"] = "kink-fit";
        j["slopes"] = json::array({num(k.slope_left), num(k.slope_right)});
        j["sse"] = num(k.sse);
        out.transitions.push_back(std::move(j));
    }
    return c;
}

void run_pressure_curve(const Model& m, const CurveTask& task, const EngineOptions& opt, Output& out) {
    const auto grid = linspace(task.t_min, task.t_max, task.steps);
    PressureCurve c;
    std::vector<std::string> classes;
    if (m.shift) {
        const bool mixing = m.info["mixing"].get<bool>();
        c = mixing ? pressure_curve_finite(*m.shift, *m.potential, grid, std::min(opt.root_tol, 1e-12))
                   : pressure_curve_components(*m.shift, *m.potential, grid, std::min(opt.root_tol, 1e-12));
        classes = class_names(c);
    } else if (m.renewal) {
        c = pressure_curve(*m.renewal, grid, opt);
        classes = class_names(c);
    } else {
        c = chebyshev_curve(*m.map, task, out);
        classes.assign(c.t.size(), "n/a");
        out.warnings.push_back("chebyshev curve is a periodic-orbit estimate at the largest n; enclosure_width is the spread of the last three raw terms");
    }
    check_curve(c, "pressure_curve");
    emit_curve(c, classes, out);
    gnuplot_script(out, m.info.value("map", m.kind));
}

void run_classify(const Model& m, const ClassifyTask& task, const EngineOptions& opt, const std::string& name, Output& out) {
    json rows = json::array();
    std::string csv = "t,p,class,regime,G_lower,G_upper,H_lower,H_upper\n";
    if (m.shift) {
        for (double t : task.t) {
            const auto cp = component_pressure(*m.shift, m.potential->scaled(t), std::min(opt.root_tol, 1e-12));
            rows.push_back({{"t", num(t)}, {"p", num(cp.pressure)}, {"class", "PositiveRecurrent"},
                            {"maximizing_components", cp.maximizers.size()}});
            csv += fmt(t) + "," + fmt(cp.pressure) + ",PositiveRecurrent,finite,,,,\n";
            out.lines.push_back(name + ": t=" + fmt(t) + " p=" + fmt(cp.pressure) + " class=PositiveRecurrent");
        }
    } else if (m.renewal) {
        std::vector<Classification> cls(task.t.size());
        parallel_for(task.t.size(), [&](std::size_t i) { cls[i] = classify(*m.renewal, task.t[i], opt); });
        for (std::size_t i = 0; i < cls.size(); ++i) {
            const auto& c = cls[i];
            const double t = task.t[i];
            json row = {{"t", num(t)}, {"p", num(c.pressure.p)}, {"p_bracket", interval_json(c.pressure.bracket)},
                        {"bad_set_pressure", num(c.pressure.bad_set_pressure)}, {"class", to_string(c.recurrence)},
                        {"regime", to_string(c.pressure.regime)}, {"G", sum_json(c.g)}};
            const Interval h = c.return_time ? c.return_time->enclosure() : Interval{kInf, kInf};
            if (c.return_time) row["H"] = sum_json(*c.return_time);
            rows.push_back(std::move(row));
            csv += fmt(t) + "," + fmt(c.pressure.p) + "," + std::string(to_string(c.recurrence)) + "," +
                   std::string(to_string(c.pressure.regime)) + "," + fmt(c.g.lower) + "," + fmt(c.g.upper) + "," +
                   (c.return_time ? fmt(h.lower) + "," + fmt(h.upper) : std::string(",")) + "\n";
            out.lines.push_back(name + ": t=" + fmt(t) + " p=" + fmt(c.pressure.p) + " class=" +
                                std::string(to_string(c.recurrence)) + " G=[" + fmt(c.g.lower) + ", " + fmt(c.g.upper) + "]" +
                                (c.return_time ? " H=[" + fmt(h.lower) + ", " + fmt(h.upper) + "]" : std::string()));
        }
    } else {
        unsupported("classify", m.kind + " (" + m.map->name() + ")");
    }
    out.report["outputs"]["classify"] = std::move(rows);
    out.files.emplace_back("classify.csv", csv);
}

/// Replaces the transitions found along the curve with the refined ones.
void run_transitions(const Model& m, const TransitionsTask& task, const EngineOptions& opt, Output& out) {
    json result = json::object();
    out.transitions = json::array();
    if (m.shift) {
        const auto grid = linspace(task.a, task.b, 65);
        const auto c = pressure_curve_components(*m.shift, *m.potential, grid, std::min(opt.root_tol, 1e-12));
        json list = json::array();
        for (const auto& tr : c.transitions) {
            list.push_back(transition_json(tr));
            out.transitions.push_back(transition_json(tr));
        }
        result["component_switches"] = std::move(list);
    } else if (m.renewal) {
        const auto flat = locate_flat_interval(*m.renewal, {task.a, task.b}, opt.root_tol, opt);
        if (!flat) {
            result["flat_interval"] = nullptr;
        } else {
            json f = {{"left", interval_json(flat->left)}, {"right", interval_json(flat->right)},
                      {"left_unbounded", flat->left_unbounded}, {"right_unbounded", flat->right_unbounded},
                      {"t0", num(flat->t0())}, {"t1", num(flat->t1())}};
            const auto add = [&](double t, Interval br, TransitionKind kind) {
                const auto v = smoothness_at_transition(*m.renewal, t, opt);
                Transition tr{t, br, kind, v.smoothness};
                json j = transition_json(tr);
                j["return_time"] = sum_json(v.return_time);
                out.transitions.push_back(j);
                return v.smoothness;
            };
            std::optional<Smoothness> s0, s1;
            if (!flat->left_unbounded) s0 = add(flat->t0(), flat->left, TransitionKind::OnsetOfFlat);
            if (!flat->right_unbounded) s1 = add(flat->t1(), flat->right, TransitionKind::EndOfFlat);
            if (s0 && s1) {
                f["ends_agree"] = *s0 == *s1;
                if (*s0 != *s1) out.warnings.push_back("smoothness differs between the two ends of the flat interval");
            }
            result["flat_interval"] = std::move(f);
        }
    } else {
        unsupported("transitions", m.kind + " (" + m.map->name() + ")");
    }
    out.report["outputs"]["transitions"] = std::move(result);
}

void run_atoms(const Model& m, const AtomsTask& task, const EngineOptions& opt, Output& out) {
    if (!m.renewal) unsupported("atoms", m.kind);
    json rows = json::array();
    for (double t : task.t) {
        const AtomReport r = conformal_atom_masses(*m.renewal, t, opt);
        json pre = json::array(), levels = json::array();
        for (long k = 1; k <= task.levels; ++k) {
            pre.push_back(interval_json(r.preimage_mass(*m.renewal, k)));
            levels.push_back(num(r.level_mass(*m.renewal, k)));
        }
        rows.push_back({{"t", num(t)}, {"p", num(r.p)}, {"level_total", sum_json(r.level_total)}, {"atom", interval_json(r.atom)},
                        {"verdict", to_string(r.verdict)}, {"level_mass", std::move(levels)}, {"preimage_mass", std::move(pre)}});
    }
    out.report["outputs"]["atoms"] = std::move(rows);
}

void run_witness(const Model& m, const WitnessTask& task, const EngineOptions& opt, Output& out) {
    if (!m.renewal) unsupported("witness", m.kind);
    json rows = json::array();
    for (double t : task.t) {
        const TransienceWitness w = cyr_sarig_witness(*m.renewal, t, opt);
        rows.push_back({{"t", num(t)}, {"p", num(w.p)}, {"u0", interval_json(w.u0)}, {"transient", w.transient},
                        {"probe_small", num(w.probe_small)}, {"shift_small", num(w.shift_small)},
                        {"probe_large", num(w.probe_large)}, {"shift_large", num(w.shift_large)},
                        {"tolerance", num(opt.root_tol)}});
    }
    out.report["outputs"]["witness"] = std::move(rows);
}

void run_weights(const Model& m, const WeightsTask& task, const EngineOptions& opt, Output& out) {
    if (!m.renewal) unsupported("weights", m.kind);
    const InducedWeights w = induced_equilibrium_weights(*m.renewal, task.t, task.levels, opt);
    std::string csv = "n,level_weight,per_cylinder,raw_gibbs\n";
    for (std::size_t i = 0; i < w.level.size(); ++i)
        csv += std::to_string(i + 1) + "," + fmt(w.level[i]) + "," + fmt(w.per_cylinder[i]) + "," + fmt(w.raw_gibbs[i]) + "\n";
    out.files.emplace_back("weights.csv", csv);
    out.report["outputs"]["weights"] = {{"t", num(w.t)}, {"p", num(w.p)}, {"total", sum_json(w.total)},
                                        {"return_time", sum_json(w.return_time)},
                                        {"potential_integrable", w.potential_integrable}};
}

std::string base_label(const ZnBase& b) {
    if (b.kind == ZnBase::Kind::Cylinder) {
        std::string s = "cylinder_";
        for (Symbol x : b.cylinder) s += std::to_string(x);
        return s;
    }
    return "interval_" + fmt(b.lower) + "_" + fmt(b.upper);
}

json base_json(const ZnBase& b) {
    if (b.kind == ZnBase::Kind::Cylinder) return {{"cylinder", b.cylinder}};
    return json::array({num(b.lower), num(b.upper)});
}

void run_zn(const Model& m, const ZnTask& task, const EngineOptions& opt, Output& out) {
    if (!m.map) unsupported("zn", m.kind);
    const auto table = periodic_table(*m.map, task.n_max);
    double P = 0.0;
    std::string P_source = "config";
    if (task.P) {
        P = *task.P;
    } else if (m.renewal) {
        P = solve_pressure(*m.renewal, task.t, opt).p;
        P_source = "renewal-engine";
    } else {
        P = gurevich_estimate(table, task.t).extrapolated;
        P_source = "gurevich-estimate";
    }
    json bases = json::array();
    for (std::size_t bi = 0; bi < task.bases.size(); ++bi) {
        const ZnBase& base = task.bases[bi];
        std::string csv = "n,Z_n,log_Z_n_over_n,lambda_n,included,skipped\n";
        json zs = json::array();
        int skipped = 0;
        for (const auto& pts : table) {
            const ZnValue z = zn_sum(pts, task.t, base);
            skipped += z.skipped;
            const double lam = z.value * std::exp(-pts.n * P);
            csv += std::to_string(pts.n) + "," + fmt(z.value) + "," + fmt(std::log(z.value) / pts.n) + "," + fmt(lam) + "," +
                   std::to_string(z.included) + "," + std::to_string(z.skipped) + "\n";
            zs.push_back(num(z.value));
        }
        if (skipped) out.warnings.push_back(base_label(base) + ": " + std::to_string(skipped) + " periodic cells had no bracketed root");
        const std::string file = "zn_" + std::to_string(bi) + ".csv";
        out.files.emplace_back(file, csv);
        json entry = {{"base", base_json(base)}, {"file", file}, {"Z", std::move(zs)}};
        if (task.n_max >= 8) {
            const auto d = sarig_series_diagnostic(table, task.t, P, base);
            entry["diagnostic"] = {{"verdict", to_string(d.verdict)}, {"rate", num(d.rate)}, {"rate_se", num(d.rate_se)},
                                   {"power", num(d.power)}, {"window", json::array({d.first_n, d.last_n})}};
            if (d.verdict == SeriesVerdict::Inconclusive)
                out.warnings.push_back(base_label(base) + ": series diagnostic inconclusive");
        }
        if (task.n_max >= 4) {
            const auto g = gurevich_estimate(table, task.t, base);
            entry["gurevich"] = {{"raw", num(g.raw.back())}, {"extrapolated", num(g.extrapolated)}, {"spread", num(g.spread)}};
        }
        bases.push_back(std::move(entry));
    }
    out.report["outputs"]["zn"] = {{"t", num(task.t)}, {"P", num(P)}, {"P_source", P_source}, {"bases", std::move(bases)}};
}

/// Runs one configuration into `dir`.
void execute(const RunConfig& cfg, const fs::path& dir, std::vector<std::string>& lines) {
    const auto start = std::chrono::steady_clock::now();
    Output out;
    const Model m = build_model(cfg.model, cfg.options, out);
    out.report["name"] = cfg.name;
    if (!cfg.description.empty()) out.report["description"] = cfg.description;
    out.report["inputs"] = cfg.echo;
    out.report["tolerances"] = {{"root_tol", num(cfg.options.root_tol)}, {"sum_tol", num(cfg.options.sum_tol)},
                                {"boundary_tol", num(cfg.options.boundary_tol)}};
    out.report["model"] = m.info;
    out.report["outputs"] = json::object();
    const Tasks& t = cfg.tasks;
    if (t.pressure_curve) run_pressure_curve(m, *t.pressure_curve, cfg.options, out);
    if (t.classify) run_classify(m, *t.classify, cfg.options, cfg.name, out);
    if (t.transitions) run_transitions(m, *t.transitions, cfg.options, out);
    if (t.atoms) run_atoms(m, *t.atoms, cfg.options, out);
    if (t.witness) run_witness(m, *t.witness, cfg.options, out);
    if (t.weights) run_weights(m, *t.weights, cfg.options, out);
    if (t.zn) run_zn(m, *t.zn, cfg.options, out);
    out.report["warnings"] = out.warnings;

    fs::create_directories(dir);
    if (out.curve_csv) write_file(dir / "curve.csv", *out.curve_csv);
    write_json(dir / "transitions.json", out.transitions);
    write_json(dir / "report.json", out.report);
    for (const auto& [name, text] : out.files) write_file(dir / name, text);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(dir / "timing.json", {{"wall_seconds", secs}, {"threads", thread_count()}});
    lines.insert(lines.end(), out.lines.begin(), out.lines.end());
}

int run_config(const json& j, const fs::path& dir, std::optional<double> tol) {
    auto runs = parse_config(j);
    if (tol) {
        if (!(*tol > 0.0)) throw ValidationError("--tol must be positive");
        for (auto& r : runs) r.options.root_tol = *tol;
    }
    std::vector<std::string> lines;
    if (runs.size() == 1 && !j.contains("runs")) {
        execute(runs.front(), dir, lines);
    } else {
        const auto start = std::chrono::steady_clock::now();
        json index = json::array();
        for (const auto& r : runs) {
            execute(r, dir / r.name, lines);
            index.push_back(r.name);
        }
        fs::create_directories(dir);
        json top = {{"runs", index}};
        if (j.contains("description")) top["description"] = j["description"];
        write_json(dir / "report.json", top);
        write_json(dir / "transitions.json", json::array());
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_json(dir / "timing.json", {{"wall_seconds", secs}, {"threads", thread_count()}});
    }
    for (const auto& l : lines) std::cout << l << "\n";
    return 0;
}

json load_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(origin + ": " + e.what());
    }
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const IndeterminateError& e) {
        std::cerr << "indeterminate: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pressure curves, recurrence classes and phase transitions for countable Markov models"};
    app.require_subcommand(1);

    std::string config_path, out_dir, demo_name;
    std::optional<double> tol;

    auto* run = app.add_subcommand("run", "Run a JSON configuration");
    run->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", out_dir, "Output directory")->required();
    run->add_option("--tol", tol, "Override root_tol");

    auto* demo = app.add_subcommand("demo", "Run a shipped demo configuration");
    demo->add_option("name", demo_name, "Demo name (see list-demos)")->required();
    demo->add_option("-o,--output", out_dir, "Output directory")->required();
    demo->add_option("--tol", tol, "Override root_tol");

    auto* list = app.add_subcommand("list-demos", "List the shipped demos");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*list) {
        return guarded([] {
            for (const auto& [name, text] : demos::kDemos) {
                const json j = json::parse(text);
                std::cout << name << "\t" << j.value("description", "") << "\n";
            }
            return 0;
        });
    }
    if (*demo) {
        return guarded([&] {
            for (const auto& [name, text] : demos::kDemos)
                if (name == demo_name) return run_config(load_json(std::string(text), "demo " + demo_name), out_dir, tol);
            throw ValidationError("unknown demo '" + demo_name + "'");
        });
    }
    return guarded([&] {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw ValidationError("cannot read " + config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        return run_config(load_json(ss.str(), config_path), out_dir, tol);
    });
}
