#pragma once

// JSON run configuration: parsing with strict field checking.

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "thermoform/thermoform.hpp"

namespace thermoform::cli {

using json = nlohmann::json;

/// Reads the fields of one JSON object; finish() rejects anything not read.
class Fields {
public:
    Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) fail("must be an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!obj_.contains(key)) fail_field(key, "is required");
        return obj_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) fail_field(key, "must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail_field(key, "must be finite");
        return x;
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    long integer(const std::string& key, long min_value) {
        const json& v = raw(key);
        if (!v.is_number_integer()) fail_field(key, "must be an integer");
        const long x = v.get<long>();
        if (x < min_value) fail_field(key, "must be >= " + std::to_string(min_value));
        return x;
    }

    std::string string(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) fail_field(key, "must be a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) fail_field(key, "must be true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) fail_field(key, "must be an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) fail_field(key, "must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    /// A number or an array of numbers.
    std::vector<double> number_or_list(const std::string& key) {
        const json& v = raw(key);
        if (v.is_number()) return {v.get<double>()};
        return numbers(key);
    }

    void finish() const {
        for (const auto& [k, v] : obj_.items())
            if (!seen_.count(k)) fail("unknown field '" + k + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ValidationError(path_ + ": " + msg); }
    [[noreturn]] void fail_field(const std::string& key, const std::string& msg) const {
        throw ValidationError(path_ + "." + key + ": " + msg);
    }
    const std::string& path() const { return path_; }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

struct FiniteShiftConfig {
    std::vector<std::vector<int>> transitions;
    int depth = 1;
    std::map<Word, double> values;
};

struct SequenceConfig {
    SequenceSpec spec;
    std::optional<double> geometric_rate;
};

struct IntervalConfig {
    enum class Kind { Chebyshev, MannevillePomeau, DoublingGrid } kind = Kind::Chebyshev;
    double alpha = 0.5;
    int levels = 200;
    std::optional<SequenceConfig> sequence;
};

using ModelConfig = std::variant<FiniteShiftConfig, SequenceConfig, IntervalConfig>;

struct CurveTask { double t_min, t_max; int steps; int n_max = 14; };
struct ClassifyTask { std::vector<double> t; };
struct TransitionsTask { double a, b; };
struct AtomsTask { std::vector<double> t; int levels = 5; };
struct WitnessTask { std::vector<double> t; };
struct WeightsTask { double t; int levels; };
struct ZnTask { double t; int n_max; std::vector<ZnBase> bases; std::optional<double> P; };

struct Tasks {
    std::optional<CurveTask> pressure_curve;
    std::optional<ClassifyTask> classify;
    std::optional<TransitionsTask> transitions;
    std::optional<AtomsTask> atoms;
    std::optional<WitnessTask> witness;
    std::optional<WeightsTask> weights;
    std::optional<ZnTask> zn;
};

struct RunConfig {
    std::string name;
    std::string description;
    ModelConfig model;
    Tasks tasks;
    EngineOptions options;
    json echo;
};

inline SequenceConfig parse_sequence(const json& j, const std::string& path, Family default_family) {
    Fields f(j, path);
    SequenceConfig c;
    c.spec.family = default_family;
    if (f.has("family")) {
        const std::string fam = f.string("family");
        if (fam == "grid") c.spec.family = Family::Grid;
        else if (fam == "hofbauer") c.spec.family = Family::Hofbauer;
        else f.fail_field("family", "must be \"grid\" or \"hofbauer\"");
    }
    if (f.has("geometric_rate")) {
        c.geometric_rate = f.number("geometric_rate");
        if (f.has("gamma") || f.has("head") || f.has("head_repeat") || f.has("delta") || f.has("tail_slope"))
            f.fail("geometric_rate excludes gamma, head, head_repeat, delta and tail_slope");
        f.finish();
        return c;
    }
    c.spec.gamma = f.optional_number("gamma").value_or(3.0);
    c.spec.tail_slope = f.optional_number("tail_slope").value_or(0.0);
    if (c.spec.tail_slope == 0.0 && c.spec.gamma != 0.0 && !(c.spec.gamma > 1.0))
        f.fail_field("gamma", "must exceed 1 (or be 0 for a constant tail)");
    if (c.spec.gamma < 0.0) f.fail_field("gamma", "must be >= 0");
    if (f.has("head_repeat")) {
        Fields r(f.raw("head_repeat"), path + ".head_repeat");
        const double v = r.number("value");
        const long k = r.integer("count", 0);
        r.finish();
        c.spec.head = hofbauer_head(v, k);
    }
    if (f.has("head")) {
        const auto extra = f.numbers("head");
        for (std::size_t i = 0; i < extra.size(); ++i) {
            if (i < c.spec.head.size()) c.spec.head[i] = extra[i];
            else c.spec.head.push_back(extra[i]);
        }
    }
    c.spec.delta = f.optional_number("delta");
    if (c.spec.delta && !(*c.spec.delta > 0.0 && *c.spec.delta < std::log(2.0))) f.fail_field("delta", "must lie in (0, log 2)");
    c.spec.normalization_target = f.optional_number("normalization_target");
    if (c.spec.normalization_target && !(*c.spec.normalization_target > 0.0))
        f.fail_field("normalization_target", "must be positive");
    c.spec.normalized = f.boolean("normalize", true);
    if (c.spec.delta && !c.spec.normalized) f.fail("delta requires normalize = true");
    f.finish();
    return c;
}

inline FiniteShiftConfig parse_finite_shift(const json& j, const std::string& path) {
    Fields f(j, path);
    FiniteShiftConfig c;
    const json& t = f.raw("transitions");
    if (!t.is_array() || t.empty()) f.fail_field("transitions", "must be a non-empty square 0/1 matrix");
    for (const auto& row : t) {
        if (!row.is_array()) f.fail_field("transitions", "must be a non-empty square 0/1 matrix");
        std::vector<int> r;
        for (const auto& x : row) {
            if (!x.is_number_integer() || (x.get<int>() != 0 && x.get<int>() != 1))
                f.fail_field("transitions", "entries must be 0 or 1");
            r.push_back(x.get<int>());
        }
        c.transitions.push_back(std::move(r));
    }
    for (const auto& r : c.transitions)
        if (r.size() != c.transitions.size()) f.fail_field("transitions", "must be square");
    if (f.has("alphabet") && f.integer("alphabet", 1) != static_cast<long>(c.transitions.size()))
        f.fail_field("alphabet", "does not match the transition matrix size");
    Fields p(f.raw("potential"), path + ".potential");
    c.depth = static_cast<int>(p.has("depth") ? p.integer("depth", 1) : 1);
    const json& vals = p.raw("values");
    if (!vals.is_array()) p.fail_field("values", "must be an array");
    if (c.depth == 1 && !vals.empty() && vals.front().is_number()) {
        if (vals.size() != c.transitions.size()) p.fail_field("values", "needs one value per symbol");
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (!vals[i].is_number()) p.fail_field("values", "must all be numbers");
            c.values[Word{static_cast<int>(i)}] = vals[i].get<double>();
        }
    } else {
        for (std::size_t i = 0; i < vals.size(); ++i) {
            Fields e(vals[i], path + ".potential.values[" + std::to_string(i) + "]");
            Word w;
            const json& wj = e.raw("word");
            if (!wj.is_array()) e.fail_field("word", "must be an array of symbols");
            for (const auto& s : wj) {
                if (!s.is_number_integer()) e.fail_field("word", "must be an array of symbols");
                w.push_back(s.get<int>());
            }
            if (static_cast<int>(w.size()) != c.depth) e.fail_field("word", "length must equal the potential depth");
            const double v = e.number("value");
            e.finish();
            if (!c.values.emplace(w, v).second) e.fail("duplicate word");
        }
    }
    p.finish();
    f.finish();
    return c;
}

inline IntervalConfig parse_interval(const json& j, const std::string& path) {
    Fields f(j, path);
    IntervalConfig c;
    const std::string kind = f.string("kind");
    if (kind == "chebyshev") {
        c.kind = IntervalConfig::Kind::Chebyshev;
    } else if (kind == "manneville_pomeau") {
        c.kind = IntervalConfig::Kind::MannevillePomeau;
        c.alpha = f.number("alpha");
        if (!(c.alpha > 0.0)) f.fail_field("alpha", "must be positive");
        if (f.has("levels")) c.levels = static_cast<int>(f.integer("levels", 8));
    } else if (kind == "doubling_grid") {
        c.kind = IntervalConfig::Kind::DoublingGrid;
        c.sequence = parse_sequence(f.raw("sequence"), path + ".sequence", Family::Hofbauer);
        if (c.sequence->geometric_rate) f.fail_field("sequence", "doubling_grid needs an explicit sequence");
    } else {
        f.fail_field("kind", "must be chebyshev, manneville_pomeau or doubling_grid");
    }
    f.finish();
    return c;
}

inline ZnBase parse_base(const json& j, const std::string& path) {
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        const double a = j[0].get<double>(), b = j[1].get<double>();
        if (!(0.0 <= a && a < b && b <= 1.0)) throw ValidationError(path + ": interval must satisfy 0 <= a < b <= 1");
        return ZnBase::interval(a, b);
    }
    Fields f(j, path);
    Word w;
    const json& c = f.raw("cylinder");
    if (!c.is_array() || c.empty()) f.fail_field("cylinder", "must be a non-empty array of 0/1 symbols");
    for (const auto& s : c) {
        if (!s.is_number_integer() || (s.get<int>() != 0 && s.get<int>() != 1))
            f.fail_field("cylinder", "must be a non-empty array of 0/1 symbols");
        w.push_back(s.get<int>());
    }
    f.finish();
    return ZnBase::of_cylinder(std::move(w));
}

inline Tasks parse_tasks(const json& j, const std::string& path) {
    Fields f(j, path);
    Tasks t;
    if (f.has("pressure_curve")) {
        Fields c(f.raw("pressure_curve"), path + ".pressure_curve");
        CurveTask task{c.number("t_min"), c.number("t_max"), static_cast<int>(c.integer("steps", 2))};
        if (c.has("n_max")) task.n_max = static_cast<int>(c.integer("n_max", 4));
        if (!(task.t_min < task.t_max)) c.fail("t_min must be below t_max");
        if (task.n_max > 20) c.fail_field("n_max", "must be <= 20");
        c.finish();
        t.pressure_curve = task;
    }
    if (f.has("classify")) {
        Fields c(f.raw("classify"), path + ".classify");
        t.classify = ClassifyTask{c.number_or_list("t")};
        c.finish();
    }
    if (f.has("transitions")) {
        Fields c(f.raw("transitions"), path + ".transitions");
        const auto b = c.numbers("bracket");
        if (b.size() != 2 || !(b[0] < b[1])) c.fail_field("bracket", "must be [a, b] with a < b");
        c.finish();
        t.transitions = TransitionsTask{b[0], b[1]};
    }
    if (f.has("atoms")) {
        Fields c(f.raw("atoms"), path + ".atoms");
        AtomsTask task{c.number_or_list("t")};
        if (c.has("levels")) task.levels = static_cast<int>(c.integer("levels", 1));
        c.finish();
        t.atoms = task;
    }
    if (f.has("witness")) {
        Fields c(f.raw("witness"), path + ".witness");
        t.witness = WitnessTask{c.number_or_list("t")};
        c.finish();
    }
    if (f.has("weights")) {
        Fields c(f.raw("weights"), path + ".weights");
        t.weights = WeightsTask{c.number("t"), static_cast<int>(c.integer("levels", 1))};
        c.finish();
    }
    if (f.has("zn")) {
        Fields c(f.raw("zn"), path + ".zn");
        ZnTask task{c.number("t"), static_cast<int>(c.integer("n_max", 8)), {}, c.optional_number("P")};
        if (task.n_max > 22) c.fail_field("n_max", "must be <= 22");
        const json& b = c.raw("base");
        const bool single = (b.is_array() && b.size() == 2 && b[0].is_number()) || b.is_object();
        if (single) {
            task.bases.push_back(parse_base(b, path + ".zn.base"));
        } else if (b.is_array() && !b.empty()) {
            for (std::size_t i = 0; i < b.size(); ++i) task.bases.push_back(parse_base(b[i], path + ".zn.base[" + std::to_string(i) + "]"));
        } else {
            c.fail_field("base", "must be [a, b], {\"cylinder\": [...]}, or a list of those");
        }
        c.finish();
        t.zn = task;
    }
    f.finish();
    return t;
}

inline EngineOptions parse_tolerances(const json& j, const std::string& path) {
    Fields f(j, path);
    EngineOptions o;
    if (auto v = f.optional_number("root_tol")) o.root_tol = *v;
    if (auto v = f.optional_number("sum_tol")) o.sum_tol = *v;
    if (auto v = f.optional_number("boundary_tol")) o.boundary_tol = *v;
    if (!(o.root_tol > 0.0 && o.sum_tol > 0.0 && o.boundary_tol > 0.0)) f.fail("tolerances must be positive");
    f.finish();
    return o;
}

/// One run: {"name", "description", "model", "task", "tolerances"}.
inline RunConfig parse_run(const json& j, const std::string& path) {
    Fields f(j, path);
    RunConfig r;
    r.echo = j;
    r.name = f.has("name") ? f.string("name") : "run";
    for (char ch : r.name)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_'))
            f.fail_field("name", "may contain only letters, digits, '-' and '_'");
    if (f.has("description")) r.description = f.string("description");
    Fields m(f.raw("model"), path + ".model");
    int kinds = 0;
    if (m.has("finite_shift")) {
        r.model = parse_finite_shift(m.raw("finite_shift"), path + ".model.finite_shift");
        ++kinds;
    }
    if (m.has("renewal")) {
        r.model = parse_sequence(m.raw("renewal"), path + ".model.renewal", Family::Grid);
        ++kinds;
    }
    if (m.has("interval")) {
        r.model = parse_interval(m.raw("interval"), path + ".model.interval");
        ++kinds;
    }
    m.finish();
    if (kinds != 1) m.fail("exactly one of finite_shift, renewal, interval is required");
    r.tasks = parse_tasks(f.raw("task"), path + ".task");
    if (f.has("tolerances")) r.options = parse_tolerances(f.raw("tolerances"), path + ".tolerances");
    f.finish();
    return r;
}

/// A single run, or {"runs": [...]} with distinct names.
inline std::vector<RunConfig> parse_config(const json& j) {
    if (j.is_object() && j.contains("runs")) {
        Fields f(j, "config");
        const json& runs = f.raw("runs");
        if (f.has("description")) f.string("description");
        f.finish();
        if (!runs.is_array() || runs.empty()) f.fail_field("runs", "must be a non-empty array");
        std::vector<RunConfig> out;
        std::set<std::string> names;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            out.push_back(parse_run(runs[i], "config.runs[" + std::to_string(i) + "]"));
            if (!names.insert(out.back().name).second) throw ValidationError("config.runs: duplicate name '" + out.back().name + "'");
        }
        return out;
    }
    return {parse_run(j, "config")};
}

} // namespace thermoform::cli
