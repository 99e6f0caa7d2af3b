#include "qsplit/io.hpp"

#include "qsplit/error.hpp"
#include "qsplit/format.hpp"

#include <json.hpp>

#include <cmath>
#include <set>
#include <sstream>

namespace qsplit {

namespace {

using nlohmann::json;

// Reads typed keys from one object and rejects anything it was not asked for.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            fail(ErrorCode::InvalidArgument, "config: '" + path_ + "' must be an object");
        }
    }

    bool has(const std::string& k) {
        seen_.insert(k);
        return j_.contains(k) && !j_.at(k).is_null();
    }

    void number(const std::string& k, double& out) {
        if (!has(k)) return;
        const json& v = j_.at(k);
        if (v.is_number()) {
            out = v.get<double>();
        } else if (v.is_string() && (v == "inf" || v == "infinity")) {
            out = std::numeric_limits<double>::infinity();
        } else {
            bad(k, "a number");
        }
    }

    void integer(const std::string& k, int& out) {
        if (!has(k)) return;
        const json& v = j_.at(k);
        if (!v.is_number_integer()) bad(k, "an integer");
        const long long x = v.get<long long>();
        if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) bad(k, "a 32-bit integer");
        out = static_cast<int>(x);
    }

    void boolean(const std::string& k, bool& out) {
        if (!has(k)) return;
        if (!j_.at(k).is_boolean()) bad(k, "a boolean");
        out = j_.at(k).get<bool>();
    }

    void text(const std::string& k, std::string& out) {
        if (!has(k)) return;
        if (!j_.at(k).is_string()) bad(k, "a string");
        out = j_.at(k).get<std::string>();
    }

    template <class T>
    void list(const std::string& k, std::vector<T>& out) {
        if (!has(k)) return;
        const json& v = j_.at(k);
        if (!v.is_array()) bad(k, "an array");
        std::vector<T> tmp;
        for (const json& e : v) {
            if constexpr (std::is_same_v<T, int>) {
                if (!e.is_number_integer()) bad(k, "an array of integers");
            } else {
                if (!e.is_number()) bad(k, "an array of numbers");
            }
            tmp.push_back(e.get<T>());
        }
        out = std::move(tmp);
    }

    std::optional<Section> child(const std::string& k) {
        if (!has(k)) return std::nullopt;
        return Section(j_.at(k), path_ + "." + k);
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                fail(ErrorCode::InvalidArgument, "config: unknown key '" + path_ + "." + it.key() + "'");
            }
        }
    }

private:
    [[noreturn]] void bad(const std::string& k, const char* what) const {
        fail(ErrorCode::InvalidArgument, "config: '" + path_ + "." + k + "' must be " + what);
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void parse_problem(Section s, ProblemConfig& p) {
    s.number("a", p.a);
    s.integer("N", p.n);
    if (auto g = s.child("grid")) {
        g->text("kind", p.grid_kind);
        g->number("grading", p.grading);
        g->finish();
    }
    s.text("nonlinearity", p.nonlinearity);
    if (auto u = s.child("initial")) {
        u->text("kind", p.initial);
        u->number("amplitude", p.initial_amplitude);
        u->finish();
    }
    s.number("delta", p.delta);
    s.number("quench_threshold", p.quench_threshold);
    s.integer("max_steps", p.max_steps);
    s.finish();
}

OracleMethod parse_method(const std::string& name) {
    if (name == "rk4") return OracleMethod::Rk4;
    if (name == "sdirk2") return OracleMethod::Sdirk2;
    fail(ErrorCode::InvalidArgument, "config: unknown oracle method '" + name + "' (expected rk4 or sdirk2)");
}

} // namespace

RunConfig parse_run_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::InvalidArgument, std::string("config: malformed JSON: ") + e.what());
    }
    RunConfig cfg;
    Section top(root, "$");
    if (auto s = top.child("problem")) {
        parse_problem(*s, cfg.problem);
    }
    if (auto s = top.child("run")) {
        s->number("tol", cfg.run.tol);
        s->number("stop_time", cfg.run.stop_time);
        s->boolean("stop_on_violation", cfg.run.stop_on_violation);
        s->boolean("oracle", cfg.run.oracle);
        s->number("oracle_dt_safety", cfg.run.oracle_dt_safety);
        s->integer("oracle_stride", cfg.run.oracle_stride);
        s->finish();
    }
    if (auto s = top.child("converge_time")) {
        s->number("t_star", cfg.converge_time.t_star);
        s->integer("levels", cfg.converge_time.levels);
        s->number("dt_safety", cfg.converge_time.options.dt_safety);
        s->number("tol", cfg.converge_time.options.tol);
        s->finish();
    }
    if (auto s = top.child("converge_space")) {
        SpaceStudyOptions& o = cfg.converge_space.options;
        s->number("t_star", cfg.converge_space.t_star);
        s->list("N_levels", o.n_levels);
        s->integer("reference_N", o.reference_n);
        s->number("delta", o.delta);
        std::string method;
        s->text("oracle", method);
        if (!method.empty()) {
            o.oracle = parse_method(method);
        }
        s->number("dt_safety", o.dt_safety);
        s->number("implicit_dt", o.implicit_dt);
        s->number("tol", o.tol);
        s->finish();
    }
    if (auto s = top.child("critical_a")) {
        CriticalModeConfig& c = cfg.critical_a;
        s->number("a_lo", c.a_lo);
        s->number("a_hi", c.a_hi);
        s->integer("N", c.n);
        s->number("tol_a", c.tol_a);
        s->number("budget_time", c.options.budget_time);
        s->number("delta", c.options.delta);
        s->number("stagnation_tol", c.options.stagnation_tol);
        s->integer("stagnation_window", c.options.stagnation_window);
        s->integer("max_steps", c.options.max_steps);
        s->number("tol", c.options.tol);
        s->finish();
    }
    if (auto s = top.child("validate")) {
        ValidationOptions& v = cfg.validate;
        s->list("N_list", v.n_list);
        s->list("gradings", v.gradings);
        s->list("taus", v.taus);
        s->list("exp_times", v.exp_times);
        s->integer("random_vectors", v.random_vectors);
        s->number("half_width", v.half_width);
        s->finish();
    }
    top.finish();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        fail(ErrorCode::InvalidArgument, "cannot read config file '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    try {
        return parse_run_config(ss.str());
    } catch (const Error& e) {
        fail(e.code(), path.string() + ": " + e.what());
    }
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

void JsonWriter::indent() {
    os_ << '\n';
    for (std::size_t i = 0; i < first_.size(); ++i) {
        os_ << "  ";
    }
}

void JsonWriter::separate() {
    if (after_key_) {
        after_key_ = false;
        return;
    }
    if (!first_.empty()) {
        if (!first_.back()) {
            os_ << ',';
        }
        first_.back() = false;
        indent();
    }
}

JsonWriter& JsonWriter::begin_object() {
    separate();
    os_ << '{';
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) indent();
    os_ << '}';
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    separate();
    os_ << '[';
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) indent();
    os_ << ']';
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
    separate();
    os_ << '"' << json_escape(k) << "\": ";
    after_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    separate();
    // JSON has no inf/nan; such values are emitted as strings.
    if (std::isfinite(v)) {
        os_ << fmt17(v);
    } else {
        os_ << '"' << fmt17(v) << '"';
    }
    return *this;
}

JsonWriter& JsonWriter::value(int v) {
    separate();
    os_ << v;
    return *this;
}

JsonWriter& JsonWriter::value(long long v) {
    separate();
    os_ << v;
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    separate();
    os_ << (v ? "true" : "false");
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
    separate();
    os_ << '"' << json_escape(v) << '"';
    return *this;
}

JsonWriter& JsonWriter::null() {
    separate();
    os_ << "null";
    return *this;
}

void JsonWriter::finish() { os_ << '\n'; }

void write_grid_json(std::ostream& os, const Grid& grid) {
    JsonWriter w(os);
    w.begin_object().key("a").value(grid.half_width()).key("N").value(grid.interior_count()).key("x").begin_array();
    for (double x : grid.nodes()) {
        w.value(x);
    }
    w.end_array().end_object().finish();
}

void write_summary_json(std::ostream& os, const RunSummary& s) {
    JsonWriter w(os);
    w.begin_object()
        .key("quenched").value(s.quenched)
        .key("quench_time").value(s.quench_time)
        .key("steps").value(s.steps)
        .key("tau0").value(s.tau0)
        .key("bound_Sigma_tau").value(s.bound_sigma_tau)
        .key("monotone_hypothesis").value(s.monotone_hypothesis)
        .key("termination").value(to_string(s.termination))
        .key("violations").begin_array();
    for (const Violation& v : s.violations) {
        w.begin_object()
            .key("k").value(v.k)
            .key("monitor").value(v.monitor)
            .key("hard").value(v.hard)
            .key("detail").value(v.detail)
            .end_object();
    }
    w.end_array().end_object().finish();
}

void write_order_report_json(std::ostream& os, const OrderReport& r) {
    JsonWriter w(os);
    w.begin_object().key("kind").value(r.kind).key("t_star").value(r.t_star).key("levels").begin_array();
    for (const OrderLevel& l : r.levels) {
        w.begin_object()
            .key("resolution").value(l.resolution)
            .key("N").value(l.n)
            .key("error").value(l.error)
            .key("steps").value(l.steps)
            .key("hard_violations").value(l.hard_violations)
            .end_object();
    }
    w.end_array().key("observed_orders").begin_array();
    for (const auto& o : r.observed_orders) {
        if (o) w.value(*o); else w.null();
    }
    w.end_array().key("summary_order");
    if (r.summary_order) w.value(*r.summary_order); else w.null();
    w.end_object().finish();
}

void write_order_report_csv(std::ostream& os, const OrderReport& r) {
    os << "resolution,N,error,steps,hard_violations,observed_order\n";
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
        const OrderLevel& l = r.levels[i];
        os << fmt17(l.resolution) << ',' << l.n << ',' << fmt17(l.error) << ',' << l.steps << ','
           << l.hard_violations << ',';
        // The order on row i compares level i-1 with level i.
        if (i > 0 && r.observed_orders[i - 1]) {
            os << fmt17(*r.observed_orders[i - 1]);
        }
        os << '\n';
    }
}

void write_critical_json(std::ostream& os, const CriticalReport& r, const std::string& status,
                         const std::string& message) {
    JsonWriter w(os);
    w.begin_object().key("status").value(status).key("message").value(message);
    w.key("a_star");
    if (status == "ok") w.value(r.a_star); else w.null();
    w.key("bracket").begin_array().value(r.lo).value(r.hi).end_array();
    w.key("evaluations").begin_array();
    for (const CriticalEvaluation& e : r.evaluations) {
        w.begin_object()
            .key("a").value(e.a)
            .key("outcome").value(to_string(e.outcome))
            .key("t").value(e.t)
            .key("steps").value(e.steps)
            .end_object();
    }
    w.end_array().end_object().finish();
}

void write_validation_json(std::ostream& os, const ValidationReport& r) {
    JsonWriter w(os);
    w.begin_object().key("all_pass").value(r.all_pass()).key("checks").begin_array();
    for (const ValidationCheck& c : r.checks) {
        w.begin_object()
            .key("grid").value(c.grid)
            .key("check").value(c.name)
            .key("pass").value(c.pass)
            .key("worst_margin").value(c.worst_margin)
            .key("detail").value(c.detail)
            .end_object();
    }
    w.end_array().end_object().finish();
}

} // namespace qsplit
