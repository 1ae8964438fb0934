#include "ramanecho/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ramanecho/echo_efficiency.hpp"
#include "ramanecho/errors.hpp"
#include "ramanecho/pipeline.hpp"
#include "ramanecho/switching.hpp"

#ifndef RAMANECHO_VERSION
#define RAMANECHO_VERSION "0.0.0"
#endif

namespace ramanecho {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::pair<Observable, const char*>>& observable_names() {
    static const std::vector<std::pair<Observable, const char*>> v{
        {Observable::remnant_r13, "remnant_r13"}, {Observable::eps_t, "eps_t"},
        {Observable::eps_r, "eps_r"},             {Observable::gamma_factor, "gamma_factor"},
        {Observable::overall_eff, "overall_eff"}, {Observable::fidelity, "fidelity"}};
    return v;
}

double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError(what + ": `" + s + "` is not a number");
    }
    if (used != s.size()) throw ConfigError(what + ": `" + s + "` is not a number");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

// Normalised copies of swept rates and detunings, so both figure conventions are on record.
struct Derived {
    const char* name;
    const char* axis;
    double (*value)(const PhysicalParams&);
};

const std::vector<Derived>& derived_columns() {
    static const std::vector<Derived> v{
        {"k_off_over_delta01", "k_off", [](const PhysicalParams& p) { return p.k_off / p.delta01; }},
        {"k_on_over_omega2", "k_on", [](const PhysicalParams& p) { return p.k_on / p.omega2_rabi; }},
        {"delta02_over_omega2", "delta02", [](const PhysicalParams& p) { return p.delta02 / p.omega2_rabi; }},
    };
    return v;
}

double observe(const PipelineSpec& s, Observable o) {
    switch (o) {
        case Observable::remnant_r13:
            return remnant_optical_fraction(s.params);
        case Observable::eps_t:
            return transfer_efficiency(s.params);
        case Observable::eps_r:
            return switch_on_efficiency(s.params);
        case Observable::gamma_factor:
        case Observable::overall_eff: {
            EfficiencyOptions opt = s.analytic;
            if (opt.interaction_time < 0.0) opt.interaction_time = 0.0;
            const EfficiencyBreakdown e = overall_efficiency(s.params, s.broadening, opt);
            return o == Observable::gamma_factor ? e.gamma_factor : e.total;
        }
        case Observable::fidelity:
            return run_pipeline(s).fidelity;
    }
    return kNaN;
}

}  // namespace

std::string version() { return RAMANECHO_VERSION; }

PipelineSpec sweep_point(const SweepSpec& spec, const std::vector<double>& at) {
    if (at.size() != spec.axes.size()) throw ConfigError("point has the wrong number of axis values");
    Config c = spec.fixed;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) c.set(spec.axes[a].name, format_double(at[a]));
    return load_pipeline_spec(c);
}

std::string to_string(Observable o) {
    for (const auto& [k, n] : observable_names())
        if (k == o) return n;
    return "?";
}

Observable parse_observable(const std::string& s) {
    for (const auto& [k, n] : observable_names())
        if (s == n) return k;
    throw ConfigError("unknown observable `" + s + "`");
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw ConfigError("unknown format `" + s + "` (expected csv|json)");
}

std::vector<double> SweepAxis::values() const {
    validate();
    if (!list.empty()) return list;
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        v[i] = spacing == AxisSpacing::linear ? min + (max - min) * f : std::exp(std::log(min) + (std::log(max) - std::log(min)) * f);
    }
    v.front() = min;
    v.back() = max;
    return v;
}

void SweepAxis::validate() const {
    if (name.empty()) throw ConfigError("sweep axis needs a parameter name");
    if (!list.empty()) {
        for (double x : list)
            if (!std::isfinite(x)) throw ConfigError("axis `" + name + "`: values must be finite");
        return;
    }
    if (count < 2) throw ConfigError("axis `" + name + "`: count must be >= 2");
    if (!std::isfinite(min) || !std::isfinite(max)) throw ConfigError("axis `" + name + "`: range must be finite");
    if (spacing == AxisSpacing::log && !(min > 0.0 && max > 0.0))
        throw ConfigError("axis `" + name + "`: log spacing needs a positive range");
}

SweepAxis parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("axis `" + text + "`: expected name=min:max:count[:log]");
    SweepAxis a;
    a.name = text.substr(0, eq);
    const std::string rest = text.substr(eq + 1);
    if (rest.find(':') == std::string::npos) {
        for (const auto& s : split(rest, ',')) a.list.push_back(parse_number(s, "axis `" + a.name + "`"));
        if (a.list.empty()) throw ConfigError("axis `" + a.name + "`: no values");
    } else {
        const auto parts = split(rest, ':');
        if (parts.size() < 3 || parts.size() > 4) throw ConfigError("axis `" + text + "`: expected min:max:count[:log]");
        a.min = parse_number(parts[0], "axis `" + a.name + "` min");
        a.max = parse_number(parts[1], "axis `" + a.name + "` max");
        const double n = parse_number(parts[2], "axis `" + a.name + "` count");
        if (n != std::floor(n)) throw ConfigError("axis `" + a.name + "`: count must be an integer");
        a.count = static_cast<int>(n);
        if (parts.size() == 4) {
            if (parts[3] == "log") a.spacing = AxisSpacing::log;
            else if (parts[3] == "linear") a.spacing = AxisSpacing::linear;
            else throw ConfigError("axis `" + a.name + "`: spacing must be linear|log");
        }
    }
    a.validate();
    return a;
}

void SweepSpec::validate() const {
    if (axes.size() > 3) throw ConfigError("a sweep takes at most three axes");
    if (observables.empty()) throw ConfigError("a sweep needs at least one observable");
    const auto keys = pipeline_keys();
    for (const auto& k : fixed.unknown_keys(keys)) throw ConfigError("unknown key `" + k + "`");
    for (std::size_t a = 0; a < axes.size(); ++a) {
        axes[a].validate();
        if (!keys.count(axes[a].name)) throw ConfigError("axis `" + axes[a].name + "` is not a parameter key");
        for (std::size_t b = 0; b < a; ++b)
            if (axes[b].name == axes[a].name) throw ConfigError("axis `" + axes[a].name + "` given twice");
    }
    // every axis end against the domain checks of the loaders, others at their first value
    std::vector<double> at;
    for (const auto& ax : axes) at.push_back(ax.values().front());
    sweep_point(*this, at);
    for (std::size_t a = 0; a < axes.size(); ++a) {
        auto v = axes[a].values();
        for (double x : {*std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end())}) {
            auto t = at;
            t[a] = x;
            try {
                sweep_point(*this, t);
            } catch (const DomainError& e) {
                throw DomainError("axis `" + axes[a].name + "` leaves the validity domain at " + format_double(x) +
                                  ": " + e.what());
            }
        }
    }
}

SweepResult run_sweep(const SweepSpec& spec, int jobs) {
    spec.validate();
    SweepResult res;
    for (const auto& a : spec.axes) res.axis_names.push_back(a.name);
    for (Observable o : spec.observables) res.columns.push_back(to_string(o));
    std::vector<const Derived*> derived;
    for (const auto& d : derived_columns())
        if (std::find(res.axis_names.begin(), res.axis_names.end(), d.axis) != res.axis_names.end()) {
            derived.push_back(&d);
            res.columns.push_back(d.name);
        }

    std::vector<std::vector<double>> axis_values;
    std::size_t total = 1;
    for (const auto& a : spec.axes) {
        axis_values.push_back(a.values());
        total *= axis_values.back().size();
    }

    res.header.emplace_back("tool", "ramanecho " + version());
    {
        for (auto& kv : describe(load_pipeline_spec(spec.fixed))) {
            const bool swept = std::find(res.axis_names.begin(), res.axis_names.end(), kv.first) != res.axis_names.end();
            if (!swept) res.header.push_back(kv);
        }
    }
    for (const auto& a : spec.axes) {
        std::string d;
        if (!a.list.empty()) {
            for (std::size_t i = 0; i < a.list.size(); ++i) d += (i ? "," : "") + format_double(a.list[i]);
        } else {
            d = format_double(a.min) + ":" + format_double(a.max) + ":" + std::to_string(a.count) +
                (a.spacing == AxisSpacing::log ? ":log" : ":linear");
        }
        res.header.emplace_back("axis." + a.name, d);
    }

    res.rows.resize(total);
    auto work = [&](std::size_t idx) {
        SweepRow& row = res.rows[idx];
        std::size_t rem = idx;
        row.axes.assign(spec.axes.size(), 0.0);
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            const auto& v = axis_values[a];
            row.axes[a] = v[rem % v.size()];
            rem /= v.size();
        }
        row.values.assign(res.columns.size(), kNaN);
        try {
            const PipelineSpec ps = sweep_point(spec, row.axes);
            std::size_t c = 0;
            for (Observable o : spec.observables) row.values[c++] = observe(ps, o);
            for (const Derived* d : derived) row.values[c++] = d->value(ps.params);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    const std::size_t nthreads = std::max<std::size_t>(1, std::min<std::size_t>(jobs > 0 ? jobs : 1, total));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) work(i);
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return res;
}

SweepSpec figure_preset(int figure) {
    SweepSpec s;
    auto axis = [](const char* name, double lo, double hi, int n, AxisSpacing sp) {
        SweepAxis a;
        a.name = name;
        a.min = lo;
        a.max = hi;
        a.count = n;
        a.spacing = sp;
        return a;
    };
    SweepAxis detunings;
    detunings.name = "delta01";
    detunings.list = {3.0, 5.0, 10.0, 20.0};
    switch (figure) {
        case 2:
        case 3:
            s.axes = {detunings, axis("k_off", 0.05, 50.0, 61, AxisSpacing::log)};
            s.observables = {figure == 2 ? Observable::remnant_r13 : Observable::eps_t};
            break;
        case 4:
            s.axes = {axis("delta02", 2.0, 40.0, 39, AxisSpacing::linear), axis("k_on", 0.1, 50.0, 28, AxisSpacing::log)};
            s.observables = {Observable::eps_r};
            s.fixed.set("omega2_rabi", "1");
            break;
        case 5:
            s.axes = {axis("eta", 0.25, 4.0, 17, AxisSpacing::log), axis("k_on", 0.1, 50.0, 28, AxisSpacing::log)};
            s.observables = {Observable::eps_r};
            s.fixed.set("delta01", "6.5");
            s.fixed.set("delta02", "6.5");
            break;
        case 6:
        case 7:
            if (figure == 6) {
                s.axes = {axis("delta01", 2.0, 20.0, 73, AxisSpacing::linear),
                          axis("interaction_time", 0.0, 100.0, 51, AxisSpacing::linear)};
            } else {
                s.axes = {axis("k_off", 0.1, 10.0, 41, AxisSpacing::log), axis("delta01", 2.0, 20.0, 73, AxisSpacing::linear)};
                s.fixed.set("interaction_time", "10");
            }
            s.observables = {Observable::overall_eff, Observable::eps_t, Observable::eps_r, Observable::gamma_factor};
            s.fixed.set("optical_depth", "200");
            s.fixed.set("optical_line", "gaussian");
            s.fixed.set("optical_width", "0.1");
            s.fixed.set("depth_model", "detuning_scaled");
            if (figure == 6) s.fixed.set("k_off", "1");
            break;
        default:
            throw ConfigError("figure presets exist for 2..7, got " + std::to_string(figure));
    }
    return s;
}

void emit(const SweepResult& r, Format f, std::ostream& os) {
    if (f == Format::csv) {
        for (const auto& [k, v] : r.header) os << "# " << k << '=' << v << '\n';
        bool first = true;
        auto sep = [&] {
            if (!first) os << ',';
            first = false;
        };
        for (const auto& a : r.axis_names) sep(), os << a;
        for (const auto& c : r.columns) sep(), os << c;
        sep();
        os << "error\n";
        for (const auto& row : r.rows) {
            first = true;
            for (double v : row.axes) sep(), os << format_double(v);
            for (double v : row.values) sep(), os << format_double(v);
            sep();
            std::string e = row.error;
            std::replace(e.begin(), e.end(), ',', ';');
            std::replace(e.begin(), e.end(), '\n', ' ');
            os << e << '\n';
        }
        return;
    }
    nlohmann::ordered_json j;
    j["header"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.header) j["header"][k] = v;
    j["axes"] = r.axis_names;
    j["columns"] = r.columns;
    j["rows"] = nlohmann::ordered_json::array();
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); };
    for (const auto& row : r.rows) {
        nlohmann::ordered_json o;
        o["axes"] = nlohmann::ordered_json::array();
        for (double v : row.axes) o["axes"].push_back(num(v));
        o["values"] = nlohmann::ordered_json::array();
        for (double v : row.values) o["values"].push_back(num(v));
        o["error"] = row.error;
        j["rows"].push_back(o);
    }
    os << j.dump(1) << '\n';
}

void emit(const SweepResult& r, Format f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open `" + path + "` for writing");
    emit(r, f, os);
    os.flush();
    if (!os) throw IoError("write to `" + path + "` failed");
}

SweepResult parse_result(std::istream& is, Format f) {
    SweepResult r;
    if (f == Format::json) {
        nlohmann::ordered_json j;
        try {
            j = nlohmann::ordered_json::parse(is);
        } catch (const std::exception& e) {
            throw IoError(std::string("malformed sweep JSON: ") + e.what());
        }
        for (auto it = j["header"].begin(); it != j["header"].end(); ++it)
            r.header.emplace_back(it.key(), it.value().get<std::string>());
        r.axis_names = j["axes"].get<std::vector<std::string>>();
        r.columns = j["columns"].get<std::vector<std::string>>();
        auto num = [](const nlohmann::ordered_json& v) { return v.is_null() ? kNaN : v.get<double>(); };
        for (const auto& o : j["rows"]) {
            SweepRow row;
            for (const auto& v : o["axes"]) row.axes.push_back(num(v));
            for (const auto& v : o["values"]) row.values.push_back(num(v));
            row.error = o["error"].get<std::string>();
            r.rows.push_back(std::move(row));
        }
        return r;
    }
    std::string line;
    bool have_columns = false;
    while (std::getline(is, line)) {
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq != std::string::npos) r.header.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
            continue;
        }
        const auto cells = split(line, ',');
        if (!have_columns) {
            // axis columns precede observables; the observable and derived names are known
            std::vector<std::string> known;
            for (const auto& [o, n] : observable_names()) known.emplace_back(n);
            for (const auto& d : derived_columns()) known.emplace_back(d.name);
            for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
                if (std::find(known.begin(), known.end(), cells[i]) != known.end()) r.columns.push_back(cells[i]);
                else if (r.columns.empty()) r.axis_names.push_back(cells[i]);
                else throw IoError("unexpected CSV column `" + cells[i] + "`");
            }
            have_columns = true;
            continue;
        }
        const std::size_t na = r.axis_names.size(), nc = r.columns.size();
        if (cells.size() != na + nc + 1) throw IoError("CSV row has " + std::to_string(cells.size()) + " cells");
        SweepRow row;
        for (std::size_t i = 0; i < na; ++i) row.axes.push_back(std::stod(cells[i]));
        for (std::size_t i = 0; i < nc; ++i) row.values.push_back(std::stod(cells[na + i]));
        row.error = cells.back();
        r.rows.push_back(std::move(row));
    }
    if (!have_columns) throw IoError("CSV has no column row");
    return r;
}

}  // namespace ramanecho
