#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ramanecho/config.hpp"
#include "ramanecho/errors.hpp"
#include "ramanecho/pipeline.hpp"
#include "ramanecho/str_verifier.hpp"
#include "ramanecho/sweep.hpp"
#include "ramanecho/switching.hpp"

using namespace ramanecho;

namespace {

enum Exit { ok = 0, config_error = 1, domain_error = 2, check_failed = 3 };

struct Common {
    std::string config;
    int jobs = 1;
    std::string format = "csv";
    std::string out;
    double tolerance = -1.0;
    std::vector<std::string> sets;
    std::vector<std::string> axes;
    std::vector<std::string> observables;
};

// defaults < --config file < --set
Config resolve(const Common& c) {
    Config cfg;
    if (!c.config.empty()) cfg = Config::from_file(c.config);
    for (const auto& s : c.sets) cfg.set_assignment(s);
    return cfg;
}

void write_out(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(c.out);
    if (!os) throw IoError("cannot open `" + c.out + "` for writing");
    os << text;
    if (!os) throw IoError("write to `" + c.out + "` failed");
}

SweepSpec sweep_from(const Common& c, std::vector<SweepAxis> default_axes, std::vector<Observable> default_obs) {
    SweepSpec s;
    s.fixed = resolve(c);
    if (c.axes.empty()) {
        s.axes = std::move(default_axes);
    } else {
        for (const auto& a : c.axes) s.axes.push_back(parse_axis(a));
    }
    if (c.observables.empty()) {
        s.observables = std::move(default_obs);
    } else {
        for (const auto& o : c.observables) s.observables.push_back(parse_observable(o));
    }
    // swept keys win over the fixed file values
    return s;
}

int emit_sweep(const Common& c, const SweepResult& r) {
    std::ostringstream os;
    emit(r, parse_format(c.format), os);
    write_out(c, os.str());
    return ok;
}

SweepAxis axis(const char* name, double lo, double hi, int n, bool log) {
    SweepAxis a;
    a.name = name;
    a.min = lo;
    a.max = hi;
    a.count = n;
    a.spacing = log ? AxisSpacing::log : AxisSpacing::linear;
    return a;
}

int cmd_switch_off(const Common& c) {
    const SweepSpec s = sweep_from(c, {axis("k_off", 0.05, 50.0, 61, true)}, {Observable::remnant_r13, Observable::eps_t});
    const SweepResult r = run_sweep(s, c.jobs);
    emit_sweep(c, r);
    if (c.tolerance < 0.0) return ok;
    // closed form against the adaptive ODE oracle at every point
    double worst = 0.0;
    for (const auto& row : r.rows) {
        const PhysicalParams p = sweep_point(s, row.axes).params;
        const CoherencePair in = init_coherence_after_storage(p, 0.0, 0.0);
        const CoherencePair a = switch_off_coherences(p, in, 0.0, 0.0);
        const CoherencePair o = switch_off_ode_oracle(p, in, 0.0, 0.0, switch_off_interval(p));
        const double scale = std::sqrt(in.norm2());
        worst = std::max({worst, std::abs(a.r12 - o.r12) / scale, std::abs(a.r13 - o.r13) / scale});
    }
    std::fprintf(stderr, "switch-off oracle deviation %.3e (tolerance %.3e)\n", worst, c.tolerance);
    return worst <= c.tolerance ? ok : check_failed;
}

int cmd_switch_on(const Common& c) {
    const SweepSpec s = sweep_from(c, {axis("k_on", 0.1, 50.0, 28, true)}, {Observable::eps_r});
    const SweepResult r = run_sweep(s, c.jobs);
    emit_sweep(c, r);
    if (c.tolerance < 0.0) return ok;
    double worst = 0.0;
    for (const auto& row : r.rows) {
        const SwitchOnCoefficients k = switch_on_coefficients(sweep_point(s, row.axes).params);
        worst = std::max(worst, std::abs(std::norm(k.c12) + std::norm(k.c13) - 1.0));
    }
    std::fprintf(stderr, "switch-on unitarity deviation %.3e (tolerance %.3e)\n", worst, c.tolerance);
    return worst <= c.tolerance ? ok : check_failed;
}

int cmd_efficiency_map(const Common& c) {
    const SweepSpec s = sweep_from(
        c, {axis("delta01", 2.0, 20.0, 37, false), axis("interaction_time", 0.0, 100.0, 21, false)},
        {Observable::overall_eff, Observable::eps_t, Observable::eps_r, Observable::gamma_factor});
    return emit_sweep(c, run_sweep(s, c.jobs));
}

int cmd_figure(const Common& c, int figure) {
    SweepSpec s = figure_preset(figure);
    const Config over = resolve(c);
    s.fixed.merge(over);
    return emit_sweep(c, run_sweep(s, c.jobs));
}

int cmd_pipeline(const Common& c, const std::string& envelopes) {
    const Config cfg = resolve(c);
    const auto unknown = cfg.unknown_keys(pipeline_keys());
    if (!unknown.empty()) throw ConfigError("unknown key `" + unknown.front() + "`");
    const PipelineReport r = run_pipeline(load_pipeline_spec(cfg));
    const std::vector<std::pair<std::string, double>> q{
        {"input_energy", r.input_energy},
        {"transmitted_energy", r.transmitted_energy},
        {"stored_energy", r.stored_energy},
        {"echo_energy", r.echo_energy},
        {"efficiency", r.efficiency},
        {"analytic_efficiency", r.analytic.total},
        {"analytic_eps_t", r.analytic.eps_t},
        {"analytic_eps_r", r.analytic.eps_r},
        {"analytic_gamma_factor", r.analytic.gamma_factor},
        {"analytic_depth_factor", r.analytic.depth_factor},
        {"fidelity", r.fidelity},
        {"input_fwhm", r.input_fwhm},
        {"echo_fwhm", r.echo_fwhm},
        {"t_in", r.t_in},
        {"flip_time", r.flip_time},
        {"on_time", r.on_time},
        {"expected_delay", r.expected_delay},
        {"measured_delay", r.measured_delay},
        {"retrieval_dt", r.retrieval_dt},
    };
    std::ostringstream os;
    if (parse_format(c.format) == Format::csv) {
        for (const auto& [k, v] : r.header) os << "# " << k << '=' << v << '\n';
        os << "quantity,value\n";
        for (const auto& [k, v] : q) os << k << ',' << format_double(v) << '\n';
    } else {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : r.header) j["header"][k] = v;
        for (const auto& [k, v] : q) j["report"][k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr;
        os << j.dump(1) << '\n';
    }
    write_out(c, os.str());
    if (!envelopes.empty()) {
        write_envelope_csv(r.input, envelopes + "_input.csv");
        write_envelope_csv(r.transmitted, envelopes + "_transmitted.csv");
        write_envelope_csv(r.echo, envelopes + "_echo.csv");
    }
    return ok;
}

int cmd_str_check(const Common& c) {
    const Config cfg = resolve(c);
    const auto unknown = cfg.unknown_keys(str_check_keys());
    if (!unknown.empty()) throw ConfigError("unknown key `" + unknown.front() + "`");
    const StrReport r = run_str_check(load_str_check_spec(cfg));
    std::ostringstream os;
    if (parse_format(c.format) == Format::csv) {
        write_str_report_csv(r, os);
    } else {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : r.header) j["header"][k] = v;
        j["rows"] = nlohmann::ordered_json::array();
        auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); };
        for (const auto& row : r.rows)
            for (const auto& p : row.probes)
                j["rows"].push_back({{"eta", row.eta}, {"condition", p.condition}, {"atom", num(p.residual.atom)},
                                     {"field", num(p.residual.field)}, {"total", num(p.residual.total)},
                                     {"ratio", num(p.ratio)}, {"fidelity", num(row.fidelity)},
                                     {"fwhm_ratio", num(row.fwhm_ratio)}});
        os << j.dump(1) << '\n';
    }
    write_out(c, os.str());
    bool pass = r.necessity_holds(10.0);
    if (c.tolerance >= 0.0)
        for (const auto& row : r.rows) pass = pass && row.probes.front().residual.total <= c.tolerance;
    return pass ? ok : check_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Raman echo quantum memory: switching, efficiency maps, Maxwell-Bloch pipeline, STR checks"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);
    Common c;
    auto common = [&](CLI::App* s) {
        s->add_option("--config", c.config, "key = value configuration file");
        s->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
        s->add_option("--format", c.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--out", c.out, "output path (default stdout)");
        s->add_option("--tolerance", c.tolerance, "oracle/acceptance tolerance; enables the check");
        s->add_option("--set", c.sets, "key=value override (repeatable)");
    };
    auto sweepable = [&](CLI::App* s) {
        s->add_option("--axis", c.axes, "name=min:max:count[:log] or name=v1,v2,... (repeatable)");
        s->add_option("--observable", c.observables,
                      "remnant_r13|eps_t|eps_r|gamma_factor|overall_eff|fidelity (repeatable)");
    };

    auto* off = app.add_subcommand("switch-off", "remnant optical coherence and transfer efficiency");
    auto* on = app.add_subcommand("switch-on", "switch-on efficiency");
    auto* map = app.add_subcommand("efficiency-map", "overall efficiency grid");
    auto* pipe = app.add_subcommand("pipeline", "storage, switching, retrieval by Maxwell-Bloch integration");
    auto* str = app.add_subcommand("str-check", "scaled time-reversal residuals and violation probes");
    auto* fig = app.add_subcommand("figure", "regenerate the data grid of figure 2..7");
    for (auto* s : {off, on, map, pipe, str, fig}) common(s);
    for (auto* s : {off, on, map}) sweepable(s);
    std::string envelopes;
    pipe->add_option("--envelopes", envelopes, "write <prefix>_{input,transmitted,echo}.csv");
    int figure = 0;
    fig->add_option("number", figure, "figure number")->required()->check(CLI::Range(2, 7));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        if (off->parsed()) return cmd_switch_off(c);
        if (on->parsed()) return cmd_switch_on(c);
        if (map->parsed()) return cmd_efficiency_map(c);
        if (pipe->parsed()) return cmd_pipeline(c, envelopes);
        if (str->parsed()) return cmd_str_check(c);
        if (fig->parsed()) return cmd_figure(c, figure);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config_error;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return config_error;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "physics-domain error: %s\n", e.what());
        return domain_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return domain_error;
    }
    return ok;
}
