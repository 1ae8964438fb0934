#include "ramanecho/pipeline.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ramanecho/errors.hpp"
#include "ramanecho/str_verifier.hpp"
#include "ramanecho/switching.hpp"

namespace ramanecho {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

template <class E>
E parse_enum(const Config& c, const std::string& key, const std::vector<std::pair<std::string, E>>& opts, E fallback) {
    if (!c.has(key)) return fallback;
    const std::string v = c.get_string(key, "");
    std::string allowed;
    for (const auto& [name, e] : opts) {
        if (v == name) return e;
        allowed += (allowed.empty() ? "" : "|") + name;
    }
    throw ConfigError("key `" + key + "`: expected " + allowed + ", got `" + v + "`");
}

std::vector<double> time_axis(double t0, double t1, double h) {
    const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / h - 1e-9)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = t0 + h * static_cast<double>(i);
    return v;
}

double auto_stretch(double depth) { return depth > 1.0 ? std::max(0.0, std::log(depth) - 0.3) : 0.0; }

// Excited-state group delay down to the depth where all but e^-7 of the pulse is absorbed.
double optical_delay(const PhysicalParams& p, int stage) {
    const double d0 = p.delta0(stage);
    const double reach = p.optical_depth > 7.0 ? 7.0 * p.medium_length / p.optical_depth : p.medium_length;
    return p.beta * reach / (2.0 * d0 * d0);
}

// A comb of Raman nodes with spacing s rephases every 2 pi/s: the whole dark interval plus
// the pulse tail must fit inside one period or a revival pre-empts the echo.
void check_revival(const BroadeningSpec& b, double interval) {
    if (b.is_gradient()) return;
    const QuadratureRule r = raman_rule(b);
    if (r.size() < 2) return;
    const double s = r.nodes[1] - r.nodes[0];
    const double period = 2.0 * std::numbers::pi / s;
    if (interval >= period)
        throw GridError("Raman node spacing " + format_double(s) + " revives after " + format_double(period) +
                        " but the storage spans " + format_double(interval) + "; add raman_nodes");
}

}  // namespace

std::set<std::string> pipeline_keys() {
    std::set<std::string> k = physical_param_keys();
    for (const auto& s : broadening_keys()) k.insert(s);
    for (const char* s : {"model", "switching", "pulse_width", "pulse_center", "pulse_chirp", "pulse_skew", "dt",
                          "retrieval_dt", "storage_window", "retrieval_window", "z_slices", "z_stretch", "flip_time",
                          "on_time", "retrieval_direction", "grating_mismatch", "flip_factor", "depth_model",
                          "gamma_eff_convention", "delta1_in", "optical_shape", "interaction_time"})
        k.insert(s);
    return k;
}

PipelineSpec load_pipeline_spec(const Config& c) {
    PipelineSpec s;
    s.broadening = load_broadening(c);
    s.params = load_params(c, s.broadening);
    s.model = parse_enum<Model>(c, "model", {{"full", Model::full}, {"reduced", Model::reduced}}, Model::full);
    s.switching = parse_enum<SwitchingMode>(c, "switching",
                                            {{"analytic", SwitchingMode::analytic}, {"ideal", SwitchingMode::ideal}},
                                            SwitchingMode::analytic);
    s.pulse_width = c.get_double("pulse_width", s.pulse_width);
    s.pulse_center = c.get_double("pulse_center", s.pulse_center);
    s.pulse_chirp = c.get_double("pulse_chirp", s.pulse_chirp);
    s.pulse_skew = c.get_double("pulse_skew", s.pulse_skew);
    s.dt = c.get_double("dt", s.dt);
    s.retrieval_dt = c.get_double("retrieval_dt", s.retrieval_dt);
    s.storage_window = c.get_double("storage_window", s.storage_window);
    s.retrieval_window = c.get_double("retrieval_window", s.retrieval_window);
    s.z_slices = c.get_int("z_slices", s.z_slices);
    s.z_stretch = c.get_double("z_stretch", s.z_stretch);
    s.flip_time = c.get_double("flip_time", s.flip_time);
    s.on_time = c.get_double("on_time", s.on_time);
    s.retrieval_direction = parse_enum<Direction>(
        c, "retrieval_direction", {{"backward", Direction::backward}, {"forward", Direction::forward}},
        Direction::backward);
    s.grating_mismatch = c.get_double("grating_mismatch", s.grating_mismatch);
    s.flip_factor = c.get_double("flip_factor", s.flip_factor);

    s.analytic = efficiency_options_from(s.broadening);
    s.analytic.depth_model = parse_enum<DepthModel>(
        c, "depth_model", {{"fixed", DepthModel::fixed}, {"detuning_scaled", DepthModel::detuning_scaled}},
        DepthModel::fixed);
    s.analytic.gamma_eff = parse_enum<GammaEffConvention>(
        c, "gamma_eff_convention",
        {{"squared_ratio", GammaEffConvention::squared_ratio}, {"printed", GammaEffConvention::printed}},
        GammaEffConvention::squared_ratio);
    s.analytic.optical_shape = parse_enum<LineShape>(
        c, "optical_shape", {{"gaussian", LineShape::gaussian}, {"lorentzian", LineShape::lorentzian}},
        s.analytic.optical_shape);
    s.analytic.delta1_in = c.get_double("delta1_in", s.analytic.delta1_in);
    s.analytic.interaction_time = c.get_double("interaction_time", -1.0);
    s.analytic.ideal_switching = s.switching == SwitchingMode::ideal;

    if (!(s.pulse_width > 0.0)) throw ConfigError("key `pulse_width`: must be > 0");
    if (!(s.dt > 0.0)) throw ConfigError("key `dt`: must be > 0");
    if (s.retrieval_dt < 0.0) throw ConfigError("key `retrieval_dt`: must be >= 0");
    if (s.z_slices < 2) throw ConfigError("key `z_slices`: must be >= 2");
    if (s.pulse_skew < 0.0) throw ConfigError("key `pulse_skew`: must be >= 0");
    if (s.flip_factor < 0.0) throw ConfigError("key `flip_factor`: must be >= 0");
    return s;
}

std::vector<std::pair<std::string, std::string>> describe(const PipelineSpec& s) {
    auto out = describe(s.params);
    for (auto& kv : describe(s.broadening)) out.push_back(kv);
    auto add = [&](const char* k, double v) { out.emplace_back(k, format_double(v)); };
    out.emplace_back("model", s.model == Model::full ? "full" : "reduced");
    out.emplace_back("switching", s.switching == SwitchingMode::analytic ? "analytic" : "ideal");
    add("pulse_width", s.pulse_width);
    add("pulse_center", s.pulse_center);
    add("pulse_chirp", s.pulse_chirp);
    add("pulse_skew", s.pulse_skew);
    add("dt", s.dt);
    add("retrieval_dt", s.retrieval_dt);
    add("storage_window", s.storage_window);
    add("retrieval_window", s.retrieval_window);
    add("z_slices", s.z_slices);
    add("z_stretch", s.z_stretch);
    add("flip_time", s.flip_time);
    add("on_time", s.on_time);
    out.emplace_back("retrieval_direction", s.retrieval_direction == Direction::backward ? "backward" : "forward");
    add("grating_mismatch", s.grating_mismatch);
    add("flip_factor", s.flip_factor);
    out.emplace_back("depth_model", s.analytic.depth_model == DepthModel::fixed ? "fixed" : "detuning_scaled");
    out.emplace_back("gamma_eff_convention",
                     s.analytic.gamma_eff == GammaEffConvention::squared_ratio ? "squared_ratio" : "printed");
    return out;
}

FieldEnvelope make_input_pulse(const PipelineSpec& spec, const std::vector<double>& tau, double t_in) {
    FieldEnvelope e = gaussian_pulse(tau, t_in, spec.pulse_width, 1.0, spec.pulse_chirp);
    if (spec.pulse_skew > 0.0) {
        const double wt = spec.pulse_width * (1.0 + spec.pulse_skew);
        for (std::size_t i = 0; i < tau.size(); ++i) {
            const double d = tau[i] - t_in;
            if (d > 0.0) e.samples[i] = std::exp(cplx(-0.5 * d * d / (wt * wt), spec.pulse_chirp * d * d));
        }
    }
    return e;
}

PipelineReport run_pipeline(const PipelineSpec& spec) {
    const PhysicalParams& p = spec.params;
    const BroadeningSpec& b = spec.broadening;
    p.validate();
    const double w = spec.pulse_width;
    const double tail = 6.0 * w * (1.0 + spec.pulse_skew);
    const double t_in = spec.pulse_center > 0.0 ? spec.pulse_center : 6.0 * w;
    const bool full = spec.model == Model::full;

    PipelineReport rep;
    rep.t_in = t_in;
    rep.header = describe(spec);

    // storage
    const double ts_end = spec.storage_window > 0.0 ? spec.storage_window
                                                    : t_in + tail + (full ? optical_delay(p, 1) : 0.0);
    PropagationProblem st;
    st.params = p;
    st.broadening = b;
    st.model = spec.model;
    st.stage = Stage::storage;
    st.control = ControlSchedule::constant(p.omega1_rabi);
    const double stretch = spec.z_stretch >= 0.0 ? spec.z_stretch : auto_stretch(p.optical_depth);
    const std::vector<double> z = stretched_axis(p.medium_length, static_cast<std::size_t>(spec.z_slices), stretch);
    st.grid = make_grid(b, time_axis(0.0, ts_end, spec.dt), z);
    st.input_field = make_input_pulse(spec, st.grid.tau, t_in);
    rep.input = st.input_field;
    rep.input_energy = rep.input.energy();

    StageResult sres = propagate(st, make_state(st));
    rep.transmitted = sres.output;
    rep.transmitted_energy = rep.transmitted.energy();
    rep.stored_energy = 0.5 * p.beta * sres.state.population_integral();
    AtomicState s = std::move(sres.state);
    const double t_store = s.time;

    // switch-off; the optical remnant is phase mismatched for the echo and dropped
    const double t_off = switch_off_interval(p);
    for (std::size_t j = 0; j < s.slices(); ++j)
        for (std::size_t i = 0; i < s.nodes(); ++i) {
            const std::size_t k = s.index(j, i);
            const double bare = bare_detuning_of(s, p, j, i);
            if (spec.switching == SwitchingMode::ideal) {
                s.r12[k] *= std::exp(-cplx(p.gamma21, bare) * t_off);
            } else {
                CoherencePair in;
                in.r12 = s.r12[k];
                in.r13 = full ? s.r13[k] : p.omega1_rabi / cplx(p.delta01 + s.delta1[i], -p.gamma31) * s.r12[k];
                s.r12[k] = switch_off_coherences(p, in, s.delta1[i], bare).r12;
            }
            if (full) s.r13[k] = 0.0;
        }
    s.time += t_off;

    const double tau_f = spec.flip_time > 0.0 ? spec.flip_time : s.time;
    if (tau_f < s.time - 1e-9)
        throw ConfigError("key `flip_time`: must be >= end of the switch-off (" + format_double(s.time) + ")");
    check_revival(b, tau_f - t_in + tail);
    evolve_dark(s, p, tau_f - s.time);
    s = flip_detunings(s, spec.flip_factor > 0.0 ? spec.flip_factor : p.eta);
    const double tau_on = spec.on_time > 0.0 ? spec.on_time : tau_f;
    if (tau_on < tau_f) throw ConfigError("key `on_time`: must be >= flip_time");
    evolve_dark(s, p, tau_on - tau_f);
    rep.flip_time = tau_f;
    rep.on_time = tau_on;

    // switch-on
    for (std::size_t j = 0; j < s.slices(); ++j)
        for (std::size_t i = 0; i < s.nodes(); ++i) {
            const std::size_t k = s.index(j, i);
            const cplx d2(p.delta02 + s.delta1[i], -p.gamma31);
            if (spec.switching == SwitchingMode::ideal) {
                if (full) s.r13[k] = p.omega2_rabi / d2 * s.r12[k];
                continue;
            }
            const SwitchOnCoefficients c = switch_on_coefficients(p, s.delta1[i], bare_detuning_of(s, p, j, i));
            if (full) {
                s.r13[k] = I * c.c13 * s.r12[k];
                s.r12[k] = c.c12 * s.r12[k];
            } else {
                s.r12[k] = (c.c12 + I * (p.omega2_rabi / d2) * c.c13) * s.r12[k];
            }
        }
    if (spec.grating_mismatch != 0.0) imprint_phase(s, spec.grating_mismatch);

    // retrieval
    const double eta = p.eta;
    rep.expected_delay = (1.0 + 1.0 / eta) * (tau_f - t_in);
    const double tau_e = t_in + rep.expected_delay;
    double dt2 = spec.retrieval_dt > 0.0 ? spec.retrieval_dt : spec.dt / eta;
    if (full && spec.retrieval_dt <= 0.0) {
        double dmax = 0.0;
        for (double d : st.grid.delta1.nodes) dmax = std::max(dmax, std::abs(d));
        const double lim = 2.0 / (std::abs(p.delta02) + dmax);
        if (dt2 > lim) dt2 = spec.dt / std::ceil(spec.dt / lim);
    }
    rep.retrieval_dt = dt2;
    const double tr_end = spec.retrieval_window > 0.0 ? tau_on + spec.retrieval_window
                                                      : tau_e + tail / eta + (full ? optical_delay(p, 2) : 0.0);
    PropagationProblem rt;
    rt.params = p;
    rt.broadening = b;
    rt.model = spec.model;
    rt.stage = Stage::retrieval;
    rt.direction = spec.retrieval_direction;
    rt.control = ControlSchedule::constant(p.omega2_rabi);
    rt.grid = make_grid(b, time_axis(tau_on, tr_end, dt2), z);
    StageResult rres = propagate(rt, s);
    rep.echo = rres.output;
    rep.echo_energy = rep.echo.energy();
    rep.efficiency = rep.input_energy > 0.0 ? rep.echo_energy / rep.input_energy : 0.0;

    rep.input_fwhm = fwhm(rep.input);
    rep.echo_fwhm = nan;
    rep.measured_delay = nan;
    rep.fidelity = 0.0;
    if (rep.echo_energy > 1e-12 * rep.input_energy) {
        try {
            rep.echo_fwhm = fwhm(rep.echo);
        } catch (const DomainError&) {
        }
        rep.measured_delay = peak_time(rep.echo) - t_in;
        rep.fidelity = waveform_fidelity(rep.input, rep.echo, eta, tau_e, t_in);
    }

    EfficiencyOptions opt = spec.analytic;
    opt.tau_echo = rep.expected_delay;
    if (opt.interaction_time < 0.0) opt.interaction_time = (t_store - t_in) + (tau_e - tau_on);
    rep.analytic = overall_efficiency(p, b, opt);
    return rep;
}

PipelineReport run_pipeline(const std::string& config_path) {
    const Config c = Config::from_file(config_path);
    const auto unknown = c.unknown_keys(pipeline_keys());
    if (!unknown.empty()) throw ConfigError("unknown key `" + unknown.front() + "` in " + config_path);
    return run_pipeline(load_pipeline_spec(c));
}

}  // namespace ramanecho
