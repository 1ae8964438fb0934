#include "ramanecho/str_verifier.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <sstream>

#include "ramanecho/config.hpp"
#include "ramanecho/errors.hpp"
#include "ramanecho/pipeline.hpp"
#include "step_coeffs.hpp"

namespace ramanecho {

namespace {

constexpr cplx I{0.0, 1.0};

double uniform_step(const std::vector<double>& tau) {
    if (tau.size() < 3) throw GridError("trajectory needs at least three time points");
    const double h = tau[1] - tau[0];
    for (std::size_t n = 1; n < tau.size(); ++n)
        if (std::abs((tau[n] - tau[n - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw GridError("trajectory time axis is not uniform; regrid before mapping");
    return h;
}

void check_layout(const StrSolution& s) {
    const auto& t = s.traj;
    const std::size_t nt = t.tau.size(), nz = t.z.size(), nn = t.nodes;
    if (nn == 0 || nz < 2 || t.field.size() != nz * nt || t.r12.size() != nz * nt * nn ||
        s.weight.size() != nn || s.delta1.size() != nn || s.detuning.size() != nz * nn)
        throw GridError("trajectory layout does not match its node and slice counts");
    uniform_step(t.tau);
}

// Reduced-model coefficients at one lattice site of the solution's stage.
struct SiteCoeffs {
    cplx L;  // R' = L R + b E
    cplx b;
};

struct StageModel {
    double omega, delta0, gamma21, gamma31, half_beta;
    int stage;
    std::vector<cplx> c;  // Omega/D per node
    cplx lin = 0.0;       // sum w/D - 1/Delta0

    StageModel(const StrSolution& s, const PhysicalParams& p)
        : omega(p.omega(s.stage)), delta0(p.delta0(s.stage)), gamma21(p.gamma21), gamma31(p.gamma31),
          half_beta(0.5 * p.beta), stage(s.stage) {
        for (std::size_t i = 0; i < s.weight.size(); ++i) {
            const cplx d = delta0 + s.delta1[i] - I * gamma31;
            c.push_back(omega / d);
            lin += s.weight[i] / d;
        }
        lin -= 1.0 / delta0;
    }

    SiteCoeffs site(const StrSolution& s, const PhysicalParams& p, std::size_t j, std::size_t i) const {
        const cplx d = delta0 + s.delta1[i] - I * gamma31;
        const double bare = bare_detuning(p, s.detuning[j * s.weight.size() + i], stage);
        return {-(I * (bare - omega * omega / d) + gamma21), I * omega / d};
    }

    cplx source(const StrSolution& s, std::size_t j, std::size_t n) const {
        const auto& t = s.traj;
        cplx acc = 0.0;
        for (std::size_t i = 0; i < t.nodes; ++i) acc += s.weight[i] * c[i] * t.r12_at(j, n, i);
        return I * half_beta * (acc + lin * t.field_at(j, n));
    }
};

double ratio_of(double num, double den) { return den > 0.0 ? std::sqrt(num / den) : 0.0; }

}  // namespace

double StrTransform::coherence_sign() const { return form == StrForm::third ? -1.0 : 1.0; }

double StrTransform::field_scale() const { return form == StrForm::first ? -std::sqrt(eta) : std::sqrt(eta); }

double StrTransform::coupling_ratio() const { return form == StrForm::second ? -std::sqrt(eta) : std::sqrt(eta); }

StrTransform StrTransform::inverse() const {
    StrTransform t = *this;
    t.eta = 1.0 / eta;
    t.detuning_factor = 1.0 / detuning_factor;
    t.space_factor = 1.0 / space_factor;
    t.time_factor = 1.0 / time_factor;
    t.field_factor = 1.0 / field_factor;
    return t;
}

void StrTransform::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be finite and > 0");
    for (double f : {detuning_factor, space_factor, time_factor, field_factor})
        if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("transform factors must be finite and > 0");
}

StrSolution record_storage(const PropagationProblem& problem) {
    if (problem.model != Model::reduced || problem.stage != Stage::storage)
        throw ConfigError("STR verification runs on a reduced-model storage stage");
    PropagationProblem prob = problem;
    prob.record_trajectory = true;
    const AtomicState init = make_state(prob);
    StageResult r = propagate(prob, init);
    StrSolution s;
    s.traj = std::move(*r.trajectory);
    s.stage = 1;
    s.direction = Direction::forward;
    s.weight = init.weight;
    s.delta1 = init.delta1;
    s.detuning = init.detuning;
    return s;
}

StrSolution apply_str(const StrSolution& s, const StrTransform& t) {
    t.validate();
    check_layout(s);
    const auto& in = s.traj;
    const std::size_t nt = in.tau.size(), nz = in.z.size(), nn = in.nodes;
    StrSolution out;
    out.stage = 3 - s.stage;
    out.direction = s.direction == Direction::forward ? Direction::backward : Direction::forward;
    out.weight = s.weight;
    out.delta1 = s.delta1;
    out.detuning.resize(s.detuning.size());
    for (std::size_t k = 0; k < s.detuning.size(); ++k) out.detuning[k] = -t.eta * t.detuning_factor * s.detuning[k];

    Trajectory& tr = out.traj;
    tr.nodes = nn;
    tr.z.resize(nz);
    for (std::size_t j = 0; j < nz; ++j) tr.z[j] = t.space_factor * in.z[j];
    tr.tau.resize(nt);
    const double rate = t.eta * t.time_factor;
    for (std::size_t m = 0; m < nt; ++m) tr.tau[m] = t.tau_flip + (t.tau_flip - in.tau[nt - 1 - m]) / rate;
    const double fs = t.field_factor * t.field_scale();
    const double cs = t.coherence_sign();
    tr.field.resize(nz * nt);
    tr.r12.resize(nz * nt * nn);
    for (std::size_t j = 0; j < nz; ++j)
        for (std::size_t m = 0; m < nt; ++m) {
            const std::size_t n = nt - 1 - m;
            tr.field[j * nt + m] = fs * in.field_at(j, n);
            for (std::size_t i = 0; i < nn; ++i) tr.r12[(j * nt + m) * nn + i] = cs * in.r12_at(j, n, i);
        }
    return out;
}

StrSolution apply_crib(const StrSolution& s, double tau_flip) {
    check_layout(s);
    StrSolution out = s;
    out.stage = 3 - s.stage;
    out.direction = s.direction == Direction::forward ? Direction::backward : Direction::forward;
    for (double& d : out.detuning) d = -d;
    const auto& in = s.traj;
    auto& tr = out.traj;
    const std::size_t nt = in.tau.size(), nn = in.nodes;
    for (std::size_t m = 0; m < nt; ++m) tr.tau[m] = 2.0 * tau_flip - in.tau[nt - 1 - m];
    for (std::size_t j = 0; j < in.z.size(); ++j)
        for (std::size_t m = 0; m < nt; ++m) {
            tr.field[j * nt + m] = -in.field_at(j, nt - 1 - m);
            for (std::size_t i = 0; i < nn; ++i) tr.r12[(j * nt + m) * nn + i] = in.r12_at(j, nt - 1 - m, i);
        }
    return out;
}

PhysicalParams str_retrieval_params(const PhysicalParams& p, const StrTransform& t) {
    t.validate();
    PhysicalParams out = p;
    out.eta = t.eta;
    out.eta_prime = t.eta;
    const double r2 = t.coupling_ratio() * p.omega1_rabi / p.delta01;
    const double d = std::abs(p.delta02);
    out.delta02 = r2 >= 0.0 ? d : -d;
    out.omega2_rabi = std::abs(r2) * d;
    return out;
}

StrResidual str_residual(const StrSolution& cand, const PhysicalParams& p, ResidualKind kind) {
    check_layout(cand);
    const auto& t = cand.traj;
    const std::size_t nt = t.tau.size(), nz = t.z.size(), nn = t.nodes;
    const double h = uniform_step(t.tau);
    const StageModel m(cand, p);
    const double sigma = cand.direction == Direction::forward ? 1.0 : -1.0;

    double an = 0.0, ad = 0.0;
    for (std::size_t j = 0; j < nz; ++j) {
        for (std::size_t i = 0; i < nn; ++i) {
            const SiteCoeffs sc = m.site(cand, p, j, i);
            const double w = cand.weight[i];
            if (kind == ResidualKind::collocation) {
                const cplx fwd = std::exp(-sc.L * h), bwd = std::exp(sc.L * h);
                for (std::size_t n = 1; n + 1 < nt; ++n) {
                    const cplx r = t.r12_at(j, n, i);
                    const cplx drive = sc.b * t.field_at(j, n);
                    const cplx res = (fwd * t.r12_at(j, n + 1, i) - bwd * t.r12_at(j, n - 1, i)) / (2.0 * h) - drive;
                    an += w * std::norm(res);
                    ad += w * (std::norm(sc.L * r) + std::norm(drive));
                }
            } else {
                Eigen::Matrix<cplx, 1, 1> L, b;
                L(0, 0) = sc.L;
                b(0) = sc.b;
                const auto c = detail::step_coeffs<1>(L, b, h);
                for (std::size_t n = 0; n + 1 < nt; ++n) {
                    const cplx free = t.r12_at(j, n + 1, i) - c.phi(0, 0) * t.r12_at(j, n, i);
                    const cplx drive = c.u(0) * t.field_at(j, n) + c.v(0) * t.field_at(j, n + 1);
                    an += w * std::norm(free - drive);
                    ad += w * (std::norm(free) + std::norm(drive));
                }
            }
        }
    }

    double fn = 0.0, fd = 0.0;
    std::vector<cplx> src(nz);
    for (std::size_t n = 0; n < nt; ++n) {
        for (std::size_t j = 0; j < nz; ++j) src[j] = m.source(cand, j, n);
        if (kind == ResidualKind::collocation) {
            for (std::size_t j = 1; j + 1 < nz; ++j) {
                const double h1 = t.z[j] - t.z[j - 1], h2 = t.z[j + 1] - t.z[j];
                const cplx de = -h2 / (h1 * (h1 + h2)) * t.field_at(j - 1, n) + (h2 - h1) / (h1 * h2) * t.field_at(j, n) +
                                h1 / (h2 * (h1 + h2)) * t.field_at(j + 1, n);
                fn += std::norm(sigma * de - src[j]);
                fd += std::norm(de) + std::norm(src[j]);
            }
        } else {
            for (std::size_t j = 0; j + 1 < nz; ++j) {
                const double dz = t.z[j + 1] - t.z[j];
                const cplx de = sigma * (t.field_at(j + 1, n) - t.field_at(j, n));
                const cplx rhs = 0.5 * dz * (src[j] + src[j + 1]);
                fn += std::norm(de - rhs);
                fd += std::norm(de) + std::norm(rhs);
            }
        }
    }

    StrResidual r;
    r.atom = ratio_of(an, ad);
    r.field = ratio_of(fn, fd);
    r.total = std::hypot(r.atom, r.field);
    return r;
}

std::vector<StrProbe> violation_probes(const StrSolution& storage, const PhysicalParams& p, const StrTransform& t,
                                       double size, ResidualKind kind) {
    if (!(size > 0.0)) throw DomainError("violation size must be > 0");
    const PhysicalParams pr = str_retrieval_params(p, t);
    std::vector<StrProbe> out;
    auto add = [&](const char* name, const StrTransform& tt, const PhysicalParams& pp) {
        StrProbe pb;
        pb.condition = name;
        pb.residual = str_residual(apply_str(storage, tt), pp, kind);
        out.push_back(pb);
    };
    add("exact", t, pr);
    const double f = 1.0 + size;
    StrTransform tt = t;
    tt.detuning_factor *= f;
    add("detuning_map", tt, pr);
    tt = t;
    tt.space_factor *= f;
    add("space_map", tt, pr);
    tt = t;
    tt.time_factor *= f;
    add("time_map", tt, pr);
    PhysicalParams pc = pr;
    pc.omega2_rabi *= f;
    add("coupling", t, pc);
    tt = t;
    tt.field_factor *= f;
    add("field_scale", tt, pr);

    const double base = out.front().residual.total;
    for (auto& pb : out)
        pb.ratio = base > 0.0 ? pb.residual.total / base : std::numeric_limits<double>::infinity();
    out.front().ratio = 1.0;
    return out;
}

double waveform_fidelity(const FieldEnvelope& input, const FieldEnvelope& echo, double eta, double tau_echo,
                         double t_in) {
    if (!(eta > 0.0)) throw DomainError("eta must be > 0");
    const double ee = echo.energy();
    if (!(ee > 0.0)) throw DomainError("fidelity is undefined for a zero-energy echo");
    FieldEnvelope ref = echo;
    for (std::size_t i = 0; i < echo.size(); ++i) ref.samples[i] = sample_at(input, t_in - eta * (echo.axis[i] - tau_echo));
    const double er = ref.energy();
    if (!(er > 0.0)) throw DomainError("reference image lies outside the echo window");
    cplx ov = 0.0;
    for (std::size_t i = 1; i < echo.size(); ++i) {
        const double dt = echo.axis[i] - echo.axis[i - 1];
        ov += 0.5 * dt *
              (std::conj(ref.samples[i - 1]) * echo.samples[i - 1] + std::conj(ref.samples[i]) * echo.samples[i]);
    }
    return std::min(1.0, std::norm(ov) / (er * ee));
}

BroadeningSpec gem_gradient_flip(const BroadeningSpec& b, double eta) {
    const auto* g = std::get_if<LongitudinalGradient>(&b.raman);
    if (!g) throw ConfigError("gradient flip needs a longitudinal-gradient broadening");
    if (!(eta > 0.0)) throw DomainError("eta must be > 0");
    BroadeningSpec out = b;
    out.raman = LongitudinalGradient{-eta * g->chi, g->z_center};
    return out;
}

bool StrReport::necessity_holds(double min_ratio) const {
    for (const auto& r : rows)
        for (std::size_t k = 1; k < r.probes.size(); ++k)
            if (!(r.probes[k].ratio >= min_ratio)) return false;
    return !rows.empty();
}

std::set<std::string> str_check_keys() {
    std::set<std::string> k = physical_param_keys();
    for (const auto& s : broadening_keys()) k.insert(s);
    for (const char* s : {"etas", "form", "residual", "violation", "pulse_width", "dt", "z_slices", "run_pipeline"})
        k.insert(s);
    return k;
}

StrCheckSpec load_str_check_spec(const Config& c) {
    StrCheckSpec s;
    s.broadening = load_broadening(c);
    s.params = load_params(c, s.broadening);
    if (auto e = c.raw("etas")) {
        s.etas.clear();
        std::string item;
        std::istringstream in(*e);
        while (std::getline(in, item, ',')) {
            Config one;
            one.set("v", item);
            s.etas.push_back(one.get_double("v", 0.0));
        }
    }
    const std::string form = c.get_string("form", "first");
    if (form == "first") s.form = StrForm::first;
    else if (form == "second") s.form = StrForm::second;
    else if (form == "third") s.form = StrForm::third;
    else throw ConfigError("key `form`: expected first|second|third, got `" + form + "`");
    const std::string kind = c.get_string("residual", "collocation");
    if (kind == "collocation") s.kind = ResidualKind::collocation;
    else if (kind == "scheme") s.kind = ResidualKind::scheme;
    else throw ConfigError("key `residual`: expected collocation|scheme, got `" + kind + "`");
    s.violation = c.get_double("violation", s.violation);
    s.pulse_width = c.get_double("pulse_width", s.pulse_width);
    s.dt = c.get_double("dt", s.dt);
    const int nz = c.get_int("z_slices", static_cast<int>(s.z_slices));
    if (nz < 3) throw ConfigError("key `z_slices`: must be >= 3");
    s.z_slices = static_cast<std::size_t>(nz);
    s.run_pipeline = c.get_bool("run_pipeline", s.run_pipeline);
    for (double e : s.etas)
        if (!(e > 0.0)) throw ConfigError("key `etas`: values must be > 0");
    if (!(s.violation > 0.0)) throw ConfigError("key `violation`: must be > 0");
    return s;
}

StrReport run_str_check(const StrCheckSpec& spec) {
    if (spec.etas.empty()) throw ConfigError("key `etas`: needs at least one value");
    if (!(spec.pulse_width > 0.0) || !(spec.dt > 0.0)) throw ConfigError("pulse_width and dt must be > 0");
    PhysicalParams p = spec.params;
    if (p.beta == 0.0 && p.optical_depth > 0.0) p = with_derived_beta(p, spec.broadening);
    p.validate();

    PropagationProblem st;
    st.params = p;
    st.broadening = spec.broadening;
    st.model = Model::reduced;
    st.stage = Stage::storage;
    const double w = spec.pulse_width;
    const auto nt = static_cast<std::size_t>(std::llround(12.0 * w / spec.dt)) + 1;
    const auto tau = uniform_axis(0.0, 12.0 * w, nt);
    st.grid = make_grid(spec.broadening, tau, uniform_axis(0.0, p.medium_length, spec.z_slices));
    st.input_field = gaussian_pulse(tau, 6.0 * w, w);
    st.control = ControlSchedule::constant(p.omega1_rabi);
    const StrSolution storage = record_storage(st);

    auto one = [&](double eta) {
        StrEtaReport row;
        row.eta = eta;
        StrTransform t;
        t.eta = eta;
        t.form = spec.form;
        t.tau_flip = tau.back();
        PhysicalParams pe = p;
        pe.eta = eta;
        pe.eta_prime = eta;
        row.probes = violation_probes(storage, pe, t, spec.violation, spec.kind);
        if (eta == 1.0 && spec.form == StrForm::first) {
            const double crib = str_residual(apply_crib(storage, t.tau_flip), pe, spec.kind).total;
            row.crib_difference = std::abs(crib - row.probes.front().residual.total);
        }
        if (spec.run_pipeline) {
            PipelineSpec ps;
            ps.params = str_retrieval_params(pe, t);
            ps.broadening = spec.broadening;
            ps.model = Model::reduced;
            ps.switching = SwitchingMode::ideal;
            ps.pulse_width = w;
            ps.dt = 0.1;
            const PipelineReport rep = run_pipeline(ps);
            row.fidelity = rep.fidelity;
            if (rep.echo_fwhm > 0.0) row.fwhm_ratio = rep.input_fwhm / rep.echo_fwhm;
        }
        return row;
    };
    std::vector<std::future<StrEtaReport>> jobs;
    for (double eta : spec.etas) jobs.push_back(std::async(std::launch::async, one, eta));
    StrReport rep;
    for (auto& j : jobs) rep.rows.push_back(j.get());

    rep.header = describe(p);
    for (auto& kv : describe(spec.broadening)) rep.header.push_back(kv);
    rep.header.emplace_back("form", spec.form == StrForm::first ? "first" : spec.form == StrForm::second ? "second" : "third");
    rep.header.emplace_back("residual", spec.kind == ResidualKind::collocation ? "collocation" : "scheme");
    rep.header.emplace_back("violation", format_double(spec.violation));
    rep.header.emplace_back("pulse_width", format_double(w));
    rep.header.emplace_back("dt", format_double(spec.dt));
    rep.header.emplace_back("z_slices", std::to_string(spec.z_slices));
    return rep;
}

void write_str_report_csv(const StrReport& r, std::ostream& os) {
    for (const auto& [k, v] : r.header) os << "# " << k << '=' << v << '\n';
    os << "eta,condition,atom,field,total,ratio,fidelity,fwhm_ratio\n";
    for (const auto& row : r.rows)
        for (const auto& pb : row.probes)
            os << format_double(row.eta) << ',' << pb.condition << ',' << format_double(pb.residual.atom) << ','
               << format_double(pb.residual.field) << ',' << format_double(pb.residual.total) << ','
               << format_double(pb.ratio) << ',' << format_double(row.fidelity) << ','
               << format_double(row.fwhm_ratio) << '\n';
}

}  // namespace ramanecho
