#include "ramanecho/mbsolver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ramanecho/config.hpp"
#include "ramanecho/echo_efficiency.hpp"
#include "ramanecho/errors.hpp"

namespace ramanecho {

ControlSchedule ControlSchedule::constant(double omega) {
    ControlSchedule s;
    s.segs_.push_back({ControlSegment::Kind::constant, -1e300, 1e300, omega, 0.0});
    return s;
}

ControlSchedule& ControlSchedule::add(const ControlSegment& s) {
    segs_.push_back(s);
    validate();
    return *this;
}

double ControlSchedule::operator()(double t) const {
    if (segs_.empty()) return 0.0;
    auto value = [](const ControlSegment& s, double t) {
        t = std::clamp(t, s.t0, s.t1);
        switch (s.kind) {
            case ControlSegment::Kind::constant: return s.omega;
            case ControlSegment::Kind::exp_off: return s.omega * std::exp(-s.rate * (t - s.t0));
            case ControlSegment::Kind::exp_on: return s.omega * std::exp(s.rate * (t - s.t1));
        }
        return 0.0;
    };
    if (t <= segs_.front().t0) return value(segs_.front(), t);
    for (const auto& s : segs_)
        if (t <= s.t1) return value(s, t);
    return value(segs_.back(), t);
}

bool ControlSchedule::is_constant() const {
    if (segs_.empty()) return true;
    for (const auto& s : segs_)
        if (s.kind != ControlSegment::Kind::constant || s.omega != segs_.front().omega) return false;
    return true;
}

void ControlSchedule::validate() const {
    for (std::size_t i = 0; i < segs_.size(); ++i) {
        const auto& s = segs_[i];
        if (!(s.t1 > s.t0)) throw ConfigError("control segment must have t1 > t0");
        if (!std::isfinite(s.omega) || s.omega < 0.0) throw ConfigError("control amplitude must be finite and >= 0");
        if (s.kind != ControlSegment::Kind::constant && !(s.rate > 0.0))
            throw ConfigError("exponential control segment needs rate > 0");
        if (i > 0 && std::abs(s.t0 - segs_[i - 1].t1) > 1e-12 * std::max(1.0, std::abs(s.t0)))
            throw ConfigError("control segments must be contiguous");
    }
}

double AtomicState::population_integral() const {
    double acc = 0.0;
    std::vector<double> per(slices(), 0.0);
    for (std::size_t j = 0; j < slices(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes(); ++i) {
            const std::size_t k = index(j, i);
            s += weight[i] * (std::norm(r12[k]) + (r13.empty() ? 0.0 : std::norm(r13[k])));
        }
        per[j] = s;
    }
    for (std::size_t j = 1; j < slices(); ++j) acc += 0.5 * (z[j] - z[j - 1]) * (per[j] + per[j - 1]);
    return acc;
}

SimulationGrid make_grid(const BroadeningSpec& b, std::vector<double> tau, std::vector<double> z) {
    SimulationGrid g;
    g.tau = std::move(tau);
    g.z = std::move(z);
    g.delta1 = optical_rule(b);
    if (b.is_gradient()) {
        g.Delta1.nodes = {0.0};
        g.Delta1.weights = {1.0};
    } else {
        g.Delta1 = raman_rule(b);
    }
    return g;
}

AtomicState make_state(const PropagationProblem& prob) {
    const auto& g = prob.grid;
    AtomicState s;
    s.model = prob.model;
    s.stage = 1;
    s.z = g.z;
    const std::size_t no = g.delta1.size(), nr = g.Delta1.size();
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t r = 0; r < nr; ++r) {
            s.weight.push_back(g.delta1.weights[a] * g.Delta1.weights[r]);
            s.delta1.push_back(g.delta1.nodes[a]);
        }
    const std::size_t nn = s.weight.size();
    s.detuning.resize(s.z.size() * nn);
    for (std::size_t j = 0; j < s.z.size(); ++j)
        for (std::size_t a = 0; a < no; ++a)
            for (std::size_t r = 0; r < nr; ++r) {
                double d = g.Delta1.nodes[r];
                if (const auto* gr = std::get_if<LongitudinalGradient>(&prob.broadening.raman))
                    d += gr->chi * (s.z[j] - gr->z_center);
                s.detuning[s.index(j, a * nr + r)] = d;
            }
    s.r12.assign(s.z.size() * nn, 0.0);
    if (s.model == Model::full) s.r13.assign(s.z.size() * nn, 0.0);
    s.time = g.tau.empty() ? 0.0 : g.tau.front();
    return s;
}

double bare_detuning_of(const AtomicState& s, const PhysicalParams& p, std::size_t j, std::size_t i) {
    return bare_detuning(p, s.detuning[s.index(j, i)], s.stage);
}

namespace {
void require_stage(const PropagationProblem& prob, Stage st, Model m, const char* what) {
    if (prob.stage != st) throw ConfigError(std::string(what) + ": problem has the wrong stage");
    if (prob.model != m) throw ConfigError(std::string(what) + ": problem has the wrong model");
}
}  // namespace

StageResult simulate_storage_full(const PropagationProblem& prob) {
    require_stage(prob, Stage::storage, Model::full, "simulate_storage_full");
    return propagate(prob, make_state(prob));
}

StageResult simulate_storage_reduced(const PropagationProblem& prob) {
    require_stage(prob, Stage::storage, Model::reduced, "simulate_storage_reduced");
    return propagate(prob, make_state(prob));
}

StageResult simulate_retrieval_full(const PropagationProblem& prob, const AtomicState& initial) {
    require_stage(prob, Stage::retrieval, Model::full, "simulate_retrieval_full");
    return propagate(prob, initial);
}

StageResult simulate_retrieval_reduced(const PropagationProblem& prob, const AtomicState& initial) {
    require_stage(prob, Stage::retrieval, Model::reduced, "simulate_retrieval_reduced");
    return propagate(prob, initial);
}

AtomicState flip_detunings(const AtomicState& s, double factor) {
    if (s.stage != 1) throw ConfigError("detunings were already flipped");
    if (!(factor > 0.0)) throw DomainError("flip factor must be > 0");
    AtomicState out = s;
    out.stage = 2;
    for (auto& d : out.detuning) d = -factor * d;
    return out;
}

void evolve_dark(AtomicState& s, const PhysicalParams& p, double duration) {
    if (duration < 0.0) throw DomainError("dark interval must be >= 0");
    const double d0 = p.delta0(s.stage);
    for (std::size_t j = 0; j < s.slices(); ++j)
        for (std::size_t i = 0; i < s.nodes(); ++i) {
            const std::size_t k = s.index(j, i);
            s.r12[k] *= std::exp(-cplx(p.gamma21, bare_detuning_of(s, p, j, i)) * duration);
            if (!s.r13.empty()) s.r13[k] *= std::exp(-cplx(p.gamma31, d0 + s.delta1[i]) * duration);
        }
    s.time += duration;
}

void imprint_phase(AtomicState& s, double dk) {
    for (std::size_t j = 0; j < s.slices(); ++j) {
        const cplx ph = std::polar(1.0, dk * s.z[j]);
        for (std::size_t i = 0; i < s.nodes(); ++i) {
            s.r12[s.index(j, i)] *= ph;
            if (!s.r13.empty()) s.r13[s.index(j, i)] *= ph;
        }
    }
}

std::vector<cplx> echo_spectral_solution(const PhysicalParams& p, const BroadeningSpec& b, const FieldEnvelope& input,
                                         const std::vector<double>& nu, double tau_flip, cplx amp) {
    if (std::abs(p.eta_prime - p.eta) > 1e-12 * p.eta)
        throw UnsupportedCase("echo spectrum is only derived for eta' = eta");
    const double eta = p.eta;
    std::vector<double> src(nu.size());
    for (std::size_t k = 0; k < nu.size(); ++k) src[k] = -nu[k] / eta;
    const std::vector<cplx> e1 = spectrum(input, src);
    std::vector<cplx> out(nu.size());
    for (std::size_t k = 0; k < nu.size(); ++k) {
        const double depth = integrated_absorption(p, b, src[k]);
        const cplx ph = std::polar(1.0, nu[k] * tau_flip * (1.0 + 1.0 / eta));
        out[k] = -amp / std::sqrt(eta) * ph * (-std::expm1(-depth)) * e1[k];
    }
    return out;
}

void write_trajectory(const Trajectory& t, const std::string& path, const std::vector<std::size_t>& nodes) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write trajectory: " + path);
    f << "tau,Z,re_E,im_E";
    for (std::size_t i : nodes) {
        if (i >= t.nodes) throw DomainError("trajectory node index out of range");
        f << ",re_R12_" << i << ",im_R12_" << i;
    }
    f << '\n';
    const std::size_t nt = t.tau.size();
    for (std::size_t j = 0; j < t.z.size(); ++j)
        for (std::size_t n = 0; n < nt; ++n) {
            const cplx e = t.field_at(j, n);
            f << format_double(t.tau[n]) << ',' << format_double(t.z[j]) << ',' << format_double(e.real()) << ','
              << format_double(e.imag());
            for (std::size_t i : nodes) {
                const cplx r = t.r12_at(j, n, i);
                f << ',' << format_double(r.real()) << ',' << format_double(r.imag());
            }
            f << '\n';
        }
    if (!f) throw IoError("write failed: " + path);
}

}  // namespace ramanecho
