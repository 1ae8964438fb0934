#include <algorithm>
#include <cmath>
#include <numbers>

#include "ramanecho/errors.hpp"
#include "ramanecho/mbsolver.hpp"
#include "step_coeffs.hpp"

namespace ramanecho {

namespace {

using detail::StepCoeffs;
using detail::step_coeffs;

constexpr cplx I{0.0, 1.0};

struct NodeParams {
    double bare = 0.0;
    double delta1 = 0.0;
    bool operator==(const NodeParams&) const = default;
};

// Per-stage constants shared by both models.
struct StageConsts {
    int stage = 1;
    double delta0 = 0.0;
    double omega0 = 0.0;
    double gamma21 = 0.0;
    double gamma31 = 0.0;
    double half_beta = 0.0;
};

StageConsts stage_consts(const PhysicalParams& p, Stage st) {
    StageConsts c;
    c.stage = st == Stage::storage ? 1 : 2;
    c.delta0 = p.delta0(c.stage);
    c.omega0 = p.omega(c.stage);
    c.gamma21 = p.gamma21;
    c.gamma31 = p.gamma31;
    c.half_beta = 0.5 * p.beta;
    return c;
}

// Distinct control values: one key per step, evaluated at the step midpoint.
struct ControlKeys {
    std::vector<double> values;
    std::vector<std::size_t> step_key;
};

ControlKeys control_keys(const ControlSchedule& ctl, const std::vector<double>& tau) {
    ControlKeys k;
    const std::size_t nt = tau.size();
    k.step_key.resize(nt > 0 ? nt - 1 : 0);
    for (std::size_t n = 0; n + 1 < nt; ++n) {
        const double om = ctl(0.5 * (tau[n] + tau[n + 1]));
        auto it = std::find(k.values.begin(), k.values.end(), om);
        if (it == k.values.end()) {
            k.values.push_back(om);
            k.step_key[n] = k.values.size() - 1;
        } else {
            k.step_key[n] = static_cast<std::size_t>(it - k.values.begin());
        }
    }
    return k;
}

// Model-specific pieces. Field source is i(beta/2) [sum_i w_i c_i . y_i + (rho - kappa) E].
struct FullModel {
    static constexpr int N = 2;
    using Vec = Eigen::Matrix<cplx, 2, 1>;
    static StepCoeffs<2> coeffs(const StageConsts& s, const NodeParams& np, double omega, double h) {
        Eigen::Matrix<cplx, 2, 2> L;
        L << -(I * np.bare + s.gamma21), I * omega, I * omega, -(I * (s.delta0 + np.delta1) + s.gamma31);
        Vec b(0.0, I);
        return step_coeffs<2>(L, b, h);
    }
    static cplx node_factor(const StageConsts&, const NodeParams&) { return 1.0; }
    static cplx readout(cplx f, const Vec& y) { return f * y(1); }
    static double omega_factor(double) { return 1.0; }
    static cplx rho(const StageConsts&, const std::vector<NodeParams>&, const std::vector<double>&, double) {
        return 0.0;
    }
};

struct ReducedModel {
    static constexpr int N = 1;
    using Vec = Eigen::Matrix<cplx, 1, 1>;
    static cplx dc(const StageConsts& s, const NodeParams& np) { return s.delta0 + np.delta1 - I * s.gamma31; }
    static StepCoeffs<1> coeffs(const StageConsts& s, const NodeParams& np, double omega, double h) {
        const cplx d = dc(s, np);
        Eigen::Matrix<cplx, 1, 1> L;
        L(0, 0) = -(I * (np.bare - omega * omega / d) + s.gamma21);
        Vec b;
        b(0) = I * omega / d;
        return step_coeffs<1>(L, b, h);
    }
    static cplx node_factor(const StageConsts& s, const NodeParams& np) { return 1.0 / dc(s, np); }
    static cplx readout(cplx f, const Vec& y) { return f * y(0); }
    static double omega_factor(double omega) { return omega; }
    static cplx rho(const StageConsts& s, const std::vector<NodeParams>& nps, const std::vector<double>& w, double) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < nps.size(); ++i) acc += w[i] / dc(s, nps[i]);
        return acc;
    }
};

template <class Model>
StageResult march(const PropagationProblem& prob, const AtomicState& initial) {
    using Vec = typename Model::Vec;
    constexpr int N = Model::N;
    const auto& tau = prob.grid.tau;
    const std::size_t nt = tau.size();
    const std::size_t nz = initial.slices();
    const std::size_t nn = initial.nodes();
    const double h = tau[1] - tau[0];
    const StageConsts sc = stage_consts(prob.params, prob.stage);
    const double kappa = 1.0 / sc.delta0;
    const bool backward = prob.stage == Stage::retrieval && prob.direction == Direction::backward;

    const ControlKeys keys = control_keys(prob.control, tau);
    std::vector<double> omega_at(nt);
    for (std::size_t n = 0; n < nt; ++n) omega_at[n] = prob.control(tau[n]);

    // march coordinate s: lab slice index for forward, reversed for backward
    auto lab = [&](std::size_t j) { return backward ? nz - 1 - j : j; };

    StageResult res;
    res.state = initial;
    AtomicState& st = res.state;

    std::vector<cplx> e_prev(nt, 0.0), s_prev(nt, 0.0), e_cur(nt, 0.0), s_cur(nt, 0.0);
    if (!prob.input_field.samples.empty()) {
        if (prob.input_field.size() != nt) throw GridError("input field is not sampled on the time grid");
        e_prev = prob.input_field.samples;
    }

    Trajectory traj;
    if (prob.record_trajectory) {
        traj.tau = tau;
        traj.z = initial.z;
        traj.nodes = nn;
        traj.field.assign(nz * nt, 0.0);
        traj.r12.assign(nz * nt * nn, 0.0);
        if (N == 2) traj.r13.assign(nz * nt * nn, 0.0);
    }

    std::vector<NodeParams> nps(nn), cached_nps;
    std::vector<StepCoeffs<N>> table;  // [key * nn + i]
    std::vector<cplx> rho_at(nt);
    std::vector<Vec> y(nn);
    std::vector<cplx> fac(nn);  // weight times readout factor
    std::vector<cplx> qbase;    // per key: sum_i fac_i c . v_i

    for (std::size_t js = 0; js < nz; ++js) {
        const std::size_t j = lab(js);
        for (std::size_t i = 0; i < nn; ++i) {
            nps[i].bare = bare_detuning_of(st, prob.params, j, i);
            nps[i].delta1 = st.delta1[i];
        }
        if (nps != cached_nps) {
            table.resize(keys.values.size() * nn);
            for (std::size_t k = 0; k < keys.values.size(); ++k)
                for (std::size_t i = 0; i < nn; ++i) table[k * nn + i] = Model::coeffs(sc, nps[i], keys.values[k], h);
            cached_nps = nps;
            for (std::size_t i = 0; i < nn; ++i) fac[i] = st.weight[i] * Model::node_factor(sc, nps[i]);
            qbase.assign(keys.values.size(), 0.0);
            for (std::size_t k = 0; k < keys.values.size(); ++k)
                for (std::size_t i = 0; i < nn; ++i) qbase[k] += Model::readout(fac[i], table[k * nn + i].v);
            for (std::size_t n = 0; n < nt; ++n) rho_at[n] = Model::rho(sc, nps, st.weight, omega_at[n]);
        }

        for (std::size_t i = 0; i < nn; ++i) {
            const std::size_t idx = st.index(j, i);
            if constexpr (N == 2) y[i] = Vec(st.r12[idx], st.r13[idx]);
            else y[i](0) = st.r12[idx];
        }

        const double dz = js == 0 ? 0.0 : std::abs(st.z[j] - st.z[lab(js - 1)]);
        const cplx g = 0.5 * dz * I * sc.half_beta;  // (dz/2) i beta/2

        auto record = [&](std::size_t n, cplx e) {
            if (!prob.record_trajectory) return;
            traj.field[j * nt + n] = e;
            for (std::size_t i = 0; i < nn; ++i) {
                traj.r12[(j * nt + n) * nn + i] = y[i](0);
                if constexpr (N == 2) traj.r13[(j * nt + n) * nn + i] = y[i](1);
            }
        };

        for (std::size_t n = 0; n < nt; ++n) {
            const double om = omega_at[n];
            const double omf = Model::omega_factor(om);
            cplx p = 0.0, q = 0.0;
            const StepCoeffs<N>* row = nullptr;
            if (n > 0) {
                const std::size_t key = keys.step_key[n - 1];
                row = &table[key * nn];
                for (std::size_t i = 0; i < nn; ++i) {
                    y[i] = row[i].phi * y[i] + row[i].u * e_cur[n - 1];
                    p += Model::readout(fac[i], y[i]);
                }
                q = omf * qbase[key];
            } else {
                for (std::size_t i = 0; i < nn; ++i) p += Model::readout(fac[i], y[i]);
            }
            p *= omf;
            const cplx lin = q + rho_at[n] - kappa;
            cplx e;
            if (js == 0) {
                e = e_prev[n];
            } else {
                e = (e_prev[n] + 0.5 * dz * s_prev[n] + g * p) / (1.0 - g * lin);
            }
            e_cur[n] = e;
            if (n > 0) {
                for (std::size_t i = 0; i < nn; ++i) y[i] += row[i].v * e;
            }
            const cplx src = p + q * e + (rho_at[n] - kappa) * e;
            s_cur[n] = I * sc.half_beta * src;
            record(n, e);
        }
        for (std::size_t i = 0; i < nn; ++i) {
            const std::size_t idx = st.index(j, i);
            st.r12[idx] = y[i](0);
            if constexpr (N == 2) st.r13[idx] = y[i](1);
        }
        std::swap(e_prev, e_cur);
        std::swap(s_prev, s_cur);
    }

    st.time = tau.back();
    res.output.axis = tau;
    res.output.samples = e_prev;
    res.output.kind = AxisKind::time;
    res.output.direction = backward ? Direction::backward : Direction::forward;
    res.output.z = backward ? st.z.front() : st.z.back();
    if (prob.record_trajectory) res.trajectory = std::move(traj);
    return res;
}

}  // namespace

void check_resolution(const PropagationProblem& prob) {
    prob.grid.validate();
    prob.control.validate();
    const auto& tau = prob.grid.tau;
    const auto& z = prob.grid.z;
    if (tau.size() < 2) throw GridError("time grid needs at least two points");
    const double h = tau[1] - tau[0];
    for (std::size_t n = 1; n < tau.size(); ++n)
        if (std::abs((tau[n] - tau[n - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw GridError("time grid must be uniform");
    if (z.size() < 2) throw GridError("Z grid needs at least two slices");
    const double L = prob.params.medium_length;
    if (std::abs(z.front()) > 1e-12 || std::abs(z.back() - L) > 1e-9 * std::max(1.0, L))
        throw GridError("Z grid must span [0, medium_length]");

    const int stage = prob.stage == Stage::storage ? 1 : 2;
    const double d0 = std::abs(prob.params.delta0(stage));
    double dmax = 0.0;
    for (double d : prob.grid.delta1.nodes) dmax = std::max(dmax, std::abs(d));
    if (prob.model == Model::full && h * (d0 + dmax) >= std::numbers::pi)
        throw GridError("time step " + std::to_string(h) + " does not resolve the optical detuning " +
                        std::to_string(d0 + dmax) + " (need dt*Delta0 < pi)");
    double rmax = 0.0;
    if (prob.broadening.is_gradient()) {
        const auto& g = std::get<LongitudinalGradient>(prob.broadening.raman);
        const double f = stage == 1 ? 1.0 : prob.params.eta;
        rmax = f * std::abs(g.chi) * std::max(g.z_center, L - g.z_center);
    } else {
        const double f = stage == 1 ? 1.0 : prob.params.eta;
        for (double d : prob.grid.Delta1.nodes) rmax = std::max(rmax, f * std::abs(d));
    }
    const double om = prob.params.omega(stage);
    rmax += om * om / std::max(d0, 1e-300);
    if (h * rmax >= std::numbers::pi)
        throw GridError("time step " + std::to_string(h) + " does not resolve the Raman detunings up to " +
                        std::to_string(rmax));
    // absorption length resolved wherever the field is not yet extinct
    const double kap = prob.params.optical_depth;
    if (kap > 0.0 && !prob.broadening.is_gradient()) {
        const double zlim = std::min(L, 14.0 * L / kap);
        for (std::size_t j = 1; j < z.size(); ++j) {
            if (z[j - 1] >= zlim) break;
            if ((z[j] - z[j - 1]) * kap / L > 4.0)
                throw GridError("Z step at Z=" + std::to_string(z[j - 1]) + " exceeds four absorption lengths");
        }
    }
}

StageResult propagate(const PropagationProblem& prob, const AtomicState& initial) {
    check_resolution(prob);
    if (initial.slices() != prob.grid.z.size()) throw GridError("atomic state and Z grid differ in slice count");
    if (initial.model != prob.model) throw ConfigError("atomic state was built for the other model");
    const int stage = prob.stage == Stage::storage ? 1 : 2;
    if (initial.stage != stage)
        throw ConfigError(stage == 2 ? "retrieval needs the flipped broadening (call flip_detunings first)"
                                     : "storage needs a stage-1 atomic state");
    if (prob.model == Model::reduced && !off_resonant(prob.params, prob.broadening))
        throw DomainError("reduced model needs an off-resonant configuration; use the full model");
    if (prob.model == Model::full) return march<FullModel>(prob, initial);
    return march<ReducedModel>(prob, initial);
}

}  // namespace ramanecho
