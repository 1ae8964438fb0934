#include "ramanecho/switching.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "ramanecho/errors.hpp"
#include "ramanecho/specfun.hpp"

namespace ramanecho {

namespace {

const cplx I(0.0, 1.0);

using State = std::array<double, 4>;

// Two-level problem in the interaction picture:
//   A' = i W(t) e^{-c t} B,   B' = i W(t) e^{c t} A,   W(t) = w0 exp(s t)
struct RampRhs {
    double w0;
    double s;
    cplx c;
    void operator()(const State& y, State& dy, double t) const {
        const cplx A(y[0], y[1]);
        const cplx B(y[2], y[3]);
        const double w = w0 * std::exp(s * t);
        const cplx e = std::exp(c * t);
        const cplx dA = I * w * B / e;
        const cplx dB = I * w * e * A;
        dy = {dA.real(), dA.imag(), dB.real(), dB.imag()};
    }
};

template <class Obs>
void integrate_ramp(const RampRhs& rhs, State& y, double t0, double t1, Obs obs,
                    const std::vector<double>* times, const char* what) {
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-12, 1e-11);
    const double dt0 = std::copysign(std::min(1e-2, 0.01 * std::abs(t1 - t0)), t1 - t0);
    try {
        if (times) {
            ode::integrate_times(stepper, rhs, y, times->begin(), times->end(), dt0, obs,
                                 ode::max_step_checker(2000000));
        } else {
            const std::array<double, 2> ends = {t0, t1};
            ode::integrate_times(stepper, rhs, y, ends.begin(), ends.end(), dt0, obs,
                                 ode::max_step_checker(2000000));
        }
    } catch (const std::exception& e) {
        std::ostringstream os;
        os << what << ": adaptive integration failed on [" << t0 << ", " << t1 << "] (rate " << rhs.s
           << ", drive " << rhs.w0 << ", detuning " << rhs.c << "): " << e.what();
        throw StiffnessError(os.str());
    }
}

struct OffSetup {
    double k, om, D, Delta1;
    cplx c;  // i(D - Delta1) + (g31 - g21)
};

OffSetup off_setup(const PhysicalParams& p, double delta1, double Delta1) {
    if (!(p.k_off > 0.0)) throw DomainError("switch-off rate k_off must be > 0");
    const double D = p.delta01 + delta1;
    return {p.k_off, p.omega1_rabi, D, Delta1, cplx(p.gamma31 - p.gamma21, D - Delta1)};
}

CoherencePair to_lab_off(const PhysicalParams& p, const OffSetup& s, const State& y, double t) {
    const cplx A(y[0], y[1]);
    const cplx B(y[2], y[3]);
    return {A * std::exp(-cplx(p.gamma21, s.Delta1) * t), B * std::exp(-cplx(p.gamma31, s.D) * t)};
}

}  // namespace

CoherencePair init_coherence_after_storage(const PhysicalParams& p, double delta1, double Delta1,
                                           cplx a_spectral) {
    const double d = p.delta01 + delta1 - Delta1;
    if (d == 0.0 || !std::isfinite(d))
        throw DomainError("resonant denominator Delta01 + delta1 - Delta1 = 0 (outside the off-resonant regime)");
    const double om = p.omega1_rabi;
    const double zeta13 = om / d;
    const double zeta12 = om / (d + 2.0 * om * om / d);
    CoherencePair out;
    out.r12 = I * zeta12 * a_spectral;
    out.r13 = zeta13 * out.r12;
    return out;
}

double switch_off_interval(const PhysicalParams& p) {
    if (!(p.k_off > 0.0)) throw DomainError("switch-off rate k_off must be > 0");
    return 25.0 / p.k_off;
}

CoherencePair switch_off_coherences(const PhysicalParams& p, CoherencePair in, double delta1, double Delta1) {
    return switch_off_coherences(p, in, delta1, Delta1, switch_off_interval(p));
}

CoherencePair switch_off_coherences(const PhysicalParams& p, CoherencePair in, double delta1, double Delta1,
                                    double T) {
    const OffSetup s = off_setup(p, delta1, Delta1);
    const cplx ph12 = std::exp(-cplx(p.gamma21, Delta1) * T);
    const cplx ph13 = std::exp(-cplx(p.gamma31, s.D) * T);
    if (s.om == 0.0) return {ph12 * in.r12, ph13 * in.r13};
    // alpha~ = (D - Delta1 - i(g31 - g21))/k,  q = (1 + i alpha~)/2
    const cplx q = 0.5 * (1.0 + s.c / s.k);
    if (!(q.real() > 0.0))
        throw UnsupportedCase("switch-off closed form needs k_off > gamma21 - gamma31");
    const double x = s.om / s.k;
    const cplx r12 = ph12 * (bessel_j_regularized(q - 1.0, x) * in.r12 +
                             I * (x / (2.0 * q)) * bessel_j_regularized(q, x) * in.r13);
    const cplx r13 = I * ph13 * ((x / (2.0 * (1.0 - q))) * bessel_j_regularized(1.0 - q, x) * in.r12 -
                                 I * bessel_j_regularized(-q, x) * in.r13);
    return {r12, r13};
}

CoherencePair switch_off_coherences_bessel_gamma(const PhysicalParams& p, CoherencePair in, double delta1,
                                                 double Delta1, double T) {
    const OffSetup s = off_setup(p, delta1, Delta1);
    if (s.om == 0.0) throw DomainError("Bessel/Gamma form needs Omega > 0 (M is singular)");
    const cplx at = (s.D - Delta1 - I * (p.gamma31 - p.gamma21)) / s.k;
    const double x = s.om / s.k;
    const cplx M = bessel_cross_product_m(at, x);
    const cplx np = 0.5 * (1.0 + I * at);  // (1 + i a)/2
    const cplx nm = 0.5 * (1.0 - I * at);  // (1 - i a)/2
    const double two_k = 2.0 * s.k / s.om;
    const cplx r12 = std::exp(-cplx(p.gamma21, Delta1) * T) * std::pow(two_k, np) / (complex_gamma(nm) * M) *
                     (bessel_j(-nm, x) * in.r12 + I * bessel_j(np, x) * in.r13);
    const cplx r13 = I * std::exp(-cplx(p.gamma31, s.D) * T) * std::pow(two_k, nm) / (complex_gamma(np) * M) *
                     (bessel_j(nm, x) * in.r12 - I * bessel_j(-np, x) * in.r13);
    return {r12, r13};
}

CoherencePair switch_off_ode_oracle(const PhysicalParams& p, CoherencePair in, double delta1, double Delta1,
                                    double horizon) {
    const OffSetup s = off_setup(p, delta1, Delta1);
    if (horizon < 20.0 / s.k) throw DomainError("switch-off oracle horizon must be >= 20/k_off");
    State y = {in.r12.real(), in.r12.imag(), in.r13.real(), in.r13.imag()};
    integrate_ramp(RampRhs{s.om, -s.k, s.c}, y, 0.0, horizon, boost::numeric::odeint::null_observer(), nullptr,
                   "switch-off oracle");
    return to_lab_off(p, s, y, horizon);
}

std::vector<CoherencePair> switch_off_ode_trajectory(const PhysicalParams& p, CoherencePair in, double delta1,
                                                     double Delta1, const std::vector<double>& times) {
    const OffSetup s = off_setup(p, delta1, Delta1);
    std::vector<CoherencePair> out;
    if (times.empty()) return out;
    std::vector<double> t = times;
    if (t.front() != 0.0) t.insert(t.begin(), 0.0);
    State y = {in.r12.real(), in.r12.imag(), in.r13.real(), in.r13.imag()};
    std::vector<CoherencePair> all;
    auto obs = [&](const State& st, double tt) { all.push_back(to_lab_off(p, s, st, tt)); };
    integrate_ramp(RampRhs{s.om, -s.k, s.c}, y, t.front(), t.back(), obs, &t, "switch-off trajectory");
    if (times.front() != 0.0) all.erase(all.begin());
    return all;
}

double transfer_efficiency(const PhysicalParams& p, double delta1, double Delta1) {
    const CoherencePair in = init_coherence_after_storage(p, delta1, Delta1);
    const double n0 = in.norm2();
    if (n0 == 0.0) return 0.0;
    const CoherencePair out = switch_off_coherences(p, in, delta1, Delta1);
    return std::norm(out.r12) / n0;
}

double remnant_optical_fraction(const PhysicalParams& p, double delta1, double Delta1) {
    const CoherencePair in = init_coherence_after_storage(p, delta1, Delta1);
    if (in.r13 == cplx(0.0)) return 0.0;
    const CoherencePair out = switch_off_coherences(p, in, delta1, Delta1);
    return std::norm(out.r13) / std::norm(in.r13);
}

SwitchOnCoefficients switch_on_coefficients(const PhysicalParams& p) { return switch_on_coefficients(p, 0.0, 0.0); }

SwitchOnCoefficients switch_on_coefficients(const PhysicalParams& p, double delta1, double Delta2) {
    if (!(p.k_on > 0.0)) throw DomainError("switch-on rate k_on must be > 0");
    const double x = p.omega2_rabi / p.k_on;
    // q = (Delta02 + delta1 - Delta2 - i(g31 - g21)) / k_r
    const cplx q = cplx(p.delta02 + delta1 - Delta2, -(p.gamma31 - p.gamma21)) / p.k_on;
    if (x == 0.0) return {1.0, 0.0};
    const cplx nu = 0.5 * (I * q - 1.0);
    return {bessel_j_regularized(nu, x), x * bessel_j_regularized(nu + 1.0, x) / (1.0 + I * q)};
}

SwitchOnCoefficients switch_on_ode_oracle(const PhysicalParams& p, double delta1, double Delta2, double horizon) {
    if (!(p.k_on > 0.0)) throw DomainError("switch-on rate k_on must be > 0");
    if (horizon <= 0.0) horizon = 25.0 / p.k_on;
    const cplx c(p.gamma31 - p.gamma21, p.delta02 + delta1 - Delta2);
    State y = {1.0, 0.0, 0.0, 0.0};
    integrate_ramp(RampRhs{p.omega2_rabi, p.k_on, c}, y, -horizon, 0.0, boost::numeric::odeint::null_observer(),
                   nullptr, "switch-on oracle");
    return {cplx(y[0], y[1]), -I * cplx(y[2], y[3])};
}

double switch_on_efficiency(const PhysicalParams& p) {
    const SwitchOnCoefficients c = switch_on_coefficients(p);
    const double r = p.omega2_rabi / p.delta02;
    return std::norm(c.c12) + r * r * std::norm(c.c13);
}

cplx switch_on_amplitude(const PhysicalParams& p) {
    const SwitchOnCoefficients c = switch_on_coefficients(p);
    return c.c12 + I * (p.omega2_rabi / p.delta02) * c.c13;
}

}  // namespace ramanecho
