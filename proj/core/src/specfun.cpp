#include "ramanecho/specfun.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "ramanecho/errors.hpp"

namespace ramanecho {

namespace {

using std::numbers::pi;
using lcplx = std::complex<long double>;

// Godfrey's g = 607/128 coefficient set.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5};

bool is_pole(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::nearbyint(z.real());
}

bool is_nonpositive_integer(cplx z) { return is_pole(z); }

// log Gamma(z) for Re z >= 0.5
cplx lanczos_log(cplx z) {
    z -= 1.0;
    cplx x = kLanczos[0];
    for (std::size_t k = 1; k < kLanczos.size(); ++k) x += kLanczos[k] / (z + static_cast<double>(k));
    const cplx t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// sin(pi z) with the integer part of Re z removed first (exact), so zeros stay sharp.
cplx sin_pi(cplx z) {
    const double n = std::nearbyint(z.real());
    const cplx f(z.real() - n, z.imag());
    const cplx s = std::sin(pi * f);
    return std::fmod(std::abs(n), 2.0) == 1.0 ? -s : s;
}

// log sin(pi z), safe for large |Im z|
cplx log_sin_pi(cplx z) {
    const cplx w = pi * z;
    if (std::abs(w.imag()) < 30.0) return std::log(sin_pi(z));
    const cplx I(0.0, 1.0);
    if (w.imag() > 0.0) return -I * w + std::log(0.5 * I) + std::log(1.0 - std::exp(2.0 * I * w));
    return I * w + std::log(-0.5 * I) + std::log(1.0 - std::exp(-2.0 * I * w));
}

}  // namespace

cplx log_gamma(cplx z) {
    if (is_pole(z)) throw PoleError("Gamma pole at z = " + std::to_string(z.real()));
    if (z.real() >= 0.5) return lanczos_log(z);
    return std::log(pi) - log_sin_pi(z) - lanczos_log(1.0 - z);
}

cplx complex_gamma(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("Gamma of nonfinite argument");
    if (is_pole(z)) throw PoleError("Gamma pole at nonpositive integer z = " + std::to_string(z.real()));
    if (std::abs(z.imag()) > 150.0) return std::exp(log_gamma(z));
    if (z.real() >= 0.5) return std::exp(lanczos_log(z));
    return pi / (sin_pi(z) * std::exp(lanczos_log(1.0 - z)));
}

cplx reciprocal_gamma(cplx z) {
    if (is_pole(z)) return 0.0;
    if (std::abs(z.imag()) > 150.0) return std::exp(-log_gamma(z));
    if (z.real() >= 0.5) return std::exp(-lanczos_log(z));
    return sin_pi(z) * std::exp(lanczos_log(1.0 - z)) / pi;
}

namespace {

// sum_m c^m / (m! (a)_m), with c = -x^2/4, started from term t0
lcplx hyp0f1_series(lcplx a, long double c, lcplx t0) {
    lcplx term = t0;
    lcplx sum = t0;
    for (int m = 0; m < 2000; ++m) {
        const lcplx den = static_cast<long double>(m + 1) * (a + static_cast<long double>(m));
        if (den == lcplx(0.0L)) throw PoleError("Bessel series hits a pole of (nu+1)_m");
        term *= c / den;
        sum += term;
        const long double at = std::abs(term);
        if (at <= 1e-21L * std::abs(sum) && static_cast<long double>(m) > std::sqrt(std::abs(c)) &&
            std::abs(c) < std::abs(a + static_cast<long double>(m + 1)) * (m + 2))
            break;
        if (at == 0.0L) break;
    }
    return sum;
}

}  // namespace

cplx bessel_j_regularized(cplx nu, double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("Bessel argument must be finite and >= 0");
    if (x == 0.0) return 1.0;
    const long double c = -0.25L * static_cast<long double>(x) * x;
    const lcplx a(static_cast<long double>(nu.real()) + 1.0L, nu.imag());
    return cplx(hyp0f1_series(a, c, 1.0L));
}

cplx bessel_j_series(cplx nu, double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("Bessel argument must be finite and >= 0");
    if (is_nonpositive_integer(nu) && nu.real() != 0.0) {
        const double n = -nu.real();
        const cplx j = bessel_j_series(cplx(n, 0.0), x);
        return std::fmod(n, 2.0) == 1.0 ? -j : j;
    }
    if (x == 0.0) {
        if (nu == cplx(0.0)) return 1.0;
        if (nu.real() > 0.0) return 0.0;
        throw DomainError("J_nu(0) diverges or has no limit for Re(nu) <= 0");
    }
    const cplx pre = std::exp(nu * std::log(0.5 * x)) * reciprocal_gamma(nu + 1.0);
    const long double c = -0.25L * static_cast<long double>(x) * x;
    const lcplx a(static_cast<long double>(nu.real()) + 1.0L, nu.imag());
    // (nu+1)_m may pass close to zero when nu is near a negative integer; the prefactor carries
    // the compensating zero, so fold it in first and recurse on the ratio
    return cplx(hyp0f1_series(a, c, lcplx(pre)));
}

namespace {

struct BesselRhs {
    cplx nu2;
    // y = (Re J, Im J, Re J', Im J')
    void operator()(const std::array<double, 4>& y, std::array<double, 4>& dy, double x) const {
        const cplx J(y[0], y[1]);
        const cplx dJ(y[2], y[3]);
        const cplx d2 = -dJ / x - (1.0 - nu2 / (x * x)) * J;
        dy = {dJ.real(), dJ.imag(), d2.real(), d2.imag()};
    }
};

}  // namespace

cplx bessel_j_ode(cplx nu, double x, double x_start) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("Bessel argument must be finite and >= 0");
    if (x <= x_start) return bessel_j_series(nu, x);
    namespace ode = boost::numeric::odeint;
    const cplx J0 = bessel_j_series(nu, x_start);
    const cplx dJ0 = bessel_j_series(nu - 1.0, x_start) - nu / x_start * J0;
    std::array<double, 4> y = {J0.real(), J0.imag(), dJ0.real(), dJ0.imag()};
    const double scale = std::max({std::abs(J0), std::abs(dJ0), 1e-300});
    using stepper_t = ode::runge_kutta_fehlberg78<std::array<double, 4>>;
    auto stepper = ode::make_controlled<stepper_t>(1e-15 * scale, 1e-14);
    try {
        const std::array<double, 2> ends = {x_start, x};
        ode::integrate_times(stepper, BesselRhs{nu * nu}, y, ends.begin(), ends.end(), 0.05,
                             ode::null_observer(), ode::max_step_checker(200000));
    } catch (const std::exception& e) {
        throw StiffnessError(std::string("Bessel ODE integration failed: ") + e.what());
    }
    return {y[0], y[1]};
}

cplx bessel_j(cplx nu, double x) {
    if (!std::isfinite(nu.real()) || !std::isfinite(nu.imag())) throw DomainError("Bessel order is not finite");
    if (x <= 20.0) return bessel_j_series(nu, x);
    return bessel_j_ode(nu, x);
}

cplx bessel_cross_product_m(cplx a, double x) {
    if (!(x > 0.0)) throw DomainError("cross product M needs x > 0");
    const cplx I(0.0, 1.0);
    const cplx nu = 0.5 * (1.0 + I * a);
    return bessel_j(nu, x) * bessel_j(1.0 - nu, x) + bessel_j(nu - 1.0, x) * bessel_j(-nu, x);
}

}  // namespace ramanecho
