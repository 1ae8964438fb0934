#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ramanecho/echo_efficiency.hpp"
#include "ramanecho/errors.hpp"
#include "ramanecho/mbsolver.hpp"

using namespace ramanecho;
using std::numbers::pi;

namespace {

constexpr cplx I{0.0, 1.0};

PhysicalParams base(double depth = 5.0) {
    PhysicalParams p;
    p.delta01 = 20.0;
    p.delta02 = 20.0;
    p.optical_depth = depth;
    return p;
}

// -i beta (Omega/Delta0)^2 s int G(x) / (x - nu - i g) dx on the whole line, independent quadrature
template <class G, class X = double (*)(double)>
cplx oracle_alpha(const PhysicalParams& p, G density, double nu, double g, double lo, double hi, double scale,
                  X to_x = [](double x) { return x; }) {
    using boost::math::quadrature::gauss_kronrod;
    const double pref = p.beta * std::pow(p.omega1_rabi / p.delta01, 2);
    auto re = [&](double t) { return (density(t) / cplx(to_x(t) - nu, -g)).real(); };
    auto im = [&](double t) { return (density(t) / cplx(to_x(t) - nu, -g)).imag(); };
    double err = 0.0;
    const cplx acc(gauss_kronrod<double, 61>::integrate(re, lo, hi, 20, 1e-14, &err),
                   gauss_kronrod<double, 61>::integrate(im, lo, hi, 20, 1e-14, &err));
    return -I * pref * scale * acc;
}

}  // namespace

TEST_CASE("lorentzian closed form matches quadrature") {
    BroadeningSpec b;
    b.raman = LorentzianLine{0.7};
    PhysicalParams p = with_derived_beta(base(), b);
    p.gamma21 = 0.05;
    const double w = 0.7, g = gamma_eff(p);
    const double scale = line_center_density(b.raman, 0.0) * pi * w;
    // x = w tan(theta) maps the lorentzian measure onto d theta / pi on (-pi/2, pi/2)
    auto lor = [](double) { return 1.0 / pi; };
    for (double nu : {-3.0, -0.4, 0.0, 0.25, 2.0}) {
        const cplx a = complex_absorption(p, b, nu, 0.0);
        const cplx o = oracle_alpha(p, lor, nu, g, -pi / 2, pi / 2, scale, [w](double th) { return w * std::tan(th); });
        CHECK(std::abs(a - o) < 1e-8 * std::abs(o));
        // contour closed form: scale / (-nu - i (w + g))
        const cplx cf = -I * p.beta * std::pow(p.omega1_rabi / p.delta01, 2) * scale / (-nu - I * (w + g));
        CHECK(std::abs(a - cf) < 1e-12 * std::abs(cf));
    }
}

TEST_CASE("gaussian closed form matches quadrature") {
    BroadeningSpec b;
    b.raman = GaussianLine{1.3};
    PhysicalParams p = with_derived_beta(base(), b);
    p.gamma21 = 0.02;
    const double s = 1.3, g = gamma_eff(p);
    const double scale = line_center_density(b.raman, 0.0) * std::sqrt(2.0 * pi) * s;
    auto gau = [s](double x) { return std::exp(-x * x / (2 * s * s)) / (std::sqrt(2 * pi) * s); };
    for (double nu : {-2.0, -0.5, 0.0, 0.8, 4.0}) {
        const cplx a = complex_absorption(p, b, nu, 0.0);
        const cplx o = oracle_alpha(p, gau, nu, g, -40.0 * s, 40.0 * s, scale);
        CHECK(std::abs(a - o) < 1e-8 * std::abs(o));
    }
}

TEST_CASE("line-centre absorption reproduces the optical depth") {
    for (const RamanLine line : {RamanLine{GaussianLine{1.0}}, RamanLine{LorentzianLine{0.5}}}) {
        BroadeningSpec b;
        b.raman = line;
        const PhysicalParams p = with_derived_beta(base(7.0), b);
        CHECK(integrated_absorption(p, b, 0.0) == doctest::Approx(7.0).epsilon(1e-10));
    }
    BroadeningSpec g;
    g.raman = LongitudinalGradient{2.0, 0.5};
    const PhysicalParams pg = with_derived_beta(base(3.0), g);
    CHECK(integrated_absorption(pg, g, 0.1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(integrated_absorption(pg, g, 5.0) == 0.0);
}

TEST_CASE("discrete rule approaches the closed form; pole handling") {
    BroadeningSpec b;
    b.raman = GaussianLine{1.0};
    b.raman_quadrature.nodes = 4001;
    PhysicalParams p = with_derived_beta(base(), b);
    p.gamma21 = 0.3;
    AbsorptionOptions q;
    q.quadrature = true;
    for (double nu : {0.0, 0.7}) {
        const cplx a = complex_absorption(p, b, nu, 0.0);
        CHECK(std::abs(complex_absorption(p, b, nu, 0.0, q) - a) < 1e-6 * std::abs(a));
    }
    p.gamma21 = 0.0;
    b.raman_quadrature.nodes = 5;  // symmetric midpoint rule has a node at 0
    CHECK_THROWS_AS(complex_absorption(p, b, 0.0, 0.0, q), PoleError);
    q.principal_value = true;
    const cplx pv = complex_absorption(p, b, 0.0, 0.0, q);
    CHECK(std::isfinite(pv.real()));
    CHECK(std::abs(pv.real()) < 1e-12);  // symmetric rule: odd part cancels
}

TEST_CASE("off-resonant tail and zero coupling") {
    BroadeningSpec b;
    b.raman = LorentzianLine{0.5};
    PhysicalParams p = with_derived_beta(base(), b);
    const double a1 = std::abs(complex_absorption(p, b, 50.0, 0.0));
    const double a2 = std::abs(complex_absorption(p, b, 100.0, 0.0));
    CHECK(a1 / a2 == doctest::Approx(2.0).epsilon(1e-3));
    p.omega1_rabi = 0.0;
    CHECK(complex_absorption(p, b, 0.3, 0.0) == cplx(0.0));
}

TEST_CASE("gamma_eff conventions") {
    PhysicalParams p = base();
    p.gamma21 = 0.01;
    p.gamma31 = 1.0;
    CHECK(gamma_eff(p) == doctest::Approx(0.01 + 1.0 / 400.0));
    CHECK(gamma_eff(p, GammaEffConvention::printed) == doctest::Approx(0.01 + 1.0 / 20.0));
}

TEST_CASE("dephasing factors") {
    PhysicalParams p;
    p.delta01 = 5.0;  // Omega/Delta0 = 0.2
    p.eta = 1.0;
    CHECK(dephasing_factor(p, LineShape::gaussian, 1.0, 10.0) == doctest::Approx(std::exp(-0.08)).epsilon(1e-14));
    CHECK(dephasing_factor(p, LineShape::gaussian, 1.0, 10.0) == doctest::Approx(0.9231).epsilon(1e-4));
    CHECK(dephasing_factor(p, LineShape::lorentzian, 1.0, 10.0) == doctest::Approx(std::exp(-0.4)).epsilon(1e-14));
    CHECK(dephasing_factor(p, LineShape::gaussian, 1.0, 0.0) == 1.0);
    CHECK(dephasing_factor(p, LineShape::lorentzian, 0.0, 50.0) == 1.0);
    CHECK_THROWS_AS(dephasing_factor(p, LineShape::gaussian, 1.0, -1.0), DomainError);

    // finite-difference slope of the exponent as delta1_in -> 0
    p.eta = 2.0;
    const double T = 30.0, h = 1e-4;
    const double r2 = 0.04;
    const double sg = (std::log(dephasing_factor(p, LineShape::gaussian, 2 * h, T)) -
                       std::log(dephasing_factor(p, LineShape::gaussian, h, T))) /
                      (4 * h * h - h * h);
    CHECK(sg == doctest::Approx(-0.25 * r2 * r2 * (1 + 4.0) * T * T).epsilon(0.01));
    const double sl = std::log(dephasing_factor(p, LineShape::lorentzian, h, T)) / h;
    CHECK(sl == doctest::Approx(-0.5 * r2 * 3.0 * T).epsilon(0.01));
}

TEST_CASE("echo time") {
    CHECK(echo_time(1.0, 12.0) == 12.0);
    CHECK(echo_time(2.0, 10.0) == doctest::Approx(7.5));
    CHECK(echo_time(1e12, 10.0) == doctest::Approx(5.0));
    CHECK_THROWS_AS(echo_time(0.0, 1.0), DomainError);
}

TEST_CASE("envelope map in the flat-band limit") {
    BroadeningSpec b;
    b.raman = GaussianLine{60.0};
    PhysicalParams p = with_derived_beta(base(2.0), b);
    p.eta = 2.0;
    p.eta_prime = 2.0;
    const auto tau = uniform_axis(0.0, 40.0, 2001);
    // asymmetric input: two unequal gaussians
    FieldEnvelope in = gaussian_pulse(tau, 15.0, 2.0);
    const FieldEnvelope tail = gaussian_pulse(tau, 19.0, 1.0, 0.5);
    for (std::size_t i = 0; i < tau.size(); ++i) in.samples[i] += tail.samples[i];
    bool flat = false;
    const cplx eps = 0.9;
    const FieldEnvelope out = echo_envelope_map(p, b, in, eps, 30.0, 15.0, &flat);
    CHECK(flat);
    const double br = -std::expm1(-2.0);
    CHECK(br * br == doctest::Approx(0.7476).epsilon(1e-4));
    CHECK(out.energy() / in.energy() == doctest::Approx(0.81 * br * br).epsilon(1e-10));
    // time reversed and compressed: E2(t) = sqrt(2) amp E1(t_in - 2 (t - t_in - tau_echo))
    for (std::size_t k = 100; k < out.size(); k += 200) {
        const double t = out.axis[k];
        const cplx ref = std::sqrt(2.0) * eps * br * sample_at(in, 15.0 - 2.0 * (t - 45.0));
        CHECK(std::abs(out.samples[k] - ref) < 1e-12);
    }
    const FieldEnvelope single = echo_envelope_map(p, b, gaussian_pulse(tau, 15.0, 2.0), 1.0, 30.0, 15.0);
    CHECK(fwhm(single) == doctest::Approx(fwhm(gaussian_pulse(tau, 15.0, 2.0)) / 2.0).epsilon(1e-9));
}

TEST_CASE("envelope map flags a curved band and takes the spectral route") {
    BroadeningSpec b;
    b.raman = GaussianLine{0.2};
    const PhysicalParams p = with_derived_beta(base(3.0), b);
    const auto tau = uniform_axis(0.0, 40.0, 801);
    const FieldEnvelope in = gaussian_pulse(tau, 15.0, 1.0);
    bool flat = true;
    const FieldEnvelope out = echo_envelope_map(p, b, in, 1.0, 30.0, 15.0, &flat);
    CHECK_FALSE(flat);
    const double br = -std::expm1(-3.0);
    CHECK(out.energy() > 0.0);
    CHECK(out.energy() < 0.9 * br * br * in.energy());
}

TEST_CASE("spectral echo solution limits") {
    BroadeningSpec b;
    b.raman = GaussianLine{50.0};
    PhysicalParams p = with_derived_beta(base(60.0), b);
    p.eta = 2.0;
    p.eta_prime = 2.0;
    const auto tau = uniform_axis(0.0, 40.0, 801);
    const FieldEnvelope in = gaussian_pulse(tau, 15.0, 2.0);
    const std::vector<double> nu = {-1.0, -0.2, 0.0, 0.6};
    const auto e2 = echo_spectral_solution(p, b, in, nu, 30.0);
    std::vector<double> src;
    for (double v : nu) src.push_back(-v / 2.0);
    const auto e1 = spectrum(in, src);
    for (std::size_t k = 0; k < nu.size(); ++k) CHECK(std::abs(e2[k]) == doctest::Approx(std::abs(e1[k]) / std::sqrt(2.0)).epsilon(1e-9));

    PhysicalParams z = p;
    z.optical_depth = 0.0;
    z.beta = 0.0;
    for (cplx v : echo_spectral_solution(z, b, in, nu, 30.0)) CHECK(v == cplx(0.0));

    p.eta_prime = 1.5;
    CHECK_THROWS_AS(echo_spectral_solution(p, b, in, nu, 30.0), UnsupportedCase);
}

TEST_CASE("overall efficiency factorises and is monotone") {
    BroadeningSpec b;
    b.optical = GaussianLine{0.1};
    PhysicalParams p = base(5.0);
    p.k_off = 1.0;
    p.gamma21 = 0.001;
    EfficiencyOptions o = efficiency_options_from(b);
    o.interaction_time = 20.0;
    o.tau_echo = 30.0;
    const auto e = overall_efficiency(p, b, o);
    const double prod = e.eps_t * e.eps_r * e.gamma_factor * e.gamma_factor * e.storage_decay * e.depth_factor;
    CHECK(std::abs(e.total - prod) < 1e-12);
    for (double f : {e.eps_t, e.eps_r, e.gamma_factor, e.storage_decay, e.depth_factor}) {
        CHECK(f > 0.0);
        CHECK(f <= 1.0);
    }
    CHECK(e.delta1_r == doctest::Approx(0.1 / 400.0));

    auto total = [&](auto edit) {
        PhysicalParams q = p;
        EfficiencyOptions oo = o;
        edit(q, oo);
        return overall_efficiency(q, b, oo).total;
    };
    CHECK(total([](PhysicalParams& q, EfficiencyOptions&) { q.optical_depth = 6.0; }) > e.total);
    CHECK(total([](PhysicalParams& q, EfficiencyOptions&) { q.gamma21 = 0.002; }) < e.total);
    CHECK(total([](PhysicalParams&, EfficiencyOptions& oo) { oo.delta1_in = 0.2; }) < e.total);
    CHECK(total([](PhysicalParams&, EfficiencyOptions& oo) { oo.interaction_time = 40.0; }) < e.total);
}

TEST_CASE("perfect-memory limit") {
    BroadeningSpec b;
    PhysicalParams p = base(60.0);
    p.delta01 = p.delta02 = 1e4;
    p.k_off = 1e4;
    p.k_on = 1e6;
    EfficiencyOptions o;
    CHECK(overall_efficiency(p, b, o).total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("efficiency surface at optical depth 200") {
    BroadeningSpec b;
    b.optical = GaussianLine{0.1};
    auto eff = [&](double d0, double T) {
        PhysicalParams p = base(200.0);
        p.delta01 = p.delta02 = d0;
        p.omega2_rabi = 1.0;
        p.k_off = 1.0;
        EfficiencyOptions o = efficiency_options_from(b);
        o.interaction_time = T;
        o.depth_model = DepthModel::detuning_scaled;
        return overall_efficiency(p, b, o).total;
    };
    double best = 0.0, arg = 0.0, global = 0.0, global_T = -1.0;
    for (double d = 2.0; d <= 20.0; d += 0.25) {
        const double v = eff(d, 80.0);
        if (v > best) best = v, arg = d;
        for (double T = 0.0; T <= 100.0; T += 10.0)
            if (eff(d, T) > global) global = eff(d, T), global_T = T;
    }
    CHECK(arg >= 5.5);
    CHECK(arg <= 7.5);
    CHECK(eff(arg, 80.0) > eff(arg - 2.0, 80.0));
    CHECK(eff(arg, 80.0) > eff(arg + 2.0, 80.0));
    CHECK(global_T == 0.0);
}
