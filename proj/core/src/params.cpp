#include "ramanecho/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "detail.hpp"
#include "ramanecho/errors.hpp"

namespace ramanecho {

using detail::overloaded;

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

QuadratureRule shaped_rule(double width, int n, double radius, bool gaussian) {
    if (n < 1) throw DomainError("quadrature needs at least one node");
    if (!(width > 0.0)) throw DomainError("line width must be positive");
    QuadratureRule r;
    if (n == 1) {
        r.nodes = {0.0};
        r.weights = {1.0};
        return r;
    }
    const double R = radius * width;
    const double h = 2.0 * R / n;
    r.nodes.resize(n);
    r.weights.resize(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        // build from both ends so the rule is exactly symmetric
        const double x = (i < n / 2) ? -R + (i + 0.5) * h : R - (n - 1 - i + 0.5) * h;
        const double u = x / width;
        const double w = gaussian ? std::exp(-0.5 * u * u) : 1.0 / (1.0 + u * u);
        r.nodes[i] = x;
        r.weights[i] = w;
    }
    for (int i = 0; i < n / 2; ++i) r.weights[n - 1 - i] = r.weights[i];
    // pairwise-symmetric accumulation keeps the sum symmetric in rounding
    for (int i = 0; i < n / 2; ++i) total += 2.0 * r.weights[i];
    if (n % 2) total += r.weights[n / 2];
    for (double& w : r.weights) w /= total;
    return r;
}

}  // namespace

void PhysicalParams::validate() const {
    require(std::isfinite(omega1_rabi) && omega1_rabi >= 0.0, "omega1_rabi must be finite and >= 0");
    require(std::isfinite(omega2_rabi) && omega2_rabi >= 0.0, "omega2_rabi must be finite and >= 0");
    require(std::isfinite(delta01) && delta01 != 0.0, "delta01 must be finite and nonzero");
    require(std::isfinite(delta02) && delta02 != 0.0, "delta02 must be finite and nonzero");
    require(gamma21 >= 0.0, "gamma21 must be >= 0");
    require(gamma31 >= 0.0, "gamma31 must be >= 0");
    require(beta >= 0.0, "beta must be >= 0");
    require(eta > 0.0 && std::isfinite(eta), "eta must be > 0");
    require(eta_prime > 0.0 && std::isfinite(eta_prime), "eta_prime must be > 0");
    require(k_off > 0.0, "k_off must be > 0");
    require(k_on > 0.0, "k_on must be > 0");
    require(tau_st >= 0.0, "tau_st must be >= 0");
    require(medium_length > 0.0, "medium_length must be > 0");
    require(optical_depth >= 0.0, "optical_depth must be >= 0");
}

double stark_shifted_detuning(const PhysicalParams& p, double delta_raw, int stage) {
    const double d0 = p.delta0(stage);
    if (d0 == 0.0) throw DomainError("zero optical detuning: Stark shift undefined");
    const double om = p.omega(stage);
    return delta_raw - om * om / d0;
}

double bare_detuning(const PhysicalParams& p, double delta_shifted, int stage) {
    const double d0 = p.delta0(stage);
    if (d0 == 0.0) throw DomainError("zero optical detuning: Stark shift undefined");
    const double om = p.omega(stage);
    return delta_shifted + om * om / d0;
}

double default_truncation(const RamanLine& line) {
    return std::holds_alternative<LorentzianLine>(line) ? 50.0 : 6.0;
}

double line_width(const RamanLine& line) {
    return std::visit(overloaded{[](const GaussianLine& g) { return g.width; },
                                 [](const LorentzianLine& l) { return l.width; },
                                 [](const LongitudinalGradient&) { return 0.0; }},
                      line);
}

double line_width(const OpticalLine& line) {
    return std::visit(overloaded{[](const GaussianLine& g) { return g.width; },
                                 [](const LorentzianLine& l) { return l.width; },
                                 [](const NoLine&) { return 0.0; }},
                      line);
}

QuadratureRule quadrature_nodes(const RamanLine& line, int n, double truncation) {
    return std::visit(
        overloaded{
            [&](const GaussianLine& g) {
                return shaped_rule(g.width, n, truncation > 0 ? truncation : 6.0, true);
            },
            [&](const LorentzianLine& l) {
                return shaped_rule(l.width, n, truncation > 0 ? truncation : 50.0, false);
            },
            [](const LongitudinalGradient&) -> QuadratureRule {
                throw DomainError("no spectral quadrature for delta distribution");
            }},
        line);
}

QuadratureRule quadrature_nodes(const OpticalLine& line, int n, double truncation) {
    return std::visit(
        overloaded{
            [&](const GaussianLine& g) {
                return shaped_rule(g.width, n, truncation > 0 ? truncation : 6.0, true);
            },
            [&](const LorentzianLine& l) {
                return shaped_rule(l.width, n, truncation > 0 ? truncation : 50.0, false);
            },
            [](const NoLine&) { return QuadratureRule{{0.0}, {1.0}}; }},
        line);
}

QuadratureRule quadrature_nodes(const BroadeningSpec& spec, int n) {
    return quadrature_nodes(spec.raman, n, spec.raman_quadrature.truncation);
}

QuadratureRule raman_rule(const BroadeningSpec& spec) {
    return quadrature_nodes(spec.raman, spec.raman_quadrature.nodes, spec.raman_quadrature.truncation);
}

QuadratureRule optical_rule(const BroadeningSpec& spec) {
    return quadrature_nodes(spec.optical, spec.optical_quadrature.nodes,
                            spec.optical_quadrature.truncation);
}

double line_center_density(const RamanLine& line, double truncation) {
    using std::numbers::pi;
    return std::visit(
        overloaded{[&](const GaussianLine& g) {
                       const double R = truncation > 0 ? truncation : 6.0;
                       return 1.0 / (std::sqrt(2.0 * pi) * g.width * std::erf(R / std::sqrt(2.0)));
                   },
                   [&](const LorentzianLine& l) {
                       const double R = truncation > 0 ? truncation : 50.0;
                       return 1.0 / (2.0 * l.width * std::atan(R));
                   },
                   [](const LongitudinalGradient& g) { return 1.0 / std::abs(g.chi); }},
        line);
}

namespace {
// kappa / beta
double depth_per_beta(const PhysicalParams& p, const BroadeningSpec& b) {
    const double ratio = p.omega1_rabi / p.delta01;
    const double g0 = line_center_density(b.raman, b.raman_quadrature.truncation);
    const double len = b.is_gradient() ? 1.0 : p.medium_length;
    return std::numbers::pi * ratio * ratio * g0 * len;
}
}  // namespace

double derived_beta(const PhysicalParams& p, const BroadeningSpec& b) {
    const double per = depth_per_beta(p, b);
    if (p.optical_depth > 0.0 && !(per > 0.0))
        throw DomainError("optical_depth > 0 needs omega1_rabi > 0");
    return p.optical_depth > 0.0 ? p.optical_depth / per : 0.0;
}

double depth_from_beta(const PhysicalParams& p, const BroadeningSpec& b) {
    return p.beta * depth_per_beta(p, b);
}

PhysicalParams with_derived_beta(PhysicalParams p, const BroadeningSpec& b) {
    p.beta = derived_beta(p, b);
    return p;
}

bool off_resonant(const PhysicalParams& p, const BroadeningSpec& b) {
    const double wr = line_width(b.raman);
    const double wo = line_width(b.optical);
    for (int stage : {1, 2}) {
        const double scale = stage == 1 ? 1.0 : p.eta;
        const double lim = std::max({p.omega(stage), scale * wr, wo});
        if (!(std::abs(p.delta0(stage)) > lim)) return false;
    }
    return true;
}

std::vector<double> uniform_axis(double a, double b, std::size_t n) {
    if (n < 2) throw GridError("axis needs at least two points");
    std::vector<double> v(n);
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + h * static_cast<double>(i);
    v.back() = b;
    return v;
}

std::vector<double> stretched_axis(double length, std::size_t n, double stretch) {
    if (n < 2) throw GridError("axis needs at least two points");
    if (stretch <= 0.0) return uniform_axis(0.0, length, n);
    std::vector<double> v(n);
    const double den = std::expm1(stretch);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n - 1);
        v[i] = length * std::expm1(stretch * s) / den;
    }
    v.front() = 0.0;
    v.back() = length;
    return v;
}

void SimulationGrid::validate() const {
    auto mono = [](const std::vector<double>& a, const char* name, bool need) {
        if (need && a.size() < 2) throw GridError(std::string(name) + " axis needs >= 2 samples");
        for (std::size_t i = 1; i < a.size(); ++i)
            if (!(a[i] > a[i - 1]))
                throw GridError(std::string(name) + " axis is not strictly increasing");
    };
    mono(tau, "tau", true);
    mono(z, "z", true);
    mono(nu, "nu", false);
    for (const auto* r : {&delta1, &Delta1}) {
        double s = 0.0;
        for (double w : r->weights) s += w;
        if (!r->weights.empty() && std::abs(s - 1.0) > 1e-12)
            throw GridError("quadrature weights do not sum to one");
    }
    const double h = tau[1] - tau[0];
    for (std::size_t i = 1; i < tau.size(); ++i)
        if (std::abs((tau[i] - tau[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(tau[i])))
            throw GridError("tau axis must be uniform");
}

}  // namespace ramanecho
