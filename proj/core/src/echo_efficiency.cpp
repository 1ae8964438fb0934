#include "ramanecho/echo_efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "detail.hpp"
#include "ramanecho/errors.hpp"
#include "ramanecho/mbsolver.hpp"
#include "ramanecho/specfun.hpp"
#include "ramanecho/switching.hpp"

namespace ramanecho {

namespace {

constexpr cplx I{0.0, 1.0};

// Raman line as seen by stage `stage`: widths scale by eta, the gradient flips to -eta chi.
RamanLine stage_line(const PhysicalParams& p, const BroadeningSpec& b, int stage) {
    if (stage == 1) return b.raman;
    const double eta = p.eta;
    return std::visit(detail::overloaded{[&](GaussianLine g) -> RamanLine { return GaussianLine{eta * g.width}; },
                                         [&](LorentzianLine l) -> RamanLine { return LorentzianLine{eta * l.width}; },
                                         [&](LongitudinalGradient g) -> RamanLine {
                                             return LongitudinalGradient{-eta * g.chi, g.z_center};
                                         }},
                      b.raman);
}

double continuous_center_density(const RamanLine& line) {
    return std::visit(
        detail::overloaded{[](const GaussianLine& g) { return 1.0 / (std::sqrt(2.0 * std::numbers::pi) * g.width); },
                           [](const LorentzianLine& l) { return 1.0 / (std::numbers::pi * l.width); },
                           [](const LongitudinalGradient& g) { return 1.0 / std::abs(g.chi); }},
        line);
}

// Truncated over continuous centre density: keeps Re alpha(0) L equal to kappa~.
double truncation_scale(const RamanLine& line, double truncation) {
    return line_center_density(line, truncation) / continuous_center_density(line);
}

}  // namespace

double gamma_eff(const PhysicalParams& p, GammaEffConvention c, int stage) {
    const double om = p.omega(stage), d0 = p.delta0(stage);
    if (c == GammaEffConvention::printed) return p.gamma21 + p.gamma31 * om * om / d0;
    return p.gamma21 + p.gamma31 * (om / d0) * (om / d0);
}

namespace {

// int G(x) / (x - zeta) dx over the stage line, Im zeta >= 0
cplx line_integral(const RamanLine& line, const BroadeningSpec& b, cplx zeta, const AbsorptionOptions& opt) {
    if (opt.quadrature) {
        const QuadratureRule rule = quadrature_nodes(line, b.raman_quadrature.nodes, b.raman_quadrature.truncation);
        cplx acc = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const cplx den = rule.nodes[i] - zeta;
            if (std::abs(den) < 1e-14 * std::max(1.0, std::abs(zeta))) {
                if (opt.principal_value) continue;
                throw PoleError("nu sits on a quadrature node with gamma_eff = 0; use principal-value mode");
            }
            acc += rule.weights[i] / den;
        }
        return acc;
    }
    const double scale = truncation_scale(line, b.raman_quadrature.truncation);
    if (const auto* l = std::get_if<LorentzianLine>(&line)) return scale / (-zeta - I * l->width);
    const double s = std::get<GaussianLine>(line).width;
    return scale * I * std::sqrt(std::numbers::pi / 2.0) * faddeeva_w(zeta / (std::numbers::sqrt2 * s)) / s;
}

}  // namespace

cplx complex_absorption(const PhysicalParams& p, const BroadeningSpec& b, double nu, double z,
                        const AbsorptionOptions& opt) {
    const int st = opt.stage;
    const double om = p.omega(st), d0 = p.delta0(st);
    const double ratio = om / d0;
    const double pref = p.beta * ratio * ratio;
    if (pref == 0.0 && !opt.full_form) return 0.0;
    const double g = gamma_eff(p, opt.gamma_eff, st);
    const RamanLine line = stage_line(p, b, st);

    if (const auto* gr = std::get_if<LongitudinalGradient>(&line)) {
        const double center = gr->chi * (z - gr->z_center);
        const cplx den = center - nu - I * g;
        if (den == cplx(0.0)) {
            if (opt.principal_value) return 0.0;
            throw PoleError("gradient line: nu sits on the local resonance with gamma_eff = 0");
        }
        return -I * pref / den;
    }

    if (!opt.full_form) return -I * pref * line_integral(line, b, cplx(nu, g), opt);

    // 1/(D - nu - Omega^2/(Delta_bare - nu)) averaged over the lines, D = Delta0 + delta1 - i gamma31
    const QuadratureRule orule = optical_rule(b);
    const double shift = om * om / d0;
    cplx acc = 0.0;
    for (std::size_t a = 0; a < orule.size(); ++a) {
        const cplx dd = cplx(d0 + orule.nodes[a], -p.gamma31) - nu;
        const cplx zeta = nu - shift + om * om / dd + I * p.gamma21;
        acc += orule.weights[a] * (1.0 / dd + om * om / (dd * dd) * line_integral(line, b, zeta, opt));
    }
    return -I * p.beta * (acc - 1.0 / d0);
}

double integrated_absorption(const PhysicalParams& p, const BroadeningSpec& b, double nu,
                             const AbsorptionOptions& opt) {
    const int st = opt.stage;
    const RamanLine line = stage_line(p, b, st);
    if (const auto* gr = std::get_if<LongitudinalGradient>(&line)) {
        const double ratio = p.omega(st) / p.delta0(st);
        const double pref = p.beta * ratio * ratio;
        const double L = p.medium_length;
        const double a = gr->chi * (0.0 - gr->z_center) - nu;
        const double c = gr->chi * (L - gr->z_center) - nu;
        const double lo = std::min(a, c), hi = std::max(a, c);
        const double g = gamma_eff(p, opt.gamma_eff, st);
        if (g > 0.0) return pref / std::abs(gr->chi) * (std::atan(hi / g) - std::atan(lo / g));
        if (lo < 0.0 && hi > 0.0) return std::numbers::pi * pref / std::abs(gr->chi);
        if (lo == 0.0 || hi == 0.0) return 0.5 * std::numbers::pi * pref / std::abs(gr->chi);
        return 0.0;
    }
    return p.medium_length * complex_absorption(p, b, nu, 0.0, opt).real();
}

double raman_optical_shift(const PhysicalParams& p, double delta1) {
    const double r = p.omega1_rabi / p.delta01;
    return delta1 * r * r;
}

double dephasing_factor(const PhysicalParams& p, LineShape shape, double delta1_in, double interaction_time) {
    if (interaction_time < 0.0) throw DomainError("dephasing needs tau_echo >= tau_st");
    if (delta1_in < 0.0) throw DomainError("optical IB width must be >= 0");
    const double r2 = (p.omega1_rabi / p.delta01) * (p.omega1_rabi / p.delta01);
    const double x = delta1_in * interaction_time;
    if (shape == LineShape::gaussian) return std::exp(-0.25 * r2 * r2 * (1.0 + p.eta * p.eta) * x * x);
    return std::exp(-0.5 * r2 * (1.0 + p.eta) * x);
}

double echo_time(double eta, double tau_echo_unit) {
    if (!(eta > 0.0)) throw DomainError("eta must be > 0");
    return 0.5 * (1.0 + 1.0 / eta) * tau_echo_unit;
}

FieldEnvelope echo_envelope_map(const PhysicalParams& p, const BroadeningSpec& b, const FieldEnvelope& input,
                                cplx sqrt_eps_tilde, double tau_echo, double t_in, bool* flat) {
    input.validate();
    const double eta = p.eta;
    const double d0 = integrated_absorption(p, b, 0.0);

    // rms bandwidth of the input
    double bw = 0.0;
    {
        const double w = fwhm(input);
        bw = 2.0 * std::sqrt(2.0 * std::log(2.0)) / std::max(w, 1e-300);
    }
    bool is_flat = true;
    for (int k = -6; k <= 6; ++k) {
        const double nu = 0.5 * k * bw;
        const double d = integrated_absorption(p, b, nu);
        if (std::abs(-std::expm1(-d) - (-std::expm1(-d0))) > 0.01 * std::max(1e-300, -std::expm1(-d0))) is_flat = false;
    }
    if (flat) *flat = is_flat;

    const std::size_t n = input.size();
    FieldEnvelope out;
    out.kind = AxisKind::time;
    out.direction = Direction::backward;
    out.z = 0.0;
    out.axis.resize(n);
    out.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.axis[n - 1 - k] = t_in + tau_echo + (t_in - input.axis[k]) / eta;

    const double decay = std::exp(-p.gamma21 * tau_echo);
    if (is_flat) {
        const cplx amp = std::sqrt(eta) * sqrt_eps_tilde * decay * (-std::expm1(-d0));
        for (std::size_t k = 0; k < n; ++k) out.samples[n - 1 - k] = amp * input.samples[k];
        return out;
    }
    // spectral route: resolve the input band finely and transform back
    const double tau_flip = t_in + tau_echo / (1.0 + 1.0 / eta);
    const double span = 12.0 * bw * eta;
    const std::size_t nn = 1201;
    const std::vector<double> nu = uniform_axis(-span, span, nn);
    const std::vector<cplx> s = echo_spectral_solution(p, b, input, nu, tau_flip, sqrt_eps_tilde * decay);
    FieldEnvelope td = from_spectrum(nu, s, out.axis);
    out.samples = td.samples;
    return out;
}

EfficiencyOptions efficiency_options_from(const BroadeningSpec& b) {
    EfficiencyOptions o;
    if (const auto* g = std::get_if<GaussianLine>(&b.optical)) {
        o.optical_shape = LineShape::gaussian;
        o.delta1_in = g->width;
    } else if (const auto* l = std::get_if<LorentzianLine>(&b.optical)) {
        o.optical_shape = LineShape::lorentzian;
        o.delta1_in = l->width;
    }
    return o;
}

EfficiencyBreakdown overall_efficiency(const PhysicalParams& p, const BroadeningSpec& b, const EfficiencyOptions& opt) {
    EfficiencyBreakdown e;
    e.eps_t = opt.ideal_switching ? 1.0 : transfer_efficiency(p);
    e.eps_r = opt.ideal_switching ? 1.0 : switch_on_efficiency(p);
    e.gamma_factor = dephasing_factor(p, opt.optical_shape, opt.delta1_in, opt.interaction_time);
    if (opt.tau_echo < 0.0) throw DomainError("tau_echo must be >= 0");
    e.storage_decay = std::exp(-2.0 * p.gamma21 * opt.tau_echo);
    const double r = p.omega1_rabi / p.delta01;
    e.depth = opt.depth_model == DepthModel::fixed ? p.optical_depth : p.optical_depth * r * r;
    (void)b;
    const double br = -std::expm1(-e.depth);
    e.depth_factor = br * br;
    e.total = e.eps_t * e.eps_r * e.gamma_factor * e.gamma_factor * e.storage_decay * e.depth_factor;
    e.delta1_r = raman_optical_shift(p, opt.delta1_in);
    e.gamma_eff = gamma_eff(p, opt.gamma_eff);
    return e;
}

}  // namespace ramanecho
