#pragma once

#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

namespace ramanecho {

using cplx = std::complex<double>;

// Units: Omega_1,0 = 1 and v_g = 1 unless a config says otherwise.
struct PhysicalParams {
    double omega1_rabi = 1.0;
    double omega2_rabi = 1.0;
    double delta01 = 20.0;
    double delta02 = 20.0;
    double gamma21 = 0.0;
    double gamma31 = 0.0;
    double beta = 0.0;  // filled from optical_depth by with_derived_beta()
    double eta = 1.0;
    double eta_prime = 1.0;
    double k_off = 1.0;
    double k_on = 50.0;
    double tau0 = 0.0;
    double tau_echo = 0.0;
    double tau_st = 0.0;
    double medium_length = 1.0;
    double optical_depth = 0.0;

    // Throws DomainError naming the first violated invariant.
    void validate() const;

    double omega(int stage) const { return stage == 1 ? omega1_rabi : omega2_rabi; }
    double delta0(int stage) const { return stage == 1 ? delta01 : delta02; }
};

struct GaussianLine {
    double width = 1.0;  // standard deviation
};
struct LorentzianLine {
    double width = 1.0;  // half width at half maximum
};
struct NoLine {};
// Delta~ = chi * (Z - z_center); a delta distribution at every slice.
struct LongitudinalGradient {
    double chi = 1.0;
    double z_center = 0.5;
};

using OpticalLine = std::variant<NoLine, GaussianLine, LorentzianLine>;
using RamanLine = std::variant<GaussianLine, LorentzianLine, LongitudinalGradient>;

struct QuadratureSpec {
    int nodes = 1;
    double truncation = 0.0;  // in line widths; 0 = shape default (6 Gaussian, 50 Lorentzian)
};

struct BroadeningSpec {
    OpticalLine optical = NoLine{};
    RamanLine raman = GaussianLine{};
    QuadratureSpec optical_quadrature{1, 0.0};
    QuadratureSpec raman_quadrature{64, 0.0};

    bool is_gradient() const { return std::holds_alternative<LongitudinalGradient>(raman); }
};

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

// Stark shift of the Raman resonance: Delta~ = Delta - Omega^2/Delta0 for the given stage.
double stark_shifted_detuning(const PhysicalParams& p, double delta_raw, int stage);
double bare_detuning(const PhysicalParams& p, double delta_shifted, int stage);

// Midpoint rule on [-R, R] with weights proportional to the line shape, normalised to 1.
QuadratureRule quadrature_nodes(const BroadeningSpec& spec, int n);
QuadratureRule quadrature_nodes(const RamanLine& line, int n, double truncation = 0.0);
QuadratureRule quadrature_nodes(const OpticalLine& line, int n, double truncation = 0.0);
QuadratureRule raman_rule(const BroadeningSpec& spec);
QuadratureRule optical_rule(const BroadeningSpec& spec);

double default_truncation(const RamanLine& line);
double line_width(const RamanLine& line);
double line_width(const OpticalLine& line);

// Continuous density of the Raman line at the centre, renormalised for truncation.
double line_center_density(const RamanLine& line, double truncation = 0.0);

// Optical depth kappa = pi beta (Omega1/Delta01)^2 g(0) L  (intensity exponent at line centre).
// For a gradient line the per-length density is 1/(|chi|) and L drops out.
double derived_beta(const PhysicalParams& p, const BroadeningSpec& b);
double depth_from_beta(const PhysicalParams& p, const BroadeningSpec& b);
PhysicalParams with_derived_beta(PhysicalParams p, const BroadeningSpec& b);

// |Delta0,mu| > max(Omega_mu, line widths) for both stages.
bool off_resonant(const PhysicalParams& p, const BroadeningSpec& b);

std::vector<double> uniform_axis(double a, double b, std::size_t n);
// Points on [0, length] packed towards 0; stretch = 0 gives a uniform axis.
std::vector<double> stretched_axis(double length, std::size_t n, double stretch);

struct SimulationGrid {
    std::vector<double> tau;
    std::vector<double> z;
    std::vector<double> nu;
    QuadratureRule delta1;
    QuadratureRule Delta1;

    void validate() const;
    double dt() const { return tau.size() > 1 ? tau[1] - tau[0] : 0.0; }
};

}  // namespace ramanecho
