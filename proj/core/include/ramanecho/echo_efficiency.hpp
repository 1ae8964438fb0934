#pragma once

#include "ramanecho/envelope.hpp"
#include "ramanecho/params.hpp"

namespace ramanecho {

enum class LineShape { gaussian, lorentzian };
// squared_ratio: gamma21 + gamma31 (Omega/Delta0)^2; printed: gamma21 + gamma31 Omega^2/Delta0
enum class GammaEffConvention { squared_ratio, printed };
// fixed: kappa~ is the Raman depth itself; detuning_scaled: depth = kappa~ (Omega1/Delta01)^2
enum class DepthModel { fixed, detuning_scaled };

struct AbsorptionOptions {
    int stage = 1;
    bool principal_value = false;
    bool quadrature = false;  // integrate on the Raman rule instead of the closed form
    bool full_form = false;   // keep the excited-state response: exact linear response of the full model
    GammaEffConvention gamma_eff = GammaEffConvention::squared_ratio;
};

double gamma_eff(const PhysicalParams& p, GammaEffConvention c = GammaEffConvention::squared_ratio, int stage = 1);

// alpha(nu, Z) = -i beta (Omega/Delta0)^2 int G(Delta, Z) / (Delta - nu - i gamma_eff) dDelta.
// Re = intensity absorption per length, Im = dispersion. The full form replaces the adiabatic
// response by <1/(D - nu - Omega^2/(Delta_bare - nu))> - 1/Delta0 (transverse lines only).
cplx complex_absorption(const PhysicalParams& p, const BroadeningSpec& b, double nu, double z,
                        const AbsorptionOptions& opt = {});
// int_0^L Re alpha(nu, Z) dZ
double integrated_absorption(const PhysicalParams& p, const BroadeningSpec& b, double nu,
                             const AbsorptionOptions& opt = {});

// delta_1,R = delta1 (Omega1/Delta01)^2
double raman_optical_shift(const PhysicalParams& p, double delta1);

// Gamma_G / Gamma_L with (Omega2/Delta02) = sqrt(eta) (Omega1/Delta01).
double dephasing_factor(const PhysicalParams& p, LineShape shape, double delta1_in, double interaction_time);

double echo_time(double eta, double tau_echo_unit);

// sqrt(eps_tilde eta) E1(-(t - tau_echo) eta) e^{-gamma21 tau_echo}(1 - e^{-kappa}), tau_echo measured
// on the input clock. Sets *flat to false when the depth varies by more than 1% across the input band.
FieldEnvelope echo_envelope_map(const PhysicalParams& p, const BroadeningSpec& b, const FieldEnvelope& input,
                                cplx eps_tilde, double tau_echo, double t_in, bool* flat = nullptr);

struct EfficiencyBreakdown {
    double eps_t = 1.0;
    double eps_r = 1.0;
    double gamma_factor = 1.0;
    double storage_decay = 1.0;
    double depth_factor = 1.0;
    double total = 1.0;
    double delta1_r = 0.0;
    double gamma_eff = 0.0;
    double depth = 0.0;
};

struct EfficiencyOptions {
    LineShape optical_shape = LineShape::gaussian;
    double delta1_in = 0.0;          // optical IB width entering Gamma
    double interaction_time = 0.0;   // tau_echo(eta) - tau_st
    double tau_echo = 0.0;           // total coherence lifetime for the e^{-2 gamma21 tau} factor
    DepthModel depth_model = DepthModel::fixed;
    GammaEffConvention gamma_eff = GammaEffConvention::squared_ratio;
    bool ideal_switching = false;    // eps_t = eps_r = 1
};

// Line shape and width of the optical line; none maps to (gaussian, 0).
EfficiencyOptions efficiency_options_from(const BroadeningSpec& b);

EfficiencyBreakdown overall_efficiency(const PhysicalParams& p, const BroadeningSpec& b, const EfficiencyOptions& opt);

}  // namespace ramanecho
