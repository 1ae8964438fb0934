#pragma once

#include <vector>

#include "ramanecho/params.hpp"

namespace ramanecho {

struct CoherencePair {
    cplx r12{};
    cplx r13{};
    double norm2() const { return std::norm(r12) + std::norm(r13); }
};

// R12 -> C12 R12, R13 -> i C13 R12 at the end of the switch-on ramp.
struct SwitchOnCoefficients {
    cplx c12{};
    cplx c13{};
};

// Coherences left by steady Raman absorption: R12 = i zeta12 a, R13 = zeta13 R12.
CoherencePair init_coherence_after_storage(const PhysicalParams& p, double delta1, double Delta1,
                                           cplx a_spectral = 1.0);

// Interval treated as "complete" switch-off: 25/k.
double switch_off_interval(const PhysicalParams& p);

// Closed form for Omega(t) = Omega0 exp(-k t) evaluated `elapsed` after the ramp starts.
// Delta1 is the bare Raman detuning of the node. Uses the regularised Bessel series,
// so it stays finite where Gamma and J separately over/underflow.
CoherencePair switch_off_coherences(const PhysicalParams& p, CoherencePair initial, double delta1,
                                    double Delta1);
CoherencePair switch_off_coherences(const PhysicalParams& p, CoherencePair initial, double delta1,
                                    double Delta1, double elapsed);
// Same result built from J, Gamma and the cross product M; cross-check for moderate orders.
CoherencePair switch_off_coherences_bessel_gamma(const PhysicalParams& p, CoherencePair initial,
                                                 double delta1, double Delta1, double elapsed);

CoherencePair switch_off_ode_oracle(const PhysicalParams& p, CoherencePair initial, double delta1,
                                    double Delta1, double horizon);
std::vector<CoherencePair> switch_off_ode_trajectory(const PhysicalParams& p, CoherencePair initial,
                                                     double delta1, double Delta1,
                                                     const std::vector<double>& times);

double transfer_efficiency(const PhysicalParams& p, double delta1 = 0.0, double Delta1 = 0.0);
// |R13(end)/R13(start)|^2 across the switch-off
double remnant_optical_fraction(const PhysicalParams& p, double delta1 = 0.0, double Delta1 = 0.0);

// Exponential switch-on Omega2 exp(k_r t), t <= 0, with Omega2 = omega2_rabi.
// Delta2 is the bare Raman detuning of the node in the retrieval stage.
SwitchOnCoefficients switch_on_coefficients(const PhysicalParams& p);
SwitchOnCoefficients switch_on_coefficients(const PhysicalParams& p, double delta1, double Delta2);
SwitchOnCoefficients switch_on_ode_oracle(const PhysicalParams& p, double delta1, double Delta2,
                                          double horizon = 0.0);

// |C12|^2 + |(Omega2/Delta02) C13|^2
double switch_on_efficiency(const PhysicalParams& p);
// Projection on the adiabatic slow mode: C12 + i (Omega2/Delta02) C13.
cplx switch_on_amplitude(const PhysicalParams& p);

}  // namespace ramanecho
