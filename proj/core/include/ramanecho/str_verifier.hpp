#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ramanecho/config.hpp"
#include "ramanecho/envelope.hpp"
#include "ramanecho/mbsolver.hpp"
#include "ramanecho/params.hpp"

namespace ramanecho {

// Sign conventions of the scaled time reversal (coherence sign, field scale, coupling ratio a2/a1):
//   first:  +1, -sqrt(eta), +sqrt(eta)
//   second: +1, +sqrt(eta), -sqrt(eta)
//   third:  -1, +sqrt(eta), +sqrt(eta)
enum class StrForm { first, second, third };

// Maps a stage solution onto a candidate of the opposite stage:
// Delta~' = -eta Delta~, Z kept with the propagation direction reversed, tau' = tau_flip + (tau_flip - tau)/eta,
// R' = coherence_sign R, E' = field_scale E. The *_factor members deliberately break one map (1 = exact).
struct StrTransform {
    double eta = 1.0;
    StrForm form = StrForm::first;
    double tau_flip = 0.0;
    double detuning_factor = 1.0;
    double space_factor = 1.0;
    double time_factor = 1.0;
    double field_factor = 1.0;

    double coherence_sign() const;
    double field_scale() const;
    double coupling_ratio() const;
    StrTransform inverse() const;
    void validate() const;
};

// Reduced-model solution on a (Z, tau, node) lattice with the Stark-shifted detunings it was run with.
struct StrSolution {
    Trajectory traj;
    int stage = 1;
    Direction direction = Direction::forward;
    std::vector<double> weight;    // per node
    std::vector<double> delta1;    // per node
    std::vector<double> detuning;  // [j * nodes + i]
};

// Runs a reduced-model storage stage with the trajectory recorded.
StrSolution record_storage(const PropagationProblem& problem);

StrSolution apply_str(const StrSolution& s, const StrTransform& t);
// Plain detuning inversion at equal rates: Delta~ -> -Delta~, tau -> 2 tau_flip - tau, E -> -E.
StrSolution apply_crib(const StrSolution& s, double tau_flip);

// Retrieval parameters implied by the coupling condition: Omega2/Delta0,2 = coupling_ratio * Omega1/Delta0,1,
// keeping |Delta0,2| from p.
PhysicalParams str_retrieval_params(const PhysicalParams& p, const StrTransform& t);

enum class ResidualKind {
    collocation,  // continuous equations by second-order differences; vanishes as the grid refines
    scheme,       // the solver's own discrete relations; vanishes to rounding for an exact map
};

struct StrResidual {
    double atom = 0.0;   // relative L2 of the coherence equation
    double field = 0.0;  // relative L2 of the propagation equation
    double total = 0.0;  // sqrt(atom^2 + field^2)
};

// Reduced-model equations of the solution's stage evaluated on the candidate; p supplies the couplings.
StrResidual str_residual(const StrSolution& candidate, const PhysicalParams& p,
                         ResidualKind kind = ResidualKind::collocation);

struct StrProbe {
    std::string condition;  // detuning_map, direction, time_map, coupling, field_scale
    StrResidual residual;
    double ratio = 0.0;     // over the exact-setting residual
};

// One map broken by `size` at a time; the first entry is the exact setting with ratio 1.
std::vector<StrProbe> violation_probes(const StrSolution& storage, const PhysicalParams& p, const StrTransform& t,
                                       double size = 0.1, ResidualKind kind = ResidualKind::collocation);

// |<ref, E2>|^2 / (||ref||^2 ||E2||^2) on the echo axis with ref(t) = E1(t_in - eta (t - tau_echo)).
double waveform_fidelity(const FieldEnvelope& input, const FieldEnvelope& echo, double eta, double tau_echo,
                         double t_in = 0.0);

// chi2 = -eta chi1
BroadeningSpec gem_gradient_flip(const BroadeningSpec& b, double eta);

struct StrCheckSpec {
    PhysicalParams params;
    BroadeningSpec broadening;
    std::vector<double> etas{0.5, 2.0};
    StrForm form = StrForm::first;
    ResidualKind kind = ResidualKind::collocation;
    double violation = 0.1;
    double pulse_width = 2.5;
    double dt = 0.02;
    std::size_t z_slices = 200;
    bool run_pipeline = true;  // end-to-end fidelity and FWHM ratio per eta
};

std::set<std::string> str_check_keys();
// etas is a comma list; form first|second|third; residual collocation|scheme.
StrCheckSpec load_str_check_spec(const Config& c);

struct StrEtaReport {
    double eta = 1.0;
    std::vector<StrProbe> probes;
    double crib_difference = -1.0;  // |residual(eta=1 STR) - residual(CRIB)|, eta = 1 only
    double fidelity = -1.0;
    double fwhm_ratio = -1.0;       // input FWHM / echo FWHM
};

struct StrReport {
    std::vector<StrEtaReport> rows;
    std::vector<std::pair<std::string, std::string>> header;
    // every probe at least min_ratio above its exact residual
    bool necessity_holds(double min_ratio = 10.0) const;
};

// Parallel over eta values.
StrReport run_str_check(const StrCheckSpec& spec);
// Columns: eta, condition, atom, field, total, ratio, fidelity, fwhm_ratio.
void write_str_report_csv(const StrReport& r, std::ostream& os);

}  // namespace ramanecho
