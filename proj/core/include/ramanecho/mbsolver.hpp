#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ramanecho/envelope.hpp"
#include "ramanecho/params.hpp"

namespace ramanecho {

enum class Stage { storage, retrieval };
enum class Model { full, reduced };

struct ControlSegment {
    enum class Kind { constant, exp_off, exp_on };
    Kind kind = Kind::constant;
    double t0 = 0.0;
    double t1 = 0.0;
    double omega = 0.0;  // constant value; value at t0 for exp_off, at t1 for exp_on
    double rate = 0.0;
};

// Piecewise control Rabi frequency. Outside the segments the nearest end value holds.
class ControlSchedule {
public:
    static ControlSchedule constant(double omega);
    ControlSchedule& add(const ControlSegment& s);
    double operator()(double t) const;
    bool is_constant() const;
    void validate() const;
    const std::vector<ControlSegment>& segments() const { return segs_; }

private:
    std::vector<ControlSegment> segs_;
};

// Coherences on the (slice, node) lattice, slice-major. Node i carries the optical offset
// delta1[i] and weight[i]; the Stark-shifted Raman detuning may differ per slice (gradient).
// Coherences are held in the Stark frame of the current stage.
struct AtomicState {
    Model model = Model::full;
    int stage = 1;
    std::vector<double> z;
    std::vector<double> weight;
    std::vector<double> delta1;
    std::vector<double> detuning;
    std::vector<cplx> r12;
    std::vector<cplx> r13;  // empty for the reduced model
    double time = 0.0;

    std::size_t slices() const { return z.size(); }
    std::size_t nodes() const { return weight.size(); }
    std::size_t index(std::size_t j, std::size_t i) const { return j * weight.size() + i; }
    // int dZ sum_i w_i (|R12|^2 + |R13|^2), trapezoid in Z
    double population_integral() const;
};

struct Trajectory {
    std::vector<double> tau;
    std::vector<double> z;      // lab order
    std::size_t nodes = 0;
    std::vector<cplx> field;    // [j * nt + n]
    std::vector<cplx> r12;      // [(j * nt + n) * nodes + i]
    std::vector<cplx> r13;
    cplx field_at(std::size_t j, std::size_t n) const { return field[j * tau.size() + n]; }
    cplx r12_at(std::size_t j, std::size_t n, std::size_t i) const { return r12[(j * tau.size() + n) * nodes + i]; }
};

struct PropagationProblem {
    PhysicalParams params;
    BroadeningSpec broadening;
    SimulationGrid grid;
    FieldEnvelope input_field;  // entrance field on grid.tau; empty means none
    ControlSchedule control;
    Stage stage = Stage::storage;
    Model model = Model::full;
    Direction direction = Direction::forward;  // retrieval only; storage is always forward
    bool record_trajectory = false;
};

struct StageResult {
    AtomicState state;     // at grid.tau.back()
    FieldEnvelope output;  // at the far end of the march
    std::optional<Trajectory> trajectory;
};

// Fills the node rules from the broadening spec.
SimulationGrid make_grid(const BroadeningSpec& b, std::vector<double> tau, std::vector<double> z);
// Zero coherences on the grid's lattice with stage-1 detunings.
AtomicState make_state(const PropagationProblem& problem);

// Throws GridError when the grid cannot resolve the problem.
void check_resolution(const PropagationProblem& problem);

StageResult simulate_storage_full(const PropagationProblem& problem);
StageResult simulate_storage_reduced(const PropagationProblem& problem);
StageResult simulate_retrieval_full(const PropagationProblem& problem, const AtomicState& initial);
StageResult simulate_retrieval_reduced(const PropagationProblem& problem, const AtomicState& initial);
// Dispatch on problem.stage and problem.model.
StageResult propagate(const PropagationProblem& problem, const AtomicState& initial);

// Hand the lattice to the retrieval stage: Delta~2 = -factor * Delta~1 (factor = eta for STR).
AtomicState flip_detunings(const AtomicState& s, double factor);
// Free precession with the control off; R12 at the bare detuning of the state's stage.
void evolve_dark(AtomicState& s, const PhysicalParams& p, double duration);
// Multiply every slice by exp(i dk Z); models a grating written for another direction.
void imprint_phase(AtomicState& s, double dk);
double bare_detuning_of(const AtomicState& s, const PhysicalParams& p, std::size_t j, std::size_t i);

// Closed-form backward echo spectrum at Z=0 in the long-storage limit:
// E2(nu) = -amp/sqrt(eta) exp(i nu tau_f (1+1/eta)) (1 - exp(-int alpha_abs(-nu/eta))) E1(-nu/eta),
// with the storage clock of `input`. amp carries the switching amplitude and decay.
std::vector<cplx> echo_spectral_solution(const PhysicalParams& p, const BroadeningSpec& b, const FieldEnvelope& input,
                                         const std::vector<double>& nu, double tau_flip, cplx amp = 1.0);

// Columnar dump: tau, Z, Re E, Im E, then Re/Im R12 of the listed nodes.
void write_trajectory(const Trajectory& t, const std::string& path, const std::vector<std::size_t>& nodes = {});

}  // namespace ramanecho
