#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ramanecho/config.hpp"
#include "ramanecho/echo_efficiency.hpp"
#include "ramanecho/mbsolver.hpp"

namespace ramanecho {

// analytic: closed-form switch-off/on maps per node; ideal: coherence handed over unchanged
enum class SwitchingMode { analytic, ideal };

struct PipelineSpec {
    PhysicalParams params;
    BroadeningSpec broadening;
    Model model = Model::full;
    SwitchingMode switching = SwitchingMode::analytic;

    double pulse_width = 5.0;  // amplitude standard deviation
    double pulse_center = 0.0; // 0 = 6 widths after the window start
    double pulse_chirp = 0.0;
    double pulse_skew = 0.0;   // >0 gives a slower trailing edge (asymmetric test pulses)

    double dt = 0.1;
    double retrieval_dt = 0.0;     // 0 = dt/eta, capped by the optical detuning
    double storage_window = 0.0;   // 0 = pulse_center + 6 widths
    double retrieval_window = 0.0; // 0 = echo + 6 widths/eta
    int z_slices = 300;
    double z_stretch = -1.0;       // <0 = from the optical depth

    double flip_time = 0.0;  // 0 = end of the switch-off
    double on_time = 0.0;    // 0 = flip_time

    Direction retrieval_direction = Direction::backward;
    double grating_mismatch = 0.0;  // exp(i dk Z) imprinted before retrieval
    double flip_factor = 0.0;       // 0 = eta

    EfficiencyOptions analytic;
};

struct PipelineReport {
    FieldEnvelope input;
    FieldEnvelope transmitted;
    FieldEnvelope echo;
    double input_energy = 0.0;
    double transmitted_energy = 0.0;
    double stored_energy = 0.0;
    double echo_energy = 0.0;
    double efficiency = 0.0;   // echo / input
    double fidelity = 0.0;
    double input_fwhm = 0.0;
    double echo_fwhm = 0.0;
    double t_in = 0.0;
    double flip_time = 0.0;
    double on_time = 0.0;
    double expected_delay = 0.0;  // (1 + 1/eta)(tau_f - t_in)
    double measured_delay = 0.0;  // echo peak - t_in
    double retrieval_dt = 0.0;
    EfficiencyBreakdown analytic;
    std::vector<std::pair<std::string, std::string>> header;
};

std::set<std::string> pipeline_keys();
PipelineSpec load_pipeline_spec(const Config& c);
std::vector<std::pair<std::string, std::string>> describe(const PipelineSpec& s);

PipelineReport run_pipeline(const PipelineSpec& spec);
PipelineReport run_pipeline(const std::string& config_path);

FieldEnvelope make_input_pulse(const PipelineSpec& spec, const std::vector<double>& tau, double t_in);

}  // namespace ramanecho
