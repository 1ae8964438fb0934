#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <fstream>
#include <string>

#include "ramanecho/echo_efficiency.hpp"
#include "ramanecho/errors.hpp"
#include "ramanecho/mbsolver.hpp"
#include "ramanecho/pipeline.hpp"

using namespace ramanecho;

namespace {

// 200 nodes over +-6 sigma: comb period ~105, longer than any window used here
PropagationProblem storage_problem(Model m, double depth, double omega = 1.0, int nodes = 200, double dt = 0.05,
                                   int slices = 120) {
    BroadeningSpec b;
    b.raman = GaussianLine{1.0};
    b.raman_quadrature.nodes = nodes;
    PhysicalParams p;
    p.delta01 = p.delta02 = 20.0;
    p.optical_depth = depth;
    p = with_derived_beta(p, b);
    PropagationProblem pr;
    pr.params = p;
    pr.broadening = b;
    pr.model = m;
    pr.control = ControlSchedule::constant(omega);
    const double stretch = depth > 1.0 ? std::log(depth) - 0.3 : 0.0;
    pr.grid = make_grid(b, uniform_axis(0.0, 40.0, static_cast<std::size_t>(std::lround(40.0 / dt)) + 1),
                        stretched_axis(1.0, static_cast<std::size_t>(slices), stretch));
    pr.input_field = gaussian_pulse(pr.grid.tau, 15.0, 2.5);
    return pr;
}

PipelineSpec echo_spec(double depth) {
    PipelineSpec s;
    s.params.delta01 = s.params.delta02 = 20.0;
    s.params.optical_depth = depth;
    s.params.k_off = 5.0;
    s.broadening.raman = GaussianLine{3.0};
    s.broadening.raman_quadrature.nodes = 300;
    s.params = with_derived_beta(s.params, s.broadening);
    s.model = Model::reduced;
    s.switching = SwitchingMode::ideal;
    s.pulse_width = 2.5;
    return s;
}

}  // namespace

TEST_CASE("no control: the medium is transparent") {
    for (Model m : {Model::full, Model::reduced}) {
        const PropagationProblem pr = storage_problem(m, 5.0, 0.0, 64);
        const StageResult r = propagate(pr, make_state(pr));
        CHECK(r.output.energy() == doctest::Approx(pr.input_field.energy()).epsilon(1e-6));
        CHECK(r.state.population_integral() < 1e-8);
    }
}

TEST_CASE("storage absorbs and conserves energy") {
    for (Model m : {Model::full, Model::reduced}) {
        const PropagationProblem pr = storage_problem(m, 5.0);
        const StageResult r = propagate(pr, make_state(pr));
        const double in = pr.input_field.energy();
        const double out = r.output.energy();
        const double stored = 0.5 * pr.params.beta * r.state.population_integral();
        CHECK(out / in <= 0.01);
        CHECK((out + stored) / in == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("transmitted spectrum follows the complex absorption") {
    for (Model m : {Model::full, Model::reduced}) {
        const PropagationProblem pr = storage_problem(m, 5.0);
        const StageResult r = propagate(pr, make_state(pr));
        const std::vector<double> nu{-0.5, -0.25, 0.0, 0.25, 0.5};
        const auto in = spectrum(pr.input_field, nu);
        const auto out = spectrum(r.output, nu);
        AbsorptionOptions o;
        o.full_form = m == Model::full;
        for (std::size_t k = 0; k < nu.size(); ++k) {
            const cplx pred = in[k] * std::exp(-0.5 * pr.params.medium_length * complex_absorption(pr.params, pr.broadening, nu[k], 0.0, o));
            CHECK(std::abs(out[k] - pred) < 5e-3 * std::abs(pred));
        }
    }
}

TEST_CASE("excited-state coherence follows adiabatically") {
    PropagationProblem pr = storage_problem(Model::full, 5.0);
    pr.record_trajectory = true;
    const StageResult r = propagate(pr, make_state(pr));
    REQUIRE(r.trajectory.has_value());
    const Trajectory& t = *r.trajectory;
    const double d0 = pr.params.delta01;
    double worst = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < t.z.size(); j += 10)
        for (std::size_t n = 0; n < t.tau.size(); n += 5)
            for (std::size_t i = 0; i < t.nodes; i += 7) {
                const cplx r13 = t.r13[(j * t.tau.size() + n) * t.nodes + i];
                const cplx elim = (t.field_at(j, n) + t.r12_at(j, n, i)) / d0;
                worst = std::max(worst, std::abs(r13 - elim));
                scale = std::max(scale, std::abs(r13));
            }
    CHECK(worst < 0.05 * scale);
}

TEST_CASE("reduced and full models agree off resonance") {
    const PropagationProblem f = storage_problem(Model::full, 5.0);
    const PropagationProblem rd = storage_problem(Model::reduced, 5.0);
    const StageResult a = propagate(f, make_state(f));
    const StageResult b = propagate(rd, make_state(rd));
    // stored spin-wave amplitude; its phase carries the dressed precession (Omega/Delta0)^2 Delta~ t
    // and the excited-state group delay that the reduced model leaves out
    double diff = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < a.state.r12.size(); ++k) {
        diff += std::pow(std::abs(a.state.r12[k]) - std::abs(b.state.r12[k]), 2);
        norm += std::norm(b.state.r12[k]);
    }
    CHECK(std::sqrt(diff / norm) < 0.05);
    CHECK(a.output.energy() == doctest::Approx(b.output.energy()).epsilon(0.05));
    const double pa = a.state.population_integral();
    const double pb = b.state.population_integral();
    CHECK(pa == doctest::Approx(pb).epsilon(0.01));
}

TEST_CASE("stage and model guards") {
    const PropagationProblem st = storage_problem(Model::reduced, 2.0, 1.0, 32);
    PropagationProblem rt = st;
    rt.stage = Stage::retrieval;
    rt.input_field = {};
    rt.direction = Direction::backward;
    CHECK_THROWS_AS(propagate(rt, make_state(st)), ConfigError);  // not flipped
    CHECK_THROWS_AS(simulate_storage_full(st), ConfigError);
    CHECK_THROWS_AS(flip_detunings(flip_detunings(make_state(st), 1.0), 1.0), ConfigError);
    CHECK_THROWS_AS(flip_detunings(make_state(st), 0.0), DomainError);

    PropagationProblem near = st;
    near.params.delta01 = near.params.delta02 = 0.5;
    CHECK_THROWS_AS(propagate(near, make_state(near)), DomainError);
}

TEST_CASE("unresolved grids are refused") {
    PropagationProblem coarse_t = storage_problem(Model::full, 2.0, 1.0, 32, 0.5);
    CHECK_THROWS_AS(check_resolution(coarse_t), GridError);

    PropagationProblem uneven = storage_problem(Model::reduced, 2.0, 1.0, 32);
    uneven.grid.tau[3] += 0.01;
    CHECK_THROWS_AS(check_resolution(uneven), GridError);

    PropagationProblem short_z = storage_problem(Model::reduced, 2.0, 1.0, 32);
    short_z.grid.z.back() = 0.8;
    CHECK_THROWS_AS(check_resolution(short_z), GridError);

    PropagationProblem thick = storage_problem(Model::reduced, 400.0, 1.0, 32, 0.05, 10);
    thick.grid.z = uniform_axis(0.0, 1.0, 10);
    CHECK_THROWS_AS(check_resolution(thick), GridError);

    PropagationProblem resampled = storage_problem(Model::reduced, 2.0, 1.0, 32);
    resampled.input_field = gaussian_pulse(uniform_axis(0.0, 40.0, 11), 15.0, 2.5);
    CHECK_THROWS_AS(propagate(resampled, make_state(resampled)), GridError);
}

TEST_CASE("nothing stored, nothing retrieved") {
    for (Model m : {Model::full, Model::reduced}) {
        PropagationProblem rt = storage_problem(m, 3.0, 1.0, 32);
        rt.stage = Stage::retrieval;
        rt.direction = Direction::backward;
        rt.input_field = {};
        const AtomicState s = flip_detunings(make_state(rt), 1.0);
        const StageResult r = propagate(rt, s);
        CHECK(r.output.energy() == 0.0);
    }
}

TEST_CASE("echo efficiency is converged in dt and Z") {
    PipelineSpec coarse = echo_spec(3.0);
    PipelineSpec fine = coarse;
    fine.dt = 0.05;
    fine.z_slices = 600;
    const double a = run_pipeline(coarse).efficiency;
    const double b = run_pipeline(fine).efficiency;
    CHECK(std::abs(a - b) < 0.005 * b);
    const double br = -std::expm1(-3.0);
    CHECK(b == doctest::Approx(br * br).epsilon(0.01));
}

TEST_CASE("backward retrieval beats forward retrieval") {
    auto eff = [](double depth, Direction d, double mismatch) {
        PipelineSpec s = echo_spec(depth);
        s.retrieval_direction = d;
        s.grating_mismatch = mismatch;
        return run_pipeline(s).efficiency;
    };
    // forward readout of a phase-matched grating: re-absorption only, kappa^2 e^-kappa
    const double fwd5 = eff(5.0, Direction::forward, 0.0);
    CHECK(fwd5 == doctest::Approx(25.0 * std::exp(-5.0)).epsilon(0.02));
    CHECK(eff(10.0, Direction::backward, 0.0) / eff(10.0, Direction::forward, 0.0) > 10.0);
    // grating written for the other direction
    CHECK(eff(5.0, Direction::backward, 0.0) / eff(5.0, Direction::forward, 10.0) > 10.0);
}

TEST_CASE("trajectory dump") {
    PropagationProblem pr = storage_problem(Model::full, 2.0, 1.0, 8, 0.1, 6);
    pr.record_trajectory = true;
    const StageResult r = propagate(pr, make_state(pr));
    const std::string path = "trajectory_dump.csv";
    write_trajectory(*r.trajectory, path, {0, 3});
    std::ifstream f(path);
    std::string header, line;
    std::getline(f, header);
    CHECK(header.rfind("tau,Z,re_E,im_E", 0) == 0);
    std::size_t rows = 0, commas = 0;
    while (std::getline(f, line))
        if (!line.empty()) {
            ++rows;
            commas = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
        }
    std::remove(path.c_str());
    CHECK(rows == r.trajectory->tau.size() * r.trajectory->z.size());
    CHECK(commas == static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')));
    CHECK_THROWS_AS(write_trajectory(*r.trajectory, path, {99}), DomainError);
    std::remove(path.c_str());
}
