#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "ramanecho/errors.hpp"
#include "ramanecho/str_verifier.hpp"

using namespace ramanecho;

namespace {

struct Case {
    PhysicalParams p;
    StrSolution storage;
    double tau_flip = 0.0;
};

Case record(double dt, std::size_t nz, int nodes, RamanLine line = GaussianLine{1.0}, double depth = 3.0) {
    BroadeningSpec b;
    b.raman = line;
    b.raman_quadrature.nodes = nodes;
    Case c;
    c.p.delta01 = c.p.delta02 = 20.0;
    c.p.optical_depth = depth;
    c.p = with_derived_beta(c.p, b);
    PropagationProblem pr;
    pr.params = c.p;
    pr.broadening = b;
    pr.model = Model::reduced;
    pr.control = ControlSchedule::constant(1.0);
    const double w = 2.5;
    const auto tau = uniform_axis(0.0, 12.0 * w, static_cast<std::size_t>(std::llround(12.0 * w / dt)) + 1);
    pr.grid = make_grid(b, tau, uniform_axis(0.0, 1.0, nz));
    pr.input_field = gaussian_pulse(tau, 6.0 * w, w);
    c.storage = record_storage(pr);
    c.tau_flip = tau.back();
    return c;
}

StrTransform transform(const Case& c, double eta, StrForm form = StrForm::first) {
    StrTransform t;
    t.eta = eta;
    t.form = form;
    t.tau_flip = c.tau_flip;
    return t;
}

PhysicalParams with_eta(PhysicalParams p, double eta) {
    p.eta = p.eta_prime = eta;
    return p;
}

// retrieval couplings satisfying the coupling condition of the first form
PhysicalParams retrieval(const Case& c, double eta) { return str_retrieval_params(with_eta(c.p, eta), transform(c, eta)); }

}  // namespace

TEST_CASE("exact image solves the retrieval equations") {
    const Case c = record(0.02, 200, 24);
    for (double eta : {0.5, 2.0}) {
        const StrResidual r = str_residual(apply_str(c.storage, transform(c, eta)), retrieval(c, eta));
        CHECK(r.total < 1e-4);
        CHECK(r.total == doctest::Approx(std::hypot(r.atom, r.field)));
    }
}

TEST_CASE("collocation residual converges at second order") {
    const double eta = 2.0;
    const Case coarse = record(0.08, 40, 24);
    const Case fine = record(0.04, 80, 24);
    const double a = str_residual(apply_str(coarse.storage, transform(coarse, eta)), retrieval(coarse, eta)).total;
    const double b = str_residual(apply_str(fine.storage, transform(fine, eta)), retrieval(fine, eta)).total;
    CHECK(a / b > 3.0);
    CHECK(a / b < 5.0);
}

TEST_CASE("scheme residual vanishes to rounding") {
    const Case c = record(0.1, 30, 16);
    for (double eta : {0.5, 2.0})
        CHECK(str_residual(apply_str(c.storage, transform(c, eta)), retrieval(c, eta), ResidualKind::scheme).total < 1e-10);
}

TEST_CASE("every map is necessary") {
    const Case c = record(0.04, 60, 24);
    for (ResidualKind kind : {ResidualKind::collocation, ResidualKind::scheme})
        for (double eta : {0.5, 2.0}) {
            const auto probes = violation_probes(c.storage, with_eta(c.p, eta), transform(c, eta), 0.1, kind);
            REQUIRE(probes.size() == 6);
            CHECK(probes.front().condition == "exact");
            CHECK(probes.front().ratio == 1.0);
            for (std::size_t k = 1; k < probes.size(); ++k) {
                INFO(probes[k].condition);
                CHECK(probes[k].ratio >= 10.0);
            }
        }
}

TEST_CASE("unit ratio reduces to plain inversion") {
    const Case c = record(0.04, 60, 24);
    const StrSolution str = apply_str(c.storage, transform(c, 1.0));
    const StrSolution crib = apply_crib(c.storage, c.tau_flip);
    for (ResidualKind kind : {ResidualKind::collocation, ResidualKind::scheme}) {
        const double a = str_residual(str, retrieval(c, 1.0), kind).total;
        const double b = str_residual(crib, retrieval(c, 1.0), kind).total;
        CHECK(std::abs(a - b) < 1e-10);
    }
}

TEST_CASE("inverse transform restores the solution") {
    const Case c = record(0.1, 20, 8);
    for (StrForm f : {StrForm::first, StrForm::second, StrForm::third}) {
        const StrTransform t = transform(c, 2.0, f);
        const StrSolution back = apply_str(apply_str(c.storage, t), t.inverse());
        const Trajectory& a = c.storage.traj;
        const Trajectory& b = back.traj;
        CHECK(back.stage == 1);
        CHECK(back.direction == Direction::forward);
        REQUIRE(a.tau.size() == b.tau.size());
        double dt = 0.0, df = 0.0, dr = 0.0, dd = 0.0;
        for (std::size_t n = 0; n < a.tau.size(); ++n) dt = std::max(dt, std::abs(a.tau[n] - b.tau[n]));
        for (std::size_t k = 0; k < a.field.size(); ++k) df = std::max(df, std::abs(a.field[k] - b.field[k]));
        for (std::size_t k = 0; k < a.r12.size(); ++k) dr = std::max(dr, std::abs(a.r12[k] - b.r12[k]));
        for (std::size_t k = 0; k < back.detuning.size(); ++k)
            dd = std::max(dd, std::abs(back.detuning[k] - c.storage.detuning[k]));
        CHECK(dt < 1e-12);
        CHECK(df < 1e-14);
        CHECK(dr < 1e-14);
        CHECK(dd < 1e-14);
    }
}

TEST_CASE("the three forms are equivalent") {
    const Case c = record(0.04, 60, 24);
    const double eta = 2.0;
    const StrSolution first = apply_str(c.storage, transform(c, eta, StrForm::first));
    for (StrForm f : {StrForm::second, StrForm::third}) {
        const StrTransform t = transform(c, eta, f);
        const StrSolution other = apply_str(c.storage, t);
        double d = 0.0;
        for (std::size_t k = 0; k < first.traj.field.size(); ++k)
            d = std::max(d, std::abs(std::abs(first.traj.field[k]) - std::abs(other.traj.field[k])));
        CHECK(d < 1e-15);
        const PhysicalParams pr = str_retrieval_params(with_eta(c.p, eta), t);
        CHECK(str_residual(other, pr).total < 1e-3);
        // the wrong sign of the coupling is not a solution
        const PhysicalParams wrong = str_retrieval_params(with_eta(c.p, eta), transform(c, eta, StrForm::first));
        if (f == StrForm::second) CHECK(str_residual(other, wrong).total > 0.1);
    }
    const StrTransform t2 = transform(c, eta, StrForm::second);
    CHECK(str_retrieval_params(c.p, t2).delta02 < 0.0);
    CHECK(t2.coupling_ratio() == doctest::Approx(-std::sqrt(eta)));
    CHECK(transform(c, eta, StrForm::third).coherence_sign() == -1.0);
    CHECK(transform(c, eta, StrForm::first).field_scale() == doctest::Approx(-std::sqrt(eta)));
}

TEST_CASE("coupling condition in the retrieval parameters") {
    PhysicalParams p;
    p.delta01 = 20.0;
    p.delta02 = 30.0;
    StrTransform t;
    t.eta = 2.0;
    const PhysicalParams r = str_retrieval_params(p, t);
    CHECK(r.omega2_rabi / r.delta02 == doctest::Approx(std::sqrt(2.0) / 20.0));
    CHECK(r.delta02 == 30.0);
    t.eta = -1.0;
    CHECK_THROWS_AS(str_retrieval_params(p, t), DomainError);
}

TEST_CASE("gradient echo memory flips its gradient") {
    BroadeningSpec b;
    b.raman = LongitudinalGradient{0.5, 0.5};
    const BroadeningSpec f = gem_gradient_flip(b, 2.0);
    CHECK(std::get<LongitudinalGradient>(f.raman).chi == doctest::Approx(-1.0));
    CHECK(std::get<LongitudinalGradient>(f.raman).z_center == 0.5);
    BroadeningSpec g;
    CHECK_THROWS_AS(gem_gradient_flip(g, 2.0), ConfigError);

    const Case c = record(0.04, 200, 1, LongitudinalGradient{0.5, 0.5}, 2.0);
    const double eta = 2.0;
    const StrSolution img = apply_str(c.storage, transform(c, eta));
    // per-slice detuning of the image is that of the flipped gradient
    const double chi2 = std::get<LongitudinalGradient>(gem_gradient_flip(BroadeningSpec{NoLine{}, LongitudinalGradient{0.5, 0.5}}, eta).raman).chi;
    for (std::size_t j = 0; j < img.traj.z.size(); j += 13)
        CHECK(img.detuning[j] == doctest::Approx(chi2 * (img.traj.z[j] - 0.5)));
    CHECK(str_residual(img, retrieval(c, eta)).total < 1e-3);
    const auto probes = violation_probes(c.storage, with_eta(c.p, eta), transform(c, eta));
    for (std::size_t k = 1; k < probes.size(); ++k) CHECK(probes[k].ratio >= 10.0);
}

TEST_CASE("waveform fidelity") {
    const auto t1 = uniform_axis(0.0, 40.0, 4001);
    FieldEnvelope in = gaussian_pulse(t1, 15.0, 2.0);
    const FieldEnvelope tail = gaussian_pulse(t1, 18.0, 1.0, 0.6);
    for (std::size_t i = 0; i < t1.size(); ++i) in.samples[i] += tail.samples[i];
    const double eta = 2.0, tau_e = 30.0;
    // exact scaled, reversed image E1(t_in - eta (t - tau_e))
    const auto t2 = uniform_axis(20.0, 40.0, 2001);
    FieldEnvelope img;
    img.axis = t2;
    FieldEnvelope fwd = img;
    for (double t : t2) {
        img.samples.push_back(cplx(0.0, -0.7) * sample_at(in, 15.0 - eta * (t - tau_e)));
        fwd.samples.push_back(sample_at(in, 15.0 + eta * (t - tau_e)));
    }
    CHECK(waveform_fidelity(in, img, eta, tau_e, 15.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(waveform_fidelity(in, fwd, eta, tau_e, 15.0) < 0.9);
    FieldEnvelope zero = img;
    for (auto& v : zero.samples) v = 0.0;
    CHECK_THROWS_AS(waveform_fidelity(in, zero, eta, tau_e, 15.0), DomainError);
}

TEST_CASE("mapping needs a uniform time axis") {
    Case c = record(0.1, 10, 4);
    c.storage.traj.tau[5] += 0.01;
    CHECK_THROWS_AS(apply_str(c.storage, transform(c, 2.0)), GridError);
    StrTransform bad = transform(c, 2.0);
    bad.time_factor = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("check configuration and report") {
    Config cfg;
    cfg.set_assignment("etas=0.5,1,2");
    cfg.set_assignment("form=third");
    cfg.set_assignment("residual=scheme");
    cfg.set_assignment("dt=0.1");
    cfg.set_assignment("z_slices=30");
    cfg.set_assignment("run_pipeline=false");
    cfg.set_assignment("raman_nodes=16");
    cfg.set_assignment("optical_depth=3");
    const StrCheckSpec s = load_str_check_spec(cfg);
    CHECK(s.etas == std::vector<double>{0.5, 1.0, 2.0});
    CHECK(s.form == StrForm::third);
    CHECK(s.kind == ResidualKind::scheme);
    const StrReport r = run_str_check(s);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.necessity_holds(10.0));
    std::ostringstream os;
    write_str_report_csv(r, os);
    CHECK(os.str().find("eta,condition,atom,field,total,ratio,fidelity,fwhm_ratio") != std::string::npos);

    Config bad;
    bad.set_assignment("form=fourth");
    CHECK_THROWS_AS(load_str_check_spec(bad), ConfigError);
    Config bad_eta;
    bad_eta.set_assignment("etas=1,-2");
    CHECK_THROWS_AS(load_str_check_spec(bad_eta), ConfigError);
}
