#include "hgdeblur/solver.hpp"

#include "hgdeblur/signals.hpp"
#include "hgdeblur/stochastic.hpp"

#include <doctest.h>

#include <random>

using namespace hgdeblur;

namespace {

NodalSignal random_signal(const Mesh& mesh, unsigned seed, double mean = 0.0, double sd = 1.0) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist(mean, sd);
    Eigen::VectorXd v(mesh.cells);
    for (int j = 0; j < mesh.cells; ++j) v[j] = dist(gen);
    return NodalSignal(mesh, v);
}

ModelParams solver_params() {
    ModelParams p;
    p.eps = 0.05;
    p.alpha = 1.0;
    p.lambda = 100.0;
    return p;
}

}  // namespace

TEST_CASE("u-step") {
    Mesh mesh(5);
    ModelParams p = solver_params();

    SUBCASE("zero data gives the zero minimizer") {
        NodalSignal u = solve_u_step(NodalSignal::constant(mesh, 1.0), SpectralVector(mesh.cells), p);
        CHECK(u.values.norm() < 1e-14);
    }

    SUBCASE("constant data is nearly but not exactly reproduced") {
        SpectralVector m = forward_apply(NodalSignal::constant(mesh, 1.0), p.s);
        NodalSignal u = solve_u_step(NodalSignal::constant(mesh, 1.0), m, p);
        double err = (u.values.array() - 1.0).abs().maxCoeff();
        CHECK(err < 1e-2);
        CHECK(err > 0.0);  // the mean perturbation of D_q keeps it off exactly one

        // first-order optimality probe in 20 random directions
        double f0 = eval_discrete_objective(u, NodalSignal::constant(mesh, 1.0), m, p).total;
        for (int rep = 0; rep < 20; ++rep) {
            NodalSignal trial(mesh, u.values + 1e-3 * random_signal(mesh, 500 + rep).values);
            CHECK(eval_discrete_objective(trial, NodalSignal::constant(mesh, 1.0), m, p).total >=
                  f0 - 1e-12);
        }
    }

    SUBCASE("finite-difference gradient vanishes at the solution") {
        NodalSignal truth = step_signal().sample(mesh);
        Rng rng(3);
        SpectralVector m = synthesize_measurement(truth, p, rng);
        NodalSignal v = random_signal(mesh, 5, 1.0, 0.2);
        NodalSignal u = solve_u_step(v, m, p);
        double fd_norm = 0.0;
        for (int i = 0; i < mesh.cells; ++i) {
            double h = 1e-6;
            NodalSignal up = u, um = u;
            up.values[i] += h;
            um.values[i] -= h;
            double g = (eval_discrete_objective(up, v, m, p).total -
                        eval_discrete_objective(um, v, m, p).total) /
                       (2 * h);
            fd_norm += g * g;
        }
        fd_norm = std::sqrt(fd_norm);
        double rhs_norm = (p.residual_weight() * measurement_adjoint(mesh, p.s, m)).norm();
        CHECK(fd_norm < 1e-8 * (1.0 + rhs_norm));
    }

    SUBCASE("exactness: no random u beats the solve") {
        NodalSignal truth = step_signal().sample(mesh);
        Rng rng(7);
        SpectralVector m = synthesize_measurement(truth, p, rng);
        NodalSignal v = random_signal(mesh, 11, 1.0, 0.3);
        NodalSignal u = solve_u_step(v, m, p);
        double f0 = eval_discrete_objective(u, v, m, p).total;
        for (int rep = 0; rep < 100; ++rep) {
            NodalSignal trial(mesh, u.values + 0.05 * random_signal(mesh, 600 + rep).values);
            CHECK(eval_discrete_objective(trial, v, m, p).total >= f0 - 1e-12);
        }
    }
}

TEST_CASE("v-step") {
    Mesh mesh(5);
    ModelParams p = solver_params();

    SUBCASE("analytic gradient matches central differences") {
        for (int rep = 0; rep < 10; ++rep) {
            NodalSignal u = random_signal(mesh, 20 + rep);
            NodalSignal v = random_signal(mesh, 40 + rep, 1.0, 0.4);
            Eigen::VectorXd grad = v_objective_gradient(u, v, p);
            Eigen::VectorXd fd(mesh.cells);
            for (int i = 0; i < mesh.cells; ++i) {
                double h = 1e-6 * (1.0 + std::abs(v.values[i]));
                NodalSignal vp = v, vm = v;
                vp.values[i] += h;
                vm.values[i] -= h;
                fd[i] = (v_objective(u, vp, p) - v_objective(u, vm, p)) / (2 * h);
            }
            CHECK((grad - fd).norm() / (1.0 + grad.norm()) < 1e-6);
        }
    }

    SUBCASE("objective never increases and the result improves on the start") {
        NodalSignal u = random_signal(mesh, 60);
        NodalSignal v0 = random_signal(mesh, 61, 1.0, 0.5);
        double before = v_objective(u, v0, p);
        VStepResult res = solve_v_step(u, v0, p);
        CHECK(v_objective(u, res.v, p) <= before + 1e-14);
    }

    SUBCASE("with zero u the iterate approaches the scalar minimizer") {
        ModelParams tight = p;
        tight.inner_max_steps = 4000;
        tight.inner_rel_tol = 1e-15;
        VStepResult res = solve_v_step(NodalSignal::constant(mesh, 0.0),
                                       NodalSignal::constant(mesh, 1.0), tight);
        ScalarMin g = minimize_g(tight.eps);
        CHECK((res.v.values.array() - g.argmin).abs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("alternate minimization") {
    ModelParams p = solver_params();

    SUBCASE("noiseless constant data converges immediately") {
        Mesh mesh(6);
        SpectralVector m = forward_apply(NodalSignal::constant(mesh, 0.8), p.s);
        MapEstimate est = alternate_minimize(m, p);
        CHECK(est.trace.iterates.size() - 1 <= 2);
        CHECK((est.u.values.array() - 0.8).abs().maxCoeff() < 1e-2);
        ScalarMin g = minimize_g(p.eps);
        CHECK((est.v.values.array() - g.argmin).abs().maxCoeff() < 1e-3);
        CHECK(est.trace.stop_reason == StopReason::decrease_below_delta);
    }

    SUBCASE("step data at N=512: wells sit on the true jumps") {
        Mesh mesh(9);
        ModelParams run = p;
        run.eps = 0.01;
        run.lambda = 0.0;  // default 1/sigma^2
        NodalSignal truth = step_signal().sample(mesh);
        Rng rng(11);
        SpectralVector m = synthesize_measurement(truth, run, rng);
        MapEstimate est = alternate_minimize(m, run);
        std::vector<Well> wells = detect_wells(est.v, 0.5);
        REQUIRE(wells.size() == 2);
        CHECK(std::abs(wells[0].position - 0.2) <= 2.0 / mesh.cells);
        CHECK(std::abs(wells[1].position - 0.6) <= 2.0 / mesh.cells);

        double prev = std::numeric_limits<double>::infinity();
        for (const auto& [it, b] : est.trace.iterates) {
            CHECK(b.total <= prev + 1e-10 * (1.0 + std::abs(prev)));
            prev = b.total;
        }
    }

    SUBCASE("post-hoc fold confines v to the band") {
        Mesh mesh(5);
        ModelParams run = p;
        run.eps = 0.02;
        run.alpha = 0.0;  // alpha = 0 drives v far above 1
        run.max_iter = 10;
        run.posthoc_fold = true;
        NodalSignal truth = step_signal().sample(mesh);
        Rng rng(21);
        SpectralVector m = synthesize_measurement(truth, run, rng);
        MapEstimate est = alternate_minimize(m, run);
        CHECK(est.v.values.minCoeff() >= -1e-12);
        CHECK(est.v.values.maxCoeff() <= 1.0 + 30.0 * run.eps + 1e-12);

        run.posthoc_fold = false;
        MapEstimate raw = alternate_minimize(m, run);
        CHECK(raw.v.values.maxCoeff() > 1.0 + 30.0 * run.eps);
    }

    SUBCASE("piecewise-smooth truth yields at most four wells") {
        Mesh mesh(9);
        ModelParams run = p;
        run.eps = 0.01;
        run.lambda = 0.0;  // default 1/sigma^2
        NodalSignal truth = piecewise_smooth_signal().sample(mesh);
        Rng rng(11);
        SpectralVector m = synthesize_measurement(truth, run, rng);
        MapEstimate est = alternate_minimize(m, run);
        std::vector<Well> wells = detect_wells(est.v, 0.5);
        CHECK(wells.size() >= 2);
        CHECK(wells.size() <= 4);
    }

    SUBCASE("custom initialization is honored") {
        Mesh mesh(4);
        SpectralVector m = forward_apply(NodalSignal::constant(mesh, 0.3), p.s);
        ModelParams one_shot = p;
        one_shot.max_iter = 1;
        std::pair<NodalSignal, NodalSignal> init{NodalSignal::constant(mesh, 0.3),
                                                 NodalSignal::constant(mesh, 1.2)};
        MapEstimate est = alternate_minimize(m, one_shot, init);
        CHECK(est.trace.iterates.size() == 2);
        CHECK(est.trace.stop_reason == StopReason::max_iterations);
    }
}

TEST_CASE("Tikhonov baseline") {
    Mesh mesh(5);

    SUBCASE("exact recovery of constants") {
        SpectralVector m = forward_apply(NodalSignal::constant(mesh, 1.0), 0.35);
        NodalSignal u = solve_tikhonov(m, mesh, 3.0);
        CHECK((u.values.array() - 1.0).abs().maxCoeff() < 1e-10);
    }

    SUBCASE("small weight flattens the solution toward a constant") {
        NodalSignal truth = step_signal().sample(mesh);
        SpectralVector m = forward_apply(truth, 0.35);
        NodalSignal u = solve_tikhonov(m, mesh, 1e-6);
        CHECK(u.values.maxCoeff() - u.values.minCoeff() < 1e-3);
    }

    SUBCASE("first-order optimality") {
        NodalSignal truth = step_signal().sample(mesh);
        SpectralVector m = forward_apply(truth, 0.35);
        const double lam = 9.0;
        NodalSignal u = solve_tikhonov(m, mesh, lam);
        auto objective = [&](const NodalSignal& x) {
            SpectralVector ax = forward_apply(x, 0.35);
            return stiffness_quadratic_form(x) + lam * (ax.coeffs - m.coeffs).squaredNorm();
        };
        double fd_norm = 0.0;
        for (int i = 0; i < mesh.cells; ++i) {
            NodalSignal up = u, um = u;
            up.values[i] += 1e-6;
            um.values[i] -= 1e-6;
            double g = (objective(up) - objective(um)) / 2e-6;
            fd_norm += g * g;
        }
        CHECK(std::sqrt(fd_norm) < 1e-7);
        CHECK_THROWS_AS(solve_tikhonov(m, mesh, 0.0), std::invalid_argument);
    }
}

TEST_CASE("Mumford-Shah brute force") {
    Mesh mesh(6);
    const int n = mesh.cells;

    SUBCASE("recovers a representable two-jump step with value near 2") {
        const double a = 0.25 + 0.5 / n, b = 0.75 + 0.5 / n;
        Eigen::VectorXd vals(n);
        for (int j = 0; j < n; ++j) {
            double t = mesh.node(j);
            vals[j] = (t >= a && t < b) ? 1.0 : 0.0;
        }
        SpectralVector m = forward_apply(NodalSignal(mesh, vals), 0.35);
        MsSolution sol = ms_bruteforce(m, mesh, 4000.0, 2, 16);
        REQUIRE(sol.jumps.size() == 2);
        CHECK(sol.jumps[0] == doctest::Approx(0.25));
        CHECK(sol.jumps[1] == doctest::Approx(0.75));
        CHECK(sol.value == doctest::Approx(2.0).epsilon(1e-3));
        CHECK(sol.u.jump_count() == 2);

        SUBCASE("stable under a small noise draw") {
            ModelParams p;
            p.eps = 0.01;
            p.sigma = 1e-4;
            p.kappa = 1.0;
            Rng rng(13);
            NoiseSpec spec{p.sigma, 1.0, 0};
            SpectralVector noisy = m;
            noisy.coeffs += sample_noise(mesh, spec, rng).coeffs;
            MsSolution again = ms_bruteforce(noisy, mesh, 4000.0, 2, 16);
            CHECK(again.jumps == sol.jumps);
        }
    }

    SUBCASE("k_max = 0 reduces exactly to Tikhonov") {
        NodalSignal truth = step_signal().sample(mesh);
        SpectralVector m = forward_apply(truth, 0.35);
        MsSolution sol = ms_bruteforce(m, mesh, 50.0, 0, 16);
        NodalSignal tik = solve_tikhonov(m, mesh, 50.0);
        CHECK((sol.nodal.values - tik.values).norm() < 1e-12);
        CHECK(sol.jumps.empty());
    }

    SUBCASE("preconditions") {
        SpectralVector m(mesh.cells);
        CHECK_THROWS_AS(ms_bruteforce(m, Mesh(8), 1.0, 2, 16), std::invalid_argument);
        CHECK_THROWS_AS(ms_bruteforce(m, mesh, 1.0, 4, 16), std::invalid_argument);
        CHECK_THROWS_AS(ms_bruteforce(m, mesh, 1.0, 2, 64), std::invalid_argument);
    }
}

TEST_CASE("alpha zero divergence table") {
    std::vector<DivergenceRow> rows = diverge_alpha0(6, 12, 0.01);
    REQUIRE(rows.size() == 7);
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].value < rows[i - 1].value);
        CHECK(rows[i].s_star > rows[i - 1].s_star);
        CHECK(std::abs(rows[i].cells / rows[i].value) <
              std::abs(rows[i - 1].cells / rows[i - 1].value));
    }
    CHECK_THROWS_AS(diverge_alpha0(8, 6, 0.01), std::invalid_argument);
}

TEST_CASE("well detection") {
    Mesh mesh(4);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(mesh.cells);
    v[3] = 0.2;
    v[4] = 0.1;
    v[11] = 0.4;
    std::vector<Well> wells = detect_wells(NodalSignal(mesh, v), 0.5);
    REQUIRE(wells.size() == 2);
    CHECK(wells[0].position == doctest::Approx(4.0 / 16));
    CHECK(wells[0].depth == doctest::Approx(0.1));
    CHECK(wells[1].position == doctest::Approx(11.0 / 16));

    SUBCASE("wrap-around component is one well") {
        Eigen::VectorXd w = Eigen::VectorXd::Ones(mesh.cells);
        w[15] = 0.3;
        w[0] = 0.2;
        std::vector<Well> ww = detect_wells(NodalSignal(mesh, w), 0.5);
        REQUIRE(ww.size() == 1);
        CHECK(ww[0].position == 0.0);
    }

    SUBCASE("no wells above threshold") {
        CHECK(detect_wells(NodalSignal::constant(mesh, 0.9), 0.5).empty());
    }
}
