#include "hgdeblur/functionals.hpp"

#include "oracle.hpp"

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

}  // namespace

TEST_CASE("discrete objective breakdown") {
    SUBCASE("two-cell example with flat inputs") {
        Mesh mesh(1);
        ModelParams p;
        p.eps = 0.1;
        p.alpha = 1.0;
        p.lambda = 1.0;
        ObjectiveBreakdown b = eval_discrete_objective(NodalSignal::constant(mesh, 0.0),
                                                       NodalSignal::constant(mesh, 1.0),
                                                       SpectralVector(2), p);
        CHECK(b.log_term == doctest::Approx(-std::log(1.01)).epsilon(1e-12));
        CHECK(b.log_term == doctest::Approx(-0.00995033).epsilon(1e-5));
        CHECK(b.grad_term == 0.0);
        CHECK(b.v_smooth == 0.0);
        CHECK(b.v_fidelity == 0.0);
        CHECK(b.residual == 0.0);
        CHECK(b.total == b.log_term);
    }

    SUBCASE("zero u and unit v leave only the log term for any size") {
        for (int n : {2, 4}) {
            Mesh mesh(n);
            ModelParams p;
            p.eps = 0.03;
            p.alpha = 2.0;
            p.lambda = 5.0;
            ObjectiveBreakdown b = eval_discrete_objective(NodalSignal::constant(mesh, 0.0),
                                                           NodalSignal::constant(mesh, 1.0),
                                                           SpectralVector(mesh.cells), p);
            CHECK(b.grad_term == 0.0);
            CHECK(b.v_smooth == 0.0);
            CHECK(b.v_fidelity == 0.0);
            CHECK(b.residual == 0.0);
        }
    }

    SUBCASE("parts sum to the total and quadratic parts are nonnegative") {
        Mesh mesh(4);
        ModelParams p;
        p.eps = 0.05;
        p.lambda = 3.0;
        NodalSignal u = random_signal(mesh, 1);
        NodalSignal v = random_signal(mesh, 2, 1.0, 0.5);
        SpectralVector m(mesh.cells);
        m.at(0) = 0.4;
        m.at(3) = {0.1, 0.2};
        m.at(-3) = {0.1, -0.2};
        ObjectiveBreakdown b = eval_discrete_objective(u, v, m, p);
        CHECK(b.total ==
              doctest::Approx(b.log_term + b.grad_term + b.v_smooth + b.v_fidelity + b.residual));
        CHECK(b.grad_term >= 0.0);
        CHECK(b.v_smooth >= 0.0);
        CHECK(b.v_fidelity >= 0.0);
        CHECK(b.residual >= 0.0);
    }

    SUBCASE("mesh mismatch is rejected") {
        ModelParams p;
        CHECK_THROWS_AS(eval_discrete_objective(NodalSignal::constant(Mesh(2), 0.0),
                                                NodalSignal::constant(Mesh(3), 1.0),
                                                SpectralVector(4), p),
                        std::invalid_argument);
        CHECK_THROWS_AS(eval_discrete_objective(NodalSignal::constant(Mesh(2), 0.0),
                                                NodalSignal::constant(Mesh(2), 1.0),
                                                SpectralVector(8), p),
                        std::invalid_argument);
    }

    SUBCASE("alternative log weight changes only the log term") {
        Mesh mesh(3);
        ModelParams p;
        p.eps = 0.05;
        p.alpha = 2.0;
        p.lambda = 1.0;
        NodalSignal u = random_signal(mesh, 3);
        NodalSignal v = random_signal(mesh, 4, 1.0, 0.3);
        SpectralVector m(mesh.cells);
        ObjectiveBreakdown plain = eval_discrete_objective(u, v, m, p);
        p.alt_log_weight = true;
        ObjectiveBreakdown alt = eval_discrete_objective(u, v, m, p);
        CHECK(alt.grad_term == plain.grad_term);
        CHECK(alt.v_smooth == plain.v_smooth);
        // N^(alpha-1) / N^(-alpha) = N^(2 alpha - 1) = 8^3
        CHECK(alt.log_term == doctest::Approx(plain.log_term * 512.0).epsilon(1e-12));
    }
}

TEST_CASE("Ambrosio-Tortorelli functional") {
    Mesh mesh(3);
    const double eps = 0.08;

    CHECK(eval_AT(NodalSignal::constant(mesh, 2.2), NodalSignal::constant(mesh, 1.0), eps) ==
          doctest::Approx(0.0));
    CHECK(eval_AT(NodalSignal::constant(mesh, 0.0), NodalSignal::constant(mesh, 0.0), eps) ==
          doctest::Approx(1.0 / (4.0 * eps)).epsilon(1e-13));

    SUBCASE("matches dense quadrature on random inputs") {
        for (int rep = 0; rep < 5; ++rep) {
            NodalSignal u = random_signal(mesh, 10 + rep);
            NodalSignal v = random_signal(mesh, 20 + rep, 0.7, 0.5);
            double quad = oracle::integrate_circle(
                [&](double t) {
                    int c = std::min(static_cast<int>(t * mesh.cells), mesh.cells - 1);
                    double du = mesh.cells * (u.values[(c + 1) % mesh.cells] - u.values[c]);
                    double dv = mesh.cells * (v.values[(c + 1) % mesh.cells] - v.values[c]);
                    double vt = v.at(t);
                    return (eps * eps + vt * vt) * du * du + eps * dv * dv +
                           (1.0 - vt) * (1.0 - vt) / (4.0 * eps);
                },
                mesh.cells);
            CHECK(eval_AT(u, v, eps) == doctest::Approx(quad).epsilon(1e-10));
        }
    }
}

TEST_CASE("auxiliary operators L and S") {
    Mesh mesh(3);
    const double eps = 0.07, q = 2.0;

    CHECK(eval_L(NodalSignal::constant(mesh, 1.0), eps) ==
          doctest::Approx(-std::log(1.0 + eps * eps)).epsilon(1e-12));
    CHECK(eval_S(NodalSignal::constant(mesh, 0.0), random_signal(mesh, 30), eps, q) ==
          doctest::Approx(0.0));

    SUBCASE("the identity AT + S equals the perturbed-derivative form") {
        for (int rep = 0; rep < 8; ++rep) {
            NodalSignal u = random_signal(mesh, 40 + rep);
            NodalSignal v = random_signal(mesh, 50 + rep, 0.8, 0.6);
            double ubar = u.integral();
            double combined = oracle::integrate_circle(
                [&](double t) {
                    int c = std::min(static_cast<int>(t * mesh.cells), mesh.cells - 1);
                    double du = mesh.cells * (u.values[(c + 1) % mesh.cells] - u.values[c]) +
                                std::pow(eps, q) * ubar;
                    double dv = mesh.cells * (v.values[(c + 1) % mesh.cells] - v.values[c]);
                    double vt = v.at(t);
                    return (eps * eps + vt * vt) * du * du + eps * dv * dv +
                           (1.0 - vt) * (1.0 - vt) / (4.0 * eps);
                },
                mesh.cells);
            CHECK(eval_AT(u, v, eps) + eval_S(u, v, eps, q) ==
                  doctest::Approx(combined).epsilon(1e-10));
        }
    }

    SUBCASE("L matches quadrature of the log integrand") {
        NodalSignal v = random_signal(mesh, 60, 1.0, 0.4);
        double quad = oracle::integrate_circle(
            [&](double t) {
                double vt = v.at(t);
                return -std::log(eps * eps + vt * vt);
            },
            mesh.cells);
        CHECK(eval_L(v, eps) == doctest::Approx(quad).epsilon(1e-9));
    }
}

TEST_CASE("Mumford-Shah evaluation") {
    SUBCASE("constants have zero value") {
        PiecewisePolySignal c =
            PiecewisePolySignal::from_function({0.0}, [](double) { return 3.0; }, 16);
        CHECK(eval_MS(c) == doctest::Approx(0.0));
        CHECK(c.jump_count() == 0);
    }

    SUBCASE("indicator of the half circle") {
        PiecewisePolySignal ind = PiecewisePolySignal::from_function(
            {0.0, 0.5}, [](double t) { return t < 0.5 ? 1.0 : 0.0; }, 16);
        CHECK(ind.jump_count() == 2);
        CHECK(eval_MS(ind) == doctest::Approx(2.0));
    }

    SUBCASE("sawtooth: unit slope energy plus the wrap jump") {
        PiecewisePolySignal saw =
            PiecewisePolySignal::from_function({0.0}, [](double t) { return t; }, 64);
        CHECK(saw.jump_count() == 1);
        CHECK(eval_MS(saw) == doctest::Approx(2.0).epsilon(1e-9));
    }

    SUBCASE("residual term uses the piecewise Fourier expansion") {
        PiecewisePolySignal ind = PiecewisePolySignal::from_function(
            {0.0, 0.5}, [](double t) { return t < 0.5 ? 1.0 : 0.0; }, 32);
        SpectralVector am = forward_apply(ind.fourier(8), 0.35);
        // matching measurement: only the jump count remains
        CHECK(eval_MS(ind, 7.0, &am, 0.35) == doctest::Approx(2.0).epsilon(1e-10));
        SpectralVector off(8);
        off.at(0) = 1.0;
        CHECK(eval_MS(ind, 7.0, &off, 0.35) > 2.0);
    }
}

TEST_CASE("piecewise signal Fourier coefficients match quadrature") {
    PiecewisePolySignal sig = PiecewisePolySignal::from_function(
        {0.1, 0.6}, [](double t) { return (t >= 0.1 && t < 0.6) ? 1.0 + t : -0.5; }, 48);
    SpectralVector f = sig.fourier(6);
    for (int j : {0, 1, 3, 6}) {
        auto piece = [&](double a, double b) {
            return oracle::integrate_complex(
                [&](double t) {
                    double phase = -2.0 * M_PI * j * t;
                    return sig.at(t) * std::complex<double>(std::cos(phase), std::sin(phase));
                },
                a, b);
        };
        std::complex<double> quad = piece(0.0, 0.1) + piece(0.1, 0.6) + piece(0.6, 1.0);
        CHECK(std::abs(f.at(j) - quad) < 1e-8);
        CHECK(std::abs(f.at(-j) - std::conj(quad)) < 1e-8);
    }
}

TEST_CASE("folding") {
    Mesh mesh(3);

    SUBCASE("constant above the fold reflects down") {
        Polyline f = fold(NodalSignal::constant(mesh, 1.5), 1.0);
        for (double v : f.value) CHECK(v == doctest::Approx(0.5));
    }

    SUBCASE("negative constant reflects up") {
        Polyline f = fold(NodalSignal::constant(mesh, -0.3), 1.0);
        for (double v : f.value) CHECK(v == doctest::Approx(0.3));
    }

    SUBCASE("identity inside the band") {
        Eigen::VectorXd vals(mesh.cells);
        for (int j = 0; j < mesh.cells; ++j) vals[j] = 0.1 + 0.08 * j;
        NodalSignal v(mesh, vals);
        Polyline f = fold(v, 1.0);
        for (int i = 0; i < f.segments(); ++i)
            CHECK(f.at(f.t[i]) == doctest::Approx(v.at(f.t[i])));
        CHECK(f.segments() == mesh.cells);  // no crossings, no refinement
    }

    SUBCASE("rejects nonpositive radius") {
        CHECK_THROWS_AS(fold(NodalSignal::constant(mesh, 1.0), 0.0), std::invalid_argument);
    }

    SUBCASE("crossings become exact breakpoints and energy is preserved") {
        Eigen::VectorXd vals(mesh.cells);
        vals << 0.5, 2.5, -1.2, 0.7, 3.1, 0.2, -0.4, 1.8;
        NodalSignal v(mesh, vals);
        Polyline f = fold(v, 1.0);
        CHECK(f.segments() > mesh.cells);
        for (double val : f.value) {
            CHECK(val >= -1e-15);
            CHECK(val <= 1.0 + 1e-15);
        }
        CHECK(dirichlet_energy(f) ==
              doctest::Approx(stiffness_quadratic_form(v)).epsilon(1e-12));
    }

    SUBCASE("band fold maps into [0, 1+30 eps] and fixes the band") {
        const double eps = 0.05;
        Eigen::VectorXd vals(mesh.cells);
        vals << 0.5, 4.0, -2.0, 1.2, 0.9, 1.0 + 30.0 * eps, -0.1, 2.2;
        NodalSignal v(mesh, vals);
        Polyline w = fold_to_band(v, eps);
        for (double val : w.value) {
            CHECK(val >= -1e-14);
            CHECK(val <= 1.0 + 30.0 * eps + 1e-14);
        }
        CHECK(w.at(0.0) == doctest::Approx(0.5));  // inside the band: unchanged
    }
}

TEST_CASE("scalar potentials") {
    SUBCASE("minimizer location and value against a grid search") {
        for (double eps : {0.1, 0.01}) {
            ScalarMin m = minimize_g(eps);
            auto [gx, gv] =
                oracle::grid_minimize([eps](double t) { return g_eps(t, eps); }, 0.2, 3.0);
            CHECK(m.argmin == doctest::Approx(gx).epsilon(1e-6));
            CHECK(m.value == doctest::Approx(gv).epsilon(1e-10));
        }
    }

    SUBCASE("minimizer bounds") {
        ScalarMin m = minimize_g(0.01);
        CHECK(m.argmin >= 1.0);
        CHECK(m.argmin <= 1.0 + 30.0 * 0.01);
        CHECK(m.argmin <= 0.5 * (1.0 + std::sqrt(1.0 + 16.0 * 0.01)) + 1e-9);
        CHECK(m.value <= g_eps(1.0, 0.01));
    }

    SUBCASE("sign structure") {
        for (double t : {0.0, 0.3, 0.9}) CHECK(g_eps(t, 0.05) <= g_eps(-t, 0.05));
        CHECK(g_eps(0.5, 0.05) != g_eps(-0.5, 0.05));
    }
}

TEST_CASE("G functional and g_N minimization") {
    SUBCASE("upper-bound witness in closed form") {
        for (int n : {3, 5}) {
            Mesh mesh(n);
            for (double eps : {0.02, 0.005}) {
                for (double b : {1.0, 4.0}) {
                    double w = 1.0 + std::sqrt(eps);
                    double expected = -mesh.cells * std::log(eps * eps + w * w) + b / 4.0;
                    CHECK(eval_G(NodalSignal::constant(mesh, w), b, eps) ==
                          doctest::Approx(expected).epsilon(1e-12));
                }
            }
        }
    }

    SUBCASE("frozen minimum at N=1024, eps=0.01") {
        ScalarMin m = min_gN(1024, 0.01);
        CHECK(m.argmin == doctest::Approx(6.9194949).epsilon(1e-5));
        CHECK(m.value == doctest::Approx(-3085.5256).epsilon(1e-6));
        auto [gx, gv] = oracle::grid_minimize(
            [](double s) {
                return -1024.0 * std::log(1e-4 + s * s) + (1.0 - s) * (1.0 - s) / 0.04;
            },
            1.0, 50.0);
        CHECK(m.argmin == doctest::Approx(gx).epsilon(1e-6));
        CHECK(m.value == doctest::Approx(gv).epsilon(1e-10));
    }

    SUBCASE("values strictly decreasing and unbounded below in N") {
        double prev = 0.0;
        for (int n = 6; n <= 14; ++n) {
            ScalarMin m = min_gN(1 << n, 0.01);
            CHECK(m.value < prev);
            prev = m.value;
        }
        CHECK(prev < -9e4);
    }
}

TEST_CASE("polyline basics") {
    Polyline p;
    p.t = {0.0, 0.25, 0.5};
    p.value = {1.0, 2.0, 0.0};
    CHECK(p.at(0.25) == 2.0);
    CHECK(p.at(0.125) == doctest::Approx(1.5));
    CHECK(p.at(0.75) == doctest::Approx(0.5));  // wrapping segment back to value 1
    CHECK(p.segment_length(2) == doctest::Approx(0.5));
    // slopes 4, -8, 2 over lengths 1/4, 1/4, 1/2
    CHECK(dirichlet_energy(p) == doctest::Approx(4.0 + 16.0 + 2.0));
}
