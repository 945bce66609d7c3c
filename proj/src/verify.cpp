#include "hgdeblur/verify.hpp"

#include "hgdeblur/experiment.hpp"
#include "hgdeblur/grid_ops.hpp"
#include "hgdeblur/signals.hpp"
#include "hgdeblur/solver.hpp"
#include "hgdeblur/stochastic.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace hgdeblur::verify {

namespace {

// 16-point Gauss-Legendre on [0,1]
constexpr int kGL = 16;
constexpr double kGLx[kGL / 2] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                  0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                  0.9445750230732326, 0.9894009349916499};
constexpr double kGLw[kGL / 2] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                  0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                  0.0622535239386479, 0.0271524594117541};

double integrate_interval(const std::function<double(double)>& f, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < kGL / 2; ++i) {
        acc += kGLw[i] * (f(mid - half * kGLx[i]) + f(mid + half * kGLx[i]));
    }
    return acc * half;
}

// Quadrature over the circle respecting the mesh cells (integrands are only
// piecewise smooth); `sub` Gauss panels per cell.
double integrate_cells(int cells, int sub, const std::function<double(double)>& f) {
    double acc = 0.0;
    for (int j = 0; j < cells; ++j) {
        for (int k = 0; k < sub; ++k) {
            double a = (j + static_cast<double>(k) / sub) / cells;
            double b = (j + static_cast<double>(k + 1) / sub) / cells;
            acc += integrate_interval(f, a, b);
        }
    }
    return acc;
}

std::string fmt(double x) {
    std::ostringstream ss;
    ss.precision(6);
    ss << x;
    return ss.str();
}

NodalSignal random_nodal(const Mesh& mesh, Rng& rng, double mean = 0.0, double scale = 1.0) {
    Eigen::VectorXd v(mesh.cells);
    for (int j = 0; j < mesh.cells; ++j) v[j] = mean + scale * rng.normal();
    return NodalSignal(mesh, v);
}

// Gradient descent on G_{eps,n}(v, b) with Armijo backtracking.
NodalSignal descend_G(NodalSignal v, double b, double eps, int steps) {
    const Mesh mesh = v.mesh;
    const int n = mesh.cells;
    double value = eval_G(v, b, eps);
    for (int it = 0; it < steps; ++it) {
        CellSignal c = cell_average(v);
        Eigen::VectorXd cell_term(n);
        for (int j = 0; j < n; ++j)
            cell_term[j] = -c.values[j] / (eps * eps + c.values[j] * c.values[j]);
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < n; ++j) {
            grad[j] += cell_term[j];
            grad[(j + 1) % n] += cell_term[j];
        }
        Eigen::VectorXd one_minus_v = Eigen::VectorXd::Ones(n) - v.values;
        grad -= (b / (2.0 * eps)) * apply_mass(mesh, one_minus_v);

        double gnorm2 = grad.squaredNorm();
        if (gnorm2 == 0.0) break;
        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            NodalSignal trial(mesh, v.values - t * grad);
            double tv = eval_G(trial, b, eps);
            if (tv <= value - 1e-4 * t * gnorm2) {
                v = std::move(trial);
                value = tv;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
    }
    return v;
}

void push(std::vector<PropertyResult>& out, const std::string& name, bool pass,
          const std::string& detail) {
    out.push_back({name, pass, detail});
}

}  // namespace

std::vector<PropertyResult> grid_properties(const Options& opt) {
    std::vector<PropertyResult> out;
    Rng rng(opt.seed);

    {  // dq invertibility: solve then reapply, plus a singular-value floor
        double worst = 0.0, min_sv = 1e300;
        for (int n : {2, 4, 6}) {
            for (double eps : {0.1, 0.01}) {
                for (double q : {1.5, 2.0}) {
                    Mesh mesh(n);
                    Eigen::MatrixXd d = dq_matrix(mesh, eps, q);
                    Eigen::VectorXd f(mesh.cells);
                    for (int j = 0; j < mesh.cells; ++j) f[j] = rng.normal();
                    Eigen::VectorXd u = d.fullPivLu().solve(f);
                    CellSignal back = dq_apply(NodalSignal(mesh, u), eps, q);
                    worst = std::max(worst, (back.values - f).norm() / f.norm());
                    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d);
                    min_sv = std::min(min_sv, svd.singularValues().minCoeff());
                }
            }
        }
        push(out, "grid.dq-invertibility", worst < 1e-10 && min_sv > 0.0,
             "max solve residual " + fmt(worst) + ", min singular value " + fmt(min_sv));
    }

    {  // projection consistency: error halves per level
        auto smooth = [](double t) {
            return std::sin(2.0 * M_PI * t) + 0.3 * std::cos(4.0 * M_PI * t);
        };
        std::vector<double> errs;
        for (int n = 4; n <= 8; ++n) {
            Mesh mesh(n);
            Eigen::VectorXd vals(mesh.cells);
            for (int j = 0; j < mesh.cells; ++j) vals[j] = smooth(mesh.node(j));
            CellSignal proj = cell_average(NodalSignal(mesh, vals));
            double err2 = integrate_cells(mesh.cells, 4, [&](double t) {
                int cell = std::min(static_cast<int>(t * mesh.cells), mesh.cells - 1);
                double d = proj.values[cell] - smooth(t);
                return d * d;
            });
            errs.push_back(std::sqrt(err2));
        }
        bool ok = true;
        double worst_ratio = 0.0;
        for (size_t i = 1; i < errs.size(); ++i) {
            double ratio = errs[i - 1] / errs[i];
            worst_ratio = std::max(worst_ratio, std::abs(ratio - 2.0));
            ok = ok && ratio > 1.7 && ratio < 2.3;
        }
        push(out, "grid.projection-consistency", ok,
             "per-level error ratios within " + fmt(worst_ratio) + " of 2");
    }

    {  // Bessel: truncated PL Fourier series never exceeds the L2 norm
        bool ok = true;
        double worst = -1e300;
        for (int n : {3, 5, 7}) {
            Mesh mesh(n);
            for (int rep = 0; rep < 20; ++rep) {
                NodalSignal u = random_nodal(mesh, rng);
                double lhs = pl_fourier(u).squared_norm();
                double rhs = mass_quadratic_form(u);
                worst = std::max(worst, lhs - rhs);
                ok = ok && lhs <= rhs + 1e-12 * (1.0 + rhs);
            }
        }
        push(out, "grid.parseval-bessel", ok, "max (series - norm) = " + fmt(worst));
    }

    {  // circulant structure, row sums, vanishing |j| = N rows
        Mesh mesh(3);
        const int n = mesh.cells;
        Eigen::MatrixXd b = mass_matrix(mesh);
        if (opt.perturb_mass) b(0, 0) += 1e-3;  // negative-control hook
        Eigen::MatrixXd k = stiffness_matrix(mesh);
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                int d = mesh.wrap(i - j);
                double bexp = d == 0 ? 2.0 / (3 * n) : (d == 1 || d == n - 1 ? 1.0 / (6 * n) : 0.0);
                double kexp = d == 0 ? 2.0 * n : (d == 1 || d == n - 1 ? -1.0 * n : 0.0);
                ok = ok && std::abs(b(i, j) - bexp) < 1e-15 && std::abs(k(i, j) - kexp) < 1e-12;
            }
            ok = ok && std::abs(b.row(i).sum() - 1.0 / n) < 1e-15;
            ok = ok && std::abs(k.row(i).sum()) < 1e-12;
        }
        Eigen::MatrixXcd a = measurement_matrix(mesh, 0.35);
        ok = ok && a.row(0).norm() < 1e-15 && a.row(2 * n).norm() < 1e-15;
        NodalSignal u = random_nodal(mesh, rng);
        Eigen::VectorXd via_matrix = dq_matrix(mesh, 0.1, 2.0) * u.values;
        ok = ok && (via_matrix - dq_apply(u, 0.1, 2.0).values).norm() < 1e-12;
        push(out, "grid.matrix-structure", ok,
             opt.perturb_mass ? "mass matrix perturbed by test hook" : "exact stencils");
    }

    return out;
}

std::vector<PropertyResult> functional_properties(const Options& opt) {
    std::vector<PropertyResult> out;
    Rng rng(opt.seed + 1);

    {  // matrix objective agrees with dense quadrature of the continuum form
        double worst = 0.0;
        for (int n : {2, 3, 4}) {
            Mesh mesh(n);
            ModelParams p;
            p.eps = 0.07;
            p.alpha = 1.0;
            p.lambda = 1.0;
            NodalSignal u = random_nodal(mesh, rng, 0.0, 1.0);
            NodalSignal v = random_nodal(mesh, rng, 1.0, 0.5);
            SpectralVector m(mesh.cells);
            ObjectiveBreakdown b = eval_discrete_objective(u, v, m, p);
            double matrix_value = b.total - b.residual;

            CellSignal c = cell_average(v);
            double ubar = u.integral();
            double quad = integrate_cells(mesh.cells, 4, [&](double t) {
                int cell = std::min(static_cast<int>(t * mesh.cells), mesh.cells - 1);
                double cv = c.values[cell];
                double slope =
                    mesh.cells * (u.values[(cell + 1) % mesh.cells] - u.values[cell]);
                double dq = slope + std::pow(p.eps, p.q) * ubar;
                double vt = v.at(t);
                double dv = mesh.cells * (v.values[(cell + 1) % mesh.cells] - v.values[cell]);
                return -std::log(p.eps * p.eps + cv * cv) +
                       (p.eps * p.eps + cv * cv) * dq * dq + p.eps * dv * dv +
                       (1.0 - vt) * (1.0 - vt) / (4.0 * p.eps);
            });
            worst = std::max(worst, std::abs(matrix_value - quad));
        }
        push(out, "functionals.objective-consistency", worst < 1e-8,
             "max |matrix - quadrature| = " + fmt(worst));
    }

    {  // AT + S identity against quadrature of the combined integrand
        Mesh mesh(3);
        double eps = 0.09, q = 1.7;
        double worst = 0.0;
        for (int rep = 0; rep < 10; ++rep) {
            NodalSignal u = random_nodal(mesh, rng, 0.0, 1.0);
            NodalSignal v = random_nodal(mesh, rng, 0.8, 0.6);
            double lhs = eval_AT(u, v, eps) + eval_S(u, v, eps, q);
            double ubar = u.integral();
            double quad = integrate_cells(mesh.cells, 4, [&](double t) {
                int cell = std::min(static_cast<int>(t * mesh.cells), mesh.cells - 1);
                double slope =
                    mesh.cells * (u.values[(cell + 1) % mesh.cells] - u.values[cell]);
                double dq = slope + std::pow(eps, q) * ubar;
                double vt = v.at(t);
                double dv = mesh.cells * (v.values[(cell + 1) % mesh.cells] - v.values[cell]);
                return (eps * eps + vt * vt) * dq * dq + eps * dv * dv +
                       (1.0 - vt) * (1.0 - vt) / (4.0 * eps);
            });
            worst = std::max(worst, std::abs(lhs - quad));
        }
        push(out, "functionals.at-plus-s-identity", worst < 1e-8,
             "max |closed form - quadrature| = " + fmt(worst));
    }

    {  // folding lemma on random piecewise-linear signals
        Mesh mesh(5);
        const double eps = 0.01;
        bool ok = true;
        double worst_energy = 0.0;
        int trials = 1000;
        for (int rep = 0; rep < trials; ++rep) {
            NodalSignal v = random_nodal(mesh, rng, 0.5, 1.5);
            for (double r : {1.0, 1.0 + 30.0 * eps}) {
                Polyline folded = fold(v, r);
                for (int i = 0; i < 200; ++i) {
                    double t = static_cast<double>(i) / 200;
                    double fv = folded.at(t), vv = v.at(t);
                    ok = ok && std::abs(fv) <= std::abs(vv) + 1e-12;
                    ok = ok && std::abs(r - fv) <= std::abs(r - vv) + 1e-12;
                    ok = ok && fv >= -1e-12 && fv <= r + 1e-12;
                }
                double e_fold = dirichlet_energy(folded);
                double e_orig = stiffness_quadratic_form(v);
                double rel = std::abs(e_fold - e_orig) / (1.0 + e_orig);
                worst_energy = std::max(worst_energy, rel);
                ok = ok && rel < 1e-12;
            }
        }
        push(out, "functionals.folding-lemma", ok,
             fmt(2.0 * trials) + " folds, worst energy mismatch " + fmt(worst_energy));
    }

    {  // band fold never increases L + AT + S (alpha = 1 domain reduction)
        Mesh mesh(5);
        bool ok = true;
        double worst = -1e300;
        for (double eps : {0.05, 0.1}) {
            for (int rep = 0; rep < 100; ++rep) {
                NodalSignal u = random_nodal(mesh, rng, 0.0, 1.0);
                NodalSignal v = random_nodal(mesh, rng, 0.5, 2.5);  // exits the band
                Polyline up = Polyline::from_nodal(u);
                Polyline vp = Polyline::from_nodal(v);
                Polyline w = fold_to_band(v, eps);
                double before = eval_L(vp, eps) + eval_AT(up, vp, eps) + eval_S(up, vp, eps, 2.0);
                double after = eval_L(w, eps) + eval_AT(up, w, eps) + eval_S(up, w, eps, 2.0);
                worst = std::max(worst, after - before);
                ok = ok && after <= before + 1e-9 * (1.0 + std::abs(before));
            }
        }
        push(out, "functionals.domain-reduction", ok, "max increase " + fmt(worst));
    }

    {  // scalar potential: minimizer bounds and ordering claims
        bool ok = true;
        std::string detail;
        for (double eps : {0.12, 0.06, 0.01}) {
            ScalarMin m = minimize_g(eps);
            // lemma bound 1 <= t_eps <= 1 + 30 eps; the method of its proof
            // gives the sharper t_eps <= (1 + sqrt(1+16 eps))/2
            double proof_bound = 0.5 * (1.0 + std::sqrt(1.0 + 16.0 * eps));
            ok = ok && m.argmin >= 1.0 && m.argmin <= 1.0 + 30.0 * eps;
            ok = ok && m.argmin <= proof_bound + 1e-9;
            ok = ok && m.value <= g_eps(1.0, eps) + 1e-12;
            detail += "t(" + fmt(eps) + ")=" + fmt(m.argmin) + " ";

            const double top = 1.0 + 30.0 * eps;
            double max_inside = -1e300;
            for (int i = 0; i <= 1000; ++i)
                max_inside = std::max(max_inside, g_eps(1.0 + (top - 1.0) * i / 1000.0, eps));
            double min_beyond = 1e300;
            for (int i = 1; i <= 1000; ++i)
                min_beyond = std::min(min_beyond, g_eps(top + 5.0 * i / 1000.0, eps));
            ok = ok && max_inside <= min_beyond + 1e-12;  // band beats everything beyond it

            double max_unit = -1e300;
            for (int i = 0; i <= 1000; ++i)
                max_unit = std::max(max_unit, g_eps(static_cast<double>(i) / 1000.0, eps));
            double min_left = 1e300;
            for (int i = 0; i <= 1000; ++i)
                min_left = std::min(min_left, g_eps(-1.0 - 5.0 * i / 1000.0, eps));
            ok = ok && max_unit <= min_left + 1e-12;  // [0,1] beats everything below -1

            for (int i = 0; i <= 1000; ++i) {        // g(t) <= g(-t) on [0,1]
                double t = static_cast<double>(i) / 1000.0;
                ok = ok && g_eps(t, eps) <= g_eps(-t, eps) + 1e-12;
            }
        }
        push(out, "functionals.g-eps-claims", ok, detail);
    }

    {  // inf G sandwich with the constants of the bound
        bool ok = true;
        std::string detail;
        for (auto [n, eps, b] : {std::tuple<int, double, double>{6, 0.02, 1.0},
                                 {8, 0.01, 1.0},
                                 {8, 0.01, 4.0}}) {
            Mesh mesh(n);
            const int N = mesh.cells;
            double witness = -N * std::log(eps * eps + (1.0 + std::sqrt(eps)) *
                                                            (1.0 + std::sqrt(eps))) +
                             b / 4.0;
            NodalSignal v0 = NodalSignal::constant(mesh, 1.0 + std::sqrt(eps));
            ok = ok && std::abs(eval_G(v0, b, eps) - witness) < 1e-9 * (1.0 + std::abs(witness));
            NodalSignal v = descend_G(v0, b, eps, 400);
            double minimized = eval_G(v, b, eps);
            double lower = -(4.0 / b + 2.0) * eps * N * N;
            ok = ok && minimized <= witness + 1e-9 && minimized >= lower;
            detail += "[N=" + std::to_string(N) + " " + fmt(lower) + " <= " + fmt(minimized) +
                      " <= " + fmt(witness) + "] ";
        }
        push(out, "functionals.inf-G-sandwich", ok, detail);
    }

    (void)opt;
    return out;
}

std::vector<PropertyResult> stochastic_properties(const Options& opt) {
    std::vector<PropertyResult> out;
    const int draws = 10000;

    {  // noise energy and covariance against the analytic model
        Mesh mesh(9);
        const int N = mesh.cells;
        NoiseSpec spec{5e-3, 1.0, 0};
        const double var = spec.sigma * spec.sigma * std::pow(N, -spec.kappa);
        double analytic = (2.0 * N + 1.0) * var;

        // test pair in spectral coordinates
        SpectralVector phi(N), psi(N);
        phi.at(0) = 0.5;
        phi.at(1) = {1.0, 0.0};
        phi.at(-1) = {1.0, 0.0};
        psi.at(1) = {0.3, -0.2};
        psi.at(-1) = {0.3, 0.2};
        psi.at(2) = {1.0, 0.0};
        psi.at(-2) = {1.0, 0.0};
        double pairing = 0.0;  // <P phi, P psi> = sum phi_j conj(psi_j)
        for (int j = -N; j <= N; ++j)
            pairing += (phi.at(j) * std::conj(psi.at(j))).real();

        Rng rng(opt.seed + 2);
        double energy = 0.0, cov = 0.0, var_x = 0.0, var_y = 0.0;
        for (int k = 0; k < draws; ++k) {
            SpectralVector e = sample_noise(mesh, spec, rng);
            energy += e.squared_norm();
            double x = 0.0, y = 0.0;
            for (int j = -N; j <= N; ++j) {
                x += (e.at(j) * std::conj(phi.at(j))).real();
                y += (e.at(j) * std::conj(psi.at(j))).real();
            }
            cov += x * y;
            var_x += x * x;
            var_y += y * y;
        }
        energy /= draws;
        cov /= draws;
        var_x /= draws;
        var_y /= draws;

        bool ok = std::abs(energy - analytic) < 0.05 * analytic;
        double cov_expected = var * pairing;
        double se = std::sqrt((var_x * var_y + cov_expected * cov_expected) / draws);
        ok = ok && std::abs(cov - cov_expected) < 3.0 * se;

        // sigma -> 0 limit and determinism
        NoiseSpec zero{0.0, 1.0, 0};
        Rng rz(7);
        ok = ok && sample_noise(mesh, zero, rz).coeffs.norm() == 0.0;
        Rng ra(42), rb(42);
        ok = ok && (sample_noise(mesh, spec, ra).coeffs == sample_noise(mesh, spec, rb).coeffs);

        push(out, "stochastic.noise-statistics", ok,
             "E||E||^2 " + fmt(energy) + " vs " + fmt(analytic) + ", cov " + fmt(cov) + " vs " +
                 fmt(cov_expected) + " (3se=" + fmt(3.0 * se) + ")");
    }

    {  // prior on v: mean, marginal variance, shrinkage across levels
        Mesh mesh(7);
        ModelParams p;
        p.eps = 0.05;
        p.alpha = 1.0;
        Rng rng(opt.seed + 3);

        Eigen::VectorXd f(mesh.cells);
        for (int j = 0; j < mesh.cells; ++j) f[j] = rng.normal();
        f.normalize();

        Eigen::MatrixXd cov_matrix = prior_v_precision(mesh, p).llt().solve(
            Eigen::MatrixXd::Identity(mesh.cells, mesh.cells));
        double var_expected = f.dot(cov_matrix * f);

        double mean_proj = 0.0, second = 0.0;
        for (int k = 0; k < draws; ++k) {
            NodalSignal v = sample_prior_v(mesh, p, rng);
            double x = f.dot(v.values - Eigen::VectorXd::Ones(mesh.cells));
            mean_proj += x;
            second += x * x;
        }
        mean_proj /= draws;
        double var_emp = second / draws - mean_proj * mean_proj;

        double se_mean = std::sqrt(var_expected / draws);
        double se_var = var_expected * std::sqrt(2.0 / draws);
        bool ok = std::abs(mean_proj) < 3.0 * se_mean;
        ok = ok && std::abs(var_emp - var_expected) < 3.0 * se_var;

        // E||V - 1||^2 = tr(B P^-1) decreases with the level
        double prev = 1e300;
        std::string trace_detail;
        for (int n = 4; n <= 9; ++n) {
            Mesh m(n);
            Eigen::MatrixXd c = prior_v_precision(m, p).llt().solve(
                Eigen::MatrixXd::Identity(m.cells, m.cells));
            double tr = (mass_matrix(m) * c).trace();
            ok = ok && tr < prev;
            prev = tr;
            if (n == 6) {
                // Monte-Carlo agreement at one level
                double emp = 0.0, emp2 = 0.0;
                Rng r2(opt.seed + 4);
                for (int k = 0; k < draws; ++k) {
                    NodalSignal v = sample_prior_v(m, p, r2);
                    NodalSignal d(m, v.values - Eigen::VectorXd::Ones(m.cells));
                    double q = mass_quadratic_form(d);
                    emp += q;
                    emp2 += q * q;
                }
                emp /= draws;
                double se = std::sqrt((emp2 / draws - emp * emp) / draws);
                ok = ok && std::abs(emp - tr) < 3.0 * se;
                trace_detail = "tr=" + fmt(tr) + " mc=" + fmt(emp) + " (3se=" + fmt(3 * se) + ")";
            }
        }

        // alpha scaling: precision doubles per unit alpha at N = 2
        Mesh m1(1);
        ModelParams pa = p, pb = p;
        pa.alpha = 2.0;
        pb.alpha = 1.0;
        double ratio = (prior_v_precision(m1, pa) - 2.0 * prior_v_precision(m1, pb)).norm();
        ok = ok && ratio < 1e-12;

        push(out, "stochastic.prior-v-statistics", ok,
             "mean " + fmt(mean_proj) + ", var " + fmt(var_emp) + " vs " + fmt(var_expected) +
                 ", " + trace_detail);
    }

    {  // prior on u at fixed v
        Mesh mesh(7);
        ModelParams p;
        p.eps = 0.05;
        p.alpha = 1.0;
        Rng rng(opt.seed + 5);

        // v with a deep well around t0 = 0.5
        Eigen::VectorXd vv(mesh.cells);
        for (int j = 0; j < mesh.cells; ++j) {
            double d = mesh.node(j) - 0.5;
            vv[j] = 1.0 - 0.97 * std::exp(-d * d / 0.002);
        }
        NodalSignal v(mesh, vv);

        Eigen::MatrixXd precision = prior_u_precision(v, p);
        Eigen::MatrixXd cov = precision.llt().solve(
            Eigen::MatrixXd::Identity(mesh.cells, mesh.cells));
        Eigen::VectorXd f(mesh.cells);
        for (int j = 0; j < mesh.cells; ++j) f[j] = rng.normal();
        f.normalize();
        double var_expected = f.dot(cov * f);

        int well_cell = mesh.cells / 2;
        Eigen::VectorXd mean_sq_inc = Eigen::VectorXd::Zero(mesh.cells);
        double proj2 = 0.0, quad_mean = 0.0;
        for (int k = 0; k < draws; ++k) {
            NodalSignal u = sample_prior_u(v, p, rng);
            double x = f.dot(u.values);
            proj2 += x * x;
            if (k < 1000) {
                for (int j = 0; j < mesh.cells; ++j) {
                    double inc = u.values[(j + 1) % mesh.cells] - u.values[j];
                    mean_sq_inc[j] += inc * inc;
                }
            }
            if (k < 2000) quad_mean += u.values.dot(precision * u.values);
        }
        double var_emp = proj2 / draws;
        quad_mean /= 2000;

        double se_var = var_expected * std::sqrt(2.0 / draws);
        bool ok = std::abs(var_emp - var_expected) < 3.0 * se_var;
        ok = ok && std::abs(quad_mean - mesh.cells) < 0.05 * mesh.cells;

        // increments concentrate where v is near zero
        mean_sq_inc /= 1000;
        std::vector<double> sorted(mean_sq_inc.data(), mean_sq_inc.data() + mesh.cells);
        std::nth_element(sorted.begin(), sorted.begin() + mesh.cells / 2, sorted.end());
        double median = sorted[mesh.cells / 2];
        double at_well = std::max({mean_sq_inc[mesh.wrap(well_cell - 1)], mean_sq_inc[well_cell]});
        ok = ok && at_well > median;

        // larger eps flattens matched-seed samples
        double prev_tv = 1e300;
        bool tv_monotone = true;
        for (double eps : {0.05, 0.1, 0.2, 0.4}) {
            ModelParams pe = p;
            pe.eps = eps;
            Rng re(opt.seed + 6);  // matched seed across the sweep
            NodalSignal u = sample_prior_u(v, pe, re);
            double tv = 0.0;
            for (int j = 0; j < mesh.cells; ++j)
                tv += std::abs(u.values[(j + 1) % mesh.cells] - u.values[j]);
            tv_monotone = tv_monotone && tv < prev_tv;
            prev_tv = tv;
        }
        ok = ok && tv_monotone;

        push(out, "stochastic.prior-u-statistics", ok,
             "var " + fmt(var_emp) + " vs " + fmt(var_expected) + ", E[u'Mu]/N " +
                 fmt(quad_mean / mesh.cells) + ", well/median " + fmt(at_well / median));
    }

    {  // determinism of every sampler at a fixed seed
        Mesh mesh(6);
        ModelParams p;
        p.eps = 0.05;
        Rng a(opt.seed + 7), b(opt.seed + 7);
        PriorSample sa = sample_prior(mesh, p, a);
        PriorSample sb = sample_prior(mesh, p, b);
        bool ok = (sa.v.values == sb.v.values) && (sa.u.values == sb.u.values);
        TestSignal sig = step_signal();
        Rng c(opt.seed + 8), d(opt.seed + 8);
        SpectralVector ma = synthesize_measurement(sig.sample(mesh), p, c);
        SpectralVector mb = synthesize_measurement(sig.sample(mesh), p, d);
        ok = ok && (ma.coeffs == mb.coeffs);
        push(out, "stochastic.sampler-determinism", ok, "bitwise equal at fixed seed");
    }

    return out;
}

std::vector<PropertyResult> solver_properties(const Options& opt) {
    std::vector<PropertyResult> out;
    Rng rng(opt.seed + 9);

    ModelParams base;
    base.eps = 0.05;
    base.alpha = 1.0;
    base.lambda = 100.0;

    Mesh mesh(6);
    TestSignal sig = step_signal();
    NodalSignal truth = sig.sample(mesh);
    Rng mr(opt.seed + 10);
    SpectralVector m = synthesize_measurement(truth, base, mr);

    {  // u-step: first-order optimality and global minimality over u
        Eigen::VectorXd vv(mesh.cells);
        for (int j = 0; j < mesh.cells; ++j)
            vv[j] = 1.0 - 0.8 * std::exp(-std::pow(mesh.node(j) - 0.4, 2) / 0.01);
        NodalSignal v(mesh, vv);
        NodalSignal u = solve_u_step(v, m, base);

        double f0 = eval_discrete_objective(u, v, m, base).total;
        Eigen::VectorXd grad_fd(mesh.cells);
        for (int i = 0; i < mesh.cells; ++i) {
            double h = 1e-6;
            NodalSignal up = u, um = u;
            up.values[i] += h;
            um.values[i] -= h;
            grad_fd[i] = (eval_discrete_objective(up, v, m, base).total -
                          eval_discrete_objective(um, v, m, base).total) /
                         (2 * h);
        }
        double rhs_norm =
            (base.residual_weight() * measurement_adjoint(mesh, base.s, m)).norm();
        bool ok = grad_fd.norm() < 1e-8 * (1.0 + rhs_norm);

        bool all_larger = true;
        for (int rep = 0; rep < 100; ++rep) {
            NodalSignal up(mesh, u.values + 0.1 * random_nodal(mesh, rng).values);
            all_larger =
                all_larger && eval_discrete_objective(up, v, m, base).total >= f0 - 1e-12;
        }
        ok = ok && all_larger;
        push(out, "solver.u-step-optimality", ok,
             "fd gradient " + fmt(grad_fd.norm()) + " vs tol " + fmt(1e-8 * (1.0 + rhs_norm)) +
                 ", 100 perturbations larger");
    }

    {  // v gradient against central differences
        double worst = 0.0;
        for (int rep = 0; rep < 10; ++rep) {
            NodalSignal u = random_nodal(mesh, rng, 0.0, 1.0);
            NodalSignal v = random_nodal(mesh, rng, 1.0, 0.4);
            Eigen::VectorXd grad = v_objective_gradient(u, v, base);
            Eigen::VectorXd fd(mesh.cells);
            for (int i = 0; i < mesh.cells; ++i) {
                double h = 1e-6 * (1.0 + std::abs(v.values[i]));
                NodalSignal vp = v, vm = v;
                vp.values[i] += h;
                vm.values[i] -= h;
                fd[i] = (v_objective(u, vp, base) - v_objective(u, vm, base)) / (2 * h);
            }
            worst = std::max(worst, (grad - fd).norm() / (1.0 + grad.norm()));
        }
        push(out, "solver.v-gradient-check", worst < 1e-6,
             "max relative error " + fmt(worst));
    }

    {  // with u = 0 the v-step settles at the scalar potential minimizer
        ModelParams p = base;
        p.inner_max_steps = 4000;
        p.inner_rel_tol = 1e-15;
        NodalSignal zero = NodalSignal::constant(mesh, 0.0);
        VStepResult res = solve_v_step(zero, NodalSignal::constant(mesh, 1.0), p);
        // at alpha = 1 the constant profile minimizes g_eps exactly
        ScalarMin g = minimize_g(p.eps);
        double dev = (res.v.values.array() - g.argmin).abs().maxCoeff();
        push(out, "solver.v-step-scalar-limit", dev < 1e-5,
             "max |v - t_eps| = " + fmt(dev) + " after " + std::to_string(res.accepted_steps) +
                 " steps");
    }

    {  // outer loop: trace monotone, noiseless constant data recovered
        ModelParams p = base;
        MapEstimate est = alternate_minimize(m, p);
        bool ok = true;
        double prev = 1e300;
        for (const auto& [it, b] : est.trace.iterates) {
            ok = ok && b.total <= prev + 1e-10 * (1.0 + std::abs(prev));
            prev = b.total;
        }

        SpectralVector clean = forward_apply(NodalSignal::constant(mesh, 0.7), p.s);
        MapEstimate flat = alternate_minimize(clean, p);
        double cerr = (flat.u.values.array() - 0.7).abs().maxCoeff();
        ok = ok && cerr < 1e-2;
        ok = ok && flat.trace.iterates.size() - 1 <= 3;
        push(out, "solver.outer-monotonicity", ok,
             "trace non-increasing, constant-data error " + fmt(cerr) + " in " +
                 std::to_string(flat.trace.iterates.size() - 1) + " iterations");
    }

    {  // Tikhonov baseline behaviour
        SpectralVector ones = forward_apply(NodalSignal::constant(mesh, 1.0), 0.35);
        NodalSignal u1 = solve_tikhonov(ones, mesh, 17.0);
        bool ok = (u1.values.array() - 1.0).abs().maxCoeff() < 1e-9;
        NodalSignal u_small = solve_tikhonov(m, mesh, 1e-6);
        double spread = u_small.values.maxCoeff() - u_small.values.minCoeff();
        ok = ok && spread < 1e-3;
        push(out, "solver.tikhonov", ok, "constant recovery exact, lambda->0 spread " + fmt(spread));
    }

    {  // eps-sweep fidelity bound: int (1-v)^2 / eps stays within a factor 4
        std::vector<double> ratios;
        for (double eps : {0.02, 0.01, 0.006}) {
            Mesh em(8);
            ModelParams p;
            p.eps = eps;
            p.alpha = 1.0;
            p.lambda = 400.0;
            p.max_iter = 120;
            p.delta = 1e-13;
            NodalSignal et = step_signal().sample(em);
            Rng er(opt.seed + 11);
            SpectralVector emeas = synthesize_measurement(et, p, er);
            MapEstimate est = alternate_minimize(emeas, p);
            NodalSignal omv(em, Eigen::VectorXd::Ones(em.cells) - est.v.values);
            ratios.push_back(mass_quadratic_form(omv) / eps);
        }
        double rmax = *std::max_element(ratios.begin(), ratios.end());
        double rmin = *std::min_element(ratios.begin(), ratios.end());
        push(out, "solver.eps-fidelity-bound", rmax / rmin < 4.0,
             "ratios " + fmt(ratios[0]) + ", " + fmt(ratios[1]) + ", " + fmt(ratios[2]));
    }

    {  // alpha = 0 uniform-bound diagnostic: |1 - v|_inf <= C' sqrt(eps N + eps^2 N^3)
        const double eps = 0.05;
        ModelParams p;
        p.eps = eps;
        p.alpha = 0.0;
        p.lambda = 100.0;
        double fitted = 0.0;
        bool ok = true;
        std::string detail;
        for (int n = 4; n <= 7; ++n) {
            Mesh am(n);
            NodalSignal at = step_signal().sample(am);
            Rng ar(opt.seed + 12);
            SpectralVector ameas = synthesize_measurement(at, p, ar);
            MapEstimate est = alternate_minimize(ameas, p);
            double left = (Eigen::VectorXd::Ones(am.cells) - est.v.values).cwiseAbs().maxCoeff();
            double bound = std::sqrt(eps * am.cells +
                                     eps * eps * std::pow(static_cast<double>(am.cells), 3));
            double ratio = left / bound;
            if (n == 4) fitted = ratio;
            ok = ok && left <= 1.5 * fitted * bound;
            detail += fmt(ratio) + " ";
        }
        push(out, "solver.alpha0-uniform-bound", ok,
             "|1-v|_inf / sqrt(eps N + eps^2 N^3) = " + detail + "(fitted C' = " + fmt(fitted) +
                 ")");
    }

    {  // hierarchical MAP and the brute-force oracle find the same jumps
        Mesh mm(6);
        const int n = mm.cells;
        const double a0 = 0.25 + 0.5 / n, b0 = 0.75 + 0.5 / n;
        Eigen::VectorXd vals(n);
        for (int j = 0; j < n; ++j) {
            double t = mm.node(j);
            vals[j] = (t >= a0 && t < b0) ? 1.0 : 0.0;
        }
        SpectralVector mmeas = forward_apply(NodalSignal(mm, vals), 0.35);
        MsSolution ms = ms_bruteforce(mmeas, mm, 4000.0, 2, 16);
        ModelParams p;
        p.eps = 0.005;
        p.alpha = 1.0;
        p.lambda = 4000.0;
        p.max_iter = 120;
        p.delta = 1e-13;
        MapEstimate est = alternate_minimize(mmeas, p);
        std::vector<Well> wells = detect_wells(est.v, 0.5);
        bool ok = wells.size() == ms.jumps.size();
        double worst = 0.0;
        if (ok) {
            for (size_t i = 0; i < wells.size(); ++i) {
                double d = std::abs(wells[i].position - ms.jumps[i]);
                d = std::min(d, 1.0 - d);
                worst = std::max(worst, d);
                ok = ok && d <= 1.0 / 16.0;
            }
        }
        push(out, "solver.ms-oracle-consistency", ok,
             "jumps " + std::to_string(wells.size()) + " vs " + std::to_string(ms.jumps.size()) +
                 ", worst offset " + fmt(worst));
    }

    {  // min g_N divergence table
        std::vector<DivergenceRow> rows = diverge_alpha0(6, 14, 0.01);
        bool ok = true;
        for (size_t i = 1; i < rows.size(); ++i) {
            ok = ok && rows[i].value < rows[i - 1].value;      // strictly decreasing
            ok = ok && rows[i].s_star > rows[i - 1].s_star;    // minimizers grow
            ok = ok && std::abs(rows[i].cells / rows[i].value) <
                           std::abs(rows[i - 1].cells / rows[i - 1].value);
        }
        ok = ok && rows.back().value < -1e3;
        push(out, "solver.min-gN-divergence", ok,
             "value(n=14) = " + fmt(rows.back().value) + ", s*(n=14) = " + fmt(rows.back().s_star));
    }

    return out;
}

std::vector<PropertyResult> experiment_properties(const Options& opt) {
    std::vector<PropertyResult> out;

    {  // generator jump counts match their documented jump sets
        TestSignal a = step_signal(), b = piecewise_smooth_signal();
        bool ok = a.exact.jump_count() == 2 && b.exact.jump_count() == 4;
        ok = ok && a.exact.jump_locations() == a.jumps && b.exact.jump_locations() == b.jumps;
        push(out, "experiments.signal-generators", ok,
             "step jumps = " + std::to_string(a.exact.jump_count()) +
                 ", piecewise-smooth jumps = " + std::to_string(b.exact.jump_count()));
    }

    {  // config -> record determinism at a fixed seed
        ExperimentConfig cfg;
        cfg.command = "reconstruct";
        cfg.levels = {5};
        cfg.eps_list = {0.05};
        cfg.params.lambda = 100.0;
        cfg.params.max_iter = 8;
        cfg.seed = opt.seed;
        RunRecord a = run_reconstruct(cfg, 5, 0.05);
        RunRecord b = run_reconstruct(cfg, 5, 0.05);
        bool ok = (a.estimate.u.values == b.estimate.u.values) &&
                  (a.estimate.v.values == b.estimate.v.values) &&
                  (a.measurement.coeffs == b.measurement.coeffs);
        push(out, "experiments.record-determinism", ok, "bitwise equal reruns");
    }

    return out;
}

std::vector<PropertyResult> run_all(const Options& opt) {
    std::vector<PropertyResult> all;
    for (auto* suite : {&grid_properties, &functional_properties, &stochastic_properties,
                        &solver_properties, &experiment_properties}) {
        std::vector<PropertyResult> part = (*suite)(opt);
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

}  // namespace hgdeblur::verify
