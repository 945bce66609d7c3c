#include "hgdeblur/solver.hpp"

#include "hgdeblur/grid_ops.hpp"

#include <limits>
#include <string>

namespace hgdeblur {

namespace {

Eigen::VectorXd lambda_weights(const NodalSignal& v, double eps) {
    const CellSignal c = cell_average(v);
    return (c.values.array().square() + eps * eps).matrix();
}

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& system, const Eigen::VectorXd& rhs,
                          const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error(std::string(what) + ": system is not positive definite");
    Eigen::VectorXd x = llt.solve(rhs);
    // one refinement step keeps the relative residual near machine precision
    x += llt.solve(rhs - system * x);
    return x;
}

// Shared state for one alternate-minimization run: everything that does not
// change across outer iterations.
struct RunContext {
    Mesh mesh;
    ModelParams params;
    Eigen::MatrixXd weighted_gram;  // lambda * Re(A^H A)
    Eigen::VectorXd rhs;            // lambda * Re(A^H m)

    RunContext(const Mesh& m, const SpectralVector& meas, const ModelParams& p)
        : mesh(m), params(p) {
        const double lam = p.residual_weight();
        weighted_gram = lam * measurement_gram(m, p.s);
        rhs = lam * measurement_adjoint(m, p.s, meas);
    }

    NodalSignal u_step(const NodalSignal& v) const {
        Eigen::MatrixXd system =
            weighted_dq_gram(mesh, lambda_weights(v, params.eps), params.eps, params.q) /
            mesh.cells;
        system += weighted_gram;
        return NodalSignal(mesh, solve_spd(system, rhs, "u-step"));
    }
};

}  // namespace

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::decrease_below_delta: return "decrease-below-delta";
        case StopReason::max_iterations: return "max-iterations";
        case StopReason::line_search_stalled: return "line-search-stalled";
    }
    return "unknown";
}

double v_objective(const NodalSignal& u, const NodalSignal& v, const ModelParams& p) {
    const int n = v.mesh.cells;
    const CellSignal c = cell_average(v);
    const CellSignal w = dq_apply(u, p.eps, p.q);
    const double e2 = p.eps * p.eps;
    const double log_weight =
        p.alt_log_weight ? std::pow(n, p.alpha - 1.0) : std::pow(n, -p.alpha);

    double log_sum = 0.0, grad_sum = 0.0;
    for (int j = 0; j < n; ++j) {
        double lam_j = e2 + c.values[j] * c.values[j];
        log_sum += std::log(lam_j);
        grad_sum += lam_j * w.values[j] * w.values[j];
    }
    Eigen::VectorXd one_minus_v = Eigen::VectorXd::Ones(n) - v.values;
    return -log_weight * log_sum + grad_sum / n + p.eps * stiffness_quadratic_form(v) +
           one_minus_v.dot(apply_mass(v.mesh, one_minus_v)) / (4.0 * p.eps);
}

Eigen::VectorXd v_objective_gradient(const NodalSignal& u, const NodalSignal& v,
                                     const ModelParams& p) {
    const int n = v.mesh.cells;
    const CellSignal c = cell_average(v);
    const CellSignal w = dq_apply(u, p.eps, p.q);
    const double e2 = p.eps * p.eps;
    const double log_weight =
        p.alt_log_weight ? std::pow(n, p.alpha - 1.0) : std::pow(n, -p.alpha);

    // everything enters through (Q_n v)_j = (v_j + v_{j+1})/2, and the 1/2
    // of d(Q_n v)_j/dv_i cancels the 2 from squaring: d lam_j/dv_i = c_j
    Eigen::VectorXd cell_term(n);
    for (int j = 0; j < n; ++j) {
        double lam_j = e2 + c.values[j] * c.values[j];
        cell_term[j] = -log_weight * c.values[j] / lam_j +
                       c.values[j] * w.values[j] * w.values[j] / n;
    }
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        grad[j] += cell_term[j];
        grad[(j + 1) % n] += cell_term[j];
    }
    grad += 2.0 * p.eps * apply_stiffness(v.mesh, v.values);
    Eigen::VectorXd one_minus_v = Eigen::VectorXd::Ones(n) - v.values;
    grad -= apply_mass(v.mesh, one_minus_v) / (2.0 * p.eps);
    return grad;
}

NodalSignal solve_u_step(const NodalSignal& v, const SpectralVector& m, const ModelParams& p) {
    return RunContext(v.mesh, m, p).u_step(v);
}

VStepResult solve_v_step(const NodalSignal& u, const NodalSignal& v_init, const ModelParams& p) {
    if (u.mesh != v_init.mesh) throw std::invalid_argument("u and v live on different meshes");
    VStepResult res{v_init, 0, false};
    double value = v_objective(u, res.v, p);

    for (int step = 0; step < p.inner_max_steps; ++step) {
        Eigen::VectorXd grad = v_objective_gradient(u, res.v, p);
        double gnorm2 = grad.squaredNorm();
        if (gnorm2 == 0.0) return res;

        double t = p.initial_step;
        bool accepted = false;
        for (int bt = 0; bt <= p.max_backtracks; ++bt) {
            NodalSignal trial(res.v.mesh, res.v.values - t * grad);
            double trial_value = v_objective(u, trial, p);
            if (trial_value <= value - p.armijo_c * t * gnorm2) {
                double improvement = value - trial_value;
                res.v = std::move(trial);
                value = trial_value;
                ++res.accepted_steps;
                accepted = true;
                if (improvement < p.inner_rel_tol * (1.0 + std::abs(value))) return res;
                break;
            }
            t *= p.backtrack;
        }
        if (!accepted) {
            res.stalled = true;
            return res;
        }
    }
    return res;
}

MapEstimate alternate_minimize(const SpectralVector& m, const ModelParams& p,
                               const std::optional<std::pair<NodalSignal, NodalSignal>>& init) {
    p.validate();
    Mesh mesh(0);
    // the measurement fixes the mesh: order = cell count
    for (int n = 0; n <= 30; ++n)
        if ((1 << n) == m.order) mesh = Mesh(n);
    if (mesh.cells != m.order) throw std::invalid_argument("measurement order is not a power of 2");

    RunContext ctx(mesh, m, p);
    NodalSignal u = init ? init->first : NodalSignal::constant(mesh, 0.0);
    NodalSignal v = init ? init->second : NodalSignal::constant(mesh, 1.0);

    MapEstimate est{u, v, {}};
    ObjectiveBreakdown prev = eval_discrete_objective(u, v, m, p);
    est.trace.iterates.emplace_back(0, prev);
    const double delta = p.delta > 0.0 ? p.delta : 1e-8 * (1.0 + std::abs(prev.total));

    est.trace.stop_reason = StopReason::max_iterations;
    for (int j = 1; j <= p.max_iter; ++j) {
        u = ctx.u_step(v);
        VStepResult vres = solve_v_step(u, v, p);
        v = vres.v;
        ObjectiveBreakdown cur = eval_discrete_objective(u, v, m, p);
        est.trace.iterates.emplace_back(j, cur);
        if (cur.total > prev.total - delta) {
            est.trace.stop_reason = (vres.accepted_steps == 0 && vres.stalled)
                                        ? StopReason::line_search_stalled
                                        : StopReason::decrease_below_delta;
            prev = cur;
            break;
        }
        prev = cur;
    }
    if (p.posthoc_fold) {
        // pointwise band map; at the nodes it agrees with fold_to_band
        const double top = 1.0 + 30.0 * p.eps;
        for (int i = 0; i < mesh.cells; ++i) {
            double y = v.values[i];
            if (y < 0.0) {
                double m2 = y - 2.0 * std::floor(y / 2.0);
                v.values[i] = 1.0 - std::abs(1.0 - m2);
            } else if (y > top) {
                double band = 30.0 * p.eps;
                double m2 = (y - 1.0) - 2.0 * band * std::floor((y - 1.0) / (2.0 * band));
                v.values[i] = 1.0 + band - std::abs(band - m2);
            }
        }
    }
    est.u = std::move(u);
    est.v = std::move(v);
    return est;
}

NodalSignal solve_tikhonov(const SpectralVector& m, const Mesh& mesh, double lam, double s) {
    if (!(lam > 0.0)) throw std::invalid_argument("lambda must be > 0");
    if (m.order != mesh.cells) throw std::invalid_argument("measurement order != cell count");
    Eigen::MatrixXd system = stiffness_matrix(mesh) + lam * measurement_gram(mesh, s);
    Eigen::VectorXd rhs = lam * measurement_adjoint(mesh, s, m);
    return NodalSignal(mesh, solve_spd(system, rhs, "tikhonov"));
}

MsSolution ms_bruteforce(const SpectralVector& m, const Mesh& mesh, double lam, int k_max,
                         int jump_grid, double s) {
    if (mesh.cells > 128) throw std::invalid_argument("brute force limited to N <= 128");
    if (k_max < 0 || k_max > 3) throw std::invalid_argument("k_max must lie in 0..3");
    if (jump_grid < 1 || jump_grid > 32) throw std::invalid_argument("jump_grid must lie in 1..32");
    if (m.order != mesh.cells) throw std::invalid_argument("measurement order != cell count");

    const int n = mesh.cells;
    const Eigen::MatrixXd gram = measurement_gram(mesh, s);
    const Eigen::VectorXd adj = measurement_adjoint(mesh, s, m);
    const Eigen::MatrixXd stiffness_full = stiffness_matrix(mesh);

    // candidate jump positions and the cells that contain them
    std::vector<double> cand(jump_grid);
    std::vector<int> cand_cell(jump_grid);
    for (int i = 0; i < jump_grid; ++i) {
        cand[i] = static_cast<double>(i) / jump_grid;
        cand_cell[i] = std::min(static_cast<int>(cand[i] * n), n - 1);
    }

    struct Best {
        double value = std::numeric_limits<double>::infinity();
        std::vector<int> k;
        Eigen::VectorXd u;
        double smooth = 0.0, resid = 0.0;
    } best;

    auto evaluate = [&](const std::vector<int>& subset) {
        // derivative penalty removed on cells containing a point of K
        std::vector<bool> freed(n, false);
        for (int idx : subset) freed[cand_cell[idx]] = true;
        Eigen::MatrixXd k_mod = stiffness_full;
        for (int j = 0; j < n; ++j) {
            if (!freed[j]) continue;
            int l = (j + 1) % n;
            double w = static_cast<double>(n);
            k_mod(j, j) -= w;
            k_mod(l, l) -= w;
            k_mod(j, l) += w;
            k_mod(l, j) += w;
        }
        Eigen::VectorXd u = solve_spd(k_mod + lam * gram, lam * adj, "ms-bruteforce");
        double smooth = u.dot(k_mod * u);
        SpectralVector au = forward_apply(NodalSignal(mesh, u), s);
        double resid = (au.coeffs - m.coeffs).squaredNorm();
        double value = smooth + lam * resid + static_cast<double>(subset.size());
        if (value < best.value) {
            best = {value, subset, u, smooth, resid};
        }
    };

    std::vector<int> subset;
    std::function<void(int, int)> enumerate = [&](int start, int remaining) {
        evaluate(subset);
        if (remaining == 0) return;
        for (int i = start; i < jump_grid; ++i) {
            subset.push_back(i);
            enumerate(i + 1, remaining - 1);
            subset.pop_back();
        }
    };
    enumerate(0, k_max);

    MsSolution sol;
    sol.nodal = NodalSignal(mesh, best.u);
    sol.value = best.value;
    sol.smooth_energy = best.smooth;
    sol.residual = best.resid;
    for (int idx : best.k) sol.jumps.push_back(cand[idx]);

    // exact piecewise representation: pieces between freed cells, each jump
    // cell bridged linearly by the gap convention
    if (best.k.empty()) {
        sol.u.breakpoints = {0.0};
        PiecewisePolySignal::Piece piece;
        piece.start = 0.0;
        piece.end = 1.0;
        piece.samples.resize(n + 1);
        for (int j = 0; j <= n; ++j) piece.samples[j] = best.u[j % n];
        sol.u.pieces.push_back(std::move(piece));
    } else {
        std::vector<int> cells;
        for (int idx : best.k) cells.push_back(cand_cell[idx]);
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        const int p = static_cast<int>(cells.size());
        for (int i = 0; i < p; ++i) {
            int c0 = cells[i];
            int c1 = (i + 1 < p) ? cells[i + 1] : cells[0] + n;
            sol.u.breakpoints.push_back(static_cast<double>(c0) / n);
            PiecewisePolySignal::Piece piece;
            piece.start = static_cast<double>(c0 + 1) / n;
            piece.end = static_cast<double>(c1) / n;
            piece.samples.resize(c1 - c0);
            for (int j = c0 + 1; j <= c1; ++j) piece.samples[j - c0 - 1] = best.u[j % n];
            sol.u.pieces.push_back(std::move(piece));
        }
    }
    return sol;
}

std::vector<DivergenceRow> diverge_alpha0(int n_lo, int n_hi, double eps) {
    if (n_lo > n_hi) throw std::invalid_argument("empty level range");
    std::vector<DivergenceRow> rows;
    for (int n = n_lo; n <= n_hi; ++n) {
        ScalarMin m = min_gN(1 << n, eps);
        rows.push_back({1 << n, m.argmin, m.value});
    }
    return rows;
}

std::vector<Well> detect_wells(const NodalSignal& v, double threshold) {
    const int n = v.mesh.cells;
    std::vector<Well> wells;
    std::vector<bool> below(n);
    bool any_above = false;
    for (int j = 0; j < n; ++j) {
        below[j] = v.values[j] < threshold;
        any_above = any_above || !below[j];
    }
    if (!any_above) {
        if (n == 0) return wells;
        int arg = 0;
        for (int j = 1; j < n; ++j)
            if (v.values[j] < v.values[arg]) arg = j;
        wells.push_back({v.mesh.node(arg), v.values[arg]});
        return wells;
    }
    // walk components starting after an above-threshold node
    int start = 0;
    while (below[start]) ++start;
    int j = start;
    do {
        if (below[j]) {
            int arg = j;
            int k = j;
            while (below[k]) {
                if (v.values[k] < v.values[arg]) arg = k;
                k = (k + 1) % n;
            }
            wells.push_back({v.mesh.node(arg), v.values[arg]});
            j = k;
        } else {
            j = (j + 1) % n;
        }
    } while (j != start);
    std::sort(wells.begin(), wells.end(),
              [](const Well& a, const Well& b) { return a.position < b.position; });
    return wells;
}

}  // namespace hgdeblur
