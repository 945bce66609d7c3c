#ifndef HGDEBLUR_SOLVER_HPP
#define HGDEBLUR_SOLVER_HPP

#include "hgdeblur/functionals.hpp"
#include "hgdeblur/mesh.hpp"

#include <optional>

namespace hgdeblur {

enum class StopReason { decrease_below_delta, max_iterations, line_search_stalled };

const char* to_string(StopReason r);

struct SolveTrace {
    std::vector<std::pair<int, ObjectiveBreakdown>> iterates;
    StopReason stop_reason = StopReason::max_iterations;
};

struct MapEstimate {
    NodalSignal u;
    NodalSignal v;
    SolveTrace trace;
};

/// The four v-dependent terms of the objective (residual omitted; it does
/// not depend on v).
double v_objective(const NodalSignal& u, const NodalSignal& v, const ModelParams& p);

/// Analytic gradient of v_objective with respect to the nodal values of v.
Eigen::VectorXd v_objective_gradient(const NodalSignal& u, const NodalSignal& v,
                                     const ModelParams& p);

/// Exact minimizer over u at fixed v: solves the normal equations
/// ((1/N) D^T Lambda(Q_n v) D + lambda Re(A^H A)) u = lambda Re(A^H m).
NodalSignal solve_u_step(const NodalSignal& v, const SpectralVector& m, const ModelParams& p);

struct VStepResult {
    NodalSignal v;
    int accepted_steps = 0;
    bool stalled = false;  // no admissible Armijo step at the last iterate
};

/// Gradient descent on v with Armijo backtracking; the result never has a
/// larger objective than v_init.
VStepResult solve_v_step(const NodalSignal& u, const NodalSignal& v_init, const ModelParams& p);

/// Alternate minimization: u-step / v-step until the objective decreases by
/// less than delta or max_iter is reached. Defaults u0 = 0, v0 = 1.
MapEstimate alternate_minimize(const SpectralVector& m, const ModelParams& p,
                               const std::optional<std::pair<NodalSignal, NodalSignal>>& init = {});

/// Tikhonov baseline: (K_n + lambda Re(A^H A)) u = lambda Re(A^H m).
NodalSignal solve_tikhonov(const SpectralVector& m, const Mesh& mesh, double lam, double s = 0.35);

struct MsSolution {
    PiecewisePolySignal u;
    std::vector<double> jumps;   // recovered jump set K (candidate positions)
    double value = 0.0;          // smooth energy + #K + lam * residual
    double smooth_energy = 0.0;  // int_{T \ K} |Du|^2
    double residual = 0.0;       // ||A u - m||^2, unweighted
    NodalSignal nodal;           // minimizer on the nodal grid
};

/// Brute-force Mumford-Shah oracle: enumerates every jump set of size
/// 0..k_max over a uniform candidate grid, minimizes the quadratic with the
/// derivative penalty removed on cells containing a jump, and returns the
/// global minimizer of quadratic value + #K.
MsSolution ms_bruteforce(const SpectralVector& m, const Mesh& mesh, double lam, int k_max,
                         int jump_grid, double s = 0.35);

struct DivergenceRow {
    int cells = 0;       // N = 2^n
    double s_star = 0.0; // minimizing constant of g_N
    double value = 0.0;  // min g_N
};

/// min_gN over a range of refinement levels; the value column is the
/// testable content of the alpha = 0 divergence statement.
std::vector<DivergenceRow> diverge_alpha0(int n_lo, int n_hi, double eps);

struct Well {
    double position = 0.0;  // node of minimum value within the component
    double depth = 0.0;     // minimum value of v there
};

/// Connected components of {v < threshold} on the periodic mesh, one well
/// per component at its minimizing node.
std::vector<Well> detect_wells(const NodalSignal& v, double threshold = 0.5);

}  // namespace hgdeblur

#endif
