#ifndef HGDEBLUR_FUNCTIONALS_HPP
#define HGDEBLUR_FUNCTIONALS_HPP

#include "hgdeblur/grid_ops.hpp"
#include "hgdeblur/mesh.hpp"

#include <functional>

namespace hgdeblur {

/// The five summands of the discrete posterior objective and their sum.
struct ObjectiveBreakdown {
    double log_term = 0.0;     // -N^(-alpha) * sum_j log(eps^2 + (Q_n v)_j^2)
    double grad_term = 0.0;    // (1/N) * sum_j (eps^2 + (Q_n v)_j^2) (D_q u)_j^2
    double v_smooth = 0.0;     // eps * v^T K_n v
    double v_fidelity = 0.0;   // (1/4eps) * (1-v)^T B_n (1-v)
    double residual = 0.0;     // lambda * sum_{|j|<=N} |(A_n u)_j - m_j|^2
    double total = 0.0;
};

/// Exact piecewise-smooth function with an explicit jump set. Piece i starts
/// at (or after) breakpoints[i] and carries uniform samples over
/// [start, end]; end may exceed 1 for the single wrapping piece. Gaps between
/// a piece's end and the next piece's start are bridged linearly (used by the
/// brute-force solver, whose jump cells carry no derivative penalty).
struct PiecewisePolySignal {
    struct Piece {
        double start = 0.0;
        double end = 0.0;
        Eigen::VectorXd samples;  // >= 2 values, uniformly spaced on [start, end]
    };

    std::vector<double> breakpoints;  // sorted, distinct, in [0,1)
    std::vector<Piece> pieces;        // one per breakpoint

    /// Tiling construction: piece i spans [b_i, b_{i+1}] sampled from fn.
    static PiecewisePolySignal from_function(std::vector<double> breakpoints,
                                             const std::function<double(double)>& fn,
                                             int samples_per_piece = 64);

    double at(double t) const;
    double sup_norm() const;

    /// int |grad u|^2 over the piece interiors (finite differences on the
    /// sample subgrid; exact for the piecewise-linear interpolant).
    double gradient_energy() const;

    /// Jump magnitude at breakpoint i: first sample of piece i minus last
    /// sample of the preceding piece.
    double jump_at(int i) const;

    /// A breakpoint counts as a jump iff the one-sided values differ by more
    /// than 1e-9 * (1 + sup-norm).
    int jump_count() const;
    std::vector<double> jump_locations() const;

    /// Exact Fourier coefficients of the piecewise-linear interpolant
    /// (pieces plus linear gap bridges), truncated at |j| <= order.
    SpectralVector fourier(int order) const;
};

/// Discrete posterior objective of the matrix formulation. Residual weight
/// and log-det scaling come from p. Throws on mesh mismatch.
ObjectiveBreakdown eval_discrete_objective(const NodalSignal& u, const NodalSignal& v,
                                           const SpectralVector& m, const ModelParams& p);

/// Ambrosio-Tortorelli functional
///   AT_eps(u,v) = int (eps^2+v^2)|Du|^2 + eps |Dv|^2 + (1/4eps)(1-v)^2 dt,
/// evaluated exactly for piecewise-linear arguments (int v^2 over a linear
/// piece = (a^2+ab+b^2)/3 * length).
double eval_AT(const NodalSignal& u, const NodalSignal& v, double eps);
double eval_AT(const Polyline& u, const Polyline& v, double eps);

/// L_eps(v) = -int log(eps^2 + v^2) dt by composite Simpson with 32 panels
/// (65 points) per linear segment; the rule is fixed so oracles can match it.
double eval_L(const NodalSignal& v, double eps);
double eval_L(const Polyline& v, double eps);

/// S^q_eps(u,v) = int (eps^2+v^2) (2 eps^q (Qu) Du + eps^{2q} (Qu)^2) dt,
/// exact for piecewise-linear arguments. Satisfies
/// AT_eps + S^q_eps = int (eps^2+v^2)|D_q u|^2 + eps|Dv|^2 + (1/4eps)(1-v)^2.
double eval_S(const NodalSignal& u, const NodalSignal& v, double eps, double q);
double eval_S(const Polyline& u, const Polyline& v, double eps, double q);

/// Mumford-Shah value: gradient energy + jump count (+ lam*||Au - m||^2 when
/// a measurement is supplied; s is the order of the forward operator).
double eval_MS(const PiecewisePolySignal& u, double lam = 0.0,
               const SpectralVector* m = nullptr, double s = 0.35);

/// Periodic folding Psi_r: reflects the real line onto [0, r]. The result is
/// represented exactly on a refined breakpoint set (mesh nodes plus every
/// crossing of a multiple of r).
Polyline fold(const NodalSignal& v, double r);
Polyline fold(const Polyline& v, double r);

/// Domain-reduction map: identity on [0, 1+30eps], Psi_1 below 0, and
/// 1 + Psi_{30eps}(v-1) above. Never increases eval_L + eval_AT + eval_S.
Polyline fold_to_band(const NodalSignal& v, double eps);
Polyline fold_to_band(const Polyline& v, double eps);

/// int |Dv|^2 dt of a polyline, segment by segment on its own breakpoints.
double dirichlet_energy(const Polyline& v);

/// Scalar potential g_eps(t) = -log(eps^2+t^2) + (1/4eps)(1-t)^2.
double g_eps(double t, double eps);

struct ScalarMin {
    double argmin = 0.0;
    double value = 0.0;
};

/// Unique positive minimizer of g_eps (1-D golden-section search).
ScalarMin minimize_g(double eps);

/// G_{eps,n}(v,b) = int -N log(eps^2+(Q_n v)^2) + (b/4eps)(1-v)^2 dt, exact
/// for piecewise-linear v.
double eval_G(const NodalSignal& v, double b, double eps);

/// Minimum of g_N(s) = -N log(eps^2+s^2) + (1/4eps)(1-s)^2 over s > 0.
ScalarMin min_gN(int N, double eps);

/// Generalization used by v-step diagnostics: minimizer of
/// -w log(eps^2+t^2) + (1/4eps)(1-t)^2 over t > 0 (w = N^(1-alpha) gives the
/// constant-v profile of the discrete objective at u = 0).
ScalarMin minimize_scalar_potential(double log_weight, double eps);

}  // namespace hgdeblur

#endif
