#ifndef HGDEBLUR_MESH_HPP
#define HGDEBLUR_MESH_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hgdeblur {

/// Uniform periodic mesh on the circle [0,1) with N = 2^n cells.
/// Nodes t_j = j/N, j = 0..N-1, with t_0 identified with t_N.
struct Mesh {
    int level = 0;   // refinement level n
    int cells = 1;   // N = 2^n

    Mesh() = default;
    explicit Mesh(int n) : level(n), cells(1 << n) {
        if (n < 0 || n > 30) throw std::invalid_argument("mesh level out of range");
    }

    double node(int j) const { return static_cast<double>(wrap(j)) / cells; }
    double width() const { return 1.0 / cells; }
    int wrap(int j) const {
        int m = j % cells;
        return m < 0 ? m + cells : m;
    }
    bool operator==(const Mesh& o) const { return cells == o.cells; }
    bool operator!=(const Mesh& o) const { return cells != o.cells; }
};

/// Piecewise-linear periodic function in the roof-top (hat) basis:
/// u = sum_j values[j] * phi_j, with phi_j(k/N) = delta_jk.
struct NodalSignal {
    Mesh mesh;
    Eigen::VectorXd values;

    NodalSignal() = default;
    NodalSignal(Mesh m, Eigen::VectorXd v) : mesh(m), values(std::move(v)) {
        if (values.size() != mesh.cells) throw std::invalid_argument("nodal size != cell count");
    }
    static NodalSignal constant(Mesh m, double c) {
        return NodalSignal(m, Eigen::VectorXd::Constant(m.cells, c));
    }

    /// Value of the piecewise-linear interpolant at t (periodic).
    double at(double t) const {
        double x = t - std::floor(t);
        double s = x * mesh.cells;
        int j = static_cast<int>(s);
        if (j >= mesh.cells) j = mesh.cells - 1;
        double frac = s - j;
        return values[j] * (1.0 - frac) + values[mesh.wrap(j + 1)] * frac;
    }
    /// Exact integral over the circle: trapezoid is exact on PL(n).
    double integral() const { return values.sum() / mesh.cells; }
};

/// Piecewise-constant periodic function: values[j] on cell I_j = [j/N,(j+1)/N).
struct CellSignal {
    Mesh mesh;
    Eigen::VectorXd values;

    CellSignal() = default;
    CellSignal(Mesh m, Eigen::VectorXd v) : mesh(m), values(std::move(v)) {
        if (values.size() != mesh.cells) throw std::invalid_argument("cell size != cell count");
    }
    double integral() const { return values.sum() / mesh.cells; }
};

/// Truncated Fourier coefficients c_j, |j| <= N, of a function on the circle
/// with respect to the orthonormal exponentials e_j(t) = exp(-2*pi*i*j*t).
/// A real-valued function has conjugate symmetry c_{-j} = conj(c_j).
struct SpectralVector {
    int order = 0;                 // truncation N
    Eigen::VectorXcd coeffs;       // length 2N+1, index j+N

    SpectralVector() = default;
    explicit SpectralVector(int n_order)
        : order(n_order), coeffs(Eigen::VectorXcd::Zero(2 * n_order + 1)) {}
    SpectralVector(int n_order, Eigen::VectorXcd c) : order(n_order), coeffs(std::move(c)) {
        if (coeffs.size() != 2 * n_order + 1) throw std::invalid_argument("spectral size != 2N+1");
    }

    std::complex<double>& at(int j) { return coeffs[j + order]; }
    const std::complex<double>& at(int j) const { return coeffs[j + order]; }

    /// Parseval: squared L2 norm of the represented function.
    double squared_norm() const { return coeffs.squaredNorm(); }

    /// Pointwise evaluation sum_j c_j e_j(t); real part is the represented signal.
    std::complex<double> eval(double t) const {
        std::complex<double> acc{0.0, 0.0};
        for (int j = -order; j <= order; ++j) {
            double phase = -2.0 * M_PI * j * t;
            acc += at(j) * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        return acc;
    }
};

/// All scalar model and solver parameters.
struct ModelParams {
    double eps = 0.01;      // sharpness of the prior, > 0
    double alpha = 1.0;     // scaling exponent of prior and noise
    double q = 2.0;         // perturbation exponent of D_q, > 1
    double s = 0.35;        // smoothing order of the forward operator, in (0, 1/2)
    double sigma = 5e-3;    // noise magnitude, > 0
    double lambda = 0.0;    // residual weight; <= 0 means the default 1/sigma^2
    double kappa = std::nan("");  // noise scaling; NaN means kappa = alpha
    double delta = 0.0;     // outer decrease threshold; <= 0 means 1e-8*(1+|F0|)
    int max_iter = 50;      // outer iteration cap

    // Weights the log-det term by N^(alpha-1) instead of N^(-alpha).
    // Off by default; kept only so the alternative scaling can be compared.
    bool alt_log_weight = false;

    // Maps the final v through the band fold onto [0, 1+30 eps] after the
    // outer loop finishes. Off by default; the descent itself is unconstrained.
    bool posthoc_fold = false;

    // Inner v-minimization controls (gradient descent with Armijo backtracking).
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double initial_step = 1.0;
    int max_backtracks = 40;
    int inner_max_steps = 200;
    double inner_rel_tol = 1e-12;

    double residual_weight() const { return lambda > 0.0 ? lambda : 1.0 / (sigma * sigma); }
    double noise_exponent() const { return std::isnan(kappa) ? alpha : kappa; }

    void validate() const {
        if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
        if (!(q > 1.0)) throw std::invalid_argument("q must be > 1");
        if (!(s > 0.0 && s < 0.5)) throw std::invalid_argument("s must lie in (0, 1/2)");
        if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
        if (!(residual_weight() > 0.0)) throw std::invalid_argument("lambda must be > 0");
        if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    }
};

/// Continuous piecewise-linear function on the circle with explicit
/// (possibly non-uniform) breakpoints. Segment i runs from t[i] to t[i+1]
/// (the last one wraps to t[0]+1) and interpolates value[i] -> value[i+1].
struct Polyline {
    std::vector<double> t;       // sorted, in [0,1)
    std::vector<double> value;   // same length

    int segments() const { return static_cast<int>(t.size()); }
    double segment_length(int i) const {
        int n = segments();
        return (i + 1 < n ? t[i + 1] : t[0] + 1.0) - t[i];
    }
    double segment_end_value(int i) const { return value[(i + 1) % segments()]; }

    static Polyline from_nodal(const NodalSignal& u) {
        Polyline p;
        p.t.resize(u.mesh.cells);
        p.value.resize(u.mesh.cells);
        for (int j = 0; j < u.mesh.cells; ++j) {
            p.t[j] = u.mesh.node(j);
            p.value[j] = u.values[j];
        }
        return p;
    }

    double at(double x) const {
        double xx = x - std::floor(x);
        int n = segments();
        // last segment with t[i] <= xx
        int i = static_cast<int>(std::upper_bound(t.begin(), t.end(), xx) - t.begin()) - 1;
        if (i < 0) {
            // before the first breakpoint: inside the wrapping segment
            i = n - 1;
            double len = segment_length(i);
            double frac = (xx + 1.0 - t[i]) / len;
            return value[i] + frac * (value[0] - value[i]);
        }
        double len = segment_length(i);
        double frac = len > 0.0 ? (xx - t[i]) / len : 0.0;
        return value[i] + frac * (value[(i + 1) % n] - value[i]);
    }
};

}  // namespace hgdeblur

#endif
