#ifndef HGDEBLUR_GRID_OPS_HPP
#define HGDEBLUR_GRID_OPS_HPP

#include "hgdeblur/mesh.hpp"

namespace hgdeblur {

// Exact discrete operators on the uniform periodic mesh. All integrals of
// piecewise-linear / piecewise-constant quantities are evaluated through
// B_n, K_n and (1/N)-weighted cell sums; there is no numerical quadrature
// in this module.

/// Perturbed derivative D_q = D + eps^q * Q applied to a nodal signal:
/// (D_q u)_j = N (u_{j+1} - u_j) + eps^q * mean(u) on every cell.
/// Invertible from PL(n) to PC(n) for eps > 0, q > 1.
CellSignal dq_apply(const NodalSignal& u, double eps, double q);

/// Dense matrix of D_q from roof-top coordinates to cell coordinates.
Eigen::MatrixXd dq_matrix(const Mesh& mesh, double eps, double q);

/// Orthogonal L2 projection PL(n) -> PC(n); equals cell averaging:
/// (Q_n v)_j = (v_j + v_{j+1}) / 2.
CellSignal cell_average(const NodalSignal& v);

/// Mass matrix (B_n)_{jk} = <phi_j, phi_k>: circulant with diagonal 2/(3N)
/// and nearest-neighbour 1/(6N); row sums 1/N.
Eigen::MatrixXd mass_matrix(const Mesh& mesh);

/// Stiffness matrix K_n with v^T K_n v = int |Dv|^2 dt exactly on PL(n):
/// circulant with diagonal 2N, nearest-neighbour -N; kernel = constants.
Eigen::MatrixXd stiffness_matrix(const Mesh& mesh);

/// O(N) stencil products (same operators as the dense builders).
Eigen::VectorXd apply_mass(const Mesh& mesh, const Eigen::VectorXd& v);
Eigen::VectorXd apply_stiffness(const Mesh& mesh, const Eigen::VectorXd& v);

/// int u^2 dt = u^T B_n u, evaluated with the O(N) stencil.
double mass_quadratic_form(const NodalSignal& u);
/// int |Du|^2 dt = u^T K_n u, evaluated with the O(N) stencil.
double stiffness_quadratic_form(const NodalSignal& u);

/// Fourier multiplier of A = (I - Laplace)^(-s/2) at frequency j.
double forward_multiplier(int j, double s);

/// <e_j, phi_k> for the roof-top function phi_k on an N-cell mesh:
/// (1/N) * (sin(pi j/N)/(pi j/N))^2 * exp(-2 pi i j k / N), and 1/N at j=0.
std::complex<double> roof_fourier(int j, int k, int N);

/// Exact Fourier coefficients of a PL(n) signal truncated at |j| <= N.
SpectralVector pl_fourier(const NodalSignal& u);

/// A applied to a nodal signal: exact PL Fourier expansion followed by the
/// multiplier, truncated at |j| <= N. Rejects s outside (0, 1/2).
SpectralVector forward_apply(const NodalSignal& u, double s);
/// A applied to an already-spectral input (plain multiplier).
SpectralVector forward_apply(const SpectralVector& u, double s);

/// Measurement matrix (A_n)_{jk} = forward_multiplier(j,s) * roof_fourier(j,k,N),
/// shape (2N+1) x N. The rows |j| = N vanish identically and are kept.
Eigen::MatrixXcd measurement_matrix(const Mesh& mesh, double s);

/// Matrix-free A_n u (equals measurement_matrix(mesh,s) * u.values).
SpectralVector measurement_apply(const NodalSignal& u, double s);

/// Generator of the real circulant Gram matrix Re(A_n^H A_n):
/// entry (k,l) equals gram[(k-l) mod N].
Eigen::VectorXd measurement_gram_generator(const Mesh& mesh, double s);

/// Dense Re(A_n^H A_n) built from the circulant generator.
Eigen::MatrixXd measurement_gram(const Mesh& mesh, double s);

/// Re(A_n^H m) in roof-top coordinates.
Eigen::VectorXd measurement_adjoint(const Mesh& mesh, double s, const SpectralVector& m);

/// D_q^T diag(weights) D_q assembled in O(N^2) from the bidiagonal-plus-
/// rank-one structure of D_q (weights indexed by cell).
Eigen::MatrixXd weighted_dq_gram(const Mesh& mesh, const Eigen::VectorXd& weights, double eps,
                                 double q);

}  // namespace hgdeblur

#endif
