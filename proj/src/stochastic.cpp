#include "hgdeblur/stochastic.hpp"

namespace hgdeblur {

namespace {

// Sample z ~ N(0, P^-1) via the Cholesky factor of the precision:
// P = L L^T, z = L^-T w with w standard normal.
Eigen::VectorXd sample_from_precision(const Eigen::MatrixXd& precision, Rng& rng) {
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("precision matrix is not positive definite");
    Eigen::VectorXd w(precision.rows());
    for (int i = 0; i < w.size(); ++i) w[i] = rng.normal();
    return llt.matrixU().solve(w);
}

}  // namespace

SpectralVector sample_noise(const Mesh& mesh, const NoiseSpec& spec, Rng& rng) {
    const int n = mesh.cells;
    const double var = spec.sigma * spec.sigma * std::pow(n, -spec.kappa);
    SpectralVector e(n);
    e.at(0) = std::sqrt(var) * rng.normal();
    const double half = std::sqrt(0.5 * var);
    for (int j = 1; j <= n; ++j) {
        double re = half * rng.normal();
        double im = half * rng.normal();
        e.at(j) = {re, im};
        e.at(-j) = {re, -im};
    }
    return e;
}

Eigen::MatrixXd prior_v_precision(const Mesh& mesh, const ModelParams& p) {
    const double scale = std::pow(mesh.cells, p.alpha);
    return scale * (p.eps * stiffness_matrix(mesh) + mass_matrix(mesh) / (4.0 * p.eps));
}

Eigen::MatrixXd prior_u_precision(const NodalSignal& v, const ModelParams& p) {
    const int n = v.mesh.cells;
    const CellSignal c = cell_average(v);
    Eigen::VectorXd weights(n);
    for (int j = 0; j < n; ++j) weights[j] = p.eps * p.eps + c.values[j] * c.values[j];
    Eigen::MatrixXd gram = weighted_dq_gram(v.mesh, weights, p.eps, p.q);
    return std::pow(n, p.alpha - 1.0) * gram;
}

NodalSignal sample_prior_v(const Mesh& mesh, const ModelParams& p, Rng& rng) {
    Eigen::VectorXd z = sample_from_precision(prior_v_precision(mesh, p), rng);
    return NodalSignal(mesh, Eigen::VectorXd::Ones(mesh.cells) + z);
}

NodalSignal sample_prior_u(const NodalSignal& v, const ModelParams& p, Rng& rng) {
    return NodalSignal(v.mesh, sample_from_precision(prior_u_precision(v, p), rng));
}

PriorSample sample_prior(const Mesh& mesh, const ModelParams& p, Rng& rng) {
    NodalSignal v = sample_prior_v(mesh, p, rng);
    NodalSignal u = sample_prior_u(v, p, rng);
    return {std::move(v), std::move(u)};
}

SpectralVector synthesize_measurement(const NodalSignal& u_true, const ModelParams& p, Rng& rng) {
    SpectralVector m = forward_apply(u_true, p.s);
    NoiseSpec spec{p.sigma, p.noise_exponent(), 0};
    SpectralVector e = sample_noise(u_true.mesh, spec, rng);
    m.coeffs += e.coeffs;
    return m;
}

SpectralVector synthesize_measurement(const PiecewisePolySignal& u_true, const Mesh& mesh,
                                      const ModelParams& p, Rng& rng) {
    SpectralVector m = forward_apply(u_true.fourier(mesh.cells), p.s);
    NoiseSpec spec{p.sigma, p.noise_exponent(), 0};
    SpectralVector e = sample_noise(mesh, spec, rng);
    m.coeffs += e.coeffs;
    return m;
}

}  // namespace hgdeblur
