#ifndef HGDEBLUR_STOCHASTIC_HPP
#define HGDEBLUR_STOCHASTIC_HPP

#include "hgdeblur/functionals.hpp"
#include "hgdeblur/mesh.hpp"

#include <random>

namespace hgdeblur {

/// Seedable generator with a platform-stable byte stream: mt19937_64 for the
/// raw words, uniforms via the top 53 bits, Gaussians via Box-Muller (no
/// cached second value, so every normal() consumes exactly two uniforms).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in (0, 1].
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
    }

    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

/// Scaled white-noise model: coefficient variance sigma^2 * N^(-kappa).
struct NoiseSpec {
    double sigma = 5e-3;
    double kappa = 1.0;        // scaling exponent applied as N^(-kappa)
    std::uint64_t seed = 0;    // recorded with runs; draws use the Rng handle
};

struct PriorSample {
    NodalSignal v;
    NodalSignal u;
};

/// Real Gaussian white noise on Ran(P_n): the DC coefficient is
/// Normal(0, sigma^2 N^-kappa), coefficients 1..N have independent real and
/// imaginary parts Normal(0, sigma^2 N^-kappa / 2), and conjugate symmetry
/// fills j < 0. Draw order: j = 0, then (re, im) for j = 1..N, so matched
/// seeds share their low-frequency standard normals across mesh levels.
SpectralVector sample_noise(const Mesh& mesh, const NoiseSpec& spec, Rng& rng);

/// Precision matrix of V - 1 in roof-top coordinates:
/// N^alpha (eps K_n + B_n / (4 eps)).
Eigen::MatrixXd prior_v_precision(const Mesh& mesh, const ModelParams& p);

/// Precision matrix of U given v: N^(alpha-1) D_n^T Lambda(Q_n v) D_n.
Eigen::MatrixXd prior_u_precision(const NodalSignal& v, const ModelParams& p);

/// Draw v = 1 + z with z zero-mean Gaussian of precision prior_v_precision.
NodalSignal sample_prior_v(const Mesh& mesh, const ModelParams& p, Rng& rng);

/// Draw u zero-mean Gaussian with precision prior_u_precision (well defined
/// because D_q is invertible).
NodalSignal sample_prior_u(const NodalSignal& v, const ModelParams& p, Rng& rng);

PriorSample sample_prior(const Mesh& mesh, const ModelParams& p, Rng& rng);

/// m = A_n u_true + E_n with the noise scaled by N^(-kappa), kappa
/// defaulting to alpha.
SpectralVector synthesize_measurement(const NodalSignal& u_true, const ModelParams& p, Rng& rng);

/// Same for an exact piecewise representation: the Fourier coefficients of
/// u_true are computed by piecewise closed-form integration first.
SpectralVector synthesize_measurement(const PiecewisePolySignal& u_true, const Mesh& mesh,
                                      const ModelParams& p, Rng& rng);

}  // namespace hgdeblur

#endif
