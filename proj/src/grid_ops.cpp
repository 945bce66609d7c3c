#include "hgdeblur/grid_ops.hpp"

namespace hgdeblur {

namespace {

void check_order(double s) {
    if (!(s > 0.0 && s < 0.5)) throw std::invalid_argument("order s must lie in (0, 1/2)");
}

void check_dq_params(double eps, double q) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
    if (!(q > 1.0)) throw std::invalid_argument("q must be > 1");
}

// exp(-2 pi i k / n) for k = 0..n-1; shared by the O(N^2) transforms
std::vector<std::complex<double>> unit_roots(int n) {
    std::vector<std::complex<double>> roots(n);
    for (int k = 0; k < n; ++k) roots[k] = std::polar(1.0, -2.0 * M_PI * k / n);
    return roots;
}

// |<e_j, phi_k>| = sinc^2(pi j / N) / N
double roof_magnitude(int j, int n) {
    if (j == 0) return 1.0 / n;
    double x = M_PI * j / n;
    double sinc = std::sin(x) / x;
    return sinc * sinc / n;
}

}  // namespace

CellSignal dq_apply(const NodalSignal& u, double eps, double q) {
    check_dq_params(eps, q);
    const int n = u.mesh.cells;
    const double shift = std::pow(eps, q) * u.integral();
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j)
        out[j] = n * (u.values[(j + 1) % n] - u.values[j]) + shift;
    return CellSignal(u.mesh, std::move(out));
}

Eigen::MatrixXd dq_matrix(const Mesh& mesh, double eps, double q) {
    check_dq_params(eps, q);
    const int n = mesh.cells;
    const double r = std::pow(eps, q) / n;  // Q contributes eps^q * (1/N) per node
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, r);
    for (int j = 0; j < n; ++j) {
        d(j, j) -= n;
        d(j, (j + 1) % n) += n;
    }
    return d;
}

CellSignal cell_average(const NodalSignal& v) {
    const int n = v.mesh.cells;
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j) out[j] = 0.5 * (v.values[j] + v.values[(j + 1) % n]);
    return CellSignal(v.mesh, std::move(out));
}

// Both matrices are assembled cell by cell so that the wrap-around cases
// N = 1, 2 accumulate the doubled neighbour contributions correctly.
Eigen::MatrixXd mass_matrix(const Mesh& mesh) {
    const int n = mesh.cells;
    const double diag = 1.0 / (3.0 * n), off = 1.0 / (6.0 * n);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        int k = (j + 1) % n;
        b(j, j) += diag;
        b(k, k) += diag;
        b(j, k) += off;
        b(k, j) += off;
    }
    return b;
}

Eigen::MatrixXd stiffness_matrix(const Mesh& mesh) {
    const int n = mesh.cells;
    const double w = static_cast<double>(n);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        int l = (j + 1) % n;
        k(j, j) += w;
        k(l, l) += w;
        k(j, l) -= w;
        k(l, j) -= w;
    }
    return k;
}

Eigen::VectorXd apply_mass(const Mesh& mesh, const Eigen::VectorXd& v) {
    const int n = mesh.cells;
    const double diag = 1.0 / (3.0 * n), off = 1.0 / (6.0 * n);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        int k = (j + 1) % n;
        out[j] += diag * v[j] + off * v[k];
        out[k] += diag * v[k] + off * v[j];
    }
    return out;
}

Eigen::VectorXd apply_stiffness(const Mesh& mesh, const Eigen::VectorXd& v) {
    const int n = mesh.cells;
    const double w = static_cast<double>(n);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        int k = (j + 1) % n;
        double d = v[j] - v[k];
        out[j] += w * d;
        out[k] -= w * d;
    }
    return out;
}

double mass_quadratic_form(const NodalSignal& u) {
    return u.values.dot(apply_mass(u.mesh, u.values));
}

double stiffness_quadratic_form(const NodalSignal& u) {
    return u.values.dot(apply_stiffness(u.mesh, u.values));
}

double forward_multiplier(int j, double s) {
    check_order(s);
    double w = 2.0 * M_PI * j;
    return std::pow(1.0 + w * w, -0.5 * s);
}

std::complex<double> roof_fourier(int j, int k, int N) {
    if (std::abs(j) > N) throw std::invalid_argument("roof_fourier: |j| > N");
    if (k < 0 || k >= N) throw std::invalid_argument("roof_fourier: node index out of range");
    if (j == 0) return {1.0 / N, 0.0};
    double x = M_PI * j / N;
    double sinc = std::sin(x) / x;
    double mag = sinc * sinc / N;
    double phase = -2.0 * M_PI * static_cast<double>(j) * k / N;
    return std::polar(mag, phase);
}

SpectralVector pl_fourier(const NodalSignal& u) {
    const int n = u.mesh.cells;
    SpectralVector out(n);
    const auto roots = unit_roots(n);
    // hat coefficients share a magnitude per frequency; phases form a DFT
    for (int j = 0; j < n; ++j) {
        std::complex<double> acc{0.0, 0.0};
        long idx = 0;
        for (int k = 0; k < n; ++k) {
            acc += u.values[k] * roots[idx];
            idx += j;
            if (idx >= n) idx -= n;
        }
        acc *= roof_magnitude(j, n);
        out.at(j) = acc;
        if (j > 0) out.at(-j) = std::conj(acc);
    }
    out.at(n) = {0.0, 0.0};   // sinc^2(pi) = 0
    out.at(-n) = {0.0, 0.0};
    return out;
}

SpectralVector forward_apply(const NodalSignal& u, double s) {
    check_order(s);
    SpectralVector hat = pl_fourier(u);
    for (int j = -hat.order; j <= hat.order; ++j) hat.at(j) *= forward_multiplier(j, s);
    return hat;
}

SpectralVector forward_apply(const SpectralVector& u, double s) {
    check_order(s);
    SpectralVector out = u;
    for (int j = -u.order; j <= u.order; ++j) out.at(j) *= forward_multiplier(j, s);
    return out;
}

Eigen::MatrixXcd measurement_matrix(const Mesh& mesh, double s) {
    check_order(s);
    const int n = mesh.cells;
    Eigen::MatrixXcd a(2 * n + 1, n);
    for (int j = -n; j <= n; ++j) {
        double mult = forward_multiplier(j, s);
        for (int k = 0; k < n; ++k) a(j + n, k) = mult * roof_fourier(j, k, n);
    }
    return a;
}

SpectralVector measurement_apply(const NodalSignal& u, double s) {
    return forward_apply(u, s);
}

Eigen::VectorXd measurement_gram_generator(const Mesh& mesh, double s) {
    check_order(s);
    const int n = mesh.cells;
    // (A^H A)_{kl} = sum_j mult(j)^2 sinc^4(pi j/N)/N^2 * exp(2 pi i j (k-l)/N),
    // real by the +-j pairing; depends only on (k-l) mod N.
    Eigen::VectorXd weight(n + 1);
    for (int j = 0; j <= n; ++j) {
        double mag;
        if (j == 0) {
            mag = 1.0 / n;
        } else {
            double x = M_PI * j / n;
            double sinc = std::sin(x) / x;
            mag = sinc * sinc / n;
        }
        double mult = forward_multiplier(j, s);
        weight[j] = mult * mult * mag * mag;
    }
    Eigen::VectorXd gen(n);
    for (int d = 0; d < n; ++d) {
        double acc = weight[0];
        for (int j = 1; j <= n; ++j)
            acc += 2.0 * weight[j] * std::cos(2.0 * M_PI * static_cast<double>(j) * d / n);
        gen[d] = acc;
    }
    return gen;
}

Eigen::MatrixXd measurement_gram(const Mesh& mesh, double s) {
    const int n = mesh.cells;
    Eigen::VectorXd gen = measurement_gram_generator(mesh, s);
    Eigen::MatrixXd g(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) g(k, l) = gen[mesh.wrap(k - l)];
    return g;
}

Eigen::MatrixXd weighted_dq_gram(const Mesh& mesh, const Eigen::VectorXd& weights, double eps,
                                 double q) {
    check_dq_params(eps, q);
    const int n = mesh.cells;
    if (weights.size() != n) throw std::invalid_argument("weight count != cell count");
    const double w = static_cast<double>(n);
    const double r = std::pow(eps, q) / n;

    // difference part D0^T W D0, assembled cell by cell
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        int k = (j + 1) % n;
        double c = w * w * weights[j];
        g(j, j) += c;
        g(k, k) += c;
        g(j, k) -= c;
        g(k, j) -= c;
    }
    // cross terms with the rank-one mean part: x = D0^T W 1
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        int k = (j + 1) % n;
        x[j] -= w * weights[j];
        x[k] += w * weights[j];
    }
    const double wsum = weights.sum();
    g.noalias() += r * (x * Eigen::RowVectorXd::Ones(n));
    g.noalias() += r * (Eigen::VectorXd::Ones(n) * x.transpose());
    g.noalias() += (r * r * wsum) * Eigen::MatrixXd::Ones(n, n);
    return g;
}

Eigen::VectorXd measurement_adjoint(const Mesh& mesh, double s, const SpectralVector& m) {
    check_order(s);
    const int n = mesh.cells;
    if (m.order != n) throw std::invalid_argument("measurement order != cell count");
    const auto roots = unit_roots(n);
    Eigen::VectorXd weight(n);
    for (int j = 0; j < n; ++j) weight[j] = forward_multiplier(j, s) * roof_magnitude(j, n);
    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k) {
        // conj(A_{jk}) = mult(j) * mag(j) * exp(+2 pi i j k / N); pair +-j,
        // and the |j| = N rows vanish
        std::complex<double> acc = weight[0] * m.at(0);
        long idx = 0;
        for (int j = 1; j < n; ++j) {
            idx += k;
            if (idx >= n) idx -= n;
            acc += weight[j] * (std::conj(roots[idx]) * m.at(j) + roots[idx] * m.at(-j));
        }
        out[k] = acc.real();
    }
    return out;
}

}  // namespace hgdeblur
