#include "hgdeblur/functionals.hpp"

#include <cmath>
#include <set>

namespace hgdeblur {

namespace {

constexpr double kJumpTol = 1e-9;
constexpr int kSimpsonPanelsPerSegment = 32;

// A linear segment shared by two polylines after merging breakpoints.
struct Segment {
    double len;
    double ua, ub;  // endpoint values of the first function
    double va, vb;  // endpoint values of the second function
};

std::vector<Segment> merge(const Polyline& u, const Polyline& v) {
    std::set<double> cuts(u.t.begin(), u.t.end());
    cuts.insert(v.t.begin(), v.t.end());
    std::vector<double> ts(cuts.begin(), cuts.end());
    std::vector<Segment> out;
    out.reserve(ts.size());
    const int n = static_cast<int>(ts.size());
    for (int i = 0; i < n; ++i) {
        double a = ts[i];
        double b = (i + 1 < n) ? ts[i + 1] : ts[0] + 1.0;
        if (b - a <= 0.0) continue;
        out.push_back({b - a, u.at(a), u.at(b >= 1.0 ? b - 1.0 : b), v.at(a),
                       v.at(b >= 1.0 ? b - 1.0 : b)});
    }
    return out;
}

// int_seg w^2 dt for w linear from a to b over length len.
double quad_sq(double a, double b, double len) { return len * (a * a + a * b + b * b) / 3.0; }

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    double h = (b - a) / (2 * panels);
    double acc = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// phi1(x) = int_0^1 exp(-i x s) ds, phi2(x) = int_0^1 s exp(-i x s) ds,
// stable for small |x| via the power series.
std::complex<double> phi1(double x) {
    if (std::abs(x) < 0.5) {
        std::complex<double> term(1.0, 0.0), acc(0.0, 0.0);
        const std::complex<double> mix(0.0, -x);
        for (int k = 0; k < 24; ++k) {
            acc += term / static_cast<double>(k + 1);
            term *= mix / static_cast<double>(k + 1);
            if (std::abs(term) < 1e-20) break;
        }
        return acc;
    }
    std::complex<double> ix(0.0, x);
    return (1.0 - std::exp(-ix)) / ix;
}

std::complex<double> phi2(double x) {
    if (std::abs(x) < 0.5) {
        std::complex<double> term(1.0, 0.0), acc(0.0, 0.0);
        const std::complex<double> mix(0.0, -x);
        for (int k = 0; k < 24; ++k) {
            acc += term / static_cast<double>(k + 2);
            term *= mix / static_cast<double>(k + 1);
            if (std::abs(term) < 1e-20) break;
        }
        return acc;
    }
    std::complex<double> ix(0.0, x);
    return (phi1(x) - std::exp(-ix)) / ix;
}

// int_a^b (linear va->vb) * exp(-2 pi i j t) dt.
std::complex<double> linear_fourier(double a, double b, double va, double vb, int j) {
    double len = b - a;
    if (len <= 0.0) return {0.0, 0.0};
    double omega = 2.0 * M_PI * j;
    double x = omega * len;
    std::complex<double> rot = std::polar(1.0, -omega * a);
    return rot * len * (va * phi1(x) + (vb - va) * phi2(x));
}

void check_same_mesh(const Mesh& a, const Mesh& b) {
    if (a != b) throw std::invalid_argument("signals live on different meshes");
}

// Levels k*r crossed strictly between values a and b.
void crossing_levels(double a, double b, double r, std::vector<double>& out) {
    out.clear();
    double lo = std::min(a, b), hi = std::max(a, b);
    long k0 = static_cast<long>(std::floor(lo / r)) - 1;
    long k1 = static_cast<long>(std::ceil(hi / r)) + 1;
    for (long k = k0; k <= k1; ++k) {
        double level = k * r;
        if (level > lo && level < hi) out.push_back(level);
    }
    if (a > b) std::reverse(out.begin(), out.end());
}

double psi_fold(double y, double r) {
    double m = y - 2.0 * r * std::floor(y / (2.0 * r));
    return r - std::abs(r - m);
}

// Refine a polyline at every crossing of the given level set (multiples of r,
// possibly offset), then map values through `map`. Crossing values are mapped
// exactly so the result is an exact representation of map compose v.
Polyline refine_and_map(const Polyline& v, const std::function<std::vector<double>(double, double)>& levels,
                        const std::function<double(double)>& map) {
    std::vector<std::pair<double, double>> pts;
    const int n = v.segments();
    for (int i = 0; i < n; ++i) {
        double ta = v.t[i];
        double tb = (i + 1 < n) ? v.t[i + 1] : v.t[0] + 1.0;
        double a = v.value[i], b = v.value[(i + 1) % n];
        pts.emplace_back(ta, map(a));
        if (tb - ta <= 0.0 || a == b) continue;
        for (double level : levels(a, b)) {
            double frac = (level - a) / (b - a);
            double tc = ta + frac * (tb - ta);
            if (tc <= ta || tc >= tb) continue;
            pts.emplace_back(tc >= 1.0 ? tc - 1.0 : tc, map(level));
        }
    }
    // crossings on the wrapping segment may land in [0, t[0]); restore order
    std::stable_sort(pts.begin(), pts.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    Polyline out;
    out.t.reserve(pts.size());
    out.value.reserve(pts.size());
    for (const auto& [t, val] : pts) {
        out.t.push_back(t);
        out.value.push_back(val);
    }
    return out;
}

}  // namespace

PiecewisePolySignal PiecewisePolySignal::from_function(std::vector<double> breakpoints,
                                                       const std::function<double(double)>& fn,
                                                       int samples_per_piece) {
    if (breakpoints.empty()) throw std::invalid_argument("need at least one breakpoint");
    std::sort(breakpoints.begin(), breakpoints.end());
    PiecewisePolySignal out;
    out.breakpoints = breakpoints;
    const int p = static_cast<int>(breakpoints.size());
    for (int i = 0; i < p; ++i) {
        double start = breakpoints[i];
        double end = (i + 1 < p) ? breakpoints[i + 1] : breakpoints[0] + 1.0;
        Piece piece;
        piece.start = start;
        piece.end = end;
        piece.samples.resize(samples_per_piece + 1);
        for (int k = 0; k <= samples_per_piece; ++k) {
            double t = start + (end - start) * k / samples_per_piece;
            // the closed-interval end sample is the one-sided limit from the
            // left; nudge inward so half-open piece formulas evaluate there
            if (k == samples_per_piece) t -= (end - start) * 1e-12;
            piece.samples[k] = fn(t >= 1.0 ? t - 1.0 : t);
        }
        out.pieces.push_back(std::move(piece));
    }
    return out;
}

double PiecewisePolySignal::at(double t) const {
    double x = t - std::floor(t);
    const int p = static_cast<int>(pieces.size());
    for (int pass = 0; pass < 2; ++pass) {
        double xx = x + pass;  // second pass catches the wrapping piece
        for (int i = 0; i < p; ++i) {
            const Piece& pc = pieces[i];
            if (xx >= pc.start && xx <= pc.end) {
                int m = static_cast<int>(pc.samples.size()) - 1;
                if (m < 1) return pc.samples[0];
                double frac = (pc.end > pc.start) ? (xx - pc.start) / (pc.end - pc.start) : 0.0;
                double s = frac * m;
                int k = std::min(static_cast<int>(s), m - 1);
                double f = s - k;
                return pc.samples[k] * (1.0 - f) + pc.samples[k + 1] * f;
            }
        }
    }
    // inside a gap: bridge linearly between the surrounding pieces
    for (int pass = 0; pass < 2; ++pass) {
        double xx = x + pass;
        for (int i = 0; i < p; ++i) {
            const Piece& prev = pieces[i];
            const Piece& next = pieces[(i + 1) % p];
            double gap_start = prev.end;
            double gap_end = next.start + (next.start < prev.end ? 1.0 : 0.0);
            if (xx >= gap_start && xx <= gap_end && gap_end > gap_start) {
                double f = (xx - gap_start) / (gap_end - gap_start);
                return prev.samples[prev.samples.size() - 1] * (1.0 - f) + next.samples[0] * f;
            }
        }
    }
    throw std::logic_error("point not covered by pieces or gaps");
}

double PiecewisePolySignal::sup_norm() const {
    double m = 0.0;
    for (const Piece& pc : pieces) m = std::max(m, pc.samples.cwiseAbs().maxCoeff());
    return m;
}

double PiecewisePolySignal::gradient_energy() const {
    double acc = 0.0;
    for (const Piece& pc : pieces) {
        int m = static_cast<int>(pc.samples.size()) - 1;
        if (m < 1) continue;
        double h = (pc.end - pc.start) / m;
        if (h <= 0.0) continue;
        for (int k = 0; k < m; ++k) {
            double slope = (pc.samples[k + 1] - pc.samples[k]) / h;
            acc += slope * slope * h;
        }
    }
    return acc;
}

double PiecewisePolySignal::jump_at(int i) const {
    const int p = static_cast<int>(pieces.size());
    const Piece& prev = pieces[(i + p - 1) % p];
    return pieces[i].samples[0] - prev.samples[prev.samples.size() - 1];
}

int PiecewisePolySignal::jump_count() const {
    double tol = kJumpTol * (1.0 + sup_norm());
    int c = 0;
    for (int i = 0; i < static_cast<int>(pieces.size()); ++i)
        if (std::abs(jump_at(i)) > tol) ++c;
    return c;
}

std::vector<double> PiecewisePolySignal::jump_locations() const {
    double tol = kJumpTol * (1.0 + sup_norm());
    std::vector<double> out;
    for (int i = 0; i < static_cast<int>(pieces.size()); ++i)
        if (std::abs(jump_at(i)) > tol) out.push_back(breakpoints[i]);
    return out;
}

SpectralVector PiecewisePolySignal::fourier(int order) const {
    SpectralVector out(order);
    const int p = static_cast<int>(pieces.size());
    for (int j = 0; j <= order; ++j) {
        std::complex<double> acc{0.0, 0.0};
        for (int i = 0; i < p; ++i) {
            const Piece& pc = pieces[i];
            int m = static_cast<int>(pc.samples.size()) - 1;
            double h = m >= 1 ? (pc.end - pc.start) / m : 0.0;
            for (int k = 0; k < m; ++k)
                acc += linear_fourier(pc.start + k * h, pc.start + (k + 1) * h, pc.samples[k],
                                      pc.samples[k + 1], j);
            // gap bridge to the next piece
            const Piece& next = pieces[(i + 1) % p];
            double gap_start = pc.end;
            double gap_end = next.start + (next.start < pc.end - 1e-15 ? 1.0 : 0.0);
            if (gap_end > gap_start)
                acc += linear_fourier(gap_start, gap_end, pc.samples[pc.samples.size() - 1],
                                      next.samples[0], j);
        }
        out.at(j) = acc;
        if (j > 0) out.at(-j) = std::conj(acc);
    }
    return out;
}

ObjectiveBreakdown eval_discrete_objective(const NodalSignal& u, const NodalSignal& v,
                                           const SpectralVector& m, const ModelParams& p) {
    check_same_mesh(u.mesh, v.mesh);
    const int n = u.mesh.cells;
    if (m.order != n) throw std::invalid_argument("measurement order != cell count");
    p.validate();

    const CellSignal c = cell_average(v);
    const CellSignal w = dq_apply(u, p.eps, p.q);
    const double e2 = p.eps * p.eps;
    const double log_weight =
        p.alt_log_weight ? std::pow(n, p.alpha - 1.0) : std::pow(n, -p.alpha);

    ObjectiveBreakdown b;
    double log_sum = 0.0, grad_sum = 0.0;
    for (int j = 0; j < n; ++j) {
        double lam_j = e2 + c.values[j] * c.values[j];
        log_sum += std::log(lam_j);
        grad_sum += lam_j * w.values[j] * w.values[j];
    }
    b.log_term = -log_weight * log_sum;
    b.grad_term = grad_sum / n;
    b.v_smooth = p.eps * stiffness_quadratic_form(v);
    Eigen::VectorXd one_minus_v = Eigen::VectorXd::Ones(n) - v.values;
    b.v_fidelity = one_minus_v.dot(apply_mass(u.mesh, one_minus_v)) / (4.0 * p.eps);

    SpectralVector au = forward_apply(u, p.s);
    b.residual = p.residual_weight() * (au.coeffs - m.coeffs).squaredNorm();
    b.total = b.log_term + b.grad_term + b.v_smooth + b.v_fidelity + b.residual;
    return b;
}

double eval_AT(const Polyline& u, const Polyline& v, double eps) {
    double acc = 0.0;
    for (const Segment& s : merge(u, v)) {
        double du = (s.ub - s.ua) / s.len;
        double dv = (s.vb - s.va) / s.len;
        double int_v2 = quad_sq(s.va, s.vb, s.len);
        acc += du * du * (eps * eps * s.len + int_v2);
        acc += eps * dv * dv * s.len;
        acc += quad_sq(1.0 - s.va, 1.0 - s.vb, s.len) / (4.0 * eps);
    }
    return acc;
}

double eval_AT(const NodalSignal& u, const NodalSignal& v, double eps) {
    check_same_mesh(u.mesh, v.mesh);
    return eval_AT(Polyline::from_nodal(u), Polyline::from_nodal(v), eps);
}

double eval_L(const Polyline& v, double eps) {
    double acc = 0.0;
    const int n = v.segments();
    for (int i = 0; i < n; ++i) {
        double len = v.segment_length(i);
        if (len <= 0.0) continue;
        double a = v.value[i], b = v.value[(i + 1) % n];
        acc += simpson(
            [&](double x) {
                double val = a + (b - a) * x;
                return -std::log(eps * eps + val * val);
            },
            0.0, 1.0, kSimpsonPanelsPerSegment) * len;
    }
    return acc;
}

double eval_L(const NodalSignal& v, double eps) { return eval_L(Polyline::from_nodal(v), eps); }

double eval_S(const Polyline& u, const Polyline& v, double eps, double q) {
    // mean of u
    double mean = 0.0;
    const int nu = u.segments();
    for (int i = 0; i < nu; ++i)
        mean += 0.5 * (u.value[i] + u.value[(i + 1) % nu]) * u.segment_length(i);

    const double eq = std::pow(eps, q);
    double acc = 0.0;
    for (const Segment& s : merge(u, v)) {
        double du = (s.ub - s.ua) / s.len;
        double int_weight = eps * eps * s.len + quad_sq(s.va, s.vb, s.len);
        acc += int_weight * (2.0 * eq * mean * du + eq * eq * mean * mean);
    }
    return acc;
}

double eval_S(const NodalSignal& u, const NodalSignal& v, double eps, double q) {
    check_same_mesh(u.mesh, v.mesh);
    return eval_S(Polyline::from_nodal(u), Polyline::from_nodal(v), eps, q);
}

double eval_MS(const PiecewisePolySignal& u, double lam, const SpectralVector* m, double s) {
    double value = u.gradient_energy() + u.jump_count();
    if (m != nullptr) {
        SpectralVector au = forward_apply(u.fourier(m->order), s);
        value += lam * (au.coeffs - m->coeffs).squaredNorm();
    }
    return value;
}

Polyline fold(const Polyline& v, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("fold radius must be > 0");
    return refine_and_map(
        v,
        [r](double a, double b) {
            std::vector<double> out;
            crossing_levels(a, b, r, out);
            return out;
        },
        [r](double y) { return psi_fold(y, r); });
}

Polyline fold(const NodalSignal& v, double r) { return fold(Polyline::from_nodal(v), r); }

Polyline fold_to_band(const Polyline& v, double eps) {
    const double top = 1.0 + 30.0 * eps;
    const double band = 30.0 * eps;
    auto levels = [top, band](double a, double b) {
        std::vector<double> out;
        double lo = std::min(a, b), hi = std::max(a, b);
        auto push = [&](double level) {
            if (level > lo && level < hi) out.push_back(level);
        };
        push(0.0);
        push(top);
        // fold lines of Psi_1 below zero: v = -1, -2, ...
        for (long k = 1; -static_cast<double>(k) > lo - 1.0; ++k) push(-static_cast<double>(k));
        // fold lines of Psi_{30 eps} above the band: v = 1 + k*30eps
        for (long k = 2; 1.0 + k * band < hi + band; ++k) push(1.0 + k * band);
        std::sort(out.begin(), out.end());
        if (a > b) std::reverse(out.begin(), out.end());
        return out;
    };
    auto map = [top, band](double y) {
        if (y < 0.0) return psi_fold(y, 1.0);
        if (y <= top) return y;
        return 1.0 + psi_fold(y - 1.0, band);
    };
    return refine_and_map(v, levels, map);
}

Polyline fold_to_band(const NodalSignal& v, double eps) {
    return fold_to_band(Polyline::from_nodal(v), eps);
}

double dirichlet_energy(const Polyline& v) {
    double acc = 0.0;
    const int n = v.segments();
    for (int i = 0; i < n; ++i) {
        double len = v.segment_length(i);
        if (len <= 0.0) continue;
        double d = v.value[(i + 1) % n] - v.value[i];
        acc += d * d / len;
    }
    return acc;
}

double g_eps(double t, double eps) {
    return -std::log(eps * eps + t * t) + (1.0 - t) * (1.0 - t) / (4.0 * eps);
}

ScalarMin minimize_g(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
    double hi = 2.0 + 4.0 * std::sqrt(eps) + 4.0 * eps;
    double t = golden_section([eps](double x) { return g_eps(x, eps); }, 0.0, hi);
    return {t, g_eps(t, eps)};
}

double eval_G(const NodalSignal& v, double b, double eps) {
    const int n = v.mesh.cells;
    const CellSignal c = cell_average(v);
    double log_sum = 0.0;
    for (int j = 0; j < n; ++j) log_sum += std::log(eps * eps + c.values[j] * c.values[j]);
    Eigen::VectorXd one_minus_v = Eigen::VectorXd::Ones(n) - v.values;
    double fid = one_minus_v.dot(apply_mass(v.mesh, one_minus_v));
    return -log_sum + b * fid / (4.0 * eps);
}

ScalarMin min_gN(int N, double eps) {
    if (N < 1 || !(eps > 0.0)) throw std::invalid_argument("min_gN: bad arguments");
    auto g = [N, eps](double s) {
        return -N * std::log(eps * eps + s * s) + (1.0 - s) * (1.0 - s) / (4.0 * eps);
    };
    double hi = 2.0 + 2.0 * std::sqrt(1.0 + 16.0 * eps * N);
    double s = golden_section(g, 0.0, hi);
    return {s, g(s)};
}

ScalarMin minimize_scalar_potential(double log_weight, double eps) {
    auto g = [log_weight, eps](double t) {
        return -log_weight * std::log(eps * eps + t * t) +
               (1.0 - t) * (1.0 - t) / (4.0 * eps);
    };
    double hi = 2.0 + 2.0 * std::sqrt(1.0 + 16.0 * eps * std::max(1.0, log_weight));
    double t = golden_section(g, 0.0, hi);
    return {t, g(t)};
}

}  // namespace hgdeblur
