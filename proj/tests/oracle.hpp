#ifndef HGDEBLUR_TESTS_ORACLE_HPP
#define HGDEBLUR_TESTS_ORACLE_HPP

// Test-only oracles, independent of the library's evaluation paths: dense
// Gauss-Legendre quadrature and 1-D grid search. Expected values frozen into
// the tests were produced with these.

#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

// 16-point Gauss-Legendre nodes/weights on [0,1] halves
constexpr int kHalf = 8;
constexpr double kX[kHalf] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                              0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                              0.9445750230732326, 0.9894009349916499};
constexpr double kW[kHalf] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                              0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                              0.0622535239386479, 0.0271524594117541};

inline double integrate(const std::function<double(double)>& f, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < kHalf; ++i) acc += kW[i] * (f(mid - half * kX[i]) + f(mid + half * kX[i]));
    return acc * half;
}

// integral over [0,1) split at the mesh cells (and `sub` panels per cell) so
// piecewise-smooth integrands are handled exactly per piece
inline double integrate_circle(const std::function<double(double)>& f, int cells, int sub = 8) {
    double acc = 0.0;
    for (int j = 0; j < cells; ++j)
        for (int k = 0; k < sub; ++k)
            acc += integrate(f, (j + static_cast<double>(k) / sub) / cells,
                             (j + static_cast<double>(k + 1) / sub) / cells);
    return acc;
}

inline std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                              double a, double b) {
    double re = integrate([&](double t) { return f(t).real(); }, a, b);
    double im = integrate([&](double t) { return f(t).imag(); }, a, b);
    return {re, im};
}

// dense 1-D grid search refined around the best cell
inline std::pair<double, double> grid_minimize(const std::function<double(double)>& f, double lo,
                                               double hi, int points = 20000, int refinements = 6) {
    double best_x = lo, best_v = f(lo);
    for (int r = 0; r < refinements; ++r) {
        for (int i = 0; i <= points; ++i) {
            double x = lo + (hi - lo) * i / points;
            double v = f(x);
            if (v < best_v) {
                best_v = v;
                best_x = x;
            }
        }
        double step = (hi - lo) / points;
        lo = best_x - 2 * step;
        hi = best_x + 2 * step;
    }
    return {best_x, best_v};
}

}  // namespace oracle

#endif
