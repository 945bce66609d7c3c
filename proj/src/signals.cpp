#include "hgdeblur/signals.hpp"

namespace hgdeblur {

NodalSignal TestSignal::sample(const Mesh& mesh) const {
    Eigen::VectorXd values(mesh.cells);
    for (int j = 0; j < mesh.cells; ++j) values[j] = exact.at(mesh.node(j));
    return NodalSignal(mesh, values);
}

TestSignal step_signal() {
    TestSignal s;
    s.name = "step";
    s.jumps = {0.2, 0.6};
    s.exact = PiecewisePolySignal::from_function(
        {0.2, 0.6}, [](double t) { return (t >= 0.2 && t < 0.6) ? 1.0 : 0.0; }, 8);
    return s;
}

TestSignal piecewise_smooth_signal() {
    TestSignal s;
    s.name = "piecewise-smooth";
    s.jumps = {0.1, 0.35, 0.55, 0.8};
    auto fn = [](double t) {
        if (t >= 0.1 && t < 0.35) return 1.0 + 0.3 * std::sin(2.0 * M_PI * (t - 0.1) / 0.5);
        if (t >= 0.35 && t < 0.55) return 0.3;
        if (t >= 0.55 && t < 0.8) {
            double d = t - 0.55;
            return 0.9 - 3.0 * d * d;
        }
        return 0.0;
    };
    s.exact = PiecewisePolySignal::from_function({0.1, 0.35, 0.55, 0.8}, fn, 64);
    return s;
}

TestSignal signal_by_name(const std::string& name) {
    if (name == "step") return step_signal();
    if (name == "piecewise-smooth") return piecewise_smooth_signal();
    throw std::invalid_argument("unknown signal: " + name);
}

}  // namespace hgdeblur
