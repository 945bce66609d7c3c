#ifndef HGDEBLUR_SIGNALS_HPP
#define HGDEBLUR_SIGNALS_HPP

#include "hgdeblur/functionals.hpp"
#include "hgdeblur/mesh.hpp"

#include <string>

namespace hgdeblur {

/// A ground-truth signal: exact piecewise representation plus its jump set.
struct TestSignal {
    std::string name;
    PiecewisePolySignal exact;
    std::vector<double> jumps;

    NodalSignal sample(const Mesh& mesh) const;
};

/// Step signal u(t) = 1 on [0.2, 0.6), 0 elsewhere; two jumps.
TestSignal step_signal();

/// Piecewise-smooth signal with exactly four jumps at
/// {0.1, 0.35, 0.55, 0.8}: zero, a sine arch, a shallow constant shelf and a
/// quadratic cap. The shelf-to-cap jump is moderate so coarse sharpness
/// levels may merge it.
TestSignal piecewise_smooth_signal();

TestSignal signal_by_name(const std::string& name);

}  // namespace hgdeblur

#endif
