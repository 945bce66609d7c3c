#ifndef HGDEBLUR_VERIFY_HPP
#define HGDEBLUR_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace hgdeblur::verify {

struct Options {
    std::uint64_t seed = 2026;
    // Negative-control hook: perturbs the mass matrix inside the structure
    // property, which must then fail.
    bool perturb_mass = false;
};

struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail;  // measured numbers
};

std::vector<PropertyResult> grid_properties(const Options& opt);
std::vector<PropertyResult> functional_properties(const Options& opt);
std::vector<PropertyResult> stochastic_properties(const Options& opt);
std::vector<PropertyResult> solver_properties(const Options& opt);
std::vector<PropertyResult> experiment_properties(const Options& opt);

/// Every module's invariant suite, one result per property.
std::vector<PropertyResult> run_all(const Options& opt = {});

}  // namespace hgdeblur::verify

#endif
