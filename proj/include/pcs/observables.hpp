#pragma once

#include "pcs/fock_algebra.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace pcs {

// Raised when tr(rho a+ a+ a a) is too far from a non-negative real number.
struct BrokenDensityMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two-photon coincidence rate in arbitrary units. value is clamped at zero,
// raw keeps what the trace gave.
struct W2Value {
    double value = 0.0;
    double raw = 0.0;
};

W2Value make_w2(double raw); // clamps, throws below -1e-8
W2Value w2(const DensityMatrix& rho);
// sum p_m w_m; p_m >= 0
W2Value mixture_w2(const std::vector<std::pair<double, W2Value>>& components);

} // namespace pcs
