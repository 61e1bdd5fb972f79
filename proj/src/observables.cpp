#include "pcs/observables.hpp"

#include <cmath>
#include <string>

namespace pcs {

W2Value make_w2(double raw)
{
    if (!std::isfinite(raw))
        throw BrokenDensityMatrix("non-finite coincidence rate");
    if (raw < -1e-8)
        throw BrokenDensityMatrix("negative coincidence rate " + std::to_string(raw));
    return {std::max(raw, 0.0), raw};
}

W2Value w2(const DensityMatrix& rho)
{
    // a+ a+ a a is diagonal with entries n(n-1)
    const auto& s = rho.space();
    cplx t = 0.0;
    for (int i = 0; i < s.dim(); ++i) {
        const int n = s.photons(i);
        t += double(n) * (n - 1) * rho.mat()(i, i);
    }
    if (std::abs(t.imag()) > 1e-8)
        throw BrokenDensityMatrix("coincidence rate has imaginary part " +
                                  std::to_string(t.imag()));
    return make_w2(t.real());
}

W2Value mixture_w2(const std::vector<std::pair<double, W2Value>>& components)
{
    W2Value out;
    for (const auto& [p, w] : components) {
        if (!(p >= 0.0))
            throw std::invalid_argument("mixture probabilities must be >= 0");
        out.value += p * w.value;
        out.raw += p * w.raw;
    }
    return out;
}

} // namespace pcs
