#pragma once

#include "pcs/observables.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcs {

enum class DistributionKind { UniformBeam, MaskedBeam, Delta, CustomTable };

std::string to_string(DistributionKind k);
DistributionKind parse_distribution_kind(const std::string& s); // "uniform-beam", ...

// Discretised P(g) on [F g_max, g_max]: midpoint nodes, bin widths and
// normalised bin masses.
struct CouplingDistribution {
    DistributionKind kind = DistributionKind::Delta;
    double g_max = 1.0;
    double F = 1.0;
    std::vector<double> nodes;
    std::vector<double> widths;  // bin width in units of kappa, 0 for a delta
    std::vector<double> weights; // sum to 1
    std::string note;

    std::size_t size() const { return nodes.size(); }
    void validate() const;
};

struct EmptySupport : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Beam models from atoms spread over a TEM00 mode,
//   g(y, z) = g_max |cos(2 pi z / lambda)| exp(-y^2 / w^2),
// z uniform over half a wavelength, y uniform over [-2w, 2w] (uniform beam)
// or a mask |y| <= w/4, |z - antinode| <= lambda/16 (masked beam).
// resolution bins span the part of [F g_max, g_max] the model can reach.
CouplingDistribution build_distribution(DistributionKind kind, double g_max, double F,
                                        int resolution);
CouplingDistribution delta_distribution(double g0);
CouplingDistribution custom_distribution(std::vector<double> nodes, std::vector<double> weights,
                                         double g_max, double F);

// Lowest g/g_max the position model reaches
double support_floor(DistributionKind kind);
// P(g <= x g_max) for the position model, before any cut-off
double beam_cdf(DistributionKind kind, double x);

// Two-atom grid, node k = i * n2 + j
struct ProductGrid {
    std::vector<double> g1, g2, weights;
    std::size_t size() const { return weights.size(); }
};

ProductGrid product_distribution(const CouplingDistribution& d1, const CouplingDistribution& d2);
// Same as the product of d with itself, but only nodes with i <= j and the
// off-diagonal weights doubled. Valid for exchange-symmetric integrands.
ProductGrid exchange_reduced_product(const CouplingDistribution& d);

struct NodeFailure : std::runtime_error {
    NodeFailure(std::size_t node, const std::string& what);
    std::size_t node;
};

// sum of weight * w2 in node order
W2Value average_w2(const CouplingDistribution& d, const std::function<W2Value(double)>& eval);
W2Value average_w2(const ProductGrid& grid,
                   const std::function<W2Value(double, double)>& eval);

} // namespace pcs
