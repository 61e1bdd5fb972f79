#include "pcs/broadening.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace pcs {

std::string to_string(DistributionKind k)
{
    switch (k) {
    case DistributionKind::UniformBeam: return "uniform-beam";
    case DistributionKind::MaskedBeam: return "masked-beam";
    case DistributionKind::Delta: return "delta";
    case DistributionKind::CustomTable: return "custom-table";
    }
    return "?";
}

DistributionKind parse_distribution_kind(const std::string& s)
{
    for (auto k : {DistributionKind::UniformBeam, DistributionKind::MaskedBeam,
                   DistributionKind::Delta, DistributionKind::CustomTable})
        if (s == to_string(k))
            return k;
    throw std::invalid_argument("unknown distribution kind '" + s + "'");
}

void CouplingDistribution::validate() const
{
    if (!(g_max > 0.0) || !std::isfinite(g_max))
        throw std::invalid_argument("g_max must be positive");
    if (!(F > 0.0 && F <= 1.0))
        throw std::invalid_argument("cut-off fraction F must lie in (0, 1]");
    if (nodes.empty())
        throw EmptySupport("distribution has no nodes");
    if (nodes.size() != weights.size() || nodes.size() != widths.size())
        throw std::invalid_argument("nodes, widths and weights differ in length");
    const double lo = F * g_max * (1 - 1e-12), hi = g_max * (1 + 1e-12);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] < lo || nodes[i] > hi)
            throw std::invalid_argument("node outside [F g_max, g_max]");
        if (i > 0 && !(nodes[i] > nodes[i - 1]))
            throw std::invalid_argument("nodes must be strictly increasing");
        if (!(weights[i] >= 0.0))
            throw std::invalid_argument("weights must be >= 0");
    }
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("weights do not sum to 1");
}

namespace {

constexpr double pi = std::numbers::pi;

struct BeamGeometry {
    double y_half;  // in units of the waist w
    double u_half;  // half-range of 2 pi z / lambda around the antinode
};

BeamGeometry geometry(DistributionKind k)
{
    if (k == DistributionKind::UniformBeam)
        return {2.0, pi / 2};
    if (k == DistributionKind::MaskedBeam)
        return {0.25, pi / 8};
    throw std::invalid_argument("no position model for " + to_string(k));
}

} // namespace

double support_floor(DistributionKind kind)
{
    const auto geo = geometry(kind);
    return std::cos(geo.u_half) * std::exp(-geo.y_half * geo.y_half);
}

double beam_cdf(DistributionKind kind, double x)
{
    const auto geo = geometry(kind);
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    // P(|cos u| <= t) for u uniform on [-u_half, u_half]
    auto cos_cdf = [&](double t) {
        if (t >= 1.0)
            return 1.0;
        const double a = std::acos(t);
        return a >= geo.u_half ? 0.0 : 1.0 - a / geo.u_half;
    };
    // average over y in [0, y_half]; the integrand is continuous, so a fine
    // midpoint rule is plenty
    const int n = 20000;
    const double h = geo.y_half / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double y = (i + 0.5) * h;
        s += cos_cdf(x * std::exp(y * y));
    }
    return s / n;
}

CouplingDistribution build_distribution(DistributionKind kind, double g_max, double F,
                                        int resolution)
{
    if (kind == DistributionKind::Delta)
        return delta_distribution(g_max);
    if (kind == DistributionKind::CustomTable)
        throw std::invalid_argument("custom tables are built with custom_distribution");
    if (resolution < 8)
        throw std::invalid_argument("resolution must be at least 8 nodes");
    if (!(F > 0.0 && F < 1.0))
        throw std::invalid_argument("cut-off fraction F must lie in (0, 1)");
    if (!(g_max > 0.0) || !std::isfinite(g_max))
        throw std::invalid_argument("g_max must be positive");

    const double lo = std::max(F, support_floor(kind));
    CouplingDistribution d;
    d.kind = kind;
    d.g_max = g_max;
    d.F = F;
    if (lo > F)
        d.note = "bins start at the model's support floor g/g_max = " + std::to_string(lo);
    std::vector<double> cdf(resolution + 1);
    const double h = (1.0 - lo) / resolution;
    for (int i = 0; i <= resolution; ++i)
        cdf[i] = beam_cdf(kind, lo + i * h);
    const double total = cdf.back() - cdf.front();
    if (!(total > 0.0))
        throw EmptySupport("no probability left above the cut-off");
    for (int i = 0; i < resolution; ++i) {
        const double mass = (cdf[i + 1] - cdf[i]) / total;
        if (mass <= 0.0)
            continue;
        d.nodes.push_back(g_max * (lo + (i + 0.5) * h));
        d.widths.push_back(g_max * h);
        d.weights.push_back(mass);
    }
    const double sum = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
    for (auto& w : d.weights)
        w /= sum;
    d.validate();
    return d;
}

CouplingDistribution delta_distribution(double g0)
{
    CouplingDistribution d;
    d.kind = DistributionKind::Delta;
    d.g_max = g0;
    d.F = 1.0;
    d.nodes = {g0};
    d.widths = {0.0};
    d.weights = {1.0};
    d.validate();
    return d;
}

CouplingDistribution custom_distribution(std::vector<double> nodes, std::vector<double> weights,
                                         double g_max, double F)
{
    if (nodes.size() != weights.size())
        throw std::invalid_argument("custom table: nodes and weights differ in length");
    if (nodes.empty())
        throw EmptySupport("custom table is empty");
    CouplingDistribution d;
    d.kind = DistributionKind::CustomTable;
    d.g_max = g_max;
    d.F = F;
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0.0))
        throw EmptySupport("custom table has zero total weight");
    for (auto& w : weights)
        w /= sum;
    // widths: distance between neighbouring midpoints, clipped to the range
    const std::size_t n = nodes.size();
    d.widths.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i == 0 ? F * g_max : 0.5 * (nodes[i - 1] + nodes[i]);
        const double right = i + 1 == n ? g_max : 0.5 * (nodes[i] + nodes[i + 1]);
        d.widths[i] = right - left;
    }
    d.nodes = std::move(nodes);
    d.weights = std::move(weights);
    d.validate();
    return d;
}

ProductGrid product_distribution(const CouplingDistribution& d1, const CouplingDistribution& d2)
{
    d1.validate();
    d2.validate();
    ProductGrid p;
    for (std::size_t i = 0; i < d1.size(); ++i)
        for (std::size_t j = 0; j < d2.size(); ++j) {
            p.g1.push_back(d1.nodes[i]);
            p.g2.push_back(d2.nodes[j]);
            p.weights.push_back(d1.weights[i] * d2.weights[j]);
        }
    return p;
}

ProductGrid exchange_reduced_product(const CouplingDistribution& d)
{
    d.validate();
    ProductGrid p;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i; j < d.size(); ++j) {
            p.g1.push_back(d.nodes[i]);
            p.g2.push_back(d.nodes[j]);
            p.weights.push_back((i == j ? 1.0 : 2.0) * d.weights[i] * d.weights[j]);
        }
    return p;
}

NodeFailure::NodeFailure(std::size_t n, const std::string& what)
    : std::runtime_error("grid node " + std::to_string(n) + ": " + what), node(n)
{
}

W2Value average_w2(const CouplingDistribution& d, const std::function<W2Value(double)>& eval)
{
    W2Value out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        W2Value w;
        try {
            w = eval(d.nodes[i]);
        } catch (const std::exception& e) {
            throw NodeFailure(i, e.what());
        }
        out.value += d.weights[i] * w.value;
        out.raw += d.weights[i] * w.raw;
    }
    return out;
}

W2Value average_w2(const ProductGrid& grid, const std::function<W2Value(double, double)>& eval)
{
    W2Value out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        W2Value w;
        try {
            w = eval(grid.g1[i], grid.g2[i]);
        } catch (const std::exception& e) {
            throw NodeFailure(i, e.what());
        }
        out.value += grid.weights[i] * w.value;
        out.raw += grid.weights[i] * w.raw;
    }
    return out;
}

} // namespace pcs
