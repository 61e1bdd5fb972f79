#include "pcs/broadening.hpp"
#include "pcs/spectroscopy.hpp"

#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

using namespace pcs;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double mean_g(const CouplingDistribution& d)
{
    double m = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
        m += d.nodes[i] * d.weights[i];
    return m;
}

} // namespace

TEST_SUITE("broadening")
{
    TEST_CASE("cdf matches sampled atom positions")
    {
        // positions in units of the wavelength and the waist
        std::mt19937 rng(11);
        const double pi = std::acos(-1.0);
        struct Case {
            DistributionKind kind;
            double zlo, zhi, ymax;
        } cases[] = {{DistributionKind::UniformBeam, 0.0, 0.5, 2.0},
                     {DistributionKind::MaskedBeam, -1.0 / 16, 1.0 / 16, 0.25}};
        for (const auto& c : cases) {
            std::uniform_real_distribution<double> z(c.zlo, c.zhi), y(-c.ymax, c.ymax);
            const int n = 400000;
            std::vector<double> g(n);
            for (auto& x : g) {
                const double zz = z(rng), yy = y(rng);
                x = std::abs(std::cos(2 * pi * zz)) * std::exp(-yy * yy);
            }
            for (double x : {0.05, 0.2, 0.5, 0.8, 0.9, 0.95, 0.99}) {
                const double frac = double(std::count_if(g.begin(), g.end(), [&](double v) { return v <= x; })) / n;
                CHECK(std::abs(beam_cdf(c.kind, x) - frac) < 4e-3);
            }
            CHECK(beam_cdf(c.kind, 1.0) == doctest::Approx(1.0));
        }
        CHECK(support_floor(DistributionKind::UniformBeam) == doctest::Approx(0.0));
        CHECK(support_floor(DistributionKind::MaskedBeam) ==
              doctest::Approx(std::cos(pi / 8) * std::exp(-1.0 / 16)));
    }

    TEST_CASE("built distributions are valid and normalised")
    {
        for (auto k : {DistributionKind::UniformBeam, DistributionKind::MaskedBeam}) {
            const auto d = build_distribution(k, 63.0, 0.1, 24);
            CHECK_NOTHROW(d.validate());
            CHECK(std::abs(sum(d.weights) - 1.0) < 1e-12);
            CHECK(d.nodes.front() >= 6.3);
            CHECK(d.nodes.back() <= 63.0);
            for (std::size_t i = 1; i < d.size(); ++i)
                CHECK(d.nodes[i] > d.nodes[i - 1]);
        }
        const auto u = build_distribution(DistributionKind::UniformBeam, 63.0, 0.1, 24);
        const auto m = build_distribution(DistributionKind::MaskedBeam, 63.0, 0.5, 24);
        CHECK(mean_g(m) > mean_g(u));
        // uniform beam density falls towards g_max
        CHECK(u.weights.front() > u.weights.back());
        CHECK(!m.note.empty());
        CHECK_THROWS_AS(build_distribution(DistributionKind::UniformBeam, 63.0, 0.1, 4), std::invalid_argument);
        CHECK_THROWS_AS(build_distribution(DistributionKind::MaskedBeam, 63.0, 1.0, 24), std::invalid_argument);
    }

    TEST_CASE("delta and custom tables")
    {
        const auto d = delta_distribution(40.0);
        REQUIRE(d.size() == 1);
        CHECK(d.nodes[0] == 40.0);
        CHECK(d.weights[0] == 1.0);
        const auto c = custom_distribution({10, 20, 30}, {1, 2, 1}, 30.0, 0.2);
        CHECK(c.weights[1] == doctest::Approx(0.5));
        CHECK_THROWS(custom_distribution({10, 5}, {1, 1}, 30.0, 0.1));
        CHECK_THROWS(custom_distribution({1, 20}, {1, 1}, 30.0, 0.5));
    }

    TEST_CASE("product grids")
    {
        const auto d = build_distribution(DistributionKind::UniformBeam, 63.0, 0.1, 10);
        const auto p = product_distribution(d, d);
        CHECK(p.size() == 100);
        CHECK(std::abs(sum(p.weights) - 1.0) < 1e-12);
        // marginals
        for (std::size_t i = 0; i < d.size(); ++i) {
            double m = 0;
            for (std::size_t j = 0; j < d.size(); ++j)
                m += p.weights[i * d.size() + j];
            CHECK(m == doctest::Approx(d.weights[i]).epsilon(1e-12));
        }
        const auto r = exchange_reduced_product(d);
        CHECK(r.size() == 55);
        auto f = [](double a, double b) { return make_w2(a * a * b + a * b * b + std::sin(a) * std::sin(b)); };
        CHECK(average_w2(r, f).value == doctest::Approx(average_w2(p, f).value).epsilon(1e-12));
        const auto pd = product_distribution(delta_distribution(3.0), delta_distribution(4.0));
        CHECK(pd.size() == 1);
    }

    TEST_CASE("averaging")
    {
        CHECK(average_w2(delta_distribution(5.0), [](double g) { return make_w2(g * 2); }).value == 10.0);
        const auto c = custom_distribution({1.0, 2.0}, {1, 1}, 2.0, 0.5);
        CHECK(average_w2(c, [](double g) { return make_w2(g == 1.0 ? 1.0 : 3.0); }).value == 2.0);
        const auto u = build_distribution(DistributionKind::UniformBeam, 63.0, 0.1, 12);
        CHECK(average_w2(u, [](double) { return make_w2(0.25); }).value == doctest::Approx(0.25).epsilon(1e-14));
        try {
            average_w2(c, [](double g) -> W2Value {
                if (g > 1.5)
                    throw std::runtime_error("boom");
                return make_w2(1.0);
            });
            FAIL("no throw");
        } catch (const NodeFailure& e) {
            CHECK(e.node == 1);
        }
    }

    TEST_CASE("averaging w2 equals w2 of the averaged state")
    {
        const auto c = custom_distribution({20.0, 40.0, 60.0}, {0.2, 0.5, 0.3}, 63.0, 0.1);
        ScanConfig sc;
        const double delta = scan_delta(63.0, 2.3);
        Matrix avg;
        double direct = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const auto sol = steady_state(sc.system({c.nodes[i]}, true), delta, 2);
            avg = i == 0 ? Matrix(c.weights[i] * sol.block(0)) : Matrix(avg + c.weights[i] * sol.block(0));
            direct += c.weights[i] * w2(sol.rho0()).raw;
        }
        const auto via = average_w2(c, [&](double g) { return w2(steady_state(sc.system({g}, true), delta, 2).rho0()); });
        CHECK(std::abs(via.raw - direct) < 1e-12 * direct);
        CHECK(std::abs(w2(DensityMatrix(CompositeSpace(4, 1), avg)).raw - direct) < 1e-12 * direct);
    }

    TEST_CASE("kind names")
    {
        for (auto k : {DistributionKind::UniformBeam, DistributionKind::MaskedBeam, DistributionKind::Delta,
                       DistributionKind::CustomTable})
            CHECK(parse_distribution_kind(to_string(k)) == k);
        CHECK_THROWS(parse_distribution_kind("gaussian"));
    }
}
