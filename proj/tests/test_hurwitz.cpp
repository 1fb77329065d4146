#include <gtest/gtest.h>

#include <random>

#include "markoff/hurwitz.hpp"
#include "oracles.hpp"

using namespace markoff;
using cd = std::complex<double>;

namespace {

hurwitz_point<double> pt3(cd a, cd b, cd c) { return hurwitz_point<double>(point<double>{a, b, c}); }

oracle::word to_word(const vertex_address& v) { return {v.letters.begin(), v.letters.end()}; }

}  // namespace

TEST(HurwitzPoint, CachedMu)
{
    auto a = pt3(3, 3, 3);
    EXPECT_EQ(a.mu, cd(0));
    EXPECT_THROW(hurwitz_point<double>(point<double>{1, 2}), std::invalid_argument);
    auto d = diagonal_point<double>(4, cd(2, 0));
    EXPECT_EQ(d.mu, cd(0));
}

TEST(PhiVertex, Examples)
{
    auto a = pt3(3, 3, 3);
    EXPECT_EQ(phi_vertex(a, vertex_address{}), a.x);
    EXPECT_EQ(phi_vertex(a, make_vertex({1})), (point<double>{6, 3, 3}));
}

TEST(PhiVertex, AgreesWithWordOracleAndEdgeRelation)
{
    std::mt19937_64 rng(21);
    for (int n = 3; n <= 5; ++n)
        for (int t = 0; t < 5; ++t) {
            hurwitz_point<double> a(oracle::random_point(n, rng, 0.5, 1.5));
            for (auto& v : ball(n, 3)) {
                auto x = phi_vertex(a, v);
                auto want = oracle::phi_of_word(a.x, to_word(v));
                for (int k = 0; k < n; ++k) EXPECT_LT(std::abs(x[k] - want[k]), 1e-10 * (1 + std::abs(want[k])));
                for (int i = 1; i <= n; ++i) {
                    auto y = phi_vertex(a, neighbor(v, i));
                    cd lhs = x[i - 1] + y[i - 1];
                    cd rhs = product_except(x, static_cast<std::size_t>(i - 1));
                    EXPECT_LT(std::abs(lhs - rhs), 1e-10 * (1 + std::abs(rhs)));
                }
                EXPECT_LT(std::abs(markoff_hurwitz(x) - a.mu), 1e-9 * (1 + std::abs(a.mu)) + 1e-12 * std::norm(x[0]));
            }
        }
}

TEST(PhiGeodesic, Examples)
{
    auto w = phi_geodesic(pt3(3, 3, 3), geodesic_address{vertex_address{}, 1, 2});
    EXPECT_EQ(w.phi, cd(3));
    EXPECT_EQ(w.sigma, cd(9));
    auto w4 = phi_geodesic(diagonal_point<double>(4, cd(2)), geodesic_address{vertex_address{}, 1, 2});
    EXPECT_EQ(w4.phi, cd(4));
    EXPECT_EQ(w4.sigma, cd(8));
    EXPECT_NEAR(std::abs(w4.lambda + 1.0 / w4.lambda - w4.phi), 0, 1e-12);
    EXPECT_GE(std::abs(w4.lambda), 1.0);
}

TEST(PhiGeodesic, ConstantAlongGeodesic)
{
    std::mt19937_64 rng(22);
    const int n = 4;
    hurwitz_point<double> a(oracle::random_point(n, rng, 0.8, 1.2));
    for_each_geodesic(n, 2, [&](const geodesic_address& g) {
        auto w0 = phi_geodesic(a, g);
        for (long m = -10; m <= 10; ++m) {
            auto x = phi_vertex(a, geodesic_vertex(g, m));
            auto w = weights_at(x, g.i, g.j);
            EXPECT_LT(std::abs(w.phi - w0.phi), 1e-10 * (1 + std::abs(w0.phi)));
            EXPECT_LT(std::abs(w.sigma - w0.sigma), 1e-10 * (1 + std::abs(w0.sigma)));
        }
    });
}

TEST(Lambda, Branch)
{
    for (cd phi : {cd(3), cd(-3), cd(0.5, 2), cd(1.5), cd(-1.0), cd(2), cd(0)}) {
        cd l = lambda_of(phi);
        EXPECT_GE(std::abs(l), 1 - 1e-12);
        EXPECT_LT(std::abs(l + 1.0 / l - phi), 1e-12);
    }
    EXPECT_GE(lambda_of(cd(1.5)).imag(), 0.0);
}

TEST(ExtendedPhi, Cases)
{
    std::mt19937_64 rng(23);
    const int n = 5;
    hurwitz_point<double> a(oracle::random_point(n, rng));
    cd prod = 1;
    for (auto& z : a.x) prod *= z;
    EXPECT_LT(std::abs(extended_phi(a, canonical_subtree(vertex_address{}, {})) - prod), 1e-12 * std::abs(prod));
    EXPECT_EQ(extended_phi(a, coordinate_subtree(vertex_address{}, n, 1)), a.x[0]);
    // φ(γ) x_i x_j = φ(v) for v on γ
    for_each_geodesic(n, 1, [&](const geodesic_address& g) {
        auto x = phi_vertex(a, g.root);
        cd pv = 1;
        for (auto& z : x) pv *= z;
        cd lhs = phi_geodesic(a, g).phi * x[g.i - 1] * x[g.j - 1];
        EXPECT_LT(std::abs(lhs - pv), 1e-10 * std::abs(pv));
    });
}

TEST(GeodesicValues, MarkoffRoot)
{
    auto y = geodesic_values(pt3(3, 3, 3), geodesic_address{vertex_address{}, 1, 2}, -1, 3);
    ASSERT_EQ(y.size(), 5u);
    // y_{m+1} = 3 y_m - y_{m-1} from 3, 3
    std::vector<double> want{3, 3, 6, 15, 39};
    for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(y[k], cd(want[k]));
    auto z = geodesic_values(pt3(3, 3, 3), geodesic_address{vertex_address{}, 1, 2}, -4, -2);
    EXPECT_EQ(z, (std::vector<cd>{39, 15, 6}));
}

TEST(GeodesicValues, RecurrenceAndConservedRelation)
{
    std::mt19937_64 rng(24);
    for (int t = 0; t < 50; ++t) {
        int n = 3 + t % 3;
        hurwitz_point<double> a(oracle::random_point(n, rng, 0.9, 1.4));
        geodesic_address g{vertex_address{}, 1, 2};
        auto w = phi_geodesic(a, g);
        auto y = geodesic_values(a, g, -10, 10);
        for (std::size_t k = 1; k + 1 < y.size(); ++k) {
            cd rec = y[k - 1] + y[k + 1] - w.phi * y[k];
            EXPECT_LT(std::abs(rec), 1e-8 * (1 + std::abs(y[k + 1]) + std::abs(w.phi * y[k])));
        }
        for (std::size_t k = 0; k + 1 < y.size(); ++k) {
            cd lhs = y[k] * y[k] + y[k + 1] * y[k + 1] + w.sigma;
            cd rhs = w.phi * y[k] * y[k + 1] + a.mu;
            EXPECT_LT(std::abs(lhs - rhs), 1e-8 * (1 + std::abs(lhs) + std::abs(rhs)));
        }
    }
}

TEST(Growth, FiveCases)
{
    // n = 3, γ = [v0;{1,2}]: φ = x3, σ = x3^2
    EXPECT_EQ(growth_class(pt3(3, 3, 3), geodesic_address{vertex_address{}, 1, 2}), growth::exponential_both_ends);
    EXPECT_EQ(growth_class(pt3(0.7, 1.1, 1.5), geodesic_address{vertex_address{}, 1, 2}), growth::bounded);
    EXPECT_EQ(growth_class(pt3(1.0, 0.3, 2), geodesic_address{vertex_address{}, 1, 2}), growth::linear_plus2);
    EXPECT_EQ(growth_class(pt3(1.0, 0.3, -2), geodesic_address{vertex_address{}, 1, 2}), growth::linear_minus2);
    // σ = μ iff x1^2 + x2^2 = x1 x2 x3
    double x2 = (3 + std::sqrt(5.0)) / 2;
    auto a = pt3(1, x2, 3);
    geodesic_address g{vertex_address{}, 1, 2};
    EXPECT_EQ(growth_class(a, g), growth::scalar_geometric);
    auto y = geodesic_values(a, g, 0, 10);
    cd r = y[1] / y[0];
    for (std::size_t k = 1; k + 1 < y.size(); ++k) EXPECT_LT(std::abs(y[k + 1] / y[k] - r), 1e-8 * std::abs(r));
    auto l = phi_geodesic(a, g).lambda;
    EXPECT_TRUE(std::abs(r - l) < 1e-8 || std::abs(r - 1.0 / l) < 1e-8);
}

TEST(Growth, LinearAtTwo)
{
    auto a = pt3(1.0, 0.3, 2);
    geodesic_address g{vertex_address{}, 1, 2};
    auto y = geodesic_values(a, g, -5, 5);
    cd step = y[1] - y[0];
    for (std::size_t k = 0; k + 1 < y.size(); ++k) EXPECT_LT(std::abs(y[k + 1] - y[k] - step), 1e-12);
    auto w = phi_geodesic(a, g);
    EXPECT_LT(std::abs(step * step - (a.mu - w.sigma)), 1e-12);
    EXPECT_EQ(to_string(growth::bounded), std::string("Bounded"));
}

TEST(Orbit, CountsAndInvariance)
{
    for (int n = 3; n <= 5; ++n) {
        std::mt19937_64 rng(25);
        hurwitz_point<double> a(oracle::random_point(n, rng, 0.8, 1.3));
        std::vector<std::size_t> per(5, 0);
        bool first = true;
        orbit_enumerate(a, 4, [&](const orbit_record<double>& r) {
            if (first) {
                EXPECT_TRUE(r.v.is_root());
                EXPECT_EQ(r.x, a.x);
                first = false;
            }
            ++per[r.v.depth()];
            if (!r.overflowed) {
                EXPECT_LT(std::abs(markoff_hurwitz(r.x) - a.mu), 1e-9 * (1 + std::abs(a.mu)) + 1e-12 * std::norm(r.x[0]) * n);
            }
        });
        EXPECT_EQ(per[0], 1u);
        std::size_t want = static_cast<std::size_t>(n);
        for (int d = 1; d <= 4; ++d, want *= static_cast<std::size_t>(n - 1)) EXPECT_EQ(per[d], want);
    }
    std::size_t total = 0;
    orbit_enumerate(pt3(3, 3, 3), 2, [&](const orbit_record<double>&) { ++total; });
    EXPECT_EQ(total, 10u);
}

TEST(Orbit, ClampMarksOverflow)
{
    bool any = false, finite = true;
    orbit_enumerate(pt3(30, 30, 30), 14, [&](const orbit_record<double>& r) {
        any |= r.overflowed;
        for (auto& z : r.x) finite &= std::isfinite(z.real()) && std::isfinite(z.imag());
    });
    EXPECT_TRUE(any);
    EXPECT_TRUE(finite);
}

TEST(IntegerSolutions, Examples)
{
    using T = std::vector<std::int64_t>;
    EXPECT_EQ(integer_solutions(3, 15), (std::vector<T>{{3, 3, 3}, {3, 3, 6}, {3, 6, 15}}));
    EXPECT_TRUE(integer_solutions(3, 2).empty());
    auto s4 = integer_solutions(4, 4);
    EXPECT_NE(std::find(s4.begin(), s4.end(), T{2, 2, 2, 2}), s4.end());
}

TEST(IntegerSolutions, BruteForceBox)
{
    for (std::int64_t bound : {1, 10, 40, 100, 1000}) {
        auto got = integer_solutions(3, bound);
        auto want = oracle::markoff_box(bound);
        EXPECT_EQ(std::set<std::vector<std::int64_t>>(got.begin(), got.end()), want) << bound;
        EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
    }
    for (std::int64_t bound : {4, 12, 30}) {
        auto got = integer_solutions(4, bound);
        EXPECT_EQ(std::set<std::vector<std::int64_t>>(got.begin(), got.end()), oracle::hurwitz_box(4, bound)) << bound;
    }
    auto got5 = integer_solutions(5, 12);
    EXPECT_EQ(std::set<std::vector<std::int64_t>>(got5.begin(), got5.end()), oracle::hurwitz_box(5, 12));
}
