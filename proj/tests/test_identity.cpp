#include <gtest/gtest.h>

#include <random>

#include "markoff/identity.hpp"
#include "oracles.hpp"

using namespace markoff;
using cl = std::complex<long double>;

namespace {

hurwitz_point<long double> diag(int n, cl z) { return diagonal_point<long double>(n, z); }

hurwitz_point<long double> random_ld(int n, std::mt19937_64& rng, double lo = 1.0, double hi = 3.0)
{
    point<long double> x;
    for (auto& z : oracle::random_point(n, rng, lo, hi)) x.emplace_back(z.real(), z.imag());
    return hurwitz_point<long double>(x);
}

}  // namespace

TEST(H, Values)
{
    EXPECT_NEAR(static_cast<double>(std::abs(h_function(cl(3)) - (1 - std::sqrt(5.0L) / 3))), 0, 1e-15);
    EXPECT_NEAR(static_cast<double>(h_function(cl(3)).real()), 0.25464, 1e-5);
    for (cl z : {cl(3, 1), cl(-0.5, 2.5), cl(1e6, 1e3)}) {
        EXPECT_LT(std::abs(h_function(z) - h_function(-z)), 1e-15L);
        EXPECT_GE(std::sqrt(1.0L - 4.0L / (z * z)).real(), 0);
    }
    cl big(1e8, 3e7);
    EXPECT_NEAR(static_cast<double>(std::abs(h_function(big) * big * big / 2.0L - 1.0L)), 0, 1e-12);
    EXPECT_THROW(h_function(cl(1.5)), std::domain_error);
    EXPECT_THROW(h_function(cl(-2)), std::domain_error);
}

TEST(Psi, RootEdge)
{
    auto e = psi_directed(diag(3, 3), vertex_address{}, 1);
    EXPECT_NEAR(static_cast<double>(std::abs(e.psi - 1.0L / 3)), 0, 1e-15);
    EXPECT_TRUE(e.edge.head().is_root());
    auto x = phi_vertex(diag(3, 3), vertex_address{});
    EXPECT_NEAR(static_cast<double>(std::abs(psi_closed_form(x, 1, cl(0)) - 1.0L / 3)), 0, 1e-15);
}

TEST(Psi, PairsAndVertexRelation)
{
    std::mt19937_64 rng(41);
    for (int t = 0; t < 100; ++t) {
        auto a = random_ld(3 + t % 3, rng, 0.8, 2.0);
        vertex_address v;
        for (int s = 0; s < t % 5; ++s) v = neighbor(v, 1 + (s * 7 + t) % a.n());
        auto e = psi_directed(a, v, 1 + t % a.n());
        EXPECT_LT(std::abs(e.psi + e.psi_reverse - 1.0L), 1e-10L);
    }
    for (int t = 0; t < 50; ++t) {
        auto a = random_ld(3 + t % 3, rng);
        auto x = phi_vertex(a, make_vertex({1 + t % 3, 1 + (t + 1) % 3}));
        cl s = 0, pv = 1;
        for (int i = 1; i <= a.n(); ++i) s += psi_quotient(x, i);
        for (auto& z : x) pv *= z;
        EXPECT_LT(std::abs(s - a.mu / pv - 1.0L), 1e-10L);
    }
}

TEST(Psi, ClosedFormAgreesOnDirectedEdges)
{
    std::mt19937_64 rng(42);
    for (int t = 0; t < 500; ++t) {
        auto a = random_ld(3 + t % 3, rng);
        vertex_address v;
        for (int s = 0; s < 3; ++s) v = neighbor(v, 1 + (t + 2 * s) % a.n());
        int c = 1 + t % a.n();
        auto e = psi_directed(a, v, c);
        auto xh = phi_vertex(a, e.edge.head());
        EXPECT_LT(std::abs(psi_closed_form(xh, c, a.mu) - e.psi), 1e-9L * (1 + std::abs(e.psi)));
    }
}

TEST(FiniteTree, Identity)
{
    std::mt19937_64 rng(43);
    for (int n = 3; n <= 5; ++n)
        for (int t = 0; t < 5; ++t) {
            auto a = random_ld(n, rng);
            for (int r = 0; r <= 3; ++r) {
                auto rep = finite_tree_identity(a, ball(n, r));
                EXPECT_LT(std::abs(rep.residual), 1e-8L) << n << " r=" << r;
            }
        }
    // μ = 0, T = {v0}: the n ψ's sum to 1
    auto rep = finite_tree_identity(diag(3, 3), vertex_set{vertex_address{}});
    EXPECT_LT(std::abs(rep.residual), 1e-15L);
    EXPECT_EQ(rep.term_count, 4u);
}

TEST(FiniteTree, GrownOneVertexAtATime)
{
    std::mt19937_64 rng(44);
    auto a = random_ld(4, rng);
    vertex_set T{vertex_address{}};
    std::mt19937 pick(5);
    for (int s = 0; s < 40; ++s) {
        auto C = circular_set(T, 4);
        auto& e = C[pick() % C.size()];
        T.insert(e.tail);
        EXPECT_LT(std::abs(finite_tree_identity(a, T).residual), 1e-8L);
    }
}

TEST(FiniteTree, ZeroVertexValueRejected)
{
    EXPECT_THROW(finite_tree_identity(diag(3, 0), vertex_set{vertex_address{}}), std::domain_error);
}

TEST(FrakH, Reductions)
{
    cl phi(2.7, 0.4), sigma(3, 1), q(0.3, -0.2);
    EXPECT_EQ(frak_h(phi, sigma, cl(0), q), h_function(phi));
    EXPECT_LT(std::abs(frak_h(phi, sigma, cl(1.5, 0.5), cl(0)) - h_function(phi)), 1e-18L);
    EXPECT_THROW(frak_h(phi, cl(2), cl(2), q), std::domain_error);
}

TEST(FrakH, VertexSumAlongGeodesic)
{
    // Σ_{|m|<=M} μ/φ(v_m) -> (μ/(σ-μ)) sqrt(1 - 4/φ^2)
    auto a = diag(3, cl(3, 0.5));
    geodesic_address g{vertex_address{}, 1, 2};
    auto w = phi_geodesic(a, g);
    cl want = a.mu / (w.sigma - a.mu) * std::sqrt(1.0L - 4.0L / (w.phi * w.phi));
    long double prev = 1e9;
    for (long M : {2, 4, 8, 16}) {
        long double err = std::abs(vertex_sum_along(a, g, M) - want);
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-12L);
}

TEST(PartialSums, MarkoffRootConverges)
{
    auto reps = identity_partial_sums(diag(3, 3), 12);
    ASSERT_EQ(reps.size(), 13u);
    for (std::size_t k = 1; k < reps.size(); ++k) {
        EXPECT_GT(reps[k].partial_sum.real(), reps[k - 1].partial_sum.real());
        EXPECT_LT(reps[k].shell_absolute, reps[k - 1].shell_absolute);
    }
    EXPECT_LT(std::abs(reps.back().residual), 1e-2L);
    // depth 0: the three root geodesics, h(3) each
    EXPECT_LT(std::abs(reps[0].partial_sum - 3.0L * h_function(cl(3))), 1e-15L);
}

TEST(PartialSums, RefusesUnverified)
{
    EXPECT_THROW(identity_partial_sums(diag(3, 1.5), 2), std::invalid_argument);
    identity_options o;
    o.allow_unverified = true;
    EXPECT_NO_THROW(identity_partial_sums(diag(3, cl(1.5, 1.5)), 2, o));
}

TEST(PartialSums, FrakHMatchesMcShane)
{
    // μ ≠ 0, root a sink
    auto a = diag(3, cl(2.6, 0.8));
    ASSERT_GT(std::abs(a.mu), 1.0L);
    identity_options mc, fr;
    fr.variant = identity_variant::frak_h;
    auto r1 = identity_partial_sums(a, 12, mc);
    auto r2 = identity_partial_sums(a, 12, fr);
    EXPECT_LT(std::abs(r1.back().residual), 1e-6L);
    EXPECT_LT(std::abs(r2.back().residual), 1e-6L);
    EXPECT_LT(std::abs(r1.back().partial_sum - r2.back().partial_sum), 1e-6L);
}

TEST(PartialSums, WeightsDoNotMatter)
{
    // off the diagonal; there the pair symmetry makes any weights sum the same
    hurwitz_point<long double> a(point<long double>{cl(2.4, -1.1), cl(2.9, 0.3), cl(2.6, 0.8)});
    identity_options q1, q2;
    q1.variant = q2.variant = identity_variant::frak_h;
    q2.q.assign(9, cl(0));
    q2.q[0 * 3 + 1] = q2.q[1 * 3 + 0] = cl(0.5, 0.2);
    q2.q[0 * 3 + 2] = q2.q[2 * 3 + 0] = cl(0.7, -0.2);
    q2.q[1 * 3 + 2] = q2.q[2 * 3 + 1] = cl(-0.2, 0);
    auto r1 = identity_partial_sums(a, 12, q1);
    auto r2 = identity_partial_sums(a, 12, q2);
    long double d4 = std::abs(r1[4].partial_sum - r2[4].partial_sum);
    long double d12 = std::abs(r1[12].partial_sum - r2[12].partial_sum);
    EXPECT_LT(d12, d4 * 1e-3L);
    EXPECT_LT(d12, 1e-9L);
}

TEST(PartialSums, RelativeEdge)
{
    identity_options o;
    o.variant = identity_variant::relative_edge;
    o.edge_vertex = vertex_address{};
    o.edge_color = 1;
    auto reps = identity_partial_sums(diag(3, 3), 14, o);
    EXPECT_LT(std::abs(reps.front().target - 1.0L / 3), 1e-15L);
    for (std::size_t k = 1; k < reps.size(); ++k)
        EXPECT_LE(std::abs(reps[k].residual), std::abs(reps[k - 1].residual) + 1e-18L);
    EXPECT_LT(std::abs(reps.back().residual), 1e-3L);
}

TEST(Certificate, ShellsDecay)
{
    auto shells = convergence_certificate(diag(3, 3), 1.0, 10);
    EXPECT_NEAR(static_cast<double>(shells[0].geodesics), 1.0, 1e-15);  // three terms 1/3
    for (std::size_t k = 2; k < shells.size(); ++k) {
        EXPECT_LT(shells[k].geodesics, shells[k - 1].geodesics);
        EXPECT_LT(shells[k].vertices, shells[k - 1].vertices);
        EXPECT_LT(shells[k].subtrees, shells[k - 1].subtrees);
    }
    EXPECT_THROW(convergence_certificate(diag(3, 3), 0.0, 3), std::invalid_argument);
}

TEST(Estimate, PsiMinusHalfH)
{
    for (auto z : {cl(3), cl(2.6, 0.8)}) {
        auto shells = psi_estimate(diag(3, z), 6);
        long double C = 0;
        for (auto& s : shells) {
            EXPECT_GT(s.edges, 0u);
            EXPECT_LE(s.max_excess, 1.0L + 1e-9L);
            C = std::max(C, s.max_ratio);
        }
        // a single constant works on every shell and the deepest shell does not need more than the first
        EXPECT_LE(shells.back().max_ratio, shells.front().max_ratio * 1.5L);
        EXPECT_GT(C, 0);
    }
}

TEST(FibonacciGrowth, MarkoffRoot)
{
    auto f = fibonacci_growth_check(diagonal_point<double>(3, cd(3)), 10);
    EXPECT_GT(f.c_lower, 0);
    EXPECT_TRUE(f.lower_violations.empty());
    EXPECT_TRUE(f.upper_violations.empty());
    EXPECT_TRUE(f.step_violations.empty());
    EXPECT_TRUE(f.exceptional.empty());
}

TEST(FibonacciGrowth, UpperBoundAnywhere)
{
    std::mt19937_64 rng(45);
    for (int t = 0; t < 6; ++t) {
        hurwitz_point<double> a(oracle::random_point(3 + t % 3, rng, 0.2, 3.0));
        auto f = fibonacci_growth_check(a, t % 3 == 0 ? 8 : 5);
        EXPECT_TRUE(f.upper_violations.empty());
        EXPECT_TRUE(f.step_violations.empty());
    }
}

TEST(FibonacciGrowth, LowerBoundFailsOffDomain)
{
    // φ([v0;{1,2}]) = x3 = 1.2 lies in (-2,2); the geodesics crossing it keep bounded φ
    hurwitz_point<double> a(point<double>{cd(2.5, 0.3), cd(1.9, -0.4), cd(1.2, 0.0)});
    auto f = fibonacci_growth_check(a, 12);
    EXPECT_FALSE(f.lower_violations.empty());
}
