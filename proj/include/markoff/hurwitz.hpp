#pragma once

// Hurwitz maps: Φ(g) = g^{-1}(a) on vertices, φ and σ on alternating geodesics,
// orbit streams and the nonnegative integer solutions of H = 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "tree.hpp"

namespace markoff {

template <class T>
using cplx = std::complex<T>;

template <class T>
using point = std::vector<cplx<T>>;

template <class T>
cplx<T> markoff_hurwitz(const point<T>& x)
{
    cplx<T> sq = 0, pr = 1;
    for (const auto& z : x) {
        sq += z * z;
        pr *= z;
    }
    return sq - pr;
}

template <class T>
cplx<T> product_except(const point<T>& x, std::size_t skip)
{
    cplx<T> p = 1;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (k != skip) p *= x[k];
    return p;
}

template <class T>
cplx<T> product_except2(const point<T>& x, std::size_t s1, std::size_t s2)
{
    cplx<T> p = 1;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (k != s1 && k != s2) p *= x[k];
    return p;
}

// b_i : x_i -> prod_{j != i} x_j - x_i   (i is a color, 1-based)
template <class T>
void apply_generator(point<T>& x, int i)
{
    auto k = static_cast<std::size_t>(i - 1);
    x[k] = product_except(x, k) - x[k];
}

template <class T>
cplx<T> neighbor_coordinate(const point<T>& x, int i)
{
    auto k = static_cast<std::size_t>(i - 1);
    return product_except(x, k) - x[k];
}

template <class T>
struct hurwitz_point {
    point<T> x;
    cplx<T> mu;

    hurwitz_point() = default;
    explicit hurwitz_point(point<T> coords) : x(std::move(coords)), mu(markoff_hurwitz(x))
    {
        check_arity(static_cast<int>(x.size()));
    }

    int n() const { return static_cast<int>(x.size()); }

    template <class U>
    hurwitz_point<U> cast() const
    {
        point<U> y;
        for (auto& z : x) y.emplace_back(static_cast<U>(z.real()), static_cast<U>(z.imag()));
        return hurwitz_point<U>(std::move(y));
    }
};

template <class T>
hurwitz_point<T> diagonal_point(int n, cplx<T> z)
{
    return hurwitz_point<T>(point<T>(static_cast<std::size_t>(n), z));
}

// Φ(v): apply the letters of v in order
template <class T>
point<T> phi_vertex(const hurwitz_point<T>& a, const vertex_address& v)
{
    point<T> x = a.x;
    for (color c : v.letters) apply_generator(x, c);
    return x;
}

// ---- geodesic weights ------------------------------------------------------

// root of z^2 - φ z + 1 with |z| >= 1; on the unit circle take Im >= 0
template <class T>
cplx<T> lambda_of(cplx<T> phi)
{
    cplx<T> r = std::sqrt(phi * phi - T(4));
    cplx<T> z1 = (phi + r) / T(2);
    cplx<T> z2 = (phi - r) / T(2);
    cplx<T> big = std::abs(z1) >= std::abs(z2) ? z1 : z2;
    if (big == cplx<T>(0)) return {0, 1};
    // both roots of modulus one: choose by imaginary part
    T a1 = std::abs(z1), a2 = std::abs(z2);
    if (std::abs(a1 - a2) <= T(1e-12) * std::max(T(1), std::max(a1, a2)))
        big = z1.imag() >= z2.imag() ? z1 : z2;
    return big;
}

template <class T>
struct geodesic_weights {
    cplx<T> phi;
    cplx<T> sigma;
    cplx<T> lambda;
};

template <class T>
geodesic_weights<T> weights_at(const point<T>& x, int i, int j)
{
    geodesic_weights<T> w{1, 0, 0};
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (static_cast<int>(k) + 1 == i || static_cast<int>(k) + 1 == j) continue;
        w.phi *= x[k];
        w.sigma += x[k] * x[k];
    }
    w.lambda = lambda_of(w.phi);
    return w;
}

template <class T>
geodesic_weights<T> phi_geodesic(const hurwitz_point<T>& a, const geodesic_address& g)
{
    return weights_at(phi_vertex(a, g.root), g.i, g.j);
}

// product of the coordinates whose colors are not among the subtree colors
template <class T>
cplx<T> extended_phi(const hurwitz_point<T>& a, const subtree_address& s)
{
    if (static_cast<int>(s.colors.size()) > a.n() - 1)
        throw std::invalid_argument("extended_phi: subtree must omit at least one color");
    point<T> x = phi_vertex(a, s.base);
    cplx<T> p = 1;
    for (int c = 1; c <= a.n(); ++c)
        if (!std::binary_search(s.colors.begin(), s.colors.end(), c)) p *= x[static_cast<std::size_t>(c - 1)];
    return p;
}

// y_m for m in [lo, hi]: the coordinate fixed along the edge e_m of γ
// (e_m joins v_m and v_{m+1}; it has color i for even m, j for odd m)
template <class T>
std::vector<cplx<T>> geodesic_values(const hurwitz_point<T>& a, const geodesic_address& g, long lo, long hi)
{
    if (lo > hi) return {};
    point<T> base = phi_vertex(a, g.root);
    auto other = [&](int c) { return c == g.i ? g.j : g.i; };
    auto y_at = [&](const point<T>& x, long m) {
        return x[static_cast<std::size_t>(other(geodesic_edge_color(g, m)) - 1)];
    };
    std::vector<cplx<T>> out(static_cast<std::size_t>(hi - lo + 1));
    // nonnegative side: v_0 -> v_1 -> ...
    if (hi >= 0) {
        point<T> x = base;
        for (long m = 0; m <= hi; ++m) {
            if (m >= lo) out[static_cast<std::size_t>(m - lo)] = y_at(x, m);
            apply_generator(x, geodesic_edge_color(g, m));
        }
    }
    if (lo < 0) {
        point<T> x = base;
        for (long m = -1; m >= lo; --m) {
            // v_m = v_{m+1} b_c with c the color of e_m
            apply_generator(x, geodesic_edge_color(g, m));
            if (m <= hi) out[static_cast<std::size_t>(m - lo)] = y_at(x, m);
        }
    }
    return out;
}

// ---- growth classification -------------------------------------------------

enum class growth { scalar_geometric, exponential_both_ends, bounded, linear_plus2, linear_minus2 };

inline const char* to_string(growth g)
{
    switch (g) {
    case growth::scalar_geometric: return "ScalarGeometric";
    case growth::exponential_both_ends: return "ExponentialBothEnds";
    case growth::bounded: return "Bounded";
    case growth::linear_plus2: return "LinearPlus2";
    case growth::linear_minus2: return "LinearMinus2";
    }
    return "?";
}

struct tolerances {
    double segment = 1e-9;  // distance of φ to [-2,2]
    double sigma_mu = 1e-9;  // |σ-μ| <= tol (1+|μ|)
};

template <class T>
T distance_to_segment(cplx<T> z)
{
    T re = std::clamp(z.real(), T(-2), T(2));
    return std::abs(z - cplx<T>(re, 0));
}

template <class T>
bool sigma_equals_mu(cplx<T> sigma, cplx<T> mu, double tol)
{
    return std::abs(sigma - mu) <= T(tol) * (T(1) + std::abs(mu));
}

template <class T>
growth growth_class(const geodesic_weights<T>& w, cplx<T> mu, tolerances tol = {})
{
    if (sigma_equals_mu(w.sigma, mu, tol.sigma_mu)) return growth::scalar_geometric;
    if (distance_to_segment(w.phi) > T(tol.segment)) return growth::exponential_both_ends;
    if (std::abs(w.phi - cplx<T>(2)) <= T(tol.segment)) return growth::linear_plus2;
    if (std::abs(w.phi + cplx<T>(2)) <= T(tol.segment)) return growth::linear_minus2;
    return growth::bounded;
}

template <class T>
growth growth_class(const hurwitz_point<T>& a, const geodesic_address& g, tolerances tol = {})
{
    return growth_class(phi_geodesic(a, g), a.mu, tol);
}

// ---- orbit stream ----------------------------------------------------------

template <class T>
struct orbit_record {
    vertex_address v;
    point<T> x;
    bool overflowed = false;
};

inline constexpr double orbit_clamp = 1e150;

// breadth-first over reduced words up to the given depth; values above the
// clamp are scaled back onto it and flagged, as are all their descendants
template <class T, class Fn>
void orbit_enumerate(const hurwitz_point<T>& a, int depth, Fn&& emit)
{
    if (depth < 0) throw std::invalid_argument("orbit depth must be nonnegative");
    const int n = a.n();
    auto clamp = [](point<T>& x) {
        bool hit = false;
        for (auto& z : x) {
            T r = std::abs(z);
            if (!(r <= T(orbit_clamp))) {
                hit = true;
                if (std::isfinite(static_cast<double>(r)) && r > 0)
                    z *= T(orbit_clamp) / r;
                else
                    z = cplx<T>(T(orbit_clamp), 0);
            }
        }
        return hit;
    };
    std::deque<orbit_record<T>> level;
    level.push_back({vertex_address{}, a.x, false});
    for (int d = 0; d <= depth; ++d) {
        std::deque<orbit_record<T>> next;
        for (auto& r : level) {
            emit(static_cast<const orbit_record<T>&>(r));
            if (d == depth) continue;
            for (int c = 1; c <= n; ++c) {
                if (c == r.v.last()) continue;
                orbit_record<T> s{neighbor(r.v, c), r.x, r.overflowed};
                apply_generator(s.x, c);
                s.overflowed = clamp(s.x) || s.overflowed;
                next.push_back(std::move(s));
            }
        }
        level = std::move(next);
    }
}

// ---- integer solutions of H = 0 -------------------------------------------

using int_tuple = std::vector<std::int64_t>;

namespace detail {

using i128 = __int128;

inline bool mul_checked(i128 a, i128 b, i128& out) { return !__builtin_mul_overflow(a, b, &out); }

inline std::int64_t isqrt_exact(i128 v)
{
    if (v < 0) return -1;
    auto r = static_cast<i128>(std::sqrt(static_cast<long double>(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r * r == v ? static_cast<std::int64_t>(r) : -1;
}

// local minima of the descent that replaces the largest coordinate by the
// smaller root: x_1 <= ... <= x_n with x_n^2 <= sum_{m<n} x_m^2. For those,
// x_1 ... x_{n-2} <= 2(n-1), and x_{n-1} <= sqrt(2s/(p-2)) (p, s over the first n-2).
inline void fundamental_solutions(int n, std::int64_t bound, std::set<int_tuple>& out)
{
    int_tuple pre;
    std::function<void(std::int64_t, std::int64_t, std::int64_t)> rec = [&](std::int64_t lo, std::int64_t p, std::int64_t s) {
        if (static_cast<int>(pre.size()) == n - 2) {
            if (p < 3) return;
            auto ymax = static_cast<std::int64_t>(std::sqrt(2.0 * double(s) / double(p - 2))) + 1;
            for (std::int64_t y = lo; y <= std::min(ymax, bound); ++y) {
                i128 py = i128(p) * y;
                i128 disc = py * py - 4 * (i128(s) + i128(y) * y);
                std::int64_t r = isqrt_exact(disc);
                if (r < 0) continue;
                for (int sgn : {-1, 1}) {
                    i128 twice = py + sgn * r;
                    if (twice % 2 != 0) continue;
                    auto z = static_cast<std::int64_t>(twice / 2);
                    if (z < y || z > bound) continue;
                    if (i128(z) * z > i128(s) + i128(y) * y) continue;
                    int_tuple t = pre;
                    t.push_back(y);
                    t.push_back(z);
                    out.insert(t);
                }
            }
            return;
        }
        for (std::int64_t x = lo; p * x <= 2 * (n - 1); ++x) {
            pre.push_back(x);
            rec(x, p * x, s + x * x);
            pre.pop_back();
        }
    };
    rec(1, 1, 0);
}

}  // namespace detail

// all nonzero nonnegative solutions of sum x^2 = prod x with max <= bound,
// each sorted ascending, one per permutation class
inline std::vector<int_tuple> integer_solutions(int n, std::int64_t bound)
{
    check_arity(n);
    if (bound < 1) throw std::invalid_argument("bound must be >= 1");
    std::set<int_tuple> roots;
    detail::fundamental_solutions(n, bound, roots);
    std::set<int_tuple> seen(roots.begin(), roots.end());
    std::vector<int_tuple> stack(roots.begin(), roots.end());
    while (!stack.empty()) {
        int_tuple t = std::move(stack.back());
        stack.pop_back();
        for (int i = 0; i < n; ++i) {
            detail::i128 p = 1;
            bool ok = true;
            for (int k = 0; k < n && ok; ++k)
                if (k != i) ok = detail::mul_checked(p, t[static_cast<std::size_t>(k)], p) && p <= detail::i128(2) * bound;
            if (!ok) continue;  // the new coordinate would exceed the bound
            detail::i128 y = p - t[static_cast<std::size_t>(i)];
            if (y < 1 || y > bound) continue;
            int_tuple u = t;
            u[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(y);
            std::sort(u.begin(), u.end());
            if (seen.insert(u).second) stack.push_back(std::move(u));
        }
    }
    return {seen.begin(), seen.end()};
}

}  // namespace markoff
