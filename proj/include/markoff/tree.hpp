#pragma once

// Cayley tree of the free product of n involutions b_1..b_n.
// Vertices are reduced words stored root-first, colors are 1..n.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace markoff {

using color = std::uint8_t;

inline constexpr int min_arity = 3;
inline constexpr int max_arity = 16;

inline void check_arity(int n)
{
    if (n < min_arity || n > max_arity)
        throw std::invalid_argument("arity must be in [3,16], got " + std::to_string(n));
}

inline void check_color(int n, int i)
{
    if (i < 1 || i > n)
        throw std::invalid_argument("color " + std::to_string(i) + " outside [1," + std::to_string(n) + "]");
}

struct vertex_address {
    std::vector<color> letters;

    std::size_t depth() const { return letters.size(); }
    bool is_root() const { return letters.empty(); }
    int last() const { return letters.empty() ? 0 : letters.back(); }

    auto operator<=>(const vertex_address&) const = default;
    bool operator==(const vertex_address&) const = default;
};

inline vertex_address make_vertex(std::initializer_list<int> ls)
{
    vertex_address v;
    for (int c : ls) v.letters.push_back(static_cast<color>(c));
    return v;
}

inline bool is_reduced(const vertex_address& v)
{
    return std::adjacent_find(v.letters.begin(), v.letters.end()) == v.letters.end();
}

// g -> g b_i, cancelling when the last letter is i
inline vertex_address neighbor(vertex_address v, int i)
{
    if (!v.letters.empty() && v.letters.back() == i)
        v.letters.pop_back();
    else
        v.letters.push_back(static_cast<color>(i));
    return v;
}

// [v*;{i,j}] with i < j and the last letter of v* outside {i,j}
struct geodesic_address {
    vertex_address root;
    color i = 1;
    color j = 2;

    std::size_t depth() const { return root.depth(); }
    bool has_color(int c) const { return c == i || c == j; }

    auto operator<=>(const geodesic_address&) const = default;
    bool operator==(const geodesic_address&) const = default;
};

inline geodesic_address canonical_geodesic(vertex_address v, int i, int j)
{
    if (i == j) throw std::invalid_argument("geodesic colors must differ");
    if (i > j) std::swap(i, j);
    while (!v.letters.empty() && (v.letters.back() == i || v.letters.back() == j))
        v.letters.pop_back();
    return {std::move(v), static_cast<color>(i), static_cast<color>(j)};
}

// m > 0 walks off v* starting with the smaller color, m < 0 with the larger one
inline vertex_address geodesic_vertex(const geodesic_address& g, long m)
{
    vertex_address v = g.root;
    int first = m >= 0 ? g.i : g.j;
    int second = m >= 0 ? g.j : g.i;
    long k = m >= 0 ? m : -m;
    for (long s = 0; s < k; ++s)
        v.letters.push_back(static_cast<color>(s % 2 == 0 ? first : second));
    return v;
}

// color of the edge e_m joining v_m and v_{m+1}
inline int geodesic_edge_color(const geodesic_address& g, long m)
{
    return (m % 2 == 0) ? g.i : g.j;
}

// regular subtree [v;I], canonical base is the vertex closest to the root
struct subtree_address {
    vertex_address base;
    std::vector<color> colors;  // sorted

    auto operator<=>(const subtree_address&) const = default;
    bool operator==(const subtree_address&) const = default;
};

inline subtree_address canonical_subtree(vertex_address v, std::vector<color> colors)
{
    std::sort(colors.begin(), colors.end());
    colors.erase(std::unique(colors.begin(), colors.end()), colors.end());
    auto in = [&](int c) { return std::binary_search(colors.begin(), colors.end(), c); };
    while (!v.letters.empty() && in(v.letters.back()))
        v.letters.pop_back();
    return {std::move(v), std::move(colors)};
}

// X_i = [v; [n] \ {i}], the subtree on which coordinate i is constant
inline subtree_address coordinate_subtree(const vertex_address& v, int n, int i)
{
    std::vector<color> cs;
    for (int c = 1; c <= n; ++c)
        if (c != i) cs.push_back(static_cast<color>(c));
    return canonical_subtree(v, std::move(cs));
}

struct directed_edge {
    vertex_address tail;
    color c = 1;

    vertex_address head() const { return neighbor(tail, c); }

    auto operator<=>(const directed_edge&) const = default;
    bool operator==(const directed_edge&) const = default;
};

// undirected edge keyed by its endpoint nearer the root
struct edge_key {
    vertex_address near;
    color c = 1;

    vertex_address far() const
    {
        vertex_address v = near;
        v.letters.push_back(c);
        return v;
    }

    auto operator<=>(const edge_key&) const = default;
    bool operator==(const edge_key&) const = default;
};

inline edge_key make_edge(const vertex_address& v, int c)
{
    if (!v.letters.empty() && v.letters.back() == c) {
        vertex_address p = v;
        p.letters.pop_back();
        return {std::move(p), static_cast<color>(c)};
    }
    return {v, static_cast<color>(c)};
}

namespace detail {
inline std::size_t hash_letters(const std::vector<color>& w, std::size_t seed)
{
    std::size_t h = seed ^ (w.size() * 0x9e3779b97f4a7c15ULL);
    for (color c : w) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}
}  // namespace detail

struct vertex_hash {
    std::size_t operator()(const vertex_address& v) const { return detail::hash_letters(v.letters, 0xcbf29ce484222325ULL); }
};
struct geodesic_hash {
    std::size_t operator()(const geodesic_address& g) const
    {
        return detail::hash_letters(g.root.letters, 0xcbf29ce484222325ULL) ^ (std::size_t(g.i) << 8 | g.j) * 0x9e3779b97f4a7c15ULL;
    }
};
struct edge_hash {
    std::size_t operator()(const edge_key& e) const
    {
        return detail::hash_letters(e.near.letters, 0x84222325cbf29ce4ULL) ^ std::size_t(e.c) * 0x9e3779b97f4a7c15ULL;
    }
};
struct subtree_hash {
    std::size_t operator()(const subtree_address& s) const
    {
        return detail::hash_letters(s.base.letters, 0x1234567ULL) ^ detail::hash_letters(s.colors, 0x89abcdefULL);
    }
};

using vertex_set = std::unordered_set<vertex_address, vertex_hash>;
using geodesic_set = std::unordered_set<geodesic_address, geodesic_hash>;
using edge_set = std::unordered_set<edge_key, edge_hash>;

// ---- finite subtrees -------------------------------------------------------

inline bool is_connected(const vertex_set& T, int n)
{
    if (T.empty()) return false;
    vertex_set seen;
    std::vector<vertex_address> stack{*T.begin()};
    seen.insert(*T.begin());
    while (!stack.empty()) {
        vertex_address v = std::move(stack.back());
        stack.pop_back();
        for (int c = 1; c <= n; ++c) {
            vertex_address w = neighbor(v, c);
            if (T.count(w) && seen.insert(w).second) stack.push_back(std::move(w));
        }
    }
    return seen.size() == T.size();
}

// directed edges whose head lies in T and whose tail does not
inline std::vector<directed_edge> circular_set(const vertex_set& T, int n)
{
    check_arity(n);
    if (!is_connected(T, n)) throw std::invalid_argument("circular_set: subtree empty or disconnected");
    std::vector<directed_edge> out;
    for (const auto& v : T)
        for (int c = 1; c <= n; ++c) {
            vertex_address w = neighbor(v, c);
            if (!T.count(w)) out.push_back({std::move(w), static_cast<color>(c)});
        }
    std::sort(out.begin(), out.end());
    return out;
}

// vertices within distance r of T, listed by layer (layer 0 is T itself)
inline std::vector<std::vector<vertex_address>> layers_around(const vertex_set& T, int n, int r)
{
    std::vector<std::vector<vertex_address>> layers(1);
    layers[0].assign(T.begin(), T.end());
    std::sort(layers[0].begin(), layers[0].end());
    vertex_set seen = T;
    for (int k = 0; k < r; ++k) {
        std::vector<vertex_address> next;
        for (const auto& v : layers[k])
            for (int c = 1; c <= n; ++c) {
                vertex_address w = neighbor(v, c);
                if (seen.insert(w).second) next.push_back(std::move(w));
            }
        layers.push_back(std::move(next));
    }
    return layers;
}

inline vertex_set ball(int n, int r)
{
    vertex_set T{vertex_address{}};
    vertex_set out;
    for (auto& layer : layers_around(T, n, r))
        for (auto& v : layer) out.insert(std::move(v));
    return out;
}

// geodesics through v, as canonical addresses
inline std::vector<geodesic_address> geodesics_through(const vertex_address& v, int n)
{
    std::vector<geodesic_address> out;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) out.push_back(canonical_geodesic(v, i, j));
    return out;
}

// every geodesic with d(γ) <= max_depth, each exactly once
template <class Fn>
void for_each_geodesic(int n, int max_depth, Fn&& fn)
{
    check_arity(n);
    vertex_address v;
    std::function<void()> rec = [&]() {
        int k = v.last();
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (i != k && j != k) fn(geodesic_address{v, static_cast<color>(i), static_cast<color>(j)});
        if (static_cast<int>(v.depth()) == max_depth) return;
        for (int c = 1; c <= n; ++c) {
            if (c == k) continue;
            v.letters.push_back(static_cast<color>(c));
            rec();
            v.letters.pop_back();
        }
    };
    rec();
}

// ---- Fibonacci function ----------------------------------------------------

// values of F on the n(n-1)/2 geodesics through one vertex, indexed by color pair
class fib_table {
public:
    explicit fib_table(int n) : n_(n), f_(static_cast<std::size_t>(n * n), 1) {}

    int arity() const { return n_; }
    std::uint64_t get(int i, int j) const { return f_[idx(i, j)]; }
    void set(int i, int j, std::uint64_t x) { f_[idx(i, j)] = x; f_[idx(j, i)] = x; }

    // table at v b_k, given the table at v (k not the last letter of v)
    fib_table step(int k) const
    {
        fib_table t(*this);
        for (int i = 1; i <= n_; ++i)
            for (int j = i + 1; j <= n_; ++j) {
                if (i == k || j == k) continue;
                std::uint64_t s;
                if (__builtin_add_overflow(get(i, k), get(j, k), &s))
                    throw std::overflow_error("Fibonacci value exceeds 64 bits");
                t.set(i, j, s);
            }
        return t;
    }

    std::uint64_t min_rooted(int k) const
    {
        std::uint64_t m = UINT64_MAX;
        for (int i = 1; i <= n_; ++i)
            for (int j = i + 1; j <= n_; ++j)
                if (i != k && j != k) m = std::min(m, get(i, j));
        return m;
    }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>((i - 1) * n_ + (j - 1)); }
    int n_;
    std::vector<std::uint64_t> f_;
};

inline fib_table fib_table_at(const vertex_address& v, int n)
{
    fib_table t(n);
    for (color c : v.letters) t = t.step(c);
    return t;
}

// F(γ) by walking the F-tables down the word of v*; no cache needed
inline std::uint64_t fibonacci(const geodesic_address& g, int n)
{
    return fib_table_at(g.root, n).get(g.i, g.j);
}

// the recursive definition with a shared cache; safe for concurrent callers
class fibonacci_memo {
public:
    explicit fibonacci_memo(int n) : n_(n) { check_arity(n); }

    std::uint64_t operator()(const geodesic_address& g)
    {
        if (g.root.is_root()) return 1;
        {
            std::shared_lock lock(mu_);
            auto it = cache_.find(g);
            if (it != cache_.end()) return it->second;
        }
        int k = g.root.last();
        std::uint64_t f = (*this)(canonical_geodesic(g.root, g.i, k)) + (*this)(canonical_geodesic(g.root, g.j, k));
        std::unique_lock lock(mu_);
        cache_.emplace(g, f);
        return f;
    }

    std::size_t size() const
    {
        std::shared_lock lock(mu_);
        return cache_.size();
    }

private:
    int n_;
    mutable std::shared_mutex mu_;
    std::unordered_map<geodesic_address, std::uint64_t, geodesic_hash> cache_;
};

// ---- Sierpinski vector -----------------------------------------------------

// γ through the root edge of color n, or lying beyond the vertex [n]
inline bool in_sierpinski_branch(const geodesic_address& g, int n)
{
    if (g.root.is_root()) return g.j == n;
    return g.root.letters.front() == n;
}

inline std::vector<std::uint64_t> sierpinski_vector(const geodesic_address& g, int n)
{
    check_arity(n);
    if (!in_sierpinski_branch(g, n)) throw std::invalid_argument("sierpinski_vector: geodesic outside the branch of color n");
    using vec = std::vector<std::uint64_t>;
    auto id = [n](int i, int j) { return static_cast<std::size_t>((i - 1) * n + (j - 1)); };
    std::vector<vec> S(static_cast<std::size_t>(n * n), vec(static_cast<std::size_t>(n - 1), 0));
    for (int i = 1; i < n; ++i) {
        S[id(i, n)][static_cast<std::size_t>(i - 1)] = 1;
        S[id(n, i)] = S[id(i, n)];
    }
    for (color k : g.root.letters) {
        auto next = S;
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) {
                if (i == j || i == k || j == k) continue;
                for (int e = 0; e < n - 1; ++e) next[id(i, j)][e] = S[id(i, k)][e] + S[id(j, k)][e];
            }
        S = std::move(next);
    }
    return S[id(g.i, g.j)];
}

// ---- multiplicity ----------------------------------------------------------

// counts[m] = #{γ : F(γ) = m} for 1 <= m <= max_m, exact.
// Any γ with d(γ) = d has F(γ) >= d + 1, so depth 2(max_m - 1) is a safe cap;
// beyond the root, F only grows along a branch once every new value exceeds max_m.
inline std::vector<std::uint64_t> multiplicity_table(int n, std::uint64_t max_m, int depth_cap = -1)
{
    check_arity(n);
    if (max_m < 1) throw std::invalid_argument("multiplicity: m must be positive");
    if (depth_cap < 0) depth_cap = static_cast<int>(2 * (max_m - 1));
    std::vector<std::uint64_t> counts(max_m + 1, 0);
    counts[1] = static_cast<std::uint64_t>(n * (n - 1) / 2);

    struct frame { fib_table t; int last; int depth; };
    std::vector<frame> stack;
    stack.push_back({fib_table(n), 0, 0});
    while (!stack.empty()) {
        frame f = std::move(stack.back());
        stack.pop_back();
        for (int k = 1; k <= n; ++k) {
            if (k == f.last) continue;
            fib_table t = f.t.step(k);
            std::uint64_t lo = t.min_rooted(k);
            if (lo > max_m) continue;  // nothing at or below this child can reach max_m
            if (f.depth + 1 > depth_cap)
                throw std::logic_error("multiplicity: depth cap too small");
            for (int i = 1; i <= n; ++i)
                for (int j = i + 1; j <= n; ++j)
                    if (i != k && j != k && t.get(i, j) <= max_m) ++counts[t.get(i, j)];
            stack.push_back({std::move(t), k, f.depth + 1});
        }
    }
    return counts;
}

inline std::uint64_t multiplicity(int n, std::uint64_t m, int depth_cap = -1)
{
    return multiplicity_table(n, m, depth_cap)[m];
}

// partial sums of Σ F(γ)^{-s} over d(γ) <= d, for d = 0..max_depth
inline std::vector<double> fibonacci_zeta_partial(int n, double s, int max_depth)
{
    check_arity(n);
    std::vector<double> shell(static_cast<std::size_t>(max_depth + 1), 0.0);
    struct frame { fib_table t; int last; int depth; };
    std::vector<frame> stack{{fib_table(n), 0, 0}};
    shell[0] = n * (n - 1) / 2.0;
    while (!stack.empty()) {
        frame f = std::move(stack.back());
        stack.pop_back();
        if (f.depth == max_depth) continue;
        for (int k = 1; k <= n; ++k) {
            if (k == f.last) continue;
            fib_table t = f.t.step(k);
            for (int i = 1; i <= n; ++i)
                for (int j = i + 1; j <= n; ++j)
                    if (i != k && j != k) shell[static_cast<std::size_t>(f.depth + 1)] += std::pow(double(t.get(i, j)), -s);
            stack.push_back({std::move(t), k, f.depth + 1});
        }
    }
    for (std::size_t d = 1; d < shell.size(); ++d) shell[d] += shell[d - 1];
    return shell;
}

// ½n(n-1) + n Σ_{m>=2} m^{n-2-s}, truncated tail bounded by an integral
inline double fibonacci_zeta_bound(int n, double s)
{
    double p = s - (n - 2);
    if (p <= 1) throw std::invalid_argument("bound requires s > n-1");
    double sum = 0;
    const int M = 100000;
    for (int m = 2; m <= M; ++m) sum += std::pow(double(m), -p);
    sum += std::pow(double(M), 1 - p) / (p - 1);
    return n * (n - 1) / 2.0 + n * sum;
}

}  // namespace markoff
