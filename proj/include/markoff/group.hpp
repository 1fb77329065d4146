#pragma once

// Γ_n* = Γ_n ⋊ (Υ_n ⋊ S_n). Elements are kept in the normal form w·λ with
// w a reduced word in the b_i and λ = (even sign change) ∘ (permutation).
//
// Conventions, x a point of C^n:
//   (P_σ x)_{σ(k)} = x_k,  (E_ε x)_k = ε_k x_k,  λ = E_ε P_σ,
//   w = b_{c1} ... b_{ck} acts by applying b_{ck} first.
// Relations used by the normal form: P_σ b_i = b_{σ(i)} P_σ, E_ε b_i = b_i E_ε.

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "hurwitz.hpp"

namespace markoff {

struct linear_part {
    std::vector<int> signs;  // ±1, even number of -1
    std::vector<int> perm;   // perm[k] = σ(k+1) - 1, zero-based

    static linear_part identity(int n)
    {
        linear_part l;
        l.signs.assign(static_cast<std::size_t>(n), 1);
        l.perm.resize(static_cast<std::size_t>(n));
        std::iota(l.perm.begin(), l.perm.end(), 0);
        return l;
    }

    int n() const { return static_cast<int>(perm.size()); }

    void validate() const
    {
        if (signs.size() != perm.size()) throw std::invalid_argument("linear part: size mismatch");
        int neg = 0;
        for (int s : signs) {
            if (s != 1 && s != -1) throw std::invalid_argument("linear part: signs must be ±1");
            neg += s < 0;
        }
        if (neg % 2) throw std::invalid_argument("linear part: odd sign change is not an automorphism");
        std::vector<int> p = perm;
        std::sort(p.begin(), p.end());
        for (int k = 0; k < n(); ++k)
            if (p[static_cast<std::size_t>(k)] != k) throw std::invalid_argument("linear part: not a permutation");
    }

    bool operator==(const linear_part&) const = default;
};

struct group_element {
    vertex_address word;
    linear_part linear;

    int n() const { return linear.n(); }
    bool operator==(const group_element&) const = default;
};

inline group_element identity_element(int n)
{
    check_arity(n);
    return {vertex_address{}, linear_part::identity(n)};
}

inline group_element generator(int n, int i)
{
    check_arity(n);
    check_color(n, i);
    return {make_vertex({i}), linear_part::identity(n)};
}

inline group_element make_linear(std::vector<int> signs, std::vector<int> perm)
{
    linear_part l{std::move(signs), std::move(perm)};
    l.validate();
    check_arity(l.n());
    return {vertex_address{}, std::move(l)};
}

namespace detail {

// free reduction with b_i^2 = 1
inline vertex_address reduce_word(const std::vector<color>& letters)
{
    vertex_address v;
    for (color c : letters) v = neighbor(std::move(v), c);
    return v;
}

}  // namespace detail

template <class T>
point<T> apply_linear(const linear_part& l, const point<T>& x)
{
    point<T> y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        auto s = static_cast<std::size_t>(l.perm[k]);
        y[s] = T(l.signs[s]) * x[k];
    }
    return y;
}

template <class T>
point<T> apply(const group_element& g, const point<T>& x)
{
    if (static_cast<int>(x.size()) != g.n()) throw std::invalid_argument("apply: arity mismatch");
    point<T> y = apply_linear(g.linear, x);
    for (auto it = g.word.letters.rbegin(); it != g.word.letters.rend(); ++it) apply_generator(y, *it);
    return y;
}

inline group_element compose(const group_element& g, const group_element& h)
{
    if (g.n() != h.n()) throw std::invalid_argument("compose: arity mismatch");
    const auto n = static_cast<std::size_t>(g.n());
    // w_g λ_g w_h λ_h = w_g σ_g(w_h) · λ_g λ_h
    std::vector<color> letters = g.word.letters;
    for (color c : h.word.letters) letters.push_back(static_cast<color>(g.linear.perm[c - 1u] + 1));
    group_element r;
    r.word = detail::reduce_word(letters);
    // E_g P_g E_h P_h = E_g (P_g E_h P_g^{-1}) P_g P_h
    r.linear.signs.assign(n, 1);
    r.linear.perm.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        auto s = static_cast<std::size_t>(g.linear.perm[k]);
        r.linear.signs[s] = h.linear.signs[k];
    }
    for (std::size_t k = 0; k < n; ++k) r.linear.signs[k] *= g.linear.signs[k];
    for (std::size_t k = 0; k < n; ++k)
        r.linear.perm[k] = g.linear.perm[static_cast<std::size_t>(h.linear.perm[k])];
    return r;
}

inline group_element inverse(const group_element& g)
{
    const auto n = static_cast<std::size_t>(g.n());
    // (w λ)^{-1} = λ^{-1} w^{-1} = σ^{-1}(reverse w) λ^{-1}
    std::vector<int> inv(n);
    for (std::size_t k = 0; k < n; ++k) inv[static_cast<std::size_t>(g.linear.perm[k])] = static_cast<int>(k);
    group_element r;
    for (auto it = g.word.letters.rbegin(); it != g.word.letters.rend(); ++it)
        r.word.letters.push_back(static_cast<color>(inv[*it - 1u] + 1));
    // λ^{-1} = P^{-1} E = (P^{-1} E P) P^{-1}; sign at j is ε_{σ(j)}
    r.linear.perm = inv;
    r.linear.signs.resize(n);
    for (std::size_t j = 0; j < n; ++j) r.linear.signs[j] = g.linear.signs[static_cast<std::size_t>(g.linear.perm[j])];
    return r;
}

// ---- random elements and the H check --------------------------------------

template <class Rng>
linear_part random_linear(int n, Rng& rng)
{
    linear_part l = linear_part::identity(n);
    std::shuffle(l.perm.begin(), l.perm.end(), rng);
    std::uniform_int_distribution<int> coin(0, 1);
    int neg = 0;
    for (int k = 0; k + 1 < n; ++k) {
        l.signs[static_cast<std::size_t>(k)] = coin(rng) ? -1 : 1;
        neg += l.signs[static_cast<std::size_t>(k)] < 0;
    }
    l.signs[static_cast<std::size_t>(n - 1)] = (neg % 2) ? -1 : 1;
    return l;
}

// product of `length` random factors, each a generator or a random linear part
template <class Rng>
group_element random_element(int n, int length, Rng& rng)
{
    group_element g = identity_element(n);
    std::uniform_int_distribution<int> pick(0, n);
    for (int s = 0; s < length; ++s) {
        int c = pick(rng);
        group_element f = c == 0 ? group_element{vertex_address{}, random_linear(n, rng)} : generator(n, c);
        g = compose(g, f);
    }
    return g;
}

template <class Rng>
point<double> random_polydisk_point(int n, double radius, Rng& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    point<double> x;
    for (int k = 0; k < n; ++k) {
        double r = radius * std::sqrt(u(rng));
        double t = 2 * M_PI * u(rng);
        x.emplace_back(r * std::cos(t), r * std::sin(t));
    }
    return x;
}

using point_map = std::function<point<double>(const point<double>&)>;

// size of the individual terms of H(y); cancellation in H is bounded by this
template <class T>
T hurwitz_scale(const point<T>& y)
{
    T s = 0, p = 1;
    for (auto& z : y) {
        s += std::norm(z);
        p *= std::abs(z);
    }
    return s + p;
}

// |H(f(x)) - H(x)| <= 1e-9 (1 + |H(x)|) + 1e-12 scale(f(x)) at `trials` points of the 3-polydisk.
// the scale term absorbs round-off once long words have grown the coordinates.
template <class T = long double>
bool verify_preserves_H(const std::function<point<T>(const point<T>&)>& f, int n, int trials,
                        unsigned seed = 20240601u)
{
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        point<T> x;
        for (auto& z : random_polydisk_point(n, 3.0, rng)) x.emplace_back(z.real(), z.imag());
        point<T> y = f(x);
        auto h0 = markoff_hurwitz(x);
        auto h1 = markoff_hurwitz(y);
        if (!(std::abs(h1 - h0) <= T(1e-9) * (1 + std::abs(h0)) + T(1e-12) * hurwitz_scale(y))) return false;
    }
    return true;
}

inline bool verify_preserves_H(const point_map& f, int n, int trials, unsigned seed = 20240601u)
{
    return verify_preserves_H<double>(f, n, trials, seed);
}

inline bool verify_preserves_H(const group_element& g, int trials, unsigned seed = 20240601u)
{
    // long double: the exponent range survives words that overflow a double
    return verify_preserves_H<long double>(
        [&g](const point<long double>& x) { return markoff::apply(g, x); }, g.n(), trials, seed);
}

}  // namespace markoff
