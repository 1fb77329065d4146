#pragma once

// McShane-type identities: the exact finite-tree identity in the edge weights ψ,
// the h and frak-h summands, partial sums over neighbourhoods of the attracting
// tree, and the Fibonacci growth diagnostics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bowditch.hpp"
#include "compensated.hpp"
#include "hurwitz.hpp"
#include "tree.hpp"

namespace markoff {

// h(z) = 1 - sqrt(1 - 4/z^2), principal root (Re >= 0), written without cancellation
template <class T>
cplx<T> h_function(cplx<T> z, T tol = T(1e-12))
{
    if (std::abs(z.imag()) <= tol && std::abs(z.real()) <= 2 + tol)
        throw std::domain_error("h: argument in [-2,2]");
    cplx<T> w = T(4) / (z * z);
    cplx<T> s = std::sqrt(T(1) - w);
    return w / (T(1) + s);
}

// ψ for the edge of color i pointing into the vertex with coordinates x
template <class T>
cplx<T> psi_quotient(const point<T>& x, int i)
{
    cplx<T> p = product_except(x, static_cast<std::size_t>(i - 1));
    if (p == cplx<T>(0)) throw std::domain_error("psi: vanishing product");
    return x[static_cast<std::size_t>(i - 1)] / p;
}

// the smaller root of ψ^2 - ψ + (Σ_{m≠i} x_m^2 - μ)/Π_{m≠i} x_m^2 = 0
template <class T>
cplx<T> psi_closed_form(const point<T>& x, int i, cplx<T> mu)
{
    auto k = static_cast<std::size_t>(i - 1);
    cplx<T> p = product_except(x, k);
    if (p == cplx<T>(0)) throw std::domain_error("psi: vanishing product");
    cplx<T> s = 0;
    for (std::size_t m = 0; m < x.size(); ++m)
        if (m != k) s += x[m] * x[m];
    cplx<T> c = (s - mu) / (p * p);
    cplx<T> r = std::sqrt(T(1) - T(4) * c);
    return T(2) * c / (T(1) + r);
}

struct edge_weight {
    cplx<long double> psi;          // for the φ-directed orientation
    cplx<long double> psi_reverse;  // for the opposite orientation
    directed_edge edge;             // φ-directed
    std::optional<geodesic_address> gamma_ref;
};

// ψ on the φ-directed orientation of the edge (v, c); the reference geodesic is
// [head; {c, k}] with k the color of the root-ward edge at the head
inline edge_weight psi_directed(const hurwitz_point<long double>& a, const vertex_address& v, int c)
{
    check_color(a.n(), c);
    point<long double> x = phi_vertex(a, v);
    point<long double> y = x;
    apply_generator(y, c);
    vertex_address w = neighbor(v, c);
    bool into_v = std::abs(x[static_cast<std::size_t>(c - 1)]) <= std::abs(y[static_cast<std::size_t>(c - 1)]);
    const point<long double>& head_x = into_v ? x : y;
    const point<long double>& tail_x = into_v ? y : x;
    edge_weight e;
    e.edge = into_v ? directed_edge{w, static_cast<color>(c)} : directed_edge{v, static_cast<color>(c)};
    e.psi = psi_quotient(head_x, c);
    e.psi_reverse = psi_quotient(tail_x, c);
    vertex_address head = e.edge.head();
    if (!head.is_root() && head.last() != c) e.gamma_ref = canonical_geodesic(head, c, head.last());
    return e;
}

struct identity_report {
    int depth = 0;
    cplx<long double> partial_sum;
    cplx<long double> target{1, 0};
    cplx<long double> residual;
    std::size_t term_count = 0;
    long double absolute_term_sum = 0;
    long double shell_absolute = 0;  // |terms| added at this depth
    std::size_t saturated = 0;       // terms dropped because a value overflowed
};

// Σ_{C(T)} ψ - Σ_{V(T)} μ/φ(v); equals 1 for every finite subtree T
inline identity_report finite_tree_identity(const hurwitz_point<long double>& a, const vertex_set& T)
{
    const int n = a.n();
    auto C = circular_set(T, n);
    compensated_sum<cplx<long double>> sum;
    identity_report r;
    for (auto& v : T) {
        point<long double> x = phi_vertex(a, v);
        cplx<long double> pv = 1;
        for (auto& z : x) pv *= z;
        if (pv == cplx<long double>(0))
            throw std::domain_error("finite_tree_identity: phi vanishes at a vertex of depth " + std::to_string(v.depth()));
        cplx<long double> t = -a.mu / pv;
        sum += t;
        r.absolute_term_sum += std::abs(t);
        ++r.term_count;
    }
    for (auto& e : C) {
        point<long double> x = phi_vertex(a, e.head());
        cplx<long double> t = psi_quotient(x, e.c);
        sum += t;
        r.absolute_term_sum += std::abs(t);
        ++r.term_count;
    }
    r.partial_sum = sum.value();
    r.residual = r.partial_sum - r.target;
    return r;
}

// 1 - (1 + q μ/(σ-μ)) sqrt(1 - 4/φ^2)
template <class T>
cplx<T> frak_h(cplx<T> phi, cplx<T> sigma, cplx<T> mu, cplx<T> q)
{
    if (mu == cplx<T>(0)) return h_function(phi);
    if (sigma == mu) throw std::domain_error("frak_h: sigma equals mu");
    cplx<T> s = std::sqrt(T(1) - T(4) / (phi * phi));
    cplx<T> h = h_function(phi);  // 1 - s
    return h - q * mu / (sigma - mu) * s;
}

// Σ_{v on γ, |m| <= M} μ/φ(v), the truncated vertex sum along one geodesic
inline cplx<long double> vertex_sum_along(const hurwitz_point<long double>& a, const geodesic_address& g, long M)
{
    compensated_sum<cplx<long double>> s;
    point<long double> x0 = phi_vertex(a, g.root);
    auto phi_v = [](const point<long double>& x) {
        cplx<long double> p = 1;
        for (auto& z : x) p *= z;
        return p;
    };
    s += a.mu / phi_v(x0);
    point<long double> x = x0;
    for (long m = 0; m < M; ++m) {
        apply_generator(x, geodesic_edge_color(g, m));
        s += a.mu / phi_v(x);
    }
    x = x0;
    for (long m = -1; m >= -M; --m) {
        apply_generator(x, geodesic_edge_color(g, m));
        s += a.mu / phi_v(x);
    }
    return s.value();
}

// ---- partial sums around a finite tree ---------------------------------------

enum class identity_variant { mcshane_h, frak_h, relative_edge };
enum class centering { tree, root };

struct identity_options {
    identity_variant variant = identity_variant::mcshane_h;
    centering center = centering::tree;
    // symmetric weights q_ij, indexed [(i-1)*n + (j-1)]; empty means 2/(n(n-1))
    std::vector<cplx<long double>> q;
    // relative variant: the edge (vertex, color); oriented by φ
    vertex_address edge_vertex;
    int edge_color = 1;
    search_options search;
    bool allow_unverified = false;
};

namespace detail {

inline bool finite_value(const cplx<long double>& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline cplx<long double> vertex_phi(const point<long double>& x)
{
    cplx<long double> p = 1;
    for (auto& z : x) p *= z;
    return p;
}

struct layered_vertex {
    vertex_address v;
    point<long double> x;
};

// layers of vertices at distance 0..r from T, computed outward with Φ values;
// `blocked` vertices are never entered (used to stay on one side of an edge)
inline std::vector<std::vector<layered_vertex>> grow_layers(const hurwitz_point<long double>& a,
                                                            const std::vector<vertex_address>& T, int r,
                                                            const vertex_set& blocked = {})
{
    const int n = a.n();
    std::vector<std::vector<layered_vertex>> layers(1);
    vertex_set seen(T.begin(), T.end());
    for (auto& b : blocked) seen.insert(b);
    for (auto& v : T) layers[0].push_back({v, phi_vertex(a, v)});
    for (int k = 0; k < r; ++k) {
        std::vector<layered_vertex> next;
        for (auto& lv : layers[static_cast<std::size_t>(k)])
            for (int c = 1; c <= n; ++c) {
                vertex_address w = neighbor(lv.v, c);
                if (!seen.insert(w).second) continue;
                point<long double> y = lv.x;
                apply_generator(y, c);
                next.push_back({std::move(w), std::move(y)});
            }
        layers.push_back(std::move(next));
    }
    return layers;
}

}  // namespace detail

inline std::vector<vertex_address> identity_center(const hurwitz_point<long double>& a, const identity_options& opt)
{
    if (opt.center == centering::root) return {vertex_address{}};
    verdict v = is_in_domain(a.cast<double>(), opt.search);
    if (v.status != membership::in_domain) {
        if (!opt.allow_unverified)
            throw std::invalid_argument(std::string("identity: point not verified in the domain (") + to_string(v.status) + ")");
        return {vertex_address{}};
    }
    return v.tree->vertices;
}

// reports for truncation depths 0..max_depth
inline std::vector<identity_report> identity_partial_sums(const hurwitz_point<long double>& a, int max_depth,
                                                          const identity_options& opt = {})
{
    using cl = cplx<long double>;
    const int n = a.n();
    if (max_depth < 0) throw std::invalid_argument("depth must be nonnegative");
    std::vector<identity_report> out;

    auto weight = [&](int i, int j) -> cl {
        if (opt.q.empty()) return cl(2.0L / (n * (n - 1)));
        return opt.q[static_cast<std::size_t>((i - 1) * n + (j - 1))];
    };

    if (opt.variant == identity_variant::relative_edge) {
        // ψ(e) = Σ_{A^0(e)} ½ frak_h + Σ_{A^-(e)} frak_h, truncated by distance from the tail
        point<long double> xv = phi_vertex(a, opt.edge_vertex);
        point<long double> xw = xv;
        apply_generator(xw, opt.edge_color);
        vertex_address w = neighbor(opt.edge_vertex, opt.edge_color);
        auto c = static_cast<std::size_t>(opt.edge_color - 1);
        bool into_v = std::abs(xv[c]) <= std::abs(xw[c]);
        vertex_address head = into_v ? opt.edge_vertex : w;
        vertex_address tail = into_v ? w : opt.edge_vertex;
        const point<long double>& xh = into_v ? xv : xw;
        cl target = psi_quotient(xh, opt.edge_color);
        auto layers = detail::grow_layers(a, {tail}, max_depth, vertex_set{head});
        geodesic_set counted;
        compensated_sum<cl> sum;
        identity_report r;
        r.target = target;
        // geodesics through the edge
        for (int k = 1; k <= n; ++k) {
            if (k == opt.edge_color) continue;
            geodesic_address g = canonical_geodesic(tail, std::min(k, opt.edge_color), std::max(k, opt.edge_color));
            counted.insert(g);
            geodesic_weights<long double> gw = weights_at(layers[0][0].x, opt.edge_color, k);
            cl t = frak_h(gw.phi, gw.sigma, a.mu, weight(std::min(k, opt.edge_color), std::max(k, opt.edge_color))) / 2.0L;
            sum += t;
            r.absolute_term_sum += std::abs(t);
            r.shell_absolute += std::abs(t);
            ++r.term_count;
        }
        for (int d = 0; d <= max_depth; ++d) {
            if (d > 0) r.shell_absolute = 0;
            for (auto& lv : layers[static_cast<std::size_t>(d)])
                for (int i = 1; i <= n; ++i)
                    for (int j = i + 1; j <= n; ++j) {
                        geodesic_address g = canonical_geodesic(lv.v, i, j);
                        if (!counted.insert(g).second) continue;
                        geodesic_weights<long double> gw = weights_at(lv.x, i, j);
                        ++r.term_count;
                        if (!detail::finite_value(gw.phi)) {
                            ++r.saturated;
                            continue;
                        }
                        cl t = frak_h(gw.phi, gw.sigma, a.mu, weight(i, j));
                        sum += t;
                        r.absolute_term_sum += std::abs(t);
                        r.shell_absolute += std::abs(t);
                    }
            r.depth = d;
            r.partial_sum = sum.value();
            r.residual = r.partial_sum - r.target;
            out.push_back(r);
        }
        return out;
    }

    std::vector<vertex_address> T = identity_center(a, opt);
    auto layers = detail::grow_layers(a, T, max_depth + 1);
    geodesic_set counted;
    compensated_sum<cl> geo_sum, vert_sum;
    identity_report r;
    long double abs_vert = 0;
    std::size_t vert_terms = 0, geo_terms = 0;

    auto add_vertices = [&](std::size_t d) {
        for (auto& lv : layers[d]) {
            cl p = detail::vertex_phi(lv.x);
            ++vert_terms;
            if (!detail::finite_value(p)) {
                ++r.saturated;
                continue;
            }
            if (p == cl(0)) throw std::domain_error("identity: phi vanishes at a vertex");
            if (opt.variant == identity_variant::mcshane_h && a.mu != cl(0)) {
                cl t = a.mu / p;
                vert_sum += t;
                abs_vert += std::abs(t);
            }
        }
    };
    add_vertices(0);
    for (int d = 0; d <= max_depth; ++d) {
        add_vertices(static_cast<std::size_t>(d + 1));
        long double shell = 0;
        for (auto& lv : layers[static_cast<std::size_t>(d)])
            for (int i = 1; i <= n; ++i)
                for (int j = i + 1; j <= n; ++j) {
                    geodesic_address g = canonical_geodesic(lv.v, i, j);
                    if (!counted.insert(g).second) continue;
                    ++geo_terms;
                    geodesic_weights<long double> gw = weights_at(lv.x, i, j);
                    if (!detail::finite_value(gw.phi)) {
                        ++r.saturated;
                        continue;
                    }
                    cl t = opt.variant == identity_variant::mcshane_h ? h_function(gw.phi)
                                                                      : frak_h(gw.phi, gw.sigma, a.mu, weight(i, j));
                    geo_sum += t;
                    shell += std::abs(t);
                }
        r.depth = d;
        r.partial_sum = geo_sum.value() - vert_sum.value();
        r.residual = r.partial_sum - r.target;
        r.term_count = geo_terms + (opt.variant == identity_variant::mcshane_h ? vert_terms : 0);
        r.shell_absolute = shell;
        r.absolute_term_sum += shell;
        out.push_back(r);
    }
    if (opt.variant == identity_variant::mcshane_h)
        for (auto& rep : out) rep.absolute_term_sum += abs_vert;  // vertex part reported once, full truncation
    return out;
}

// ---- convergence certificate -----------------------------------------------

struct convergence_shell {
    int depth = 0;
    long double geodesics = 0;  // Σ |φ(γ)|^{-t} over γ first met at this depth
    long double vertices = 0;   // Σ |φ(v)|^{-t}
    long double subtrees = 0;   // Σ |φ(X)|^{-t}, X the coordinate subtrees
};

inline std::vector<convergence_shell> convergence_certificate(const hurwitz_point<long double>& a, double t,
                                                              int max_depth, const identity_options& opt = {})
{
    if (!(t > 0)) throw std::invalid_argument("exponent must be positive");
    const int n = a.n();
    std::vector<vertex_address> T = identity_center(a, opt);
    auto layers = detail::grow_layers(a, T, max_depth);
    geodesic_set gs;
    std::unordered_set<subtree_address, subtree_hash> xs;
    std::vector<convergence_shell> out;
    auto pw = [t](cplx<long double> z) {
        long double m = std::abs(z);
        return std::isfinite(m) ? std::pow(m, -static_cast<long double>(t)) : 0.0L;
    };
    for (int d = 0; d <= max_depth; ++d) {
        convergence_shell s;
        s.depth = d;
        for (auto& lv : layers[static_cast<std::size_t>(d)]) {
            s.vertices += pw(detail::vertex_phi(lv.x));
            for (int i = 1; i <= n; ++i) {
                if (xs.insert(coordinate_subtree(lv.v, n, i)).second) s.subtrees += pw(lv.x[static_cast<std::size_t>(i - 1)]);
                for (int j = i + 1; j <= n; ++j)
                    if (gs.insert(canonical_geodesic(lv.v, i, j)).second) s.geodesics += pw(weights_at(lv.x, i, j).phi);
            }
        }
        out.push_back(s);
    }
    return out;
}

// ---- ψ versus ½h estimate --------------------------------------------------

struct estimate_shell {
    int depth = 0;              // distance of the head from T is depth
    std::size_t edges = 0;
    long double max_ratio = 0;  // max |ψ - ½h(φ(γ))| |x_j|^2
    long double max_excess = 0; // max of |ψ - ½h| / (analytic bound), <= 1 expected
};

// for each shell m, the circular set C(T_m) with its reference geodesics
inline std::vector<estimate_shell> psi_estimate(const hurwitz_point<long double>& a, int max_depth,
                                                const identity_options& opt = {})
{
    const int n = a.n();
    std::vector<vertex_address> T = identity_center(a, opt);
    auto layers = detail::grow_layers(a, T, max_depth + 1);
    vertex_set inner(T.begin(), T.end());
    std::vector<estimate_shell> out;
    for (int m = 1; m <= max_depth; ++m) {
        for (auto& lv : layers[static_cast<std::size_t>(m)]) inner.insert(lv.v);
        estimate_shell s;
        s.depth = m;
        for (auto& lv : layers[static_cast<std::size_t>(m)]) {
            // e* toward T: the unique neighbor in the previous layer
            int j = 0;
            for (int c = 1; c <= n && !j; ++c)
                if (inner.count(neighbor(lv.v, c))) {
                    vertex_address w = neighbor(lv.v, c);
                    bool prev = false;
                    for (auto& pv : layers[static_cast<std::size_t>(m - 1)])
                        if (pv.v == w) prev = true;
                    if (prev) j = c;
                }
            if (!j) continue;
            for (int i = 1; i <= n; ++i) {
                if (i == j) continue;
                // edge of color i leaves T_m at lv.v; ψ for the inward orientation
                cplx<long double> psi = psi_quotient(lv.x, i);
                geodesic_weights<long double> gw = weights_at(lv.x, i, j);
                cplx<long double> xj = lv.x[static_cast<std::size_t>(j - 1)];
                // ψ and ½h are the small roots of ψ^2 - ψ + c for c = c0 + δ and c0 = 1/φ^2;
                // their difference is 2δ/(s0 + s1), s = sqrt(1 - 4c), with no cancellation
                cplx<long double> c0 = 1.0L / (gw.phi * gw.phi);
                cplx<long double> delta = (gw.sigma - a.mu) / (xj * xj * gw.phi * gw.phi);
                cplx<long double> s0 = std::sqrt(1.0L - 4.0L * c0), s1 = std::sqrt(1.0L - 4.0L * (c0 + delta));
                cplx<long double> small_root = (1.0L - s1) / 2.0L;
                cplx<long double> diff = std::abs(psi - small_root) <= std::abs(psi - (1.0L - small_root))
                                             ? 2.0L * delta / (s0 + s1)
                                             : psi - h_function(gw.phi) / 2.0L;
                long double xj2 = std::norm(xj);
                long double ratio = std::abs(diff) * xj2;
                long double re = std::sqrt(1.0L - 4.0L / (gw.phi * gw.phi)).real();
                long double bound = 2.0L / xj2 * std::abs(gw.sigma - a.mu) / std::norm(gw.phi) / re;
                s.max_ratio = std::max(s.max_ratio, ratio);
                if (bound > 0) s.max_excess = std::max(s.max_excess, std::abs(diff) / bound);
                ++s.edges;
            }
        }
        out.push_back(s);
    }
    return out;
}

// ---- Fibonacci growth ------------------------------------------------------

struct fibonacci_growth {
    // upper: with g = log+|φ| + C0 the step inequality g(γ) <= g(α) + g(β) gives g <= c_upper F,
    //   c_upper the largest g over the root geodesics (F = 1).
    // lower: c_lower is half the smallest log+|φ|/F seen on d(γ) <= depth/2 outside the
    //   exceptional set, then tested on every γ with d(γ) <= depth.
    double c_lower = 0;
    double c_upper = 0;
    double C0 = 0;  // log+|μ| + log(2n)
    std::vector<geodesic_address> exceptional;       // |φ| <= K, excluded from the lower bound
    std::vector<geodesic_address> upper_violations;
    std::vector<geodesic_address> lower_violations;
    std::vector<geodesic_address> step_violations;   // log+|φ(γ)| > log+|φ(α)| + log+|φ(β)| + C0, diagnostic only
    std::size_t count = 0;
};

inline fibonacci_growth fibonacci_growth_check(const hurwitz_point<double>& a, int depth, double K = 2.5)
{
    const int n = a.n();
    if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
    fibonacci_growth r;
    auto logp = [](double x) { return std::max(0.0, x); };
    r.C0 = logp(std::log(std::abs(a.mu))) + std::log(2.0 * n);
    // log|φ| as a sum of logs; no overflow at depth
    auto log_phi = [&](const pt& x, int i, int j) {
        double s = 0;
        for (int k = 1; k <= n; ++k)
            if (k != i && k != j) s += std::log(std::abs(x[static_cast<std::size_t>(k - 1)]));
        return s;
    };
    struct row {
        geodesic_address g;
        double lp;
        double F;
        bool small;
    };
    std::vector<row> rows;
    struct frame {
        vertex_address v;
        pt x;
        fib_table t;
    };
    std::vector<frame> stack{{vertex_address{}, a.x, fib_table(n)}};
    while (!stack.empty()) {
        frame f = std::move(stack.back());
        stack.pop_back();
        int k = f.v.is_root() ? 0 : f.v.last();
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) {
                if (i == k || j == k) continue;
                double lp = log_phi(f.x, i, j);
                geodesic_address g{f.v, static_cast<color>(i), static_cast<color>(j)};
                if (k) {
                    double la = logp(log_phi(f.x, std::min(i, k), std::max(i, k)));
                    double lb = logp(log_phi(f.x, std::min(j, k), std::max(j, k)));
                    if (logp(lp) > la + lb + r.C0 + 1e-9 * (1 + logp(lp))) r.step_violations.push_back(g);
                }
                rows.push_back({g, logp(lp), double(f.t.get(i, j)), lp <= std::log(K)});
            }
        if (static_cast<int>(f.v.depth()) == depth) continue;
        for (int c = 1; c <= n; ++c) {
            if (c == k) continue;
            pt y = f.x;
            apply_generator(y, c);
            stack.push_back({neighbor(f.v, c), std::move(y), f.t.step(c)});
        }
    }
    r.count = rows.size();
    r.c_lower = std::numeric_limits<double>::infinity();
    for (auto& w : rows) {
        if (w.g.root.is_root()) r.c_upper = std::max(r.c_upper, w.lp + r.C0);
        if (!w.small && 2 * static_cast<int>(w.g.root.depth()) <= depth) r.c_lower = std::min(r.c_lower, w.lp / w.F);
    }
    r.c_lower /= 2;
    if (!std::isfinite(r.c_lower)) r.c_lower = 0;
    for (auto& w : rows) {
        if (w.small) r.exceptional.push_back(w.g);
        if (w.lp + r.C0 > r.c_upper * w.F * (1 + 1e-12)) r.upper_violations.push_back(w.g);
        if (!w.small && w.lp < r.c_lower * w.F * (1 - 1e-12)) r.lower_violations.push_back(w.g);
    }
    auto srt = [](std::vector<geodesic_address>& v) { std::sort(v.begin(), v.end()); };
    srt(r.exceptional);
    srt(r.upper_violations);
    srt(r.lower_violations);
    srt(r.step_violations);
    return r;
}

}  // namespace markoff
