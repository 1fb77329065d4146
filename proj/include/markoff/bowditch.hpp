#pragma once

// Membership in the domain of discontinuity: the φ-directed tree, sink descent,
// edge-connected search for A_φ(K) and the attracting subtree T_φ(t).

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hurwitz.hpp"

namespace markoff {

using pt = point<double>;
using cd = cplx<double>;

struct search_options {
    double K = 2.5;
    std::size_t budget = 1'000'000;       // vertex expansions plus interval steps
    std::size_t descent_budget = 10'000;
    std::size_t max_window = 4096;        // longest J window walked; words along it are stored
    double segment_tol = 1e-12;
    double sigma_tol = 1e-9;
    double modulus_tol = 1e-12;
};

inline bool in_segment(cd z, double tol)
{
    return std::abs(z.imag()) <= tol && z.real() >= -2 - tol && z.real() <= 2 + tol;
}

// ---- edge directions -------------------------------------------------------

struct edge_direction {
    edge_key edge;
    vertex_address head;
    bool decisive = true;
};

// does the edge of color c at v point away from v? x = Φ(v)
// ties go toward the lexicographically smaller endpoint, i.e. toward the parent
inline bool points_away(const pt& x, const vertex_address& v, int c, double tol, bool* decisive = nullptr)
{
    double here = std::abs(x[static_cast<std::size_t>(c - 1)]);
    double there = std::abs(neighbor_coordinate(x, c));
    double scale = std::max(1.0, std::max(here, there));
    bool dec = std::abs(here - there) > tol * scale;
    if (decisive) *decisive = dec;
    if (dec) return here > there;
    return v.last() == c;
}

inline edge_direction direct_edge(const hurwitz_point<double>& a, const vertex_address& v, int c,
                                  double tol = 1e-12)
{
    check_color(a.n(), c);
    pt x = phi_vertex(a, v);
    edge_direction d;
    d.edge = make_edge(v, c);
    bool away = points_away(x, v, c, tol, &d.decisive);
    d.head = away ? neighbor(v, c) : v;
    return d;
}

struct fork_report {
    std::vector<geodesic_address> geodesics;
    std::vector<cd> phis;
    bool dihedral = false;
};

// [v;{i,j}] for every pair of outward edges at v
inline fork_report fork_check(const hurwitz_point<double>& a, const vertex_address& v, double tol = 1e-12)
{
    fork_report r;
    int zeros = 0;
    for (auto& z : a.x) zeros += z == cd(0);
    r.dihedral = zeros >= 2;
    pt x = phi_vertex(a, v);
    std::vector<int> out;
    for (int c = 1; c <= a.n(); ++c)
        if (points_away(x, v, c, tol)) out.push_back(c);
    for (std::size_t p = 0; p < out.size(); ++p)
        for (std::size_t q = p + 1; q < out.size(); ++q) {
            r.geodesics.push_back(canonical_geodesic(v, out[p], out[q]));
            r.phis.push_back(weights_at(x, out[p], out[q]).phi);
        }
    return r;
}

// ---- descent ---------------------------------------------------------------

enum class descent_kind { sink, found_small, budget_exceeded };

struct descent_result {
    descent_kind kind = descent_kind::sink;
    vertex_address v;     // final vertex
    pt x;                 // Φ(v)
    std::optional<geodesic_address> small;
    std::size_t steps = 0;
};

// walk strictly downhill; stop at a sink, at any vertex carrying a geodesic
// with |φ| <= K, or when the step budget runs out
inline descent_result descend_to_sink(const hurwitz_point<double>& a, const vertex_address& start,
                                      const search_options& opt)
{
    if (opt.descent_budget < 1) throw std::invalid_argument("descent budget must be >= 1");
    descent_result r;
    r.v = start;
    r.x = phi_vertex(a, start);
    const int n = a.n();
    for (;;) {
        for (int i = 1; i <= n && !r.small; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (std::abs(weights_at(r.x, i, j).phi) <= opt.K) {
                    r.small = canonical_geodesic(r.v, i, j);
                    break;
                }
        if (r.small) {
            r.kind = descent_kind::found_small;
            return r;
        }
        int best = 0, outs = 0, second = 0;
        double drop = -1;
        for (int c = 1; c <= n; ++c) {
            if (!points_away(r.x, r.v, c, opt.modulus_tol)) continue;
            ++outs;
            double d = std::abs(r.x[static_cast<std::size_t>(c - 1)]) - std::abs(neighbor_coordinate(r.x, c));
            if (d > drop) {
                if (best) second = best;
                drop = d;
                best = c;
            } else if (!second) {
                second = c;
            }
        }
        if (outs == 0) {
            r.kind = descent_kind::sink;
            return r;
        }
        if (outs >= 2) {
            // fork: the pair spans a geodesic with |φ| <= 2
            r.small = canonical_geodesic(r.v, best, second);
            r.kind = descent_kind::found_small;
            return r;
        }
        if (r.steps >= opt.descent_budget) {
            r.kind = descent_kind::budget_exceeded;
            return r;
        }
        apply_generator(r.x, best);
        r.v = neighbor(std::move(r.v), best);
        ++r.steps;
    }
}

// ---- H_mu and J intervals --------------------------------------------------

inline constexpr double infinite_radius = std::numeric_limits<double>::infinity();

// coordinates fixed along [v;{i,j}], from Φ at any of its vertices
inline std::vector<cd> fixed_coordinates(const pt& x, int i, int j)
{
    std::vector<cd> f;
    for (int k = 1; k <= static_cast<int>(x.size()); ++k)
        if (k != i && k != j) f.push_back(x[static_cast<std::size_t>(k - 1)]);
    return f;
}

inline double h_mu_radius(const std::vector<cd>& fixed, cd mu, double seg_tol = 1e-12, double sigma_tol = 1e-9)
{
    cd x = 1, sigma = 0;
    for (auto& z : fixed) {
        x *= z;
        sigma += z * z;
    }
    if (in_segment(x, seg_tol) || sigma_equals_mu(sigma, mu, sigma_tol)) return infinite_radius;
    double lam = std::abs(lambda_of(x));
    return std::sqrt(std::abs((sigma - mu) / (x * x - 4.0))) * 2 * lam * lam / (lam - 1);
}

// max over i of K / |prod_{j != i} x_j|, products over the fixed coordinates
inline double pair_radius(const std::vector<cd>& fixed, double K)
{
    double r = 0;
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        cd p = 1;
        for (std::size_t j = 0; j < fixed.size(); ++j)
            if (j != i) p *= fixed[j];
        r = std::max(r, K / std::abs(p));
    }
    return r;
}

inline double h_mu_star(const std::vector<cd>& fixed, cd mu, double K)
{
    return std::max(h_mu_radius(fixed, mu), pair_radius(fixed, K));
}

inline double h_mu_t(const std::vector<cd>& fixed, cd mu, double t)
{
    return std::max(h_mu_radius(fixed, mu) + t, pair_radius(fixed, 2 + t));
}

inline double h_mu(const hurwitz_point<double>& a, const geodesic_address& g)
{
    return h_mu_radius(fixed_coordinates(phi_vertex(a, g.root), g.i, g.j), a.mu);
}

inline double h_mu_star(const hurwitz_point<double>& a, const geodesic_address& g, double K)
{
    return h_mu_star(fixed_coordinates(phi_vertex(a, g.root), g.i, g.j), a.mu, K);
}

inline double h_mu_t(const hurwitz_point<double>& a, const geodesic_address& g, double t)
{
    if (t < 0) throw std::invalid_argument("t must be nonnegative");
    return h_mu_t(fixed_coordinates(phi_vertex(a, g.root), g.i, g.j), a.mu, t);
}

struct j_window {
    bool whole = false;  // H infinite
    bool empty = false;
    long lo = 0, hi = -1;  // edges e_lo .. e_hi
    std::size_t steps = 0;
};

namespace detail {

inline cd y_value(const pt& x, const geodesic_address& g, long m)
{
    int c = geodesic_edge_color(g, m);
    int other = c == g.i ? g.j : g.i;
    return x[static_cast<std::size_t>(other - 1)];
}

// window {m : |y_m| <= H} scanning outward from v* until |y| exceeds H while increasing
inline j_window scan_window(const pt& xstar, const geodesic_address& g, double H, std::size_t max_steps)
{
    j_window w;
    if (!std::isfinite(H)) {
        w.whole = true;
        return w;
    }
    long lo = std::numeric_limits<long>::max(), hi = std::numeric_limits<long>::min();
    auto take = [&](long m) { lo = std::min(lo, m); hi = std::max(hi, m); };

    pt x = xstar;
    double prev = std::abs(y_value(xstar, g, -1));  // |y_{-1}| is read at v_0 too
    for (long m = 0;; ++m) {
        double y = std::abs(y_value(x, g, m));
        if (y <= H) take(m);
        else if (y > prev) break;
        prev = y;
        apply_generator(x, geodesic_edge_color(g, m));
        if (++w.steps > max_steps) return w.empty = true, w.lo = 0, w.hi = -1, w;
    }
    x = xstar;
    prev = std::abs(y_value(xstar, g, 0));
    for (long m = -1;; --m) {
        apply_generator(x, geodesic_edge_color(g, m));
        double y = std::abs(y_value(x, g, m));
        if (y <= H) take(m);
        else if (y > prev) break;
        prev = y;
        if (++w.steps > max_steps) return w.empty = true, w.lo = 0, w.hi = -1, w;
    }
    if (lo > hi) {
        w.empty = true;
        return w;
    }
    w.lo = lo;
    w.hi = hi;
    return w;
}

// Φ(v_m) for m in [lo, hi+1], walking from v*
inline std::vector<std::pair<vertex_address, pt>> window_vertices(const geodesic_address& g, const pt& xstar,
                                                                  long lo, long hi)
{
    std::vector<std::pair<vertex_address, pt>> out;
    long last = hi + 1;
    // walk from v_0 to v_lo (or forward), then along
    vertex_address v = g.root;
    pt x = xstar;
    long m = 0;
    while (m > lo) {
        --m;
        apply_generator(x, geodesic_edge_color(g, m));
        v = neighbor(std::move(v), geodesic_edge_color(g, m));
    }
    while (m < lo) {
        apply_generator(x, geodesic_edge_color(g, m));
        v = neighbor(std::move(v), geodesic_edge_color(g, m));
        ++m;
    }
    out.emplace_back(v, x);
    for (; m < last; ++m) {
        apply_generator(x, geodesic_edge_color(g, m));
        v = neighbor(std::move(v), geodesic_edge_color(g, m));
        out.emplace_back(v, x);
    }
    return out;
}

// Φ(v*) from Φ at a vertex w of γ: strip the alternating tail of w
inline pt strip_to_root(const vertex_address& w, pt x, const geodesic_address& g)
{
    for (std::size_t k = w.depth(); k > g.root.depth(); --k) apply_generator(x, w.letters[k - 1]);
    return x;
}

}  // namespace detail

inline j_window j_interval(const hurwitz_point<double>& a, const geodesic_address& g, double t,
                           std::size_t max_steps = 1'000'000)
{
    pt xs = phi_vertex(a, g.root);
    double H = h_mu_t(fixed_coordinates(xs, g.i, g.j), a.mu, t);
    return detail::scan_window(xs, g, H, max_steps);
}

// ---- search for A_φ(K) -----------------------------------------------------

enum class search_kind { complete, infinite, b1_failure, budget_exceeded };

inline const char* to_string(search_kind k)
{
    switch (k) {
    case search_kind::complete: return "Complete";
    case search_kind::infinite: return "Infinite";
    case search_kind::b1_failure: return "B1Failure";
    case search_kind::budget_exceeded: return "BudgetExceeded";
    }
    return "?";
}

struct member {
    geodesic_address g;
    cd phi;
    cd sigma;
    long lo = 0, hi = -1;  // J window for t = K - 2
};

struct search_result {
    search_kind kind = search_kind::complete;
    std::vector<member> members;  // sorted by address
    std::optional<geodesic_address> witness;
    std::string reason;
    std::size_t expansions = 0;
    std::optional<vertex_address> sink;  // set when A_φ(K) = ∅ was decided at a sink
    std::vector<edge_key> tree_edges;    // union of the J windows
    std::unordered_map<vertex_address, pt, vertex_hash> tree_values;
};

inline search_result search_A_phi_K(const hurwitz_point<double>& a, const search_options& opt)
{
    if (!(opt.K > 2)) throw std::invalid_argument("K must exceed 2");
    const int n = a.n();
    const double t = opt.K - 2;
    search_result res;

    descent_result d = descend_to_sink(a, vertex_address{}, opt);
    res.expansions = d.steps;
    if (d.kind == descent_kind::budget_exceeded) {
        res.kind = search_kind::budget_exceeded;
        res.reason = "descent budget exhausted without reaching a sink";
        return res;
    }
    if (d.kind == descent_kind::sink) {
        // nothing small through a sink: a nearest member would force a fork closer in
        res.kind = search_kind::complete;
        res.sink = d.v;
        res.tree_values.emplace(d.v, d.x);
        return res;
    }

    std::unordered_map<vertex_address, pt, vertex_hash> seen;
    std::unordered_map<geodesic_address, std::size_t, geodesic_hash> index;
    std::deque<vertex_address> queue;
    seen.emplace(d.v, d.x);
    queue.push_back(d.v);
    edge_set edges;

    auto fail = [&](search_kind k, const geodesic_address& g, std::string why) {
        res.kind = k;
        res.witness = g;
        res.reason = std::move(why);
    };

    while (!queue.empty()) {
        vertex_address v = std::move(queue.front());
        queue.pop_front();
        if (++res.expansions > opt.budget) {
            res.kind = search_kind::budget_exceeded;
            res.reason = "expansion budget exhausted";
            break;
        }
        const pt x = seen.at(v);
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) {
                geodesic_weights<double> w = weights_at(x, i, j);
                if (std::abs(w.phi) > opt.K) continue;
                geodesic_address g = canonical_geodesic(v, i, j);
                if (index.count(g)) continue;
                if (in_segment(w.phi, opt.segment_tol)) {
                    fail(search_kind::b1_failure, g, "phi in [-2,2]");
                    goto done;
                }
                if (sigma_equals_mu(w.sigma, a.mu, opt.sigma_tol)) {
                    fail(search_kind::infinite, g, "sigma equals mu with |phi| <= K");
                    goto done;
                }
                pt xs = detail::strip_to_root(v, x, g);
                double H = h_mu_t(fixed_coordinates(xs, i, j), a.mu, t);
                j_window win = detail::scan_window(xs, g, H, opt.budget);
                res.expansions += win.steps;
                if (!win.empty && static_cast<std::size_t>(win.hi - win.lo + 1) > opt.max_window) {
                    fail(search_kind::budget_exceeded, g, "J window longer than " + std::to_string(opt.max_window));
                    goto done;
                }
                member mem{g, w.phi, w.sigma, win.lo, win.hi};
                index.emplace(g, res.members.size());
                res.members.push_back(mem);
                if (win.empty) continue;
                for (long m = win.lo; m <= win.hi; ++m)
                    edges.insert(make_edge(geodesic_vertex(g, m), geodesic_edge_color(g, m)));
                for (auto& [u, xu] : detail::window_vertices(g, xs, win.lo, win.hi))
                    if (seen.emplace(u, xu).second) queue.push_back(u);
            }
    }
done:
    std::sort(res.members.begin(), res.members.end(), [](const member& p, const member& q) { return p.g < q.g; });
    res.tree_edges.assign(edges.begin(), edges.end());
    std::sort(res.tree_edges.begin(), res.tree_edges.end());
    if (res.kind == search_kind::complete)
        for (auto& e : res.tree_edges) {
            res.tree_values.emplace(e.near, seen.at(e.near));
            res.tree_values.emplace(e.far(), seen.at(e.far()));
        }
    return res;
}

// ---- attracting tree and verdict -------------------------------------------

struct attracting_tree {
    double t = 0;
    std::vector<edge_key> edges;
    std::vector<vertex_address> vertices;
    std::vector<std::pair<geodesic_address, std::pair<long, long>>> intervals;
    bool connected = false;
    bool inward = false;  // every circular-set edge points into the tree
};

namespace detail {

inline attracting_tree build_tree(const hurwitz_point<double>& a, const search_result& s, double t, double tol)
{
    const int n = a.n();
    attracting_tree T;
    T.t = t;
    T.edges = s.tree_edges;
    vertex_set vs;
    for (auto& [v, x] : s.tree_values) vs.insert(v);
    T.vertices.assign(vs.begin(), vs.end());
    std::sort(T.vertices.begin(), T.vertices.end());
    for (auto& m : s.members) T.intervals.push_back({m.g, {m.lo, m.hi}});
    // connectivity through tree edges only
    edge_set es(T.edges.begin(), T.edges.end());
    if (!T.vertices.empty()) {
        vertex_set reach{T.vertices.front()};
        std::vector<vertex_address> stack{T.vertices.front()};
        while (!stack.empty()) {
            vertex_address v = std::move(stack.back());
            stack.pop_back();
            for (int c = 1; c <= n; ++c) {
                if (!es.count(make_edge(v, c))) continue;
                vertex_address w = neighbor(v, c);
                if (reach.insert(w).second) stack.push_back(std::move(w));
            }
        }
        T.connected = reach.size() == vs.size();
    }
    T.inward = true;
    for (auto& v : T.vertices) {
        const pt& x = s.tree_values.at(v);
        for (int c = 1; c <= n; ++c)
            if (!es.count(make_edge(v, c)) && points_away(x, v, c, tol)) T.inward = false;
    }
    return T;
}

}  // namespace detail

struct attracting_tree_result {
    std::optional<attracting_tree> tree;
    search_result search;
};

inline attracting_tree_result attracting_tree_of(const hurwitz_point<double>& a, double t, search_options opt = {})
{
    if (!(t > 0)) throw std::invalid_argument("t must be positive");
    opt.K = 2 + t;
    attracting_tree_result r;
    r.search = search_A_phi_K(a, opt);
    if (r.search.kind == search_kind::complete) r.tree = detail::build_tree(a, r.search, t, opt.modulus_tol);
    return r;
}

enum class membership { in_domain, not_in_domain, undetermined };

inline const char* to_string(membership m)
{
    switch (m) {
    case membership::in_domain: return "InDomain";
    case membership::not_in_domain: return "NotInDomain";
    case membership::undetermined: return "Undetermined";
    }
    return "?";
}

struct verdict {
    membership status = membership::undetermined;
    double K = 2.5;
    std::vector<member> a_phi_K;
    std::optional<geodesic_address> witness;
    std::string reason;
    std::optional<attracting_tree> tree;
    std::size_t expansions = 0;
};

inline verdict is_in_domain(const hurwitz_point<double>& a, const search_options& opt = {})
{
    if (!(opt.K > 2)) throw std::invalid_argument("K must exceed 2");
    verdict v;
    v.K = opt.K;
    // B1 at the root first: cheap and gives a root witness when it fails there
    pt x0 = a.x;
    for (int i = 1; i <= a.n(); ++i)
        for (int j = i + 1; j <= a.n(); ++j)
            if (in_segment(weights_at(x0, i, j).phi, opt.segment_tol)) {
                v.status = membership::not_in_domain;
                v.witness = geodesic_address{vertex_address{}, static_cast<color>(i), static_cast<color>(j)};
                v.reason = "phi in [-2,2]";
                return v;
            }
    auto r = attracting_tree_of(a, opt.K - 2, opt);
    v.expansions = r.search.expansions;
    v.a_phi_K = r.search.members;
    v.reason = r.search.reason;
    switch (r.search.kind) {
    case search_kind::b1_failure:
    case search_kind::infinite:
        v.status = membership::not_in_domain;
        v.witness = r.search.witness;
        break;
    case search_kind::budget_exceeded:
        v.status = membership::undetermined;
        break;
    case search_kind::complete:
        v.tree = r.tree;
        if (r.tree->connected && r.tree->inward) {
            v.status = membership::in_domain;
        } else {
            v.status = membership::undetermined;
            v.reason = r.tree->connected ? "circular set not inward" : "attracting tree disconnected";
        }
        break;
    }
    return v;
}

// exhaustive reference: every γ with d(γ) <= depth and |φ(γ)| <= K
inline std::vector<geodesic_address> enumerate_small(const hurwitz_point<double>& a, double K, int depth)
{
    std::vector<geodesic_address> out;
    const int n = a.n();
    std::vector<std::pair<vertex_address, pt>> stack{{vertex_address{}, a.x}};
    while (!stack.empty()) {
        auto [v, x] = std::move(stack.back());
        stack.pop_back();
        int k = v.last();
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (i != k && j != k && std::abs(weights_at(x, i, j).phi) <= K)
                    out.push_back({v, static_cast<color>(i), static_cast<color>(j)});
        if (static_cast<int>(v.depth()) == depth) continue;
        for (int c = 1; c <= n; ++c) {
            if (c == k) continue;
            pt y = x;
            apply_generator(y, c);
            stack.push_back({neighbor(v, c), std::move(y)});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// shared-edge adjacency among geodesics of a finite set
inline bool edge_connected(const std::vector<geodesic_address>& gs, int n)
{
    if (gs.empty()) return true;
    check_arity(n);
    // if p and q meet at all, the root of the deeper one lies on the other, and a
    // shared edge (color common to both) is incident to that root
    auto shares_edge = [](const geodesic_address& p, const geodesic_address& q) {
        int common = 0;
        for (int c : {int(p.i), int(p.j)})
            if (q.has_color(c)) common = c;
        if (!common || p == q) return false;
        const geodesic_address& deep = p.depth() >= q.depth() ? p : q;
        const geodesic_address& other = p.depth() >= q.depth() ? q : p;
        const vertex_address& u = deep.root;
        if (canonical_geodesic(u, other.i, other.j) != other) return false;
        vertex_address w = neighbor(u, common);
        return canonical_geodesic(w, other.i, other.j) == other && canonical_geodesic(w, deep.i, deep.j) == deep;
    };
    std::vector<char> seen(gs.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        std::size_t p = stack.back();
        stack.pop_back();
        for (std::size_t q = 0; q < gs.size(); ++q)
            if (!seen[q] && shares_edge(gs[p], gs[q])) {
                seen[q] = 1;
                ++count;
                stack.push_back(q);
            }
    }
    return count == gs.size();
}

}  // namespace markoff
