#pragma once

// nlohmann::json conversions for the public result types

#include <json.hpp>

#include "bowditch.hpp"
#include "group.hpp"
#include "identity.hpp"
#include "slice.hpp"

namespace markoff {

using json = nlohmann::json;

inline json to_json_value(cplx<double> z) { return json::array({z.real(), z.imag()}); }
inline json to_json_value(cplx<long double> z) { return to_json_value(cplx<double>(z)); }

inline std::string word_string(const vertex_address& v)
{
    std::string s;
    for (color c : v.letters) {
        if (!s.empty()) s += '.';
        s += std::to_string(int(c));
    }
    return s;
}

inline json to_json_value(const vertex_address& v)
{
    json a = json::array();
    for (color c : v.letters) a.push_back(int(c));
    return a;
}

inline json to_json_value(const geodesic_address& g)
{
    return {{"v", to_json_value(g.root)}, {"colors", {int(g.i), int(g.j)}}};
}

inline json to_json_value(const edge_key& e) { return {{"vertex", to_json_value(e.near)}, {"color", int(e.c)}}; }

template <class T>
json to_json_value(const point<T>& x)
{
    json a = json::array();
    for (auto& z : x) a.push_back(to_json_value(z));
    return a;
}

inline json to_json_value(const group_element& g)
{
    json perm = json::array();
    for (int p : g.linear.perm) perm.push_back(p + 1);
    return {{"word", to_json_value(g.word)}, {"signs", g.linear.signs}, {"perm", perm}};
}

inline json to_json_value(const verdict& v)
{
    json j;
    j["status"] = to_string(v.status);
    j["K"] = v.K;
    json members = json::array();
    for (auto& m : v.a_phi_K) members.push_back({{"geodesic", to_json_value(m.g)}, {"phi", to_json_value(m.phi)}});
    j["aphiK"] = members;
    j["witness"] = v.witness ? to_json_value(*v.witness) : json(nullptr);
    j["reason"] = v.reason;
    j["expansions"] = v.expansions;
    if (v.tree) {
        json edges = json::array();
        for (auto& e : v.tree->edges) edges.push_back(to_json_value(e));
        json verts = json::array();
        for (auto& u : v.tree->vertices) verts.push_back(to_json_value(u));
        j["tree"] = {{"t", v.tree->t}, {"edges", edges}, {"vertices", verts},
                     {"connected", v.tree->connected}, {"inward", v.tree->inward}};
    } else {
        j["tree"] = nullptr;
    }
    return j;
}

inline json to_json_value(const identity_report& r)
{
    return {{"depth", r.depth},
            {"partial_sum", to_json_value(r.partial_sum)},
            {"target", to_json_value(r.target)},
            {"residual", to_json_value(r.residual)},
            {"residual_abs", static_cast<double>(std::abs(r.residual))},
            {"term_count", r.term_count},
            {"absolute_term_sum", static_cast<double>(r.absolute_term_sum)},
            {"shell_absolute", static_cast<double>(r.shell_absolute)},
            {"saturated", r.saturated}};
}

inline json to_json_value(const slice_job& job, const slice_image& img, bool with_time = true)
{
    json j = {{"n", job.n},
              {"center", to_json_value(job.center)},
              {"width", job.width},
              {"height", job.height},
              {"resolution", {job.pixels_w, job.pixels_h}},
              {"K", job.search.K},
              {"budget", job.search.budget},
              {"counts", {{"InDomain", img.in}, {"NotInDomain", img.out}, {"Undetermined", img.undetermined}}},
              {"fast_path_pixels", img.fast}};
    if (with_time) j["seconds"] = img.seconds;
    return j;
}

}  // namespace markoff
