// markoff: command-line front end
//
//   markoff orbit    --n 3 --a 3,0 3,0 3,0 --depth 2
//   markoff markoff  --n 3 --bound 1000
//   markoff check    --n 3 --diag 2.2,0.3 --K 2.5
//   markoff identity --n 3 --diag 3 --depth 12
//   markoff slice    --n 3 --center 0,0 --width 8 --height 8 --res 512x512 --out slice.ppm --summary slice.json
//   markoff fib      --n 3 --multiplicity 20

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "markoff/json_io.hpp"
#include "markoff/markoff.hpp"

using namespace markoff;

namespace {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_real(const std::string& part, const std::string& whole)
{
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(part, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != part.size() || !std::isfinite(v))
        throw usage_error("malformed complex number '" + whole + "' (expected re,im)");
    return v;
}

// "re,im" or "re"
cd parse_complex(const std::string& s)
{
    auto comma = s.find(',');
    if (comma == std::string::npos) return {parse_real(s, s), 0};
    return {parse_real(s.substr(0, comma), s), parse_real(s.substr(comma + 1), s)};
}

struct point_args {
    int n = 3;
    std::vector<std::string> a;
    std::string diag;

    void add(CLI::App* app)
    {
        app->add_option("--n", n, "arity n >= 3")->default_val(3);
        app->add_option("--a", a, "point as n complex numbers re,im");
        app->add_option("--diag", diag, "diagonal point (z,...,z), z as re,im");
    }

    hurwitz_point<double> get() const
    {
        if (n < min_arity || n > max_arity) throw usage_error("n must be in [3,16], got " + std::to_string(n));
        if (!a.empty() && !diag.empty()) throw usage_error("give either --a or --diag, not both");
        if (!diag.empty()) return diagonal_point(n, parse_complex(diag));
        if (a.empty()) throw usage_error("a point is required (--a or --diag)");
        if (static_cast<int>(a.size()) != n)
            throw usage_error("--a needs " + std::to_string(n) + " values, got " + std::to_string(a.size()));
        point<double> x;
        for (auto& s : a) x.push_back(parse_complex(s));
        return hurwitz_point<double>(x);
    }
};

void check_n(int n)
{
    if (n < min_arity || n > max_arity) throw usage_error("n must be in [3,16], got " + std::to_string(n));
}

std::ostream* open_out(const std::string& path, std::ofstream& f)
{
    if (path.empty() || path == "-") return &std::cout;
    f.open(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return &f;
}

search_options search_from(double K, std::size_t budget)
{
    search_options o;
    o.K = K;
    o.budget = budget;
    if (!(K > 2)) throw usage_error("K must exceed 2");
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Markoff-Hurwitz maps on the Cayley tree"};
    app.require_subcommand(1);
    app.fallthrough();  // --seed may follow the subcommand
    unsigned seed = 1;
    app.add_option("--seed", seed, "random seed (used by check --perturb)");

    // orbit
    auto* orbit = app.add_subcommand("orbit", "dump the orbit ball as JSON lines");
    point_args orbit_pt;
    orbit_pt.add(orbit);
    int orbit_depth = 2;
    std::string orbit_out;
    orbit->add_option("--depth", orbit_depth, "word length")->default_val(2);
    orbit->add_option("--out", orbit_out, "output file (default stdout)");

    // markoff
    auto* mk = app.add_subcommand("markoff", "nonnegative integer solutions of H = 0");
    int mk_n = 3;
    std::int64_t mk_bound = 100;
    bool mk_json = false;
    mk->add_option("--n", mk_n, "arity")->default_val(3);
    mk->add_option("--bound", mk_bound, "largest coordinate")->default_val(100);
    mk->add_flag("--json", mk_json, "print a JSON array");

    // check
    auto* check = app.add_subcommand("check", "membership verdict; exit 0 InDomain, 1 NotInDomain, 3 Undetermined");
    point_args check_pt;
    check_pt.add(check);
    double check_K = 2.5;
    std::size_t check_budget = 1'000'000;
    int perturb = 0;
    check->add_option("--K", check_K, "K > 2")->default_val(2.5);
    check->add_option("--budget", check_budget, "search budget")->default_val(1'000'000);
    check->add_option("--perturb", perturb, "also classify this many 1e-6 relative perturbations");

    // identity
    auto* ident = app.add_subcommand("identity", "partial sums of the McShane-type identities");
    point_args id_pt;
    id_pt.add(ident);
    int id_depth = 10;
    std::string id_variant = "mcshane";
    std::string id_center = "tree";
    std::vector<int> id_edge_vertex;
    int id_edge_color = 1;
    bool id_unverified = false, id_json = false;
    double id_K = 2.5;
    ident->add_option("--depth", id_depth, "truncation depth")->default_val(10);
    ident->add_option("--variant", id_variant, "mcshane | frak | relative")
        ->check(CLI::IsMember({"mcshane", "frak", "relative"}))
        ->default_val("mcshane");
    ident->add_option("--center", id_center, "tree | root")->check(CLI::IsMember({"tree", "root"}))->default_val("tree");
    ident->add_option("--edge-vertex", id_edge_vertex, "relative variant: word of the edge's vertex");
    ident->add_option("--edge-color", id_edge_color, "relative variant: edge color")->default_val(1);
    ident->add_option("--K", id_K, "K used to verify the point")->default_val(2.5);
    ident->add_flag("--allow-unverified", id_unverified, "run even if the point is not verified in the domain");
    ident->add_flag("--json", id_json, "JSON output");

    // slice
    auto* sl = app.add_subcommand("slice", "render a diagonal slice to PPM");
    slice_job job;
    std::string sl_center = "0,0", sl_res = "256x256", sl_out = "slice.ppm", sl_summary, sl_coloring = "binary";
    bool no_fast = false;
    sl->add_option("--n", job.n, "arity")->default_val(3);
    sl->add_option("--center", sl_center, "window center re,im")->default_val("0,0");
    sl->add_option("--width", job.width, "window width")->default_val(8);
    sl->add_option("--height", job.height, "window height")->default_val(8);
    sl->add_option("--res", sl_res, "WxH pixels")->default_val("256x256");
    sl->add_option("--K", job.search.K, "K > 2")->default_val(2.5);
    sl->add_option("--budget", job.search.budget, "per-pixel budget")->default_val(100000);
    sl->add_option("--coloring", sl_coloring, "binary | tree-size | k-level")->default_val("binary");
    sl->add_option("--threads", job.threads, "worker threads (0 = all cores)")->default_val(0);
    sl->add_option("--out", sl_out, "PPM path")->default_val("slice.ppm");
    sl->add_option("--summary", sl_summary, "JSON summary path");
    sl->add_flag("--no-fast-path", no_fast, "always run the full search");

    // fib
    auto* fib = app.add_subcommand("fib", "Fibonacci and Sierpinski diagnostics");
    int fib_n = 3;
    std::uint64_t fib_mult = 0;
    int fib_sier = -1, fib_zeta_depth = 8;
    double fib_zeta = 0;
    fib->add_option("--n", fib_n, "arity")->default_val(3);
    fib->add_option("--multiplicity", fib_mult, "table of #{F = m} for m up to this value");
    fib->add_option("--sierpinski", fib_sier, "check injectivity of the Sierpinski vector up to this depth");
    fib->add_option("--zeta", fib_zeta, "partial sums of the sum of F^-s for this s");
    fib->add_option("--zeta-depth", fib_zeta_depth, "depth for --zeta")->default_val(8);
    point_args fib_pt;
    fib->add_option("--a", fib_pt.a, "point for the growth check");
    fib->add_option("--diag", fib_pt.diag, "diagonal point for the growth check");
    int fib_growth_depth = 8;
    fib->add_option("--growth-depth", fib_growth_depth, "depth for the growth check")->default_val(8);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return 2;
    }

    try {
        if (*orbit) {
            auto a = orbit_pt.get();
            if (orbit_depth < 0) throw usage_error("depth must be nonnegative");
            std::ofstream f;
            std::ostream& out = *open_out(orbit_out, f);
            orbit_enumerate(a, orbit_depth, [&](const orbit_record<double>& r) {
                json j = {{"v", to_json_value(r.v)}, {"x", to_json_value(r.x)}};
                if (r.overflowed) j["overflowed"] = true;
                out << j.dump() << "\n";
            });
            return 0;
        }
        if (*mk) {
            check_n(mk_n);
            if (mk_bound < 1) throw usage_error("bound must be >= 1");
            auto sols = integer_solutions(mk_n, mk_bound);
            if (mk_json) {
                std::cout << json(sols).dump() << "\n";
            } else {
                for (auto& s : sols) {
                    for (std::size_t k = 0; k < s.size(); ++k) std::cout << (k ? " " : "") << s[k];
                    std::cout << "\n";
                }
            }
            return 0;
        }
        if (*check) {
            auto a = check_pt.get();
            auto opt = search_from(check_K, check_budget);
            verdict v = is_in_domain(a, opt);
            json j = to_json_value(v);
            if (perturb > 0) {
                std::mt19937_64 rng(seed);
                std::normal_distribution<double> g(0, 1);
                std::map<std::string, int> counts;
                for (int t = 0; t < perturb; ++t) {
                    point<double> y = a.x;
                    for (auto& z : y) z *= 1.0 + 1e-6 * cd(g(rng), g(rng));
                    counts[to_string(is_in_domain(hurwitz_point<double>(y), opt).status)]++;
                }
                j["perturbations"] = counts;
            }
            std::cout << j.dump(2) << "\n";
            switch (v.status) {
            case membership::in_domain: return 0;
            case membership::not_in_domain: return 1;
            case membership::undetermined: return 3;
            }
        }
        if (*ident) {
            auto a = id_pt.get();
            identity_options o;
            o.variant = id_variant == "mcshane" ? identity_variant::mcshane_h
                        : id_variant == "frak"  ? identity_variant::frak_h
                                                : identity_variant::relative_edge;
            o.center = id_center == "tree" ? centering::tree : centering::root;
            o.allow_unverified = id_unverified;
            o.search = search_from(id_K, o.search.budget);
            for (int c : id_edge_vertex) {
                if (c < 1 || c > a.n()) throw usage_error("edge vertex letters must be colors in [1,n]");
                o.edge_vertex = neighbor(o.edge_vertex, c);
            }
            if (id_edge_color < 1 || id_edge_color > a.n()) throw usage_error("edge color outside [1,n]");
            o.edge_color = id_edge_color;
            if (id_depth < 0) throw usage_error("depth must be nonnegative");
            auto reps = identity_partial_sums(a.cast<long double>(), id_depth, o);
            if (id_json) {
                json arr = json::array();
                for (auto& r : reps) arr.push_back(to_json_value(r));
                std::cout << arr.dump(2) << "\n";
            } else {
                std::cout << std::setw(5) << "depth" << std::setw(10) << "terms" << std::setw(26) << "partial sum"
                          << std::setw(14) << "|residual|" << std::setw(14) << "|terms| sum" << "\n";
                for (auto& r : reps) {
                    std::ostringstream ps;
                    ps << std::setprecision(12) << static_cast<double>(r.partial_sum.real()) << std::showpos
                       << static_cast<double>(r.partial_sum.imag()) << "i";
                    std::cout << std::setw(5) << r.depth << std::setw(10) << r.term_count << std::setw(26) << ps.str()
                              << std::setw(14) << std::setprecision(4) << static_cast<double>(std::abs(r.residual))
                              << std::setw(14) << static_cast<double>(r.absolute_term_sum) << "\n";
                }
            }
            return 0;
        }
        if (*sl) {
            check_n(job.n);
            job.center = parse_complex(sl_center);
            int w = 0, h = 0;
            char x = 0;
            std::istringstream rs(sl_res);
            if (!(rs >> w >> x >> h) || x != 'x' || w < 1 || h < 1) throw usage_error("--res must look like 512x512");
            job.pixels_w = w;
            job.pixels_h = h;
            if (!(job.search.K > 2)) throw usage_error("K must exceed 2");
            try {
                job.color_mode = parse_coloring(sl_coloring);
            } catch (const std::invalid_argument& e) {
                throw usage_error(e.what());
            }
            job.fast_path = !no_fast;
            auto img = render(job);
            write_ppm(sl_out, img);
            json summary = to_json_value(job, img);
            if (!sl_summary.empty()) {
                std::ofstream f(sl_summary);
                if (!f) throw std::runtime_error("cannot open " + sl_summary);
                f << summary.dump(2) << "\n";
            }
            std::cout << summary.dump() << "\n";
            return 0;
        }
        if (*fib) {
            check_n(fib_n);
            json j;
            j["n"] = fib_n;
            if (fib_mult > 0) {
                auto t = multiplicity_table(fib_n, fib_mult);
                json rows = json::array();
                for (std::uint64_t m = 1; m <= fib_mult; ++m) rows.push_back({{"m", m}, {"count", t[m]}});
                j["multiplicity"] = rows;
            }
            if (fib_sier >= 0) {
                std::set<std::vector<std::uint64_t>> seen;
                std::size_t count = 0;
                bool sums = true;
                for_each_geodesic(fib_n, fib_sier, [&](const geodesic_address& g) {
                    if (!in_sierpinski_branch(g, fib_n)) return;
                    auto s = sierpinski_vector(g, fib_n);
                    std::uint64_t tot = 0;
                    for (auto v : s) tot += v;
                    sums &= tot == fibonacci(g, fib_n);
                    seen.insert(s);
                    ++count;
                });
                j["sierpinski"] = {{"depth", fib_sier}, {"geodesics", count}, {"distinct", seen.size()},
                                   {"injective", seen.size() == count}, {"sums_equal_F", sums}};
            }
            if (fib_zeta > 0) {
                auto p = fibonacci_zeta_partial(fib_n, fib_zeta, fib_zeta_depth);
                j["zeta"] = {{"s", fib_zeta}, {"partial_sums", p}};
                if (fib_zeta > fib_n - 1) j["zeta"]["bound"] = fibonacci_zeta_bound(fib_n, fib_zeta);
            }
            if (!fib_pt.a.empty() || !fib_pt.diag.empty()) {
                fib_pt.n = fib_n;
                auto a = fib_pt.get();
                auto g = fibonacci_growth_check(a, fib_growth_depth);
                auto list = [](const std::vector<geodesic_address>& v) {
                    json arr = json::array();
                    for (auto& x : v) arr.push_back(to_json_value(x));
                    return arr;
                };
                j["growth"] = {{"depth", fib_growth_depth},
                               {"c_lower", g.c_lower},
                               {"c_upper", g.c_upper},
                               {"C0", g.C0},
                               {"geodesics", g.count},
                               {"exceptional", list(g.exceptional)},
                               {"lower_violations", list(g.lower_violations)},
                               {"upper_violations", list(g.upper_violations)},
                               {"step_violations", list(g.step_violations)}};
            }
            if (j.size() == 1) throw usage_error("fib needs --multiplicity, --sierpinski, --zeta or a point");
            std::cout << j.dump(2) << "\n";
            return 0;
        }
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
