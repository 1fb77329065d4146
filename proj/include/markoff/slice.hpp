#pragma once

// Diagonal slices z -> (z, ..., z) of the domain, rendered to PPM.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bowditch.hpp"

namespace markoff {

enum class coloring { binary, tree_size, k_level };

inline coloring parse_coloring(const std::string& s)
{
    if (s == "binary") return coloring::binary;
    if (s == "tree-size") return coloring::tree_size;
    if (s == "k-level") return coloring::k_level;
    throw std::invalid_argument("unknown coloring '" + s + "'");
}

struct slice_job {
    int n = 3;
    cd center{0, 0};
    double width = 8, height = 8;
    int pixels_w = 256, pixels_h = 256;
    search_options search{};
    coloring color_mode = coloring::binary;
    bool fast_path = true;
    double fast_margin = 1e-9;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct slice_image {
    int w = 0, h = 0;
    std::vector<std::uint8_t> rgb;
    std::size_t in = 0, out = 0, undetermined = 0, fast = 0;
    double seconds = 0;
};

inline cd pixel_center(const slice_job& job, int px, int py)
{
    double re = job.center.real() - job.width / 2 + (px + 0.5) * job.width / job.pixels_w;
    double im = job.center.imag() + job.height / 2 - (py + 0.5) * job.height / job.pixels_h;
    return {re, im};
}

struct pixel_result {
    verdict v;
    bool fast = false;
};

inline pixel_result classify_pixel(const slice_job& job, cd z)
{
    pixel_result r;
    double m = std::pow(std::abs(z), job.n - 2);
    if (job.fast_path) {
        // every coordinate of the root has modulus above the sink threshold
        if (m > 2 + job.fast_margin) {
            r.v.status = membership::in_domain;
            r.v.reason = "root is a sink";
            r.fast = true;
            return r;
        }
        // real z with |z|^{n-2} <= 2: the root geodesic has real φ in [-2,2]
        if (z.imag() == 0 && m <= 2) {
            r.v.status = membership::not_in_domain;
            r.v.witness = geodesic_address{vertex_address{}, 1, 2};
            r.v.reason = "phi in [-2,2]";
            r.fast = true;
            return r;
        }
    }
    try {
        r.v = is_in_domain(diagonal_point(job.n, z), job.search);
    } catch (const std::exception& e) {
        r.v.status = membership::undetermined;
        r.v.reason = e.what();
    }
    return r;
}

namespace detail {

inline std::array<std::uint8_t, 3> shade(const slice_job& job, const verdict& v)
{
    switch (v.status) {
    case membership::not_in_domain: return {255, 255, 255};
    case membership::undetermined: return {128, 128, 128};
    case membership::in_domain: break;
    }
    if (job.color_mode == coloring::binary) return {0, 0, 0};
    double level = 0;
    if (job.color_mode == coloring::tree_size)
        level = v.tree ? std::log2(1.0 + static_cast<double>(v.tree->edges.size())) : 0;
    else
        level = std::log2(1.0 + static_cast<double>(v.a_phi_K.size()));
    auto c = static_cast<std::uint8_t>(std::min(200.0, 25.0 * level));
    return {c, static_cast<std::uint8_t>(c / 2), static_cast<std::uint8_t>(std::min(255, 60 + c))};
}

}  // namespace detail

inline slice_image render(const slice_job& job)
{
    check_arity(job.n);
    if (job.pixels_w < 1 || job.pixels_h < 1) throw std::invalid_argument("resolution must be positive");
    if (!(job.width > 0) || !(job.height > 0)) throw std::invalid_argument("window must have positive size");
    auto t0 = std::chrono::steady_clock::now();
    slice_image img;
    img.w = job.pixels_w;
    img.h = job.pixels_h;
    img.rgb.assign(static_cast<std::size_t>(img.w) * static_cast<std::size_t>(img.h) * 3, 0);
    std::vector<std::uint8_t> status(static_cast<std::size_t>(img.w) * static_cast<std::size_t>(img.h));
    std::vector<std::uint8_t> fast(status.size());
    std::atomic<int> next_row{0};
    auto work = [&] {
        for (int py; (py = next_row.fetch_add(1)) < img.h;)
            for (int px = 0; px < img.w; ++px) {
                pixel_result r = classify_pixel(job, pixel_center(job, px, py));
                auto idx = static_cast<std::size_t>(py) * static_cast<std::size_t>(img.w) + static_cast<std::size_t>(px);
                auto c = detail::shade(job, r.v);
                std::copy(c.begin(), c.end(), img.rgb.begin() + static_cast<std::ptrdiff_t>(3 * idx));
                status[idx] = static_cast<std::uint8_t>(r.v.status);
                fast[idx] = r.fast;
            }
    };
    unsigned nt = job.threads ? job.threads : std::max(1u, std::thread::hardware_concurrency());
    nt = std::min<unsigned>(nt, static_cast<unsigned>(img.h));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < nt; ++k) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (std::size_t k = 0; k < status.size(); ++k) {
        switch (static_cast<membership>(status[k])) {
        case membership::in_domain: ++img.in; break;
        case membership::not_in_domain: ++img.out; break;
        case membership::undetermined: ++img.undetermined; break;
        }
        img.fast += fast[k];
    }
    img.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return img;
}

inline void write_ppm(const std::string& path, const slice_image& img)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "P6\n" << img.w << ' ' << img.h << "\n255\n";
    f.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace markoff
