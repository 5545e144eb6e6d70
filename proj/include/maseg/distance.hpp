#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "maseg/volume.hpp"

namespace maseg {

namespace detail {

// 1D squared-distance transform over samples at positions pos[i] (Felzenszwalb
// & Huttenlocher lower-envelope method, generalized to non-unit sample
// positions). f holds squared costs, infinity where no source exists.
inline void dt_1d(const std::vector<double>& f, const std::vector<double>& pos, std::vector<double>& out,
                  std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    const double inf = std::numeric_limits<double>::infinity();
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == inf) continue;
        double s;
        while (true) {
            if (k < 0) {
                s = -inf;
                break;
            }
            const int p = v[k];
            s = ((f[q] + pos[q] * pos[q]) - (f[p] + pos[p] * pos[p])) / (2.0 * (pos[q] - pos[p]));
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        if (static_cast<std::size_t>(k + 1) >= z.size()) z.resize(k + 2);
        z[k + 1] = inf;
    }
    if (k < 0) {
        std::fill(out.begin(), out.end(), inf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < pos[q]) ++j;
        const double d = pos[q] - pos[v[j]];
        out[q] = d * d + f[v[j]];
    }
}

} // namespace detail

// Exact squared Euclidean distance (in the units of `weights`) from every
// voxel to the nearest seed voxel center. Voxels with seeds[i] != 0 are
// sources. Returns +inf everywhere if there are no seeds.
inline std::vector<double> edt_sq(const std::vector<std::uint8_t>& seeds, const Index3& dims, const Vec3& weights) {
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t nx = dims[0], ny = dims[1], nz = dims[2];
    std::vector<double> d(nx * ny * nz);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = seeds[i] ? 0.0 : inf;

    const std::size_t max_n = std::max({nx, ny, nz});
    std::vector<double> f(max_n), out(max_n), pos(max_n), z(max_n + 1);
    std::vector<int> v(max_n);
    auto idx = [&](std::size_t x, std::size_t y, std::size_t zz) { return x + nx * (y + ny * zz); };

    // pass along x
    for (std::size_t i = 0; i < nx; ++i) pos[i] = static_cast<double>(i) * weights[0];
    for (std::size_t zz = 0; zz < nz; ++zz)
        for (std::size_t y = 0; y < ny; ++y) {
            for (std::size_t x = 0; x < nx; ++x) f[x] = d[idx(x, y, zz)];
            f.resize(nx);
            out.resize(nx);
            detail::dt_1d(f, pos, out, v, z);
            for (std::size_t x = 0; x < nx; ++x) d[idx(x, y, zz)] = out[x];
        }

    // pass along y
    for (std::size_t i = 0; i < ny; ++i) pos[i] = static_cast<double>(i) * weights[1];
    for (std::size_t zz = 0; zz < nz; ++zz)
        for (std::size_t x = 0; x < nx; ++x) {
            f.resize(ny);
            out.resize(ny);
            for (std::size_t y = 0; y < ny; ++y) f[y] = d[idx(x, y, zz)];
            detail::dt_1d(f, pos, out, v, z);
            for (std::size_t y = 0; y < ny; ++y) d[idx(x, y, zz)] = out[y];
        }

    // pass along z
    for (std::size_t i = 0; i < nz; ++i) pos[i] = static_cast<double>(i) * weights[2];
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x = 0; x < nx; ++x) {
            f.resize(nz);
            out.resize(nz);
            for (std::size_t zz = 0; zz < nz; ++zz) f[zz] = d[idx(x, y, zz)];
            detail::dt_1d(f, pos, out, v, z);
            for (std::size_t zz = 0; zz < nz; ++zz) d[idx(x, y, zz)] = out[zz];
        }

    return d;
}

// Morphological erosion with a Euclidean ball of `radius` (same units as
// `weights`, which default to isotropic voxel units).
inline LabelVolume erode(const LabelVolume& mask, double radius, Vec3 weights = {1.0, 1.0, 1.0}) {
    std::vector<std::uint8_t> bg(mask.data.size());
    for (std::size_t i = 0; i < bg.size(); ++i) bg[i] = mask.data[i] ? 0 : 1;
    const auto d_bg = edt_sq(bg, mask.grid.dims, weights);
    std::vector<std::uint8_t> out(mask.data.size(), 0);
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (mask.data[i] && d_bg[i] > r2) ? 1 : 0;
    return LabelVolume(mask.grid, std::move(out));
}

inline LabelVolume dilate(const LabelVolume& mask, double radius, Vec3 weights = {1.0, 1.0, 1.0}) {
    const auto d_fg = edt_sq(mask.data, mask.grid.dims, weights);
    std::vector<std::uint8_t> out(mask.data.size(), 0);
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (mask.data[i] || d_fg[i] <= r2) ? 1 : 0;
    return LabelVolume(mask.grid, std::move(out));
}

} // namespace maseg
