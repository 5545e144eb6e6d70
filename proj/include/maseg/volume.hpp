#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "maseg/errors.hpp"

namespace maseg {

using Vec3 = std::array<double, 3>;
using Index3 = std::array<int, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Axis-aligned regular 3D grid. `origin` is the world position (mm) of the
// center of voxel (0,0,0); direction cosines are not modeled.
struct Grid {
    Index3 dims{1, 1, 1};
    Vec3 spacing{1.0, 1.0, 1.0};
    Vec3 origin{0.0, 0.0, 0.0};

    Grid() = default;
    Grid(Index3 d, Vec3 s, Vec3 o = {0.0, 0.0, 0.0}) : dims(d), spacing(s), origin(o) {
        for (int a = 0; a < 3; ++a) {
            if (dims[a] < 1) throw DegenerateInputError("grid dims must be >= 1");
            if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
                throw DegenerateInputError("grid spacing must be > 0");
            if (!std::isfinite(origin[a])) throw DegenerateInputError("grid origin must be finite");
        }
    }

    bool operator==(const Grid&) const = default;

    std::size_t num_voxels() const {
        return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
               static_cast<std::size_t>(dims[2]);
    }

    // x-fastest linear layout
    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
    }

    Vec3 voxel_to_world(const Vec3& v) const {
        return {origin[0] + spacing[0] * v[0], origin[1] + spacing[1] * v[1], origin[2] + spacing[2] * v[2]};
    }
    Vec3 voxel_to_world(int x, int y, int z) const {
        return voxel_to_world(Vec3{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)});
    }

    Vec3 world_to_voxel(const Vec3& p) const {
        return {(p[0] - origin[0]) / spacing[0], (p[1] - origin[1]) / spacing[1], (p[2] - origin[2]) / spacing[2]};
    }

    // Inclusive world-coordinate bounds of the voxel centers.
    Vec3 world_min() const { return origin; }
    Vec3 world_max() const { return voxel_to_world(dims[0] - 1, dims[1] - 1, dims[2] - 1); }
};

inline void check_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw GridMismatchError(std::string(what) + ": volumes are not on the same grid");
}

// Dense scalar volume, float storage, x-fastest. Immutable by convention once
// built; constructors reject non-finite data.
struct Volume {
    Grid grid;
    std::vector<float> data;

    Volume() = default;
    Volume(Grid g, std::vector<float> d) : grid(g), data(std::move(d)) {
        if (data.size() != grid.num_voxels()) throw SizeMismatchError("volume data length does not match grid dims");
        for (float v : data)
            if (!std::isfinite(v)) throw DegenerateInputError("volume data contains non-finite values");
    }

    static Volume filled(const Grid& g, float value) {
        return Volume(g, std::vector<float>(g.num_voxels(), value));
    }

    float at(int x, int y, int z) const { return data[grid.index(x, y, z)]; }
    float& at(int x, int y, int z) { return data[grid.index(x, y, z)]; }
};

// Dense binary mask on the same layout; 0 = background, 1 = foreground.
struct LabelVolume {
    Grid grid;
    std::vector<std::uint8_t> data;

    LabelVolume() = default;
    LabelVolume(Grid g, std::vector<std::uint8_t> d) : grid(g), data(std::move(d)) {
        if (data.size() != grid.num_voxels()) throw SizeMismatchError("label data length does not match grid dims");
        for (auto v : data)
            if (v > 1) throw LabelRangeError("label values must be 0 or 1");
    }

    static LabelVolume filled(const Grid& g, std::uint8_t value) {
        return LabelVolume(g, std::vector<std::uint8_t>(g.num_voxels(), value));
    }

    std::uint8_t at(int x, int y, int z) const { return data[grid.index(x, y, z)]; }
    std::uint8_t& at(int x, int y, int z) { return data[grid.index(x, y, z)]; }

    std::size_t foreground_count() const {
        std::size_t n = 0;
        for (auto v : data) n += v;
        return n;
    }
};

namespace detail {

// Clamp a continuous voxel coordinate to the valid range and report whether
// it was clamped on that axis (the sample derivative vanishes there).
inline double clamp_axis(double c, int dim, bool* clamped) {
    if (c <= 0.0) {
        *clamped = (c < 0.0);
        return 0.0;
    }
    const double hi = static_cast<double>(dim - 1);
    if (c >= hi) {
        *clamped = (c > hi);
        return hi;
    }
    *clamped = false;
    return c;
}

} // namespace detail

// Trilinear interpolation at a continuous voxel coordinate. Out-of-bounds
// coordinates clamp to the edge.
inline double trilinear_sample(const Volume& vol, const Vec3& p) {
    const auto& d = vol.grid.dims;
    int i0[3], i1[3];
    double t[3];
    for (int a = 0; a < 3; ++a) {
        bool clamped;
        const double c = detail::clamp_axis(p[a], d[a], &clamped);
        i0[a] = static_cast<int>(std::floor(c));
        if (i0[a] > d[a] - 2) i0[a] = d[a] >= 2 ? d[a] - 2 : 0;
        i1[a] = d[a] >= 2 ? i0[a] + 1 : 0;
        t[a] = c - static_cast<double>(i0[a]);
    }
    double acc = 0.0;
    for (int cz = 0; cz < 2; ++cz)
        for (int cy = 0; cy < 2; ++cy)
            for (int cx = 0; cx < 2; ++cx) {
                const double w = (cx ? t[0] : 1.0 - t[0]) * (cy ? t[1] : 1.0 - t[1]) * (cz ? t[2] : 1.0 - t[2]);
                if (w != 0.0)
                    acc += w * vol.at(cx ? i1[0] : i0[0], cy ? i1[1] : i0[1], cz ? i1[2] : i0[2]);
            }
    return acc;
}

struct SampleGrad {
    double value;
    Vec3 d_voxel; // derivative w.r.t. the continuous voxel coordinate
};

// Value and exact derivative of the trilinear interpolant. The derivative is
// zero along axes where the coordinate clamped outside the grid.
inline SampleGrad trilinear_sample_grad(const Volume& vol, const Vec3& p) {
    const auto& d = vol.grid.dims;
    int i0[3], i1[3];
    double t[3];
    bool clamped[3];
    for (int a = 0; a < 3; ++a) {
        const double c = detail::clamp_axis(p[a], d[a], &clamped[a]);
        i0[a] = static_cast<int>(std::floor(c));
        if (i0[a] > d[a] - 2) i0[a] = d[a] >= 2 ? d[a] - 2 : 0;
        i1[a] = d[a] >= 2 ? i0[a] + 1 : 0;
        t[a] = c - static_cast<double>(i0[a]);
    }
    const double w0[3][2] = {{1.0 - t[0], t[0]}, {1.0 - t[1], t[1]}, {1.0 - t[2], t[2]}};
    const double w1[3][2] = {{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}};
    SampleGrad out{0.0, {0.0, 0.0, 0.0}};
    for (int cz = 0; cz < 2; ++cz)
        for (int cy = 0; cy < 2; ++cy)
            for (int cx = 0; cx < 2; ++cx) {
                const double v = vol.at(cx ? i1[0] : i0[0], cy ? i1[1] : i0[1], cz ? i1[2] : i0[2]);
                out.value += w0[0][cx] * w0[1][cy] * w0[2][cz] * v;
                out.d_voxel[0] += w1[0][cx] * w0[1][cy] * w0[2][cz] * v;
                out.d_voxel[1] += w0[0][cx] * w1[1][cy] * w0[2][cz] * v;
                out.d_voxel[2] += w0[0][cx] * w0[1][cy] * w1[2][cz] * v;
            }
    for (int a = 0; a < 3; ++a)
        if (clamped[a] || d[a] < 2) out.d_voxel[a] = 0.0;
    return out;
}

// Nearest-neighbor label lookup; a coordinate exactly halfway between two
// centers resolves to the lower index. Out-of-bounds clamps.
inline std::uint8_t nearest_sample(const LabelVolume& lab, const Vec3& p) {
    int idx[3];
    for (int a = 0; a < 3; ++a) {
        int i = static_cast<int>(std::ceil(p[a] - 0.5));
        if (i < 0) i = 0;
        if (i > lab.grid.dims[a] - 1) i = lab.grid.dims[a] - 1;
        idx[a] = i;
    }
    return lab.at(idx[0], idx[1], idx[2]);
}

// Pull-back resampling: output voxel v takes the trilinear sample of `vol` at
// world_map(voxel_to_world(out_grid, v)).
template <class MapFn>
Volume resample(const Volume& vol, const Grid& out_grid, MapFn&& world_map) {
    std::vector<float> out(out_grid.num_voxels());
    std::size_t i = 0;
    for (int z = 0; z < out_grid.dims[2]; ++z)
        for (int y = 0; y < out_grid.dims[1]; ++y)
            for (int x = 0; x < out_grid.dims[0]; ++x, ++i) {
                const Vec3 q = world_map(out_grid.voxel_to_world(x, y, z));
                out[i] = static_cast<float>(trilinear_sample(vol, vol.grid.world_to_voxel(q)));
            }
    return Volume(out_grid, std::move(out));
}

template <class MapFn>
LabelVolume resample_nearest(const LabelVolume& lab, const Grid& out_grid, MapFn&& world_map) {
    std::vector<std::uint8_t> out(out_grid.num_voxels());
    std::size_t i = 0;
    for (int z = 0; z < out_grid.dims[2]; ++z)
        for (int y = 0; y < out_grid.dims[1]; ++y)
            for (int x = 0; x < out_grid.dims[0]; ++x, ++i) {
                const Vec3 q = world_map(out_grid.voxel_to_world(x, y, z));
                out[i] = nearest_sample(lab, lab.grid.world_to_voxel(q));
            }
    return LabelVolume(out_grid, std::move(out));
}

// Central differences per mm; one-sided at boundary faces. Exact for affine
// fields at interior voxels.
inline Vec3 gradient_central(const Volume& vol, const Index3& v) {
    Vec3 g{0.0, 0.0, 0.0};
    const auto& dims = vol.grid.dims;
    int idx[3] = {v[0], v[1], v[2]};
    for (int a = 0; a < 3; ++a) {
        if (dims[a] < 2) continue;
        int lo[3] = {idx[0], idx[1], idx[2]};
        int hi[3] = {idx[0], idx[1], idx[2]};
        double denom;
        if (idx[a] == 0) {
            hi[a] = 1;
            denom = vol.grid.spacing[a];
        } else if (idx[a] == dims[a] - 1) {
            lo[a] = dims[a] - 2;
            denom = vol.grid.spacing[a];
        } else {
            lo[a] = idx[a] - 1;
            hi[a] = idx[a] + 1;
            denom = 2.0 * vol.grid.spacing[a];
        }
        g[a] = (static_cast<double>(vol.at(hi[0], hi[1], hi[2])) - static_cast<double>(vol.at(lo[0], lo[1], lo[2]))) /
               denom;
    }
    return g;
}

} // namespace maseg
