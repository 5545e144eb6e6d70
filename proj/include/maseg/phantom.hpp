#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "maseg/filters.hpp"
#include "maseg/rng.hpp"
#include "maseg/volume.hpp"

namespace maseg {

// Synthetic stand-in for a contrast-enhanced atrial scan: a bright ellipsoidal
// cavity with tube-like appendages, two-valued intensity plus seeded noise and
// a smooth multiplicative bias field.
struct PhantomParams {
    Index3 dims{48, 48, 48};
    Vec3 spacing{1.0, 1.0, 1.0};
    std::optional<Vec3> center_mm;   // defaults to the grid center
    Vec3 semi_axes_mm{14.0, 11.0, 9.0};
    int n_tubes = 4;
    double tube_radius_mm = 2.5;
    double intensity_inside = 100.0;
    double intensity_outside = 10.0;
    double noise_sigma = 2.0;
    double bias_amplitude = 0.25;        // bias field spans [1/(1+a), 1+a]
    double deformation_amplitude_mm = 2.5;
    double deformation_smoothness_mm = 10.0;
    std::uint64_t seed = 1234;
};

namespace detail {

inline Vec3 phantom_center(const PhantomParams& p, const Grid& g) {
    if (p.center_mm) return *p.center_mm;
    const Vec3 lo = g.world_min(), hi = g.world_max();
    return {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])};
}

// Smooth analytic bias in [1/(1+a), 1+a]; independent of the seed so that
// geometry and intensity corruption stay decoupled.
inline double bias_field(const Vec3& w, const Vec3& lo, const Vec3& extent, double amplitude) {
    if (amplitude <= 0.0) return 1.0;
    const double pi2 = 6.283185307179586;
    const double g = std::sin(pi2 * (w[0] - lo[0]) / extent[0] + 0.7) *
                     std::sin(pi2 * (w[1] - lo[1]) / extent[1] + 1.3) *
                     std::sin(pi2 * (w[2] - lo[2]) / extent[2] + 2.1);
    return std::pow(1.0 + amplitude, g);
}

} // namespace detail

// Deterministic per seed. The label depends only on the geometry parameters;
// noise and bias shape the intensity alone.
inline std::pair<Volume, LabelVolume> generate_phantom(const PhantomParams& p) {
    const Grid grid(p.dims, p.spacing);
    const Vec3 c = detail::phantom_center(p, grid);

    // tube axes: seeded random unit directions
    Rng dir_rng = Rng::fork(p.seed, 0x70b3);
    std::vector<Vec3> tube_dirs;
    for (int j = 0; j < p.n_tubes; ++j) {
        Vec3 d{dir_rng.normal(), dir_rng.normal(), dir_rng.normal()};
        double n = norm(d);
        while (n < 1e-6) {
            d = {dir_rng.normal(), dir_rng.normal(), dir_rng.normal()};
            n = norm(d);
        }
        tube_dirs.push_back((1.0 / n) * d);
    }
    auto radial_extent = [&](const Vec3& d) {
        const double q = (d[0] / p.semi_axes_mm[0]) * (d[0] / p.semi_axes_mm[0]) +
                         (d[1] / p.semi_axes_mm[1]) * (d[1] / p.semi_axes_mm[1]) +
                         (d[2] / p.semi_axes_mm[2]) * (d[2] / p.semi_axes_mm[2]);
        return 1.0 / std::sqrt(q);
    };

    std::vector<std::uint8_t> label(grid.num_voxels(), 0);
    std::size_t i = 0;
    for (int z = 0; z < p.dims[2]; ++z)
        for (int y = 0; y < p.dims[1]; ++y)
            for (int x = 0; x < p.dims[0]; ++x, ++i) {
                const Vec3 w = grid.voxel_to_world(x, y, z);
                const Vec3 u = w - c;
                const double e = (u[0] / p.semi_axes_mm[0]) * (u[0] / p.semi_axes_mm[0]) +
                                 (u[1] / p.semi_axes_mm[1]) * (u[1] / p.semi_axes_mm[1]) +
                                 (u[2] / p.semi_axes_mm[2]) * (u[2] / p.semi_axes_mm[2]);
                bool inside = e <= 1.0;
                for (int j = 0; j < p.n_tubes && !inside; ++j) {
                    const double s = dot(u, tube_dirs[j]);
                    if (s < 0.0 || s > 1.5 * radial_extent(tube_dirs[j])) continue;
                    const Vec3 r = u - s * tube_dirs[j];
                    inside = norm(r) <= p.tube_radius_mm;
                }
                label[i] = inside ? 1 : 0;
            }

    const Vec3 lo = grid.world_min();
    const Vec3 hi = grid.world_max();
    const Vec3 extent = hi - lo;
    Rng noise_rng = Rng::fork(p.seed, 0x4015e);
    std::vector<float> img(grid.num_voxels());
    i = 0;
    for (int z = 0; z < p.dims[2]; ++z)
        for (int y = 0; y < p.dims[1]; ++y)
            for (int x = 0; x < p.dims[0]; ++x, ++i) {
                const Vec3 w = grid.voxel_to_world(x, y, z);
                const double base = label[i] ? p.intensity_inside : p.intensity_outside;
                double v = base * detail::bias_field(w, lo, extent, p.bias_amplitude);
                if (p.noise_sigma > 0.0) v += p.noise_sigma * noise_rng.normal();
                img[i] = static_cast<float>(v);
            }

    return {Volume(grid, std::move(img)), LabelVolume(grid, std::move(label))};
}

// Smooth random displacement field with the requested amplitude (max norm, mm)
// and smoothness (Gaussian sigma, mm). Returns one Volume per component.
inline std::array<Volume, 3> random_displacement_field(const Grid& grid, double amplitude_mm,
                                                       double smoothness_mm, Rng rng) {
    std::array<Volume, 3> comps;
    if (amplitude_mm <= 0.0) {
        for (int a = 0; a < 3; ++a) comps[a] = Volume::filled(grid, 0.0f);
        return comps;
    }
    std::array<std::vector<float>, 3> raw;
    for (int a = 0; a < 3; ++a) raw[a].resize(grid.num_voxels());
    for (std::size_t i = 0; i < grid.num_voxels(); ++i)
        for (int a = 0; a < 3; ++a) raw[a][i] = static_cast<float>(rng.normal());
    for (int a = 0; a < 3; ++a) comps[a] = gaussian_smooth(Volume(grid, std::move(raw[a])), smoothness_mm);

    double max_norm = 0.0;
    for (std::size_t i = 0; i < grid.num_voxels(); ++i) {
        const double n = std::sqrt(static_cast<double>(comps[0].data[i]) * comps[0].data[i] +
                                   static_cast<double>(comps[1].data[i]) * comps[1].data[i] +
                                   static_cast<double>(comps[2].data[i]) * comps[2].data[i]);
        max_norm = std::max(max_norm, n);
    }
    if (max_norm > 0.0) {
        const double scale = amplitude_mm / max_norm;
        for (int a = 0; a < 3; ++a) {
            std::vector<float> scaled(grid.num_voxels());
            for (std::size_t i = 0; i < grid.num_voxels(); ++i)
                scaled[i] = static_cast<float>(scale * comps[a].data[i]);
            comps[a] = Volume(grid, std::move(scaled));
        }
    }
    return comps;
}

// Warp an image/label pair through the pull-back map w -> w + d(w), sampling
// trilinearly (image) and nearest-neighbor (label).
inline std::pair<Volume, LabelVolume> warp_pair(const Volume& img, const LabelVolume& lab,
                                                const std::array<Volume, 3>& disp) {
    const Grid& g = img.grid;
    std::vector<float> out_img(g.num_voxels());
    std::vector<std::uint8_t> out_lab(g.num_voxels());
    std::size_t i = 0;
    for (int z = 0; z < g.dims[2]; ++z)
        for (int y = 0; y < g.dims[1]; ++y)
            for (int x = 0; x < g.dims[0]; ++x, ++i) {
                const Vec3 w = g.voxel_to_world(x, y, z);
                const Vec3 q{w[0] + disp[0].data[i], w[1] + disp[1].data[i], w[2] + disp[2].data[i]};
                const Vec3 v = g.world_to_voxel(q);
                out_img[i] = static_cast<float>(trilinear_sample(img, v));
                out_lab[i] = nearest_sample(lab, v);
            }
    return {Volume(g, std::move(out_img)), LabelVolume(g, std::move(out_lab))};
}

// Cohort of n variants of the base phantom, each warped by an independent
// smooth deformation; member i is deterministic given (seed, i).
inline std::vector<std::pair<Volume, LabelVolume>> generate_cohort(const PhantomParams& base, int n,
                                                                   std::uint64_t seed) {
    if (n < 1) throw DegenerateInputError("cohort size must be >= 1");
    const auto [img, lab] = generate_phantom(base);
    std::vector<std::pair<Volume, LabelVolume>> cohort;
    cohort.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (base.deformation_amplitude_mm <= 0.0) {
            cohort.emplace_back(img, lab);
            continue;
        }
        const auto disp = random_displacement_field(img.grid, base.deformation_amplitude_mm,
                                                    base.deformation_smoothness_mm, Rng::fork(seed, i));
        cohort.push_back(warp_pair(img, lab, disp));
    }
    return cohort;
}

// Degrade a mask into a displaced, rescaled copy; severity 0 returns the mask
// unchanged, severity 1 pushes overlap with the original below ~0.3 Dice.
inline LabelVolume corrupt_label(const LabelVolume& lab, double severity, std::uint64_t seed) {
    if (severity <= 0.0) return lab;
    const Grid& g = lab.grid;
    std::size_t count = 0;
    Vec3 centroid{0, 0, 0};
    std::size_t i = 0;
    for (int z = 0; z < g.dims[2]; ++z)
        for (int y = 0; y < g.dims[1]; ++y)
            for (int x = 0; x < g.dims[0]; ++x, ++i)
                if (lab.data[i]) {
                    centroid = centroid + g.voxel_to_world(x, y, z);
                    ++count;
                }
    if (count == 0) return lab;
    centroid = (1.0 / static_cast<double>(count)) * centroid;

    const double voxel_vol = g.spacing[0] * g.spacing[1] * g.spacing[2];
    const double r_eq = std::cbrt(3.0 * static_cast<double>(count) * voxel_vol / (4.0 * 3.14159265358979));

    Rng rng = Rng::fork(seed, 0xb10b);
    Vec3 dir{rng.normal(), rng.normal(), rng.normal()};
    double n = norm(dir);
    while (n < 1e-6) {
        dir = {rng.normal(), rng.normal(), rng.normal()};
        n = norm(dir);
    }
    dir = (1.0 / n) * dir;
    const Vec3 shift = (severity * 1.5 * r_eq) * dir;
    const double scale = 1.0 + 0.6 * severity;

    // forward map p -> centroid + scale*(p - centroid) + shift, sampled by pull-back
    return resample_nearest(lab, g, [&](const Vec3& w) {
        return centroid + (1.0 / scale) * (w - centroid - shift);
    });
}

} // namespace maseg
