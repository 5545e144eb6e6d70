#pragma once

#include <cmath>
#include <vector>

#include "maseg/distance.hpp"
#include "maseg/errors.hpp"
#include "maseg/volume.hpp"

namespace maseg {

// Boundary voxels of a mask: foreground voxels with at least one face-adjacent
// background neighbor; faces on the volume border count as outside.
struct SurfaceSet {
    std::vector<Index3> voxels;
    std::vector<Vec3> points; // voxel centers in world mm
};

inline SurfaceSet surface_points(const LabelVolume& lab) {
    SurfaceSet s;
    const auto& d = lab.grid.dims;
    for (int z = 0; z < d[2]; ++z)
        for (int y = 0; y < d[1]; ++y)
            for (int x = 0; x < d[0]; ++x) {
                if (!lab.at(x, y, z)) continue;
                const bool boundary = x == 0 || x == d[0] - 1 || y == 0 || y == d[1] - 1 || z == 0 ||
                                      z == d[2] - 1 || !lab.at(x - 1, y, z) || !lab.at(x + 1, y, z) ||
                                      !lab.at(x, y - 1, z) || !lab.at(x, y + 1, z) || !lab.at(x, y, z - 1) ||
                                      !lab.at(x, y, z + 1);
                if (boundary) {
                    s.voxels.push_back({x, y, z});
                    s.points.push_back(lab.grid.voxel_to_world(x, y, z));
                }
            }
    return s;
}

// Dice overlap 2|A∩B| / (|A|+|B|); two empty masks agree vacuously (1).
inline double dice(const LabelVolume& a, const LabelVolume& b) {
    check_same_grid(a.grid, b.grid, "dice");
    std::size_t na = 0, nb = 0, ni = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        na += a.data[i];
        nb += b.data[i];
        ni += static_cast<std::size_t>(a.data[i] & b.data[i]);
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(ni) / static_cast<double>(na + nb);
}

namespace detail {

// Mean over surface(a) of the distance (mm) to the nearest surface(b) point,
// computed through a distance transform seeded on surface(b).
inline double directed_mean_surface_distance(const SurfaceSet& a, const SurfaceSet& b, const Grid& grid) {
    std::vector<std::uint8_t> seeds(grid.num_voxels(), 0);
    for (const auto& v : b.voxels) seeds[grid.index(v[0], v[1], v[2])] = 1;
    const auto d2 = edt_sq(seeds, grid.dims, grid.spacing);
    double acc = 0.0;
    for (const auto& v : a.voxels) acc += std::sqrt(d2[grid.index(v[0], v[1], v[2])]);
    return acc / static_cast<double>(a.voxels.size());
}

} // namespace detail

// Symmetric mean surface distance in mm between two non-empty masks. This is
// the toolkit's "APD" figure (reported as apd_ssd_mm).
inline double apd(const LabelVolume& a, const LabelVolume& b) {
    check_same_grid(a.grid, b.grid, "apd");
    if (a.foreground_count() == 0 || b.foreground_count() == 0)
        throw EmptyMaskError("apd requires two non-empty masks");
    const SurfaceSet sa = surface_points(a);
    const SurfaceSet sb = surface_points(b);
    const double d_ab = detail::directed_mean_surface_distance(sa, sb, a.grid);
    const double d_ba = detail::directed_mean_surface_distance(sb, sa, a.grid);
    return 0.5 * (d_ab + d_ba);
}

} // namespace maseg
