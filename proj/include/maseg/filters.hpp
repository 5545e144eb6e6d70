#pragma once

#include <cmath>
#include <vector>

#include "maseg/volume.hpp"

namespace maseg {

namespace detail {

// Separable 1D convolution along `axis` with a symmetric kernel, truncated
// and renormalized at the volume borders.
inline void convolve_axis(std::vector<double>& data, const Index3& dims, int axis,
                          const std::vector<double>& kernel) {
    const int radius = static_cast<int>(kernel.size()) / 2;
    if (radius == 0) return;
    const int nx = dims[0], ny = dims[1], nz = dims[2];
    const int n = dims[axis];
    std::vector<double> line(n), res(n);
    auto idx = [&](int x, int y, int z) { return static_cast<std::size_t>(x) + static_cast<std::size_t>(nx) * (y + static_cast<std::size_t>(ny) * z); };

    const int u_max = axis == 0 ? ny : nx;
    const int v_max = axis == 2 ? ny : nz;
    for (int vv = 0; vv < v_max; ++vv)
        for (int uu = 0; uu < u_max; ++uu) {
            for (int i = 0; i < n; ++i) {
                const int x = axis == 0 ? i : uu;
                const int y = axis == 0 ? uu : (axis == 1 ? i : vv);
                const int z = axis == 2 ? i : vv;
                line[i] = data[idx(x, y, z)];
            }
            for (int i = 0; i < n; ++i) {
                double acc = 0.0, wsum = 0.0;
                const int lo = std::max(0, i - radius), hi = std::min(n - 1, i + radius);
                for (int j = lo; j <= hi; ++j) {
                    const double w = kernel[j - i + radius];
                    acc += w * line[j];
                    wsum += w;
                }
                res[i] = acc / wsum;
            }
            for (int i = 0; i < n; ++i) {
                const int x = axis == 0 ? i : uu;
                const int y = axis == 0 ? uu : (axis == 1 ? i : vv);
                const int z = axis == 2 ? i : vv;
                data[idx(x, y, z)] = res[i];
            }
        }
}

inline std::vector<double> gaussian_kernel(double sigma_voxels) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_voxels)));
    std::vector<double> k(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i)
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma_voxels * sigma_voxels));
    return k;
}

} // namespace detail

// Gaussian smoothing with sigma given in mm; per-axis sigma derives from the
// grid spacing. sigma_mm <= 0 is a no-op.
inline Volume gaussian_smooth(const Volume& vol, double sigma_mm) {
    if (sigma_mm <= 0.0) return vol;
    std::vector<double> work(vol.data.begin(), vol.data.end());
    for (int axis = 0; axis < 3; ++axis) {
        const double sigma_vox = sigma_mm / vol.grid.spacing[axis];
        if (sigma_vox < 1e-3 || vol.grid.dims[axis] < 2) continue;
        detail::convolve_axis(work, vol.grid.dims, axis, detail::gaussian_kernel(sigma_vox));
    }
    std::vector<float> out(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) out[i] = static_cast<float>(work[i]);
    return Volume(vol.grid, std::move(out));
}

// Mean over the cubic window of the given voxel radius, truncated at borders.
// Exact separable implementation (per-axis truncated box passes).
inline std::vector<double> box_mean(const std::vector<double>& data, const Index3& dims, int radius) {
    std::vector<double> work = data;
    if (radius < 1) return work;
    std::vector<double> kernel(2 * radius + 1, 1.0);
    for (int axis = 0; axis < 3; ++axis) {
        if (dims[axis] < 2) continue;
        detail::convolve_axis(work, dims, axis, kernel);
    }
    return work;
}

// Decimate by an integer factor after external smoothing: keeps every
// factor-th voxel, spacing scales by the factor, origin is unchanged.
inline Volume downsample(const Volume& vol, int factor) {
    if (factor <= 1) return vol;
    const Index3 nd{(vol.grid.dims[0] - 1) / factor + 1, (vol.grid.dims[1] - 1) / factor + 1,
                    (vol.grid.dims[2] - 1) / factor + 1};
    const Grid g(nd,
                 {vol.grid.spacing[0] * factor, vol.grid.spacing[1] * factor, vol.grid.spacing[2] * factor},
                 vol.grid.origin);
    std::vector<float> out(g.num_voxels());
    std::size_t i = 0;
    for (int z = 0; z < nd[2]; ++z)
        for (int y = 0; y < nd[1]; ++y)
            for (int x = 0; x < nd[0]; ++x, ++i) out[i] = vol.at(x * factor, y * factor, z * factor);
    return Volume(g, std::move(out));
}

} // namespace maseg
