#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "maseg/errors.hpp"
#include "maseg/filters.hpp"
#include "maseg/volume.hpp"

namespace maseg {

// Bias-corrected fuzzy c-means. The objective is
//   J = sum_x sum_k u_k(x)^q (I(x) - b(x) c_k)^2
// with memberships u, class centers c and a multiplicative bias field b that
// is kept smooth by averaging its per-voxel estimate over a cubic window.
struct ClicParams {
    int n_classes = 3;
    double fuzzifier = 2.0;
    int window_radius = 2;
    int max_iters = 50;
    double tol = 1e-4; // relative change in centers
};

struct ClicResult {
    std::vector<Volume> memberships; // one per class, simplex at every voxel
    std::vector<double> centers;     // strictly increasing
    Volume bias;                     // positive everywhere
    bool converged = false;
    int iterations = 0;
    std::vector<double> objective; // value at the end of each outer iteration
};

namespace detail {

// u^q with a fast path for the default fuzzifier q = 2
inline double pow_q(double u, double q) { return q == 2.0 ? u * u : std::pow(u, q); }

inline double clic_objective(const std::vector<float>& img, const std::vector<std::vector<double>>& u,
                             const std::vector<double>& centers, const std::vector<double>& bias, double q) {
    const int K = static_cast<int>(centers.size());
    double J = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double I = img[i];
        for (int k = 0; k < K; ++k) {
            const double r = I - bias[i] * centers[k];
            J += pow_q(u[k][i], q) * r * r;
        }
    }
    return J;
}

// Membership update: u_k ∝ d_k^(-1/(q-1)); voxels sitting exactly on a
// scaled center split their mass evenly over the zero-distance classes.
inline void clic_update_memberships(const std::vector<float>& img, std::vector<std::vector<double>>& u,
                                    const std::vector<double>& centers, const std::vector<double>& bias,
                                    double q) {
    const int K = static_cast<int>(centers.size());
    const double expo = 1.0 / (q - 1.0);
    std::vector<double> inv(K);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double I = img[i];
        int n_zero = 0;
        double sum = 0.0;
        for (int k = 0; k < K; ++k) {
            const double r = I - bias[i] * centers[k];
            const double d = r * r;
            if (d == 0.0) {
                inv[k] = -1.0; // zero-distance marker
                ++n_zero;
            } else {
                inv[k] = expo == 1.0 ? 1.0 / d : std::pow(1.0 / d, expo);
                sum += inv[k];
            }
        }
        if (n_zero > 0) {
            for (int k = 0; k < K; ++k) u[k][i] = inv[k] < 0.0 ? 1.0 / n_zero : 0.0;
        } else {
            for (int k = 0; k < K; ++k) u[k][i] = inv[k] / sum;
        }
    }
}

} // namespace detail

// Fits the clustering. Throws DegenerateInputError when the image carries
// fewer distinct values than classes; non-convergence is reported through the
// `converged` flag, not an error.
inline ClicResult clic_fit(const Volume& vol, const ClicParams& params) {
    const int K = params.n_classes;
    if (K < 2) throw DegenerateInputError("clic requires at least 2 classes");
    const std::size_t n = vol.data.size();
    const double q = params.fuzzifier;

    // precondition: at least K distinct values
    {
        std::vector<float> uniq(vol.data);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        if (static_cast<int>(uniq.size()) < K)
            throw DegenerateInputError("clic input has fewer distinct values than classes");
    }

    // center initialization at the k/(K+1) intensity quantiles; falls back to
    // an even spread over [min,max] when quantiles collide (heavily quantized
    // histograms make neighboring quantiles equal, which would wedge the fit)
    std::vector<double> centers(K);
    {
        std::vector<float> sorted(vol.data);
        std::sort(sorted.begin(), sorted.end());
        for (int k = 0; k < K; ++k) {
            const std::size_t pos = static_cast<std::size_t>(
                static_cast<double>(n - 1) * static_cast<double>(k + 1) / static_cast<double>(K + 1));
            centers[k] = sorted[pos];
        }
        bool distinct = true;
        for (int k = 0; k + 1 < K; ++k)
            if (!(centers[k] < centers[k + 1])) distinct = false;
        if (!distinct) {
            const double lo = sorted.front(), hi = sorted.back();
            for (int k = 0; k < K; ++k)
                centers[k] = lo + (hi - lo) * static_cast<double>(k + 1) / static_cast<double>(K + 1);
        }
    }

    std::vector<double> bias(n, 1.0);
    std::vector<std::vector<double>> u(K, std::vector<double>(n, 1.0 / K));

    ClicResult res;
    int iter = 0;
    for (; iter < params.max_iters; ++iter) {
        detail::clic_update_memberships(vol.data, u, centers, bias, q);

        // center update: c_k = sum u^q b I / sum u^q b^2
        double max_rel_dc = 0.0;
        for (int k = 0; k < K; ++k) {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double w = detail::pow_q(u[k][i], q);
                num += w * bias[i] * vol.data[i];
                den += w * bias[i] * bias[i];
            }
            if (den > 0.0) {
                const double c_new = num / den;
                const double scale = std::max(std::abs(centers[k]), 1e-12);
                max_rel_dc = std::max(max_rel_dc, std::abs(c_new - centers[k]) / scale);
                centers[k] = c_new;
            }
        }

        // bias update: per-voxel optimum, then window averaging. The smoothed
        // candidate is only accepted if it does not raise the objective, which
        // keeps the recorded trace non-increasing (the window average is a
        // projection, not a descent step).
        {
            std::vector<double> raw(n);
            for (std::size_t i = 0; i < n; ++i) {
                double num = 0.0, den = 0.0;
                for (int k = 0; k < K; ++k) {
                    const double w = detail::pow_q(u[k][i], q);
                    num += w * centers[k];
                    den += w * centers[k] * centers[k];
                }
                raw[i] = den > 0.0 ? std::max(vol.data[i] * num / den, 1e-6) : bias[i];
            }
            std::vector<double> smoothed = box_mean(raw, vol.grid.dims, params.window_radius);
            const double J_old = detail::clic_objective(vol.data, u, centers, bias, q);
            const double J_new = detail::clic_objective(vol.data, u, centers, smoothed, q);
            if (J_new <= J_old) {
                bias.swap(smoothed);
                res.objective.push_back(J_new);
            } else {
                res.objective.push_back(J_old);
            }
        }

        if (max_rel_dc < params.tol) {
            res.converged = true;
            ++iter;
            break;
        }
    }
    res.iterations = iter;

    // order classes by center ascending
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return centers[a] < centers[b]; });
    for (int k = 0; k + 1 < K; ++k)
        if (!(centers[order[k]] < centers[order[k + 1]]))
            throw DegenerateInputError("clic classes collapsed to equal centers");

    res.centers.resize(K);
    res.memberships.reserve(K);
    for (int k = 0; k < K; ++k) {
        res.centers[k] = centers[order[k]];
        std::vector<float> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<float>(u[order[k]][i]);
        res.memberships.emplace_back(vol.grid, std::move(m));
    }
    std::vector<float> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<float>(bias[i]);
    res.bias = Volume(vol.grid, std::move(b));
    return res;
}

// Probability map in [0,100]: scaled membership of the brightest class (the
// blood pool is hyperintense on contrast-enhanced scans).
inline Volume probability_map(const ClicResult& res) {
    const Volume& m = res.memberships.back();
    std::vector<float> out(m.data.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::clamp(100.0f * m.data[i], 0.0f, 100.0f);
    return Volume(m.grid, std::move(out));
}

} // namespace maseg
