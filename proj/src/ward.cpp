#include "bridger/ward.hpp"

#include <algorithm>
#include <limits>

#include "bridger/types.hpp"

namespace bridger {

std::vector<std::size_t> ward_cluster_labels(const std::vector<std::vector<double>>& points,
                                             double distance_threshold) {
    const std::size_t n = points.size();
    std::vector<std::size_t> labels(n);
    if (n == 0) return labels;
    const std::size_t dim = points.front().size();
    for (const auto& p : points) {
        if (p.size() != dim) {
            throw Error(ErrorCode::dimension_mismatch, "ward clustering over ragged points");
        }
    }

    // Squared merge heights, updated with the Lance-Williams recurrence for Ward linkage.
    std::vector<double> d2(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double diff = points[i][k] - points[j][k];
                s += diff * diff;
            }
            d2[i * n + j] = d2[j * n + i] = s;
        }
    }

    // Each active cluster is stored at the slot of its lowest point index.
    std::vector<std::size_t> size(n, 1);
    std::vector<bool> active(n, true);
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    const double limit = distance_threshold * distance_threshold;

    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        std::size_t bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                // Strict comparison keeps the lexicographically smallest (i, j) among ties.
                if (d2[i * n + j] < best) {
                    best = d2[i * n + j];
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best > limit) break;

        const double ni = static_cast<double>(size[bi]);
        const double nj = static_cast<double>(size[bj]);
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == bi || k == bj) continue;
            const double nk = static_cast<double>(size[k]);
            const double total = ni + nj + nk;
            double merged = ((ni + nk) * d2[bi * n + k] + (nj + nk) * d2[bj * n + k] -
                             nk * d2[bi * n + bj]) /
                            total;
            merged = std::max(merged, 0.0);
            d2[bi * n + k] = d2[k * n + bi] = merged;
        }
        size[bi] += size[bj];
        active[bj] = false;
        parent[bj] = bi;
    }

    auto root = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i];
        return i;
    };
    std::vector<std::size_t> label_of_root(n, std::numeric_limits<std::size_t>::max());
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto r = root(i);
        if (label_of_root[r] == std::numeric_limits<std::size_t>::max()) label_of_root[r] = next++;
        labels[i] = label_of_root[r];
    }
    return labels;
}

}  // namespace bridger
