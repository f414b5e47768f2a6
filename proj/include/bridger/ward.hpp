#pragma once

#include <cstddef>
#include <vector>

namespace bridger {

// Agglomerative clustering with Ward linkage over Euclidean distances.
//
// Merge heights use the convention where two singletons merge at their Euclidean distance:
//   d(A, B) = sqrt(2 |A| |B| / (|A| + |B|)) * |centroid(A) - centroid(B)|.
// Clusters keep merging while the cheapest merge is at most `distance_threshold`. Equal heights
// are resolved towards the pair whose smaller point index is lowest, then by the other index.
//
// Returns one label per point; labels are numbered by each cluster's lowest point index.
std::vector<std::size_t> ward_cluster_labels(const std::vector<std::vector<double>>& points,
                                             double distance_threshold);

}  // namespace bridger
