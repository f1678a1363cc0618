#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fastalm/types.hpp"

namespace fastalm {

/// W = (|Z| + |Z^T|) / 2. Throws DimensionError for non-square Z.
Matrix affinity(const Matrix& z);

struct ClusterResult {
  /// Labels in {0, ..., k-1}, numbered by first appearance.
  std::vector<int> labels;
  /// Points whose affinity row is zero.
  int isolated = 0;
  /// True when isolated points were present (all-zero W included).
  bool degenerate = false;
};

struct KMeansOptions {
  int restarts = 10;
  int max_iter = 100;
};

/// Normalized spectral clustering: symmetric normalized Laplacian
/// I - D^-1/2 W D^-1/2, its k bottom eigenvectors, unit-length rows, then
/// seeded k-means (k-means++ starts, best inertia over the restarts).
///
/// Points with a zero affinity row are put into one provisional cluster of
/// their own before k-means; the remaining points are split into k - 1
/// clusters. Requires k >= 2 and k <= N, W square, symmetric and >= 0.
ClusterResult spectral_cluster_detailed(const Matrix& w, int k, std::uint64_t seed,
                                        const KMeansOptions& options = {});
std::vector<int> spectral_cluster(const Matrix& w, int k, std::uint64_t seed);

/// Lloyd iterations on the rows of `points`; returns labels numbered by
/// first appearance. Deterministic given seed.
std::vector<int> kmeans(const Matrix& points, int k, std::uint64_t seed,
                        const KMeansOptions& options = {});

/// Best match rate between predicted and true labels over all one-to-one
/// label correspondences (Hungarian algorithm on the confusion matrix).
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

/// Maximum-weight assignment on a nonnegative matrix, rows to distinct
/// columns (rows <= cols). Returns the chosen column of each row.
std::vector<int> max_weight_assignment(const Matrix& weight);

/// "index,label" CSV with a header line and LF line endings.
void write_labels_csv(std::ostream& os, const std::vector<int>& labels);

}  // namespace fastalm
