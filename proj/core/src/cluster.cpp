#include "fastalm/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "fastalm/error.hpp"
#include "fastalm/rng.hpp"

namespace fastalm {

namespace {

std::vector<int> renumber(const std::vector<int>& labels) {
  std::map<int, int> seen;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = seen.try_emplace(labels[i], static_cast<int>(seen.size())).first;
    out[i] = it->second;
  }
  return out;
}

double sq_dist(const Matrix& points, Index i, const Matrix& centers, Index c) {
  return (points.row(i) - centers.row(c)).squaredNorm();
}

// k-means++ seeding.
Matrix seed_centers(const Matrix& points, int k, Rng& rng) {
  const Index n = points.rows();
  Matrix centers(k, points.cols());
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  Index pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
  for (int c = 0; c < k; ++c) {
    centers.row(c) = points.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      auto& d = d2[static_cast<std::size_t>(i)];
      d = std::min(d, sq_dist(points, i, centers, c));
      if (!chosen[static_cast<std::size_t>(i)]) total += d;
    }
    if (c + 1 == k) break;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      pick = -1;
      for (Index i = 0; i < n; ++i) {
        if (chosen[static_cast<std::size_t>(i)]) continue;
        const double d = d2[static_cast<std::size_t>(i)];
        if (d <= 0.0) continue;
        pick = i;
        target -= d;
        if (target < 0.0) break;
      }
    } else {
      std::vector<Index> rest;
      for (Index i = 0; i < n; ++i)
        if (!chosen[static_cast<std::size_t>(i)]) rest.push_back(i);
      pick = rest[rng.below(rest.size())];
    }
  }
  return centers;
}

std::pair<std::vector<int>, double> lloyd(const Matrix& points, Matrix centers, int max_iter) {
  const Index n = points.rows();
  const int k = static_cast<int>(centers.rows());
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  double inertia = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(points, i, centers, 0);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(points, i, centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      inertia += best_d;
      auto& l = labels[static_cast<std::size_t>(i)];
      if (l != best) {
        l = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const int l = labels[static_cast<std::size_t>(i)];
      sums.row(l) += points.row(i);
      ++counts[static_cast<std::size_t>(l)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        continue;
      }
      // Empty cluster: restart it at the point farthest from its center.
      Index far = 0;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        const double d = sq_dist(points, i, centers, labels[static_cast<std::size_t>(i)]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers.row(c) = points.row(far);
    }
  }
  return {labels, inertia};
}

void check_affinity(const Matrix& w) {
  if (w.rows() != w.cols()) throw DimensionError("affinity matrix must be square");
  for (Index j = 0; j < w.cols(); ++j)
    for (Index i = 0; i < w.rows(); ++i) {
      if (!(w(i, j) >= 0.0) || !std::isfinite(w(i, j)))
        throw ParameterError("affinity matrix entries must be finite and >= 0");
      if (w(i, j) != w(j, i)) throw ParameterError("affinity matrix must be symmetric");
    }
}

}  // namespace

Matrix affinity(const Matrix& z) {
  if (z.rows() != z.cols())
    throw DimensionError("affinity: Z must be square, got " + to_string(shape_of(z)));
  const Matrix a = z.cwiseAbs();
  return (a + a.transpose()) / 2.0;
}

std::vector<int> kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1 || k > points.rows()) throw ParameterError("kmeans: need 1 <= k <= number of points");
  if (options.restarts < 1 || options.max_iter < 1)
    throw ParameterError("kmeans: restarts and max_iter must be >= 1");
  Rng rng(seed);
  std::vector<int> best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    auto [labels, inertia] = lloyd(points, seed_centers(points, k, rng), options.max_iter);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best = std::move(labels);
    }
  }
  return renumber(best);
}

ClusterResult spectral_cluster_detailed(const Matrix& w, int k, std::uint64_t seed,
                                        const KMeansOptions& options) {
  check_affinity(w);
  const Index n = w.rows();
  if (k < 2 || k > n) throw ParameterError("spectral_cluster: need 2 <= k <= N");

  std::vector<Index> active;
  for (Index i = 0; i < n; ++i)
    if (w.row(i).sum() > 0.0) active.push_back(i);

  ClusterResult out;
  out.isolated = static_cast<int>(n - static_cast<Index>(active.size()));
  out.degenerate = out.isolated > 0;
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  const int k_active = out.degenerate ? k - 1 : k;
  const Index m = static_cast<Index>(active.size());

  if (m > 0 && m <= k_active) {
    for (Index a = 0; a < m; ++a) labels[static_cast<std::size_t>(active[a])] = static_cast<int>(a + 1);
  } else if (m > 0) {
    Matrix sub(m, m);
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < m; ++i) sub(i, j) = w(active[i], active[j]);
    const Vector inv_sqrt = sub.rowwise().sum().cwiseSqrt().cwiseInverse();
    Matrix lap = -(inv_sqrt.asDiagonal() * sub * inv_sqrt.asDiagonal());
    lap.diagonal().array() += 1.0;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(lap);
    if (eig.info() != Eigen::Success) throw NumericError("spectral_cluster: eigensolver failed");
    Matrix u = eig.eigenvectors().leftCols(k_active);
    for (Index i = 0; i < m; ++i) {
      const double nrm = u.row(i).norm();
      if (nrm > 0.0) u.row(i) /= nrm;
    }
    const auto sub_labels = kmeans(u, k_active, seed, options);
    const int offset = out.degenerate ? 1 : 0;
    for (Index a = 0; a < m; ++a)
      labels[static_cast<std::size_t>(active[a])] = sub_labels[static_cast<std::size_t>(a)] + offset;
  }
  out.labels = renumber(labels);
  return out;
}

std::vector<int> spectral_cluster(const Matrix& w, int k, std::uint64_t seed) {
  return spectral_cluster_detailed(w, k, seed).labels;
}

std::vector<int> max_weight_assignment(const Matrix& weight) {
  const Index rows = weight.rows();
  const Index cols = weight.cols();
  if (rows > cols) throw DimensionError("max_weight_assignment: more rows than columns");
  if (rows == 0) return {};
  // Hungarian algorithm with potentials, minimizing (max - weight).
  const double top = weight.maxCoeff();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(rows + 1), 0.0), v(static_cast<std::size_t>(cols + 1), 0.0);
  std::vector<Index> match(static_cast<std::size_t>(cols + 1), 0), way(static_cast<std::size_t>(cols + 1), 0);
  for (Index i = 1; i <= rows; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(cols + 1), inf);
    std::vector<bool> used(static_cast<std::size_t>(cols + 1), false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const Index i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= cols; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) continue;
        const double cur = (top - weight(i0 - 1, j - 1)) - u[static_cast<std::size_t>(i0)] - v[sj];
        if (cur < minv[sj]) {
          minv[sj] = cur;
          way[sj] = j0;
        }
        if (minv[sj] < delta) {
          delta = minv[sj];
          j1 = j;
        }
      }
      for (Index j = 0; j <= cols; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) {
          u[static_cast<std::size_t>(match[sj])] += delta;
          v[sj] -= delta;
        } else {
          minv[sj] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(static_cast<std::size_t>(rows), -1);
  for (Index j = 1; j <= cols; ++j)
    if (match[static_cast<std::size_t>(j)] != 0)
      out[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = static_cast<int>(j - 1);
  return out;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    throw DimensionError("accuracy: label vectors differ in length (" + std::to_string(pred.size()) +
                         " vs " + std::to_string(truth.size()) + ")");
  if (pred.empty()) throw ParameterError("accuracy: empty label vectors");
  const auto p = renumber(pred);
  const auto t = renumber(truth);
  const int kp = *std::max_element(p.begin(), p.end()) + 1;
  const int kt = *std::max_element(t.begin(), t.end()) + 1;
  const int size = std::max(kp, kt);
  Matrix confusion = Matrix::Zero(size, size);
  for (std::size_t i = 0; i < p.size(); ++i) confusion(p[i], t[i]) += 1.0;
  const auto assign = max_weight_assignment(confusion);
  double hits = 0.0;
  for (int r = 0; r < size; ++r) hits += confusion(r, assign[static_cast<std::size_t>(r)]);
  return hits / static_cast<double>(pred.size());
}

void write_labels_csv(std::ostream& os, const std::vector<int>& labels) {
  os << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) os << i << ',' << labels[i] << '\n';
}

}  // namespace fastalm
