#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fastalm/problem.hpp"

namespace fastalm {

// ---------------------------------------------------------------------------
// l1-regularized least squares on the affine hyperplane 1^T x = 1:
//   min ||x||_1 + alpha/2 ||A x - b||^2  s.t.  1^T x = 1
// ---------------------------------------------------------------------------

struct LassoSimplexData {
  Matrix a;  // m x n
  Matrix b;  // m x 1
  double alpha = 1.0;
};

/// Draws A (column-major) and then b from Rng(seed), standard normal entries.
LassoSimplexData lasso_simplex_data(Index m, Index n, double alpha, std::uint64_t seed);
BlockProblem make_lasso_simplex(const LassoSimplexData& data);
BlockProblem gen_lasso_simplex(Index m, Index n, double alpha, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Three-block problem
//   min sum_i ||X_i||_(i) + alpha_i/2 ||C_i X_i - D_i||_F^2  s.t.  sum_i A_i X_i = B
// with norms l1, nuclear and l2,1 on blocks 1, 2, 3. All matrices m x m.
// ---------------------------------------------------------------------------

inline constexpr std::array<double, 3> kDefaultThreeBlockAlphas{0.1, 0.1, 0.1};

struct ThreeBlockData {
  std::array<Matrix, 3> a;
  std::array<Matrix, 3> c;
  std::array<Matrix, 3> d;
  Matrix b;
  std::array<double, 3> alphas = kDefaultThreeBlockAlphas;
};

/// Draw order from Rng(seed): for i = 1, 2, 3: A_i, C_i, D_i; then B.
ThreeBlockData three_block_data(Index m, std::array<double, 3> alphas, std::uint64_t seed);
BlockProblem make_three_block(const ThreeBlockData& data);
BlockProblem gen_three_block(Index m, std::array<double, 3> alphas, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Low-rank + sparse self-representation with affine constraint
//   min a1 ||Z||_* + a2 ||Z||_1 + 1/2 ||X Z - X||^2  s.t.  1^T Z = 1^T
// encoded with two N x N blocks Z1, Z2:
//   block 1: g = 1/2||X Z1 - X||^2, h = a1 ||.||_*, A1 = [I; 1^T]
//   block 2: g = 0,                 h = a2 ||.||_1, A2 = [-I; 0]
//   b = [0; 1^T], i.e. Z1 = Z2 and 1^T Z1 = 1^T.
// ---------------------------------------------------------------------------

BlockProblem build_subspace_problem(const Matrix& x, double alpha1, double alpha2);
/// Z := Z1 from a solution of build_subspace_problem.
Matrix extract_representation(const BlockPoint& solution);

struct SubspaceData {
  Matrix x;                // ambient x N, unit columns
  std::vector<int> labels;  // subspace index per column
};

struct SubspaceParams {
  int k_subspaces = 5;
  int dim_ambient = 30;
  int dim_sub = 4;
  int pts_per = 40;
  double noise = 0.01;
  /// Use mutually orthogonal subspaces (needs k * dim_sub <= dim_ambient).
  bool orthogonal = false;
};

/// Union of random subspaces. Draw order from Rng(seed): when orthogonal, one
/// ambient x (k dim_sub) Gaussian matrix whose Q factor supplies all bases;
/// then, per subspace j: [basis draw ambient x dim_sub unless orthogonal],
/// coefficients dim_sub x pts_per, noise ambient x pts_per. Columns are
/// normalized to unit length after adding noise * N(0, 1) entries.
SubspaceData gen_union_of_subspaces(const SubspaceParams& params, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Manifests: a JSON document naming the problem kind, its parameters and the
// MatrixMarket files (relative to the manifest) holding its data.
// ---------------------------------------------------------------------------

enum class ProblemKind { kLassoSimplex, kThreeBlock, kSubspace };

std::string to_string(ProblemKind kind);
/// Accepts "lasso_simplex" (alias "lasso"), "three_block", "subspace".
ProblemKind parse_problem_kind(const std::string& name);

struct ProblemManifest {
  ProblemKind kind = ProblemKind::kLassoSimplex;
  std::uint64_t seed = 0;
  Index m = 0;  // lasso rows / three-block size
  Index n = 0;  // lasso columns
  /// lasso: {alpha}; three_block: {a1, a2, a3}; subspace: {a1, a2}.
  std::vector<double> alphas;
  SubspaceParams subspace;
  /// Data role -> path relative to the manifest directory.
  std::map<std::string, std::string> files;
};

struct ProblemInstance {
  ProblemManifest manifest;
  std::map<std::string, Matrix> matrices;
  std::vector<int> labels;  // subspace only
};

/// Regenerates the data described by a manifest (files are ignored).
ProblemInstance generate_instance(const ProblemManifest& manifest);
BlockProblem build_problem(const ProblemInstance& instance);

/// Writes <dir>/manifest.json and one .mtx file per matrix; returns the
/// manifest path. Existing files are overwritten.
std::filesystem::path save_instance(const ProblemInstance& instance,
                                    const std::filesystem::path& dir);
ProblemInstance load_instance(const std::filesystem::path& manifest_path);

std::string manifest_to_json(const ProblemManifest& manifest);
ProblemManifest manifest_from_json(const std::string& text);

}  // namespace fastalm
