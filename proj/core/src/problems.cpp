#include "fastalm/problems.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include "fastalm/error.hpp"
#include "fastalm/matrix_market.hpp"
#include "fastalm/rng.hpp"

namespace fastalm {

namespace {

using nlohmann::json;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " must be > 0");
}

Matrix orthonormal_columns(const Matrix& g) {
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
}

std::string block_key(const char* prefix, int i) { return prefix + std::to_string(i + 1); }

const Matrix& need(const ProblemInstance& inst, const std::string& key) {
  auto it = inst.matrices.find(key);
  if (it == inst.matrices.end()) throw ParameterError("problem instance is missing matrix " + key);
  return it->second;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ParameterError(where + " must be a JSON object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ParameterError("unknown key '" + item.key() + "' in " + where);
}

}  // namespace

LassoSimplexData lasso_simplex_data(Index m, Index n, double alpha, std::uint64_t seed) {
  if (m < 1 || n < 1) throw ParameterError("gen_lasso_simplex: m and n must be >= 1");
  require_positive(alpha, "gen_lasso_simplex: alpha");
  Rng rng(seed);
  LassoSimplexData data;
  data.a = rng.normal_matrix(m, n);
  data.b = rng.normal_matrix(m, 1);
  data.alpha = alpha;
  return data;
}

BlockProblem make_lasso_simplex(const LassoSimplexData& data) {
  require_positive(data.alpha, "lasso_simplex: alpha");
  if (data.b.rows() != data.a.rows() || data.b.cols() != 1)
    throw DimensionError("lasso_simplex: b must be " + std::to_string(data.a.rows()) + "x1");
  const Index n = data.a.cols();
  Block block{SmoothFn::quadratic(data.a, data.b, data.alpha), ProxFn::l1(1.0),
              LinearMap::row_sum(n, 1)};
  return BlockProblem({std::move(block)}, Matrix::Ones(1, 1));
}

BlockProblem gen_lasso_simplex(Index m, Index n, double alpha, std::uint64_t seed) {
  return make_lasso_simplex(lasso_simplex_data(m, n, alpha, seed));
}

ThreeBlockData three_block_data(Index m, std::array<double, 3> alphas, std::uint64_t seed) {
  if (m < 2) throw ParameterError("gen_three_block: m must be >= 2");
  for (double a : alphas) require_positive(a, "gen_three_block: alpha");
  Rng rng(seed);
  ThreeBlockData data;
  for (int i = 0; i < 3; ++i) {
    data.a[i] = rng.normal_matrix(m, m);
    data.c[i] = rng.normal_matrix(m, m);
    data.d[i] = rng.normal_matrix(m, m);
  }
  data.b = rng.normal_matrix(m, m);
  data.alphas = alphas;
  return data;
}

BlockProblem make_three_block(const ThreeBlockData& data) {
  const std::array<ProxFn, 3> norms{ProxFn::l1(1.0), ProxFn::nuclear(1.0), ProxFn::l21(1.0)};
  std::vector<Block> blocks;
  for (int i = 0; i < 3; ++i) {
    require_positive(data.alphas[i], "three_block: alpha");
    blocks.push_back(Block{SmoothFn::quadratic(data.c[i], data.d[i], data.alphas[i]), norms[i],
                           LinearMap::left_multiply(data.a[i], data.d[i].cols())});
  }
  return BlockProblem(std::move(blocks), data.b);
}

BlockProblem gen_three_block(Index m, std::array<double, 3> alphas, std::uint64_t seed) {
  return make_three_block(three_block_data(m, alphas, seed));
}

BlockProblem build_subspace_problem(const Matrix& x, double alpha1, double alpha2) {
  const Index n = x.cols();
  if (n < 2) throw ParameterError("build_subspace_problem: need at least 2 data columns");
  require_positive(alpha1, "build_subspace_problem: alpha1");
  require_positive(alpha2, "build_subspace_problem: alpha2");
  const Shape sq{n, n};
  Block low_rank{SmoothFn::quadratic(x, x, 1.0), ProxFn::nuclear(alpha1),
                 LinearMap::vstack({LinearMap::identity(sq), LinearMap::row_sum(n, n)})};
  Block sparse{SmoothFn::zero(), ProxFn::l1(alpha2),
               LinearMap::vstack({LinearMap::negation(sq), LinearMap::zero(sq, Shape{1, n})})};
  Matrix b = Matrix::Zero(n + 1, n);
  b.row(n).setOnes();
  return BlockProblem({std::move(low_rank), std::move(sparse)}, std::move(b));
}

Matrix extract_representation(const BlockPoint& solution) {
  if (solution.empty()) throw DimensionError("extract_representation: empty solution");
  return solution[0];
}

SubspaceData gen_union_of_subspaces(const SubspaceParams& p, std::uint64_t seed) {
  if (p.k_subspaces < 1) throw ParameterError("gen_union_of_subspaces: k_subspaces must be >= 1");
  if (p.dim_sub < 1 || p.dim_sub >= p.dim_ambient)
    throw ParameterError("gen_union_of_subspaces: need 1 <= dim_sub < dim_ambient");
  if (p.pts_per < p.dim_sub) throw ParameterError("gen_union_of_subspaces: need pts_per >= dim_sub");
  if (!(p.noise >= 0.0) || !std::isfinite(p.noise))
    throw ParameterError("gen_union_of_subspaces: noise must be >= 0");
  if (p.orthogonal && p.k_subspaces * p.dim_sub > p.dim_ambient)
    throw ParameterError("gen_union_of_subspaces: orthogonal subspaces need k * dim_sub <= dim_ambient");

  Rng rng(seed);
  Matrix shared;
  if (p.orthogonal)
    shared = orthonormal_columns(rng.normal_matrix(p.dim_ambient, Index{p.k_subspaces} * p.dim_sub));

  SubspaceData out;
  out.x.resize(p.dim_ambient, Index{p.k_subspaces} * p.pts_per);
  out.labels.reserve(static_cast<std::size_t>(out.x.cols()));
  for (int j = 0; j < p.k_subspaces; ++j) {
    const Matrix basis = p.orthogonal ? Matrix(shared.middleCols(Index{j} * p.dim_sub, p.dim_sub))
                                      : orthonormal_columns(rng.normal_matrix(p.dim_ambient, p.dim_sub));
    const Matrix coef = rng.normal_matrix(p.dim_sub, p.pts_per);
    const Matrix noise = rng.normal_matrix(p.dim_ambient, p.pts_per);
    Matrix pts = basis * coef + p.noise * noise;
    for (Index c = 0; c < pts.cols(); ++c) {
      const double nrm = pts.col(c).norm();
      if (nrm > 0.0) pts.col(c) /= nrm;
    }
    out.x.middleCols(Index{j} * p.pts_per, p.pts_per) = pts;
    out.labels.insert(out.labels.end(), static_cast<std::size_t>(p.pts_per), j);
  }
  return out;
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kLassoSimplex: return "lasso_simplex";
    case ProblemKind::kThreeBlock: return "three_block";
    case ProblemKind::kSubspace: return "subspace";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "lasso_simplex" || name == "lasso") return ProblemKind::kLassoSimplex;
  if (name == "three_block") return ProblemKind::kThreeBlock;
  if (name == "subspace") return ProblemKind::kSubspace;
  throw ParameterError("unknown problem kind '" + name + "'");
}

ProblemInstance generate_instance(const ProblemManifest& manifest) {
  ProblemInstance inst;
  inst.manifest = manifest;
  inst.manifest.files.clear();
  const auto& w = manifest.alphas;
  switch (manifest.kind) {
    case ProblemKind::kLassoSimplex: {
      if (w.size() != 1) throw ParameterError("lasso_simplex manifest needs one weight");
      auto d = lasso_simplex_data(manifest.m, manifest.n, w[0], manifest.seed);
      inst.matrices["A"] = std::move(d.a);
      inst.matrices["b"] = std::move(d.b);
      break;
    }
    case ProblemKind::kThreeBlock: {
      if (w.size() != 3) throw ParameterError("three_block manifest needs three weights");
      auto d = three_block_data(manifest.m, {w[0], w[1], w[2]}, manifest.seed);
      for (int i = 0; i < 3; ++i) {
        inst.matrices[block_key("A", i)] = std::move(d.a[i]);
        inst.matrices[block_key("C", i)] = std::move(d.c[i]);
        inst.matrices[block_key("D", i)] = std::move(d.d[i]);
      }
      inst.matrices["B"] = std::move(d.b);
      break;
    }
    case ProblemKind::kSubspace: {
      if (w.size() != 2) throw ParameterError("subspace manifest needs two weights");
      for (double a : w) require_positive(a, "subspace weight");
      auto d = gen_union_of_subspaces(manifest.subspace, manifest.seed);
      inst.matrices["X"] = std::move(d.x);
      inst.labels = std::move(d.labels);
      break;
    }
  }
  return inst;
}

BlockProblem build_problem(const ProblemInstance& inst) {
  const auto& w = inst.manifest.alphas;
  switch (inst.manifest.kind) {
    case ProblemKind::kLassoSimplex:
      if (w.size() != 1) throw ParameterError("lasso_simplex needs one weight");
      return make_lasso_simplex({need(inst, "A"), need(inst, "b"), w[0]});
    case ProblemKind::kThreeBlock: {
      if (w.size() != 3) throw ParameterError("three_block needs three weights");
      ThreeBlockData d;
      for (int i = 0; i < 3; ++i) {
        d.a[i] = need(inst, block_key("A", i));
        d.c[i] = need(inst, block_key("C", i));
        d.d[i] = need(inst, block_key("D", i));
        d.alphas[i] = w[i];
      }
      d.b = need(inst, "B");
      return make_three_block(d);
    }
    case ProblemKind::kSubspace:
      if (w.size() != 2) throw ParameterError("subspace needs two weights");
      return build_subspace_problem(need(inst, "X"), w[0], w[1]);
  }
  throw ParameterError("unknown problem kind");
}

std::string manifest_to_json(const ProblemManifest& m) {
  json j;
  j["kind"] = to_string(m.kind);
  j["seed"] = m.seed;
  if (m.kind == ProblemKind::kSubspace) {
    j["dimensions"] = {{"k_subspaces", m.subspace.k_subspaces},
                       {"dim_ambient", m.subspace.dim_ambient},
                       {"dim_sub", m.subspace.dim_sub},
                       {"pts_per", m.subspace.pts_per}};
    j["noise"] = m.subspace.noise;
    j["orthogonal"] = m.subspace.orthogonal;
  } else if (m.kind == ProblemKind::kLassoSimplex) {
    j["dimensions"] = {{"m", m.m}, {"n", m.n}};
  } else {
    j["dimensions"] = {{"m", m.m}};
  }
  j["weights"] = m.alphas;
  j["files"] = m.files;
  return j.dump(2) + "\n";
}

ProblemManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("manifest: ") + e.what());
  }
  check_keys(j, {"kind", "seed", "dimensions", "weights", "files", "noise", "orthogonal"}, "manifest");
  try {
    ProblemManifest m;
    m.kind = parse_problem_kind(j.at("kind").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    const json& dims = j.at("dimensions");
    switch (m.kind) {
      case ProblemKind::kLassoSimplex:
        check_keys(dims, {"m", "n"}, "manifest dimensions");
        m.m = dims.at("m").get<Index>();
        m.n = dims.at("n").get<Index>();
        break;
      case ProblemKind::kThreeBlock:
        check_keys(dims, {"m"}, "manifest dimensions");
        m.m = dims.at("m").get<Index>();
        break;
      case ProblemKind::kSubspace:
        check_keys(dims, {"k_subspaces", "dim_ambient", "dim_sub", "pts_per"}, "manifest dimensions");
        m.subspace.k_subspaces = dims.at("k_subspaces").get<int>();
        m.subspace.dim_ambient = dims.at("dim_ambient").get<int>();
        m.subspace.dim_sub = dims.at("dim_sub").get<int>();
        m.subspace.pts_per = dims.at("pts_per").get<int>();
        m.subspace.noise = j.value("noise", m.subspace.noise);
        m.subspace.orthogonal = j.value("orthogonal", false);
        break;
    }
    m.alphas = j.at("weights").get<std::vector<double>>();
    if (j.contains("files")) m.files = j.at("files").get<std::map<std::string, std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("manifest: ") + e.what());
  }
}

std::filesystem::path save_instance(const ProblemInstance& inst, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  ProblemManifest manifest = inst.manifest;
  manifest.files.clear();
  for (const auto& [role, mat] : inst.matrices) {
    const std::string file = role + ".mtx";
    save_matrix_market(dir / file, mat);
    manifest.files[role] = file;
  }
  if (!inst.labels.empty()) {
    Matrix labels(static_cast<Index>(inst.labels.size()), 1);
    for (std::size_t i = 0; i < inst.labels.size(); ++i) labels(static_cast<Index>(i), 0) = inst.labels[i];
    save_matrix_market(dir / "labels.mtx", labels);
    manifest.files["labels"] = "labels.mtx";
  }
  const auto path = dir / "manifest.json";
  std::ofstream os(path, std::ios::binary);
  os << manifest_to_json(manifest);
  if (!os) throw IoError("cannot write " + path.string());
  return path;
}

ProblemInstance load_instance(const std::filesystem::path& manifest_path) {
  std::ifstream is(manifest_path, std::ios::binary);
  if (!is) throw IoError("cannot open manifest " + manifest_path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  const ProblemManifest manifest = manifest_from_json(ss.str());
  if (manifest.files.empty()) return generate_instance(manifest);

  ProblemInstance inst;
  inst.manifest = manifest;
  const auto base = manifest_path.parent_path();
  for (const auto& [role, file] : manifest.files) {
    Matrix m = load_matrix_market(base / file);
    if (role == "labels") {
      if (m.cols() != 1) throw DimensionError("labels file must have one column");
      inst.labels.resize(static_cast<std::size_t>(m.rows()));
      for (Index i = 0; i < m.rows(); ++i) inst.labels[static_cast<std::size_t>(i)] = static_cast<int>(m(i, 0));
    } else {
      inst.matrices[role] = std::move(m);
    }
  }
  return inst;
}

}  // namespace fastalm
