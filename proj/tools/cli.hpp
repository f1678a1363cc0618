#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fastalm/problems.hpp"
#include "fastalm/solvers.hpp"

namespace fastalm::cli {

enum ExitCode : int { kOk = 0, kParameterError = 2, kNumericError = 3, kIoError = 4 };

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "FASTALM_OUT_DIR";

struct RaceConfig {
  std::string manifest;
  /// Empty selects palm + fast_palm for one block, pl_admm_ps + fast_pl_admm_ps otherwise.
  std::vector<std::string> algorithms;
  int iterations = 1000;
  double beta = kDefaultBeta;
  double eta_slack = kDefaultEtaSlack;
  double inner_tol = 1e-9;
  int inner_max_iter = 2000;
  /// <= 0 selects 10 x iterations.
  int reference_iters = 0;
  std::string out_dir;
  int trace_every = 1;
  bool parallel_blocks = false;
  /// Write 0 in the time_ms column.
  bool omit_time = false;
};

struct ClusterConfig {
  std::string manifest;
  std::string data;
  std::string labels;
  SubspaceParams subspace;
  std::uint64_t seed = 11;
  double alpha1 = 0.1;
  double alpha2 = 0.01;
  std::string algorithm = "fast_pl_admm_ps";
  int iterations = 1000;
  double beta = kDefaultBeta;
  double eta_slack = kDefaultEtaSlack;
  std::string out_dir;
};

struct ClusterReport {
  std::vector<int> labels;
  double accuracy = 0.0;
  bool degenerate = false;
  int isolated = 0;
  double objective = 0.0;
  double feas_norm = 0.0;
};

/// Solves the self-representation problem, clusters its affinity into
/// max(truth) + 1 groups and scores the result.
ClusterReport run_cluster_pipeline(const Matrix& x, const std::vector<int>& truth,
                                   const ClusterConfig& config);

/// CSV header shared by every trace file.
inline constexpr const char* kTraceHeader = "iter,time_ms,objective,feas_norm,conv_fn,bound,inner_flag";
void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace, bool omit_time);

/// Full command line, argv[0] excluded. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fastalm::cli
