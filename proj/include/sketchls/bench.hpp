#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sketchls/solver.hpp"
#include "sketchls/testgen.hpp"

namespace sketchls {

enum class Status { ok, inaccurate, timeout, error };
std::string_view to_string(Status s) noexcept;
std::optional<Status> parse_status(std::string_view name) noexcept;

/// Runtime assigned to a failed run.
inline constexpr double kFailedTime = 9999.0;

struct BenchRecord {
  std::string problem;
  std::string solver;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t nnz = 0;
  double time_s = 0.0;
  double residual = 0.0;
  std::size_t iters = 0;
  std::size_t rank = 0;
  Status status = Status::ok;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct JudgeOptions {
  double tau_r = 1e-6;
  double tau_a = 1e-8;
  double budget_s = 800.0;
};

/// Judges the records of one problem in place. With r the smallest residual
/// among runs that did not error, a run is inaccurate when its residual
/// exceeds both (1 + tau_r) r and r + tau_a, and a timeout when its time
/// exceeds the budget. Every run that is not ok gets time kFailedTime.
/// Throws InvalidArgument for an empty span.
void judge(std::span<BenchRecord> records, const JudgeOptions& opts);
/// judge() applied to each problem's records.
void judge_all(std::vector<BenchRecord>& records, const JudgeOptions& opts);

struct ProfilePoint {
  double log2_ratio = 0.0;
  double fraction = 0.0;

  friend bool operator==(const ProfilePoint&, const ProfilePoint&) = default;
};

struct ProfileCurve {
  std::string solver;
  std::vector<ProfilePoint> points;
};

/// Dolan-More performance profiles from judged records. Each curve is
/// evaluated on the same grid: 0 and every observed log2(time / best time),
/// sorted. Solvers appear in first-seen order. Times below 1e-9 s count as
/// 1e-9 s. Throws InvalidArgument when a (problem, solver) pair is missing
/// or repeated.
std::vector<ProfileCurve> profile(const std::vector<BenchRecord>& records);

/// A named solver configuration; `oracle` runs the truncated-SVD solve
/// instead of the sketching solver.
struct SolverEntry {
  std::string id;
  SolverConfig cfg;
  bool oracle = false;
};

/// ski_dense, ski_sparse, blendenpik_like (SR-DHT, m = 2.2d),
/// lsrn_like (Gaussian, m = 1.1d, minimal norm), hash1 (1-hashing, m = 1.4d),
/// svd (oracle). Throws InvalidArgument for other names.
SolverEntry named_solver(std::string_view name);

struct SuiteOptions {
  std::uint64_t master_seed = 0;
  JudgeOptions judge;
  int jobs = 1;
};

/// Truncated-SVD least-squares solution, singular values below
/// max(n, d) * eps * sigma_max dropped.
std::vector<double> svd_solve(const Matrix& a, std::span<const double> b, std::size_t* rank = nullptr);

/// Runs every solver on every problem with b = ones. Problem i is generated
/// with seed derive_seed(master_seed, "problem", i) and named
/// "<family>_<i>"; every solver on problem i uses sketch seed
/// derive_seed(master_seed, "run", i). Runs execute on `jobs` threads, each
/// run single-threaded; records come back in (problem, solver) order and
/// judged. Exceptions become status error.
std::vector<BenchRecord> run_suite(const std::vector<ProblemSpec>& problems,
                                   const std::vector<SolverEntry>& solvers, const SuiteOptions& opts);

inline constexpr std::string_view kRecordHeader = "problem,solver,n,d,nnz,time_s,residual,iters,rank,status";
inline constexpr std::string_view kProfileHeader = "solver,log2_ratio,fraction";

void write_records(std::ostream& out, const std::vector<BenchRecord>& records);
/// Throws ParseError on malformed input.
std::vector<BenchRecord> read_records(std::istream& in);
void write_profile(std::ostream& out, const std::vector<ProfileCurve>& curves);

}  // namespace sketchls
