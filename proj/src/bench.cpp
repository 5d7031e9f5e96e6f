#include "sketchls/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "sketchls/errors.hpp"
#include "sketchls/linalg.hpp"
#include "sketchls/rng.hpp"

namespace sketchls {

namespace {

constexpr std::array<std::pair<Status, std::string_view>, 4> kStatusNames{{
    {Status::ok, "ok"},
    {Status::inaccurate, "inaccurate"},
    {Status::timeout, "timeout"},
    {Status::error, "error"},
}};

constexpr double kMinTime = 1e-9;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::size_t parse_count(const std::string& s, std::size_t line) {
  std::size_t pos = 0;
  try {
    const unsigned long long v = std::stoull(s, &pos);
    if (pos == s.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw ParseError("bad integer '" + s + "'", line);
}

double parse_real(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError("bad number '" + s + "'", line);
  return v;
}

BenchRecord run_one(const Matrix& a, std::span<const double> b, const SolverEntry& entry) {
  BenchRecord rec;
  const auto t0 = std::chrono::steady_clock::now();
  if (entry.oracle) {
    const auto x = svd_solve(a, b, &rec.rank);
    rec.residual = residual_norm(a, b, x);
  } else {
    const SolveResult res = solve(a, b, entry.cfg);
    rec.residual = res.residual;
    rec.iters = res.iterations;
    rec.rank = res.rank;
  }
  rec.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace

std::string_view to_string(Status s) noexcept {
  for (const auto& [k, name] : kStatusNames)
    if (k == s) return name;
  return "unknown";
}

std::optional<Status> parse_status(std::string_view name) noexcept {
  for (const auto& [k, n] : kStatusNames)
    if (n == name) return k;
  return std::nullopt;
}

void judge(std::span<BenchRecord> records, const JudgeOptions& opts) {
  if (records.empty()) throw InvalidArgument("judge: no records");
  double r = std::numeric_limits<double>::infinity();
  for (const auto& rec : records)
    if (rec.status != Status::error && std::isfinite(rec.residual)) r = std::min(r, rec.residual);
  for (auto& rec : records) {
    if (rec.status != Status::error) {
      if (rec.time_s > opts.budget_s) {
        rec.status = Status::timeout;
      } else if (!std::isfinite(rec.residual) ||
                 (rec.residual > (1.0 + opts.tau_r) * r && rec.residual > r + opts.tau_a)) {
        rec.status = Status::inaccurate;
      } else {
        rec.status = Status::ok;
      }
    }
    if (rec.status != Status::ok) rec.time_s = kFailedTime;
  }
}

void judge_all(std::vector<BenchRecord>& records, const JudgeOptions& opts) {
  std::map<std::string, std::vector<std::size_t>> by_problem;
  for (std::size_t i = 0; i < records.size(); ++i) by_problem[records[i].problem].push_back(i);
  for (const auto& [problem, idx] : by_problem) {
    std::vector<BenchRecord> group;
    for (std::size_t i : idx) group.push_back(records[i]);
    judge(group, opts);
    for (std::size_t k = 0; k < idx.size(); ++k) records[idx[k]] = group[k];
  }
}

std::vector<ProfileCurve> profile(const std::vector<BenchRecord>& records) {
  std::vector<std::string> solvers;
  std::vector<std::string> problems;
  std::map<std::pair<std::string, std::string>, double> time;
  for (const auto& rec : records) {
    if (std::find(solvers.begin(), solvers.end(), rec.solver) == solvers.end()) solvers.push_back(rec.solver);
    if (std::find(problems.begin(), problems.end(), rec.problem) == problems.end()) problems.push_back(rec.problem);
    if (!time.emplace(std::make_pair(rec.problem, rec.solver), std::max(rec.time_s, kMinTime)).second)
      throw InvalidArgument("profile: duplicate record for (" + rec.problem + ", " + rec.solver + ")");
  }
  if (time.size() != solvers.size() * problems.size())
    throw InvalidArgument("profile: some (problem, solver) pairs are missing");

  // log2 ratios, ratios[s][p]
  std::vector<std::vector<double>> ratios(solvers.size(), std::vector<double>(problems.size()));
  std::vector<double> grid{0.0};
  for (std::size_t p = 0; p < problems.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : solvers) best = std::min(best, time.at({problems[p], s}));
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      ratios[s][p] = std::log2(time.at({problems[p], solvers[s]}) / best);
      grid.push_back(ratios[s][p]);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<ProfileCurve> curves;
  const double np = static_cast<double>(problems.size());
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    ProfileCurve c{solvers[s], {}};
    std::vector<double> sorted = ratios[s];
    std::sort(sorted.begin(), sorted.end());
    for (double a : grid) {
      const auto count = std::upper_bound(sorted.begin(), sorted.end(), a) - sorted.begin();
      c.points.push_back({a, static_cast<double>(count) / np});
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

SolverEntry named_solver(std::string_view name) {
  SolverEntry e;
  e.id = std::string(name);
  if (name == "ski_dense") {
    e.cfg = SolverConfig::dense_defaults();
  } else if (name == "ski_sparse") {
    e.cfg = SolverConfig::sparse_defaults();
  } else if (name == "blendenpik_like") {
    e.cfg = SolverConfig::dense_defaults();
    e.cfg.sketch.kind = SketchKind::sr_dht;
    e.cfg.m_ratio = 2.2;
  } else if (name == "lsrn_like") {
    e.cfg = SolverConfig::dense_defaults();
    e.cfg.sketch.kind = SketchKind::gaussian;
    e.cfg.m_ratio = 1.1;
    e.cfg.min_norm = true;
  } else if (name == "hash1") {
    e.cfg = SolverConfig::sparse_defaults();
    e.cfg.sketch.s = 1;
  } else if (name == "svd") {
    e.oracle = true;
  } else {
    throw InvalidArgument("unknown solver '" + std::string(name) + "'");
  }
  return e;
}

std::vector<double> svd_solve(const Matrix& a, std::span<const double> b, std::size_t* rank) {
  const DenseMat dense = to_dense(a);
  if (b.size() != dense.rows()) throw DimensionError("svd_solve: b length mismatch");
  const double tol = static_cast<double>(std::max(dense.rows(), dense.cols())) *
                     std::numeric_limits<double>::epsilon();
  const SvdFactors f = svd_compact(dense, tol);
  if (rank) *rank = f.rank;
  // x = V diag(1/sigma) U^T b
  std::vector<double> c(f.rank);
  for (std::size_t k = 0; k < f.rank; ++k) c[k] = dot(f.u.col(k), b) / f.sigma[k];
  std::vector<double> x(dense.cols(), 0.0);
  for (std::size_t k = 0; k < f.rank; ++k) {
    const auto vk = f.v.col(k);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += vk[j] * c[k];
  }
  return x;
}

std::vector<BenchRecord> run_suite(const std::vector<ProblemSpec>& problems,
                                   const std::vector<SolverEntry>& solvers, const SuiteOptions& opts) {
  if (problems.empty()) throw InvalidArgument("run_suite: empty suite");
  if (solvers.empty()) throw InvalidArgument("run_suite: no solvers");
  if (opts.jobs < 1) throw InvalidArgument("run_suite: jobs must be >= 1");

  const std::size_t np = problems.size();
  const std::size_t ns = solvers.size();
  std::vector<std::optional<Matrix>> mats(np);
  std::vector<std::string> gen_errors(np);
  std::vector<BenchRecord> records(np * ns);

#pragma omp parallel num_threads(opts.jobs)
  {
#pragma omp for schedule(dynamic, 1)
    for (std::size_t i = 0; i < np; ++i) {
      ProblemSpec spec = problems[i];
      spec.seed = derive_seed(opts.master_seed, "problem", i);
      try {
        mats[i] = generate(spec);
      } catch (const std::exception& e) {
        gen_errors[i] = e.what();
      }
    }
#pragma omp for schedule(dynamic, 1)
    for (std::size_t k = 0; k < np * ns; ++k) {
      const std::size_t i = k / ns;
      const std::size_t j = k % ns;
      BenchRecord rec;
      if (mats[i]) {
        const Matrix& a = *mats[i];
        const std::vector<double> b(rows_of(a), 1.0);
        SolverEntry entry = solvers[j];
        entry.cfg.sketch.seed = derive_seed(opts.master_seed, "run", i);
        try {
          rec = run_one(a, b, entry);
        } catch (const std::exception&) {
          rec = BenchRecord{};
          rec.status = Status::error;
          rec.residual = std::numeric_limits<double>::quiet_NaN();
        }
        rec.n = rows_of(a);
        rec.d = cols_of(a);
        rec.nnz = nnz_of(a);
      } else {
        rec.status = Status::error;
        rec.residual = std::numeric_limits<double>::quiet_NaN();
      }
      rec.problem = std::string(to_string(problems[i].family)) + "_" + std::to_string(i);
      rec.solver = solvers[j].id;
      records[k] = std::move(rec);
    }
  }
  judge_all(records, opts.judge);
  return records;
}

void write_records(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kRecordHeader << '\n';
  for (const auto& r : records) {
    out << r.problem << ',' << r.solver << ',' << r.n << ',' << r.d << ',' << r.nnz << ',' << fmt17(r.time_s)
        << ',' << fmt17(r.residual) << ',' << r.iters << ',' << r.rank << ',' << to_string(r.status) << '\n';
  }
}

std::vector<BenchRecord> read_records(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError("empty input", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordHeader) throw ParseError("expected header '" + std::string(kRecordHeader) + "'", 1);
  std::vector<BenchRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != 10) throw ParseError("expected 10 fields, got " + std::to_string(f.size()), lineno);
    BenchRecord r;
    r.problem = f[0];
    r.solver = f[1];
    r.n = parse_count(f[2], lineno);
    r.d = parse_count(f[3], lineno);
    r.nnz = parse_count(f[4], lineno);
    r.time_s = parse_real(f[5], lineno);
    r.residual = parse_real(f[6], lineno);
    r.iters = parse_count(f[7], lineno);
    r.rank = parse_count(f[8], lineno);
    const auto st = parse_status(f[9]);
    if (!st) throw ParseError("bad status '" + f[9] + "'", lineno);
    r.status = *st;
    out.push_back(std::move(r));
  }
  return out;
}

void write_profile(std::ostream& out, const std::vector<ProfileCurve>& curves) {
  out << kProfileHeader << '\n';
  for (const auto& c : curves)
    for (const auto& p : c.points) out << c.solver << ',' << fmt17(p.log2_ratio) << ',' << fmt17(p.fraction) << '\n';
}

}  // namespace sketchls
