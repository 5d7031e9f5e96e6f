// sketchls command-line front end: solve, analyze, gen, bench, profile.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <limits>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sketchls/analysis.hpp"
#include "sketchls/bench.hpp"
#include "sketchls/errors.hpp"
#include "sketchls/mtx.hpp"
#include "sketchls/rng.hpp"
#include "sketchls/solver.hpp"
#include "sketchls/testgen.hpp"

namespace {

using namespace sketchls;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitTimeout = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- problem source shared by solve / analyze / gen -------------------------

struct SourceArgs {
  std::string input;
  std::string family;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t r = 0;
  bool force_dense = false;
  bool force_sparse = false;
};

void add_source_options(CLI::App* app, SourceArgs& a, bool allow_input) {
  if (allow_input) app->add_option("--input", a.input, "Matrix Market file (array = dense, coordinate = sparse)");
  app->add_option("--family", a.family,
                  "Generated family: incoherent_dense, semicoherent_dense, coherent_dense, incoherent_sparse, "
                  "semicoherent_sparse, coherent_sparse, identity_block");
  app->add_option("--n", a.n, "Rows of the generated matrix");
  app->add_option("--d", a.d, "Columns of the generated matrix");
  app->add_option("--r", a.r, "Rank of identity_block");
}

ProblemSpec problem_spec(const SourceArgs& a, std::uint64_t seed) {
  ProblemSpec spec;
  if (!a.input.empty()) {
    if (!a.family.empty()) throw UsageError("--input and --family are mutually exclusive");
    spec.family = Family::from_file;
    spec.path = a.input;
    return spec;
  }
  if (a.family.empty()) throw UsageError("one of --input or --family is required");
  const auto fam = parse_family(a.family);
  if (!fam || *fam == Family::from_file) throw UsageError("unknown family '" + a.family + "'");
  if (a.n == 0 || a.d == 0) throw UsageError("--family needs --n and --d");
  if (*fam == Family::identity_block && a.r == 0) throw UsageError("identity_block needs --r");
  spec.family = *fam;
  spec.n = a.n;
  spec.d = a.d;
  spec.r = a.r;
  spec.seed = derive_seed(seed, "problem");
  return spec;
}

Matrix load_problem(const SourceArgs& a, std::uint64_t seed, std::string* name) {
  if (a.force_dense && a.force_sparse) throw UsageError("--dense and --sparse are mutually exclusive");
  const ProblemSpec spec = problem_spec(a, seed);
  if (name) *name = spec.family == Family::from_file ? spec.path : std::string(to_string(spec.family));
  Matrix m = generate(spec);
  if (a.force_dense && std::holds_alternative<SparseMat>(m)) m = to_dense(m);
  if (a.force_sparse && std::holds_alternative<DenseMat>(m)) m = SparseMat::from_dense(std::get<DenseMat>(m));
  return m;
}

// --- sketch / solver flags ---------------------------------------------------

struct SolverArgs {
  std::string sketch;
  std::optional<double> m_ratio;
  std::optional<std::size_t> s;
  double tau_a = 1e-8;
  double tau_r = 1e-6;
  std::size_t it_max = 10000;
  double rcond = 1e-12;
  double rcond_thres = 1e-10;
  double perturb = 1e-10;
  bool min_norm = false;
  bool warm_start = false;
  std::uint64_t seed = 0;
};

void add_sketch_options(CLI::App* app, SolverArgs& a) {
  app->add_option("--sketch", a.sketch,
                  "Sketch: s_hashing, s_hashing_variant, gaussian, sampling, hr_dht, sr_dht, hrht "
                  "(default hr_dht dense, s_hashing sparse)");
  app->add_option("--m-ratio", a.m_ratio, "Sketch rows m = ceil(ratio * d) (default 1.7 dense, 1.4 sparse)");
  app->add_option("--s", a.s, "Nonzeros per hashing column (default 1 dense, 2 sparse)");
  app->add_option("--seed", a.seed, "Master seed")->capture_default_str();
}

void add_solver_options(CLI::App* app, SolverArgs& a) {
  add_sketch_options(app, a);
  app->add_option("--tau-a", a.tau_a, "Absolute residual tolerance of the sketched solution")->capture_default_str();
  app->add_option("--tau-r", a.tau_r, "Relative LSQR tolerance")->capture_default_str();
  app->add_option("--it-max", a.it_max, "Maximum LSQR iterations")->capture_default_str();
  app->add_option("--rcond", a.rcond, "Rank cutoff relative to |r_11|")->capture_default_str();
  app->add_option("--rcond-thres", a.rcond_thres, "Perturb R11 solves when its diagonal ratio is >= 1/this")
      ->capture_default_str();
  app->add_option("--perturb", a.perturb, "Added to r_ii in perturbed solves")->capture_default_str();
  app->add_flag("--min-norm", a.min_norm, "Complete orthogonal decomposition for the minimal-norm solution");
  app->add_flag("--warm-start", a.warm_start, "Start LSQR from Q^T S b");
}

SolverConfig solver_config(const SolverArgs& a, bool sparse) {
  SolverConfig cfg = sparse ? SolverConfig::sparse_defaults() : SolverConfig::dense_defaults();
  if (!a.sketch.empty()) {
    const auto kind = parse_sketch_kind(a.sketch);
    if (!kind) throw UsageError("unknown sketch '" + a.sketch + "'");
    cfg.sketch.kind = *kind;
  }
  if (a.s) {
    if (!uses_hashing(cfg.sketch.kind))
      throw UsageError("--s does not apply to the " + std::string(to_string(cfg.sketch.kind)) + " sketch");
    cfg.sketch.s = *a.s;
  }
  if (a.m_ratio) cfg.m_ratio = *a.m_ratio;
  cfg.sketch.seed = a.seed;
  cfg.tau_a = a.tau_a;
  cfg.tau_r = a.tau_r;
  cfg.it_max = a.it_max;
  cfg.rcond = a.rcond;
  cfg.rcond_thres = a.rcond_thres;
  cfg.perturb = a.perturb;
  cfg.min_norm = a.min_norm;
  cfg.warm_start = a.warm_start;
  try {
    validate(cfg);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InvalidArgument("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// --- subcommands -------------------------------------------------------------

int run_solve(const SourceArgs& src, const SolverArgs& sa, const std::string& out_path,
              const std::string& x_path, double budget_s) {
  std::string name;
  const Matrix a = load_problem(src, sa.seed, &name);
  const bool sparse = std::holds_alternative<SparseMat>(a);
  const SolverConfig cfg = solver_config(sa, sparse);
  const std::vector<double> b = rhs_ones(rows_of(a));

  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult res = solve(a, b, cfg);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Output out(out_path);
  out.stream() << "problem,n,d,nnz,sketch,m,s,route,iters,rank,residual,x_norm,converged,time_s\n"
               << name << ',' << rows_of(a) << ',' << cols_of(a) << ',' << nnz_of(a) << ','
               << to_string(cfg.sketch.kind) << ',' << sketch_rows(cfg, cols_of(a)) << ','
               << (uses_hashing(cfg.sketch.kind) ? cfg.sketch.s : 0) << ',' << to_string(res.route) << ','
               << res.iterations << ',' << res.rank << ',' << fmt17(res.residual) << ',' << fmt17(norm2(res.x))
               << ',' << (res.converged ? 1 : 0) << ',' << fmt17(elapsed) << '\n';
  if (!x_path.empty()) {
    Output xo(x_path);
    for (double v : res.x) xo.stream() << fmt17(v) << '\n';
  }
  if (elapsed > budget_s) {
    std::cerr << "sketchls: solve took " << elapsed << " s, over the " << budget_s << " s budget\n";
    return kExitTimeout;
  }
  if (!res.converged) {
    std::cerr << "sketchls: LSQR stopped at it_max = " << cfg.it_max << " before reaching tau_r\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int run_analyze(const SourceArgs& src, const SolverArgs& sa, std::size_t trials, double epsilon,
                const std::string& out_path) {
  std::string name;
  const Matrix a = load_problem(src, sa.seed, &name);
  const bool sparse = std::holds_alternative<SparseMat>(a);
  SolverConfig cfg = solver_config(sa, sparse);
  if (trials == 0) throw UsageError("--trials must be >= 1");
  if (!(epsilon > 0.0)) throw UsageError("--epsilon must be positive");

  SketchSpec spec = cfg.sketch;
  spec.m = sketch_rows(cfg, cols_of(a));
  spec.seed = derive_seed(sa.seed, "analyze");
  const DenseMat u = range_basis(a);
  const double mu = coherence_of_basis(u);
  const FailureStats st = failure_stats_basis(spec, u, epsilon, trials);
  const PreconditionerProbe probe(a);

  Output out(out_path);
  out.stream() << "problem,n,d,rank,coherence,sketch,m,s,trial,sigma_min,sigma_max,epsilon,rank_preserved,"
                  "kappa_w\n";
  for (std::size_t t = 0; t < trials; ++t) {
    SketchSpec ts = spec;
    ts.seed = derive_seed(spec.seed, "trial", t);
    double kappa = std::numeric_limits<double>::infinity();
    try {
      const CpqrFactors f = cpqr(apply_sketch(draw_sketch(ts, rows_of(a)), a), cfg.rcond);
      kappa = probe.kappa(f);
    } catch (const RankZeroError&) {
    }
    const auto& r = st.reports[t];
    out.stream() << name << ',' << rows_of(a) << ',' << cols_of(a) << ',' << u.cols() << ',' << fmt17(mu) << ','
                 << to_string(spec.kind) << ',' << spec.m << ',' << (uses_hashing(spec.kind) ? spec.s : 0) << ','
                 << t << ',' << fmt17(r.sigma_min) << ',' << fmt17(r.sigma_max) << ',' << fmt17(r.epsilon) << ','
                 << (r.rank_preserved ? 1 : 0) << ',' << fmt17(kappa) << '\n';
  }
  std::cerr << "failure rate at epsilon " << epsilon << ": " << st.rate() << " (" << st.failures << "/" << trials
            << ", rank lost " << st.rank_losses << ")\n";
  return kExitOk;
}

int run_gen(const SourceArgs& src, std::uint64_t seed, const std::string& out_path) {
  if (!src.input.empty()) throw UsageError("gen takes --family, not --input");
  const Matrix a = load_problem(src, seed, nullptr);
  Output out(out_path);
  write_matrix_market(out.stream(), a);
  return kExitOk;
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

int run_bench(const std::vector<std::string>& families_in, std::size_t n, std::size_t d, std::size_t r,
              std::size_t per_family, const std::vector<std::string>& solvers_in,
              const std::vector<std::string>& inputs, std::uint64_t seed, double budget_s, int jobs,
              double tau_r, double tau_a, const std::string& out_path) {
  std::vector<ProblemSpec> problems;
  for (const auto& f : split_list(families_in)) {
    const auto fam = parse_family(f);
    if (!fam || *fam == Family::from_file) throw UsageError("unknown family '" + f + "'");
    if (n == 0 || d == 0) throw UsageError("bench --family needs --n and --d");
    for (std::size_t k = 0; k < per_family; ++k) problems.push_back(ProblemSpec{*fam, n, d, r, 0, {}});
  }
  for (const auto& path : inputs) problems.push_back(ProblemSpec{Family::from_file, 0, 0, 0, 0, path});
  if (problems.empty()) throw UsageError("bench needs at least one --family or --input");
  if (jobs < 1) throw UsageError("--jobs must be >= 1");

  std::vector<SolverEntry> solvers;
  for (const auto& s : split_list(solvers_in)) {
    try {
      solvers.push_back(named_solver(s));
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  if (solvers.empty()) throw UsageError("bench needs at least one solver");

  SuiteOptions opts;
  opts.master_seed = seed;
  opts.jobs = jobs;
  opts.judge.budget_s = budget_s;
  opts.judge.tau_r = tau_r;
  opts.judge.tau_a = tau_a;
  const auto records = run_suite(problems, solvers, opts);
  Output out(out_path);
  write_records(out.stream(), records);
  return kExitOk;
}

int run_profile(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw InvalidArgument("cannot open '" + in_path + "'");
  const auto curves = profile(read_records(in));
  Output out(out_path);
  write_profile(out.stream(), curves);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-and-precondition least squares: min ||Ax - b||_2 with b = ones."};
  app.name("sketchls");
  app.require_subcommand(1);

  // solve
  SourceArgs solve_src;
  SolverArgs solve_args;
  std::string solve_out;
  std::string solve_x;
  double solve_budget = 800.0;
  CLI::App* solve = app.add_subcommand("solve", "Solve one problem and print a CSV row");
  add_source_options(solve, solve_src, true);
  solve->add_flag("--dense", solve_src.force_dense, "Store A densely whatever the source");
  solve->add_flag("--sparse", solve_src.force_sparse, "Store A sparsely whatever the source");
  add_solver_options(solve, solve_args);
  solve->add_option("--out", solve_out, "CSV output file (default stdout)");
  solve->add_option("--x-out", solve_x, "Write the solution vector, one value per line");
  solve->add_option("--budget-s", solve_budget, "Wall-clock budget in seconds; exceeding it exits 4")
      ->capture_default_str();

  // analyze
  SourceArgs an_src;
  SolverArgs an_args;
  std::size_t an_trials = 20;
  double an_eps = 0.5;
  std::string an_out;
  CLI::App* analyze = app.add_subcommand("analyze", "Coherence, embedding distortion and kappa(W) per sketch draw");
  add_source_options(analyze, an_src, true);
  analyze->add_flag("--dense", an_src.force_dense, "Use dense sketch defaults");
  analyze->add_flag("--sparse", an_src.force_sparse, "Use sparse sketch defaults");
  add_sketch_options(analyze, an_args);
  analyze->add_option("--rcond", an_args.rcond, "Rank cutoff relative to |r_11|")->capture_default_str();
  analyze->add_option("--trials", an_trials, "Independent sketch draws")->capture_default_str();
  analyze->add_option("--epsilon", an_eps, "Distortion above which a draw counts as a failure")
      ->capture_default_str();
  analyze->add_option("--out", an_out, "CSV output file (default stdout)");

  // gen
  SourceArgs gen_src;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "Write a generated matrix in Matrix Market format");
  add_source_options(gen, gen_src, false);
  gen->add_flag("--dense", gen_src.force_dense, "Write array format");
  gen->add_flag("--sparse", gen_src.force_sparse, "Write coordinate format");
  gen->add_option("--seed", gen_seed, "Master seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output .mtx file (default stdout)");

  // bench
  std::vector<std::string> bench_fam;
  std::vector<std::string> bench_inputs;
  std::vector<std::string> bench_solvers{"ski_dense", "ski_sparse"};
  std::size_t bench_n = 0;
  std::size_t bench_d = 0;
  std::size_t bench_r = 0;
  std::size_t bench_count = 1;
  std::uint64_t bench_seed = 0;
  double bench_budget = 800.0;
  double bench_tau_r = 1e-6;
  double bench_tau_a = 1e-8;
  int bench_jobs = 1;
  std::string bench_out;
  CLI::App* bench = app.add_subcommand("bench", "Run solver configurations over a problem suite");
  bench->add_option("--family", bench_fam, "Problem families (repeat or comma-separate)");
  bench->add_option("--input", bench_inputs, "Matrix Market files to add to the suite");
  bench->add_option("--n", bench_n, "Rows of generated problems");
  bench->add_option("--d", bench_d, "Columns of generated problems");
  bench->add_option("--r", bench_r, "Rank for identity_block");
  bench->add_option("--count", bench_count, "Problems per family")->capture_default_str();
  bench->add_option("--solvers", bench_solvers,
                    "ski_dense, ski_sparse, blendenpik_like, lsrn_like, hash1, svd")
      ->capture_default_str();
  bench->add_option("--seed", bench_seed, "Master seed")->capture_default_str();
  bench->add_option("--budget-s", bench_budget, "Per-run time budget in seconds")->capture_default_str();
  bench->add_option("--tau-r", bench_tau_r, "Relative residual slack when judging")->capture_default_str();
  bench->add_option("--tau-a", bench_tau_a, "Absolute residual slack when judging")->capture_default_str();
  bench->add_option("--jobs", bench_jobs, "Parallel runs")->capture_default_str();
  bench->add_option("--out", bench_out, "CSV output file (default stdout)");

  // profile
  std::string prof_in;
  std::string prof_out;
  CLI::App* prof = app.add_subcommand("profile", "Performance profiles from a bench CSV");
  prof->add_option("--in", prof_in, "bench CSV")->required();
  prof->add_option("--out", prof_out, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve) return run_solve(solve_src, solve_args, solve_out, solve_x, solve_budget);
    if (*analyze) return run_analyze(an_src, an_args, an_trials, an_eps, an_out);
    if (*gen) return run_gen(gen_src, gen_seed, gen_out);
    if (*bench)
      return run_bench(bench_fam, bench_n, bench_d, bench_r, bench_count, bench_solvers, bench_inputs, bench_seed,
                       bench_budget, bench_jobs, bench_tau_r, bench_tau_a, bench_out);
    if (*prof) return run_profile(prof_in, prof_out);
  } catch (const UsageError& e) {
    std::cerr << "sketchls: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "sketchls: parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const RankZeroError& e) {
    std::cerr << "sketchls: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const SingularError& e) {
    std::cerr << "sketchls: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NonFiniteError& e) {
    std::cerr << "sketchls: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "sketchls: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "sketchls: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
