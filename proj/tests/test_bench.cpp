#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "sketchls/bench.hpp"
#include "sketchls/errors.hpp"
#include "sketchls/rng.hpp"

using namespace sketchls;

namespace {

BenchRecord rec(std::string p, std::string s, double t, double r) {
  BenchRecord b;
  b.problem = std::move(p);
  b.solver = std::move(s);
  b.time_s = t;
  b.residual = r;
  return b;
}

// Straight from the definition: rho_s(tau) = |{p : t_ps / min_s t_ps <= 2^tau}| / P.
double reference_rho(const std::vector<BenchRecord>& recs, const std::string& solver, double log2_tau) {
  std::map<std::string, double> best;
  for (const auto& r : recs) {
    const double t = std::max(r.time_s, 1e-9);
    auto it = best.find(r.problem);
    if (it == best.end() || t < it->second) best[r.problem] = t;
  }
  std::size_t hit = 0;
  for (const auto& r : recs)
    if (r.solver == solver && std::log2(std::max(r.time_s, 1e-9) / best[r.problem]) <= log2_tau) ++hit;
  return static_cast<double>(hit) / static_cast<double>(best.size());
}

}  // namespace

TEST(Judge, RelativeTestPasses) {
  std::vector<BenchRecord> r{rec("p", "a", 1, 1.0), rec("p", "b", 2, 1.0 + 5e-7)};
  judge(r, {});
  EXPECT_EQ(r[0].status, Status::ok);
  EXPECT_EQ(r[1].status, Status::ok);
  EXPECT_EQ(r[1].time_s, 2.0);
}

TEST(Judge, BothTestsFail) {
  std::vector<BenchRecord> r{rec("p", "a", 1, 1.0), rec("p", "b", 2, 2.0)};
  judge(r, {});
  EXPECT_EQ(r[0].status, Status::ok);
  EXPECT_EQ(r[1].status, Status::inaccurate);
  EXPECT_EQ(r[1].time_s, kFailedTime);
}

TEST(Judge, AbsoluteTestRescuesTinyResiduals) {
  std::vector<BenchRecord> r{rec("p", "a", 1, 1e-12), rec("p", "b", 1, 5e-9)};
  judge(r, {});
  EXPECT_EQ(r[1].status, Status::ok);
}

TEST(Judge, Timeout) {
  std::vector<BenchRecord> r{rec("p", "a", 801, 1.0), rec("p", "b", 2, 1.5)};
  judge(r, {});
  EXPECT_EQ(r[0].status, Status::timeout);
  EXPECT_EQ(r[0].time_s, kFailedTime);
  EXPECT_EQ(r[1].status, Status::inaccurate);
}

TEST(Judge, ErrorsIgnoredForReference) {
  std::vector<BenchRecord> r{rec("p", "a", 1, std::nan("")), rec("p", "b", 2, 3.0)};
  r[0].status = Status::error;
  judge(r, {});
  EXPECT_EQ(r[0].status, Status::error);
  EXPECT_EQ(r[0].time_s, kFailedTime);
  EXPECT_EQ(r[1].status, Status::ok);
  std::vector<BenchRecord> empty;
  EXPECT_THROW(judge(empty, {}), InvalidArgument);
}

TEST(Judge, MonotoneInResidual) {
  RandomStream rs(1, 0);
  for (int t = 0; t < 200; ++t) {
    std::vector<BenchRecord> r;
    for (int k = 0; k < 4; ++k) r.push_back(rec("p", std::to_string(k), 1.0, 1.0 + rs.uniform() * 1e-5));
    auto before = r;
    judge(before, {});
    for (int k = 0; k < 4; ++k) {
      if (before[k].status != Status::ok) continue;
      auto improved = r;
      improved[k].residual *= 0.5;
      judge(improved, {});
      EXPECT_EQ(improved[k].status, Status::ok);
    }
  }
}

TEST(Profile, SingleSolverConstant) {
  const auto c = profile({rec("p1", "a", 3, 0), rec("p2", "a", 5, 0)});
  ASSERT_EQ(c.size(), 1u);
  for (const auto& pt : c[0].points) EXPECT_EQ(pt.fraction, 1.0);
}

TEST(Profile, TwoByTwoHandTable) {
  const auto c = profile({rec("p1", "a", 1, 0), rec("p1", "b", 2, 0), rec("p2", "a", 2, 0), rec("p2", "b", 1, 0)});
  ASSERT_EQ(c.size(), 2u);
  const std::vector<ProfilePoint> expect{{0.0, 0.5}, {1.0, 1.0}};
  EXPECT_EQ(c[0].points, expect);
  EXPECT_EQ(c[1].points, expect);
}

TEST(Profile, MatchesReferenceOnRandomTable) {
  RandomStream rs(7, 0);
  std::vector<BenchRecord> recs;
  for (int p = 0; p < 20; ++p)
    for (int s = 0; s < 5; ++s) {
      double t = 0.1 + 10 * rs.uniform();
      if (rs.uniform() < 0.1) t = kFailedTime;
      recs.push_back(rec("p" + std::to_string(p), "s" + std::to_string(s), t, 0));
    }
  const auto curves = profile(recs);
  ASSERT_EQ(curves.size(), 5u);
  for (const auto& c : curves) {
    double prev = 0.0;
    for (const auto& pt : c.points) {
      EXPECT_DOUBLE_EQ(pt.fraction, reference_rho(recs, c.solver, pt.log2_ratio));
      EXPECT_GE(pt.fraction, prev);
      EXPECT_LE(pt.fraction, 1.0);
      prev = pt.fraction;
    }
    // Starts at the fraction of problems where the solver is fastest.
    EXPECT_EQ(c.points.front().log2_ratio, 0.0);
    EXPECT_DOUBLE_EQ(c.points.front().fraction, reference_rho(recs, c.solver, 0.0));
    EXPECT_EQ(c.points.size(), curves.front().points.size());
  }
}

TEST(Profile, MissingOrDuplicatePairsThrow) {
  EXPECT_THROW(profile({rec("p1", "a", 1, 0), rec("p1", "b", 1, 0), rec("p2", "a", 1, 0)}), InvalidArgument);
  EXPECT_THROW(profile({rec("p1", "a", 1, 0), rec("p1", "a", 2, 0)}), InvalidArgument);
}

TEST(NamedSolvers, Configurations) {
  EXPECT_EQ(named_solver("blendenpik_like").cfg.sketch.kind, SketchKind::sr_dht);
  EXPECT_EQ(named_solver("blendenpik_like").cfg.m_ratio, 2.2);
  const auto l = named_solver("lsrn_like");
  EXPECT_EQ(l.cfg.sketch.kind, SketchKind::gaussian);
  EXPECT_EQ(l.cfg.m_ratio, 1.1);
  EXPECT_TRUE(l.cfg.min_norm);
  EXPECT_TRUE(named_solver("svd").oracle);
  EXPECT_EQ(named_solver("hash1").cfg.sketch.s, 1u);
  EXPECT_THROW(named_solver("spqr"), InvalidArgument);
}

TEST(RunSuite, TinySuiteAllOk) {
  const std::vector<ProblemSpec> probs{{Family::incoherent_dense, 200, 10, 0, 0, {}},
                                       {Family::incoherent_sparse, 500, 10, 0, 0, {}},
                                       {Family::coherent_dense, 200, 10, 0, 0, {}}};
  const std::vector<SolverEntry> solvers{named_solver("ski_dense"), named_solver("ski_sparse")};
  const auto recs = run_suite(probs, solvers, {});
  ASSERT_EQ(recs.size(), 6u);
  for (const auto& r : recs) EXPECT_EQ(r.status, Status::ok) << r.problem << " " << r.solver;
  EXPECT_EQ(recs[0].problem, "incoherent_dense_0");
  EXPECT_EQ(recs[1].solver, "ski_sparse");
  EXPECT_EQ(recs[2].nnz, recs[3].nnz);
}

TEST(RunSuite, ReproducibleAndJobIndependent) {
  const std::vector<ProblemSpec> probs{{Family::semicoherent_sparse, 600, 12, 0, 0, {}},
                                       {Family::coherent_sparse, 600, 12, 0, 0, {}}};
  const std::vector<SolverEntry> solvers{named_solver("ski_sparse"), named_solver("hash1"), named_solver("svd")};
  SuiteOptions o1;
  o1.master_seed = 9;
  SuiteOptions o2 = o1;
  o2.jobs = 3;
  const auto a = run_suite(probs, solvers, o1);
  const auto b = run_suite(probs, solvers, o2);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].residual, b[i].residual);
    EXPECT_EQ(a[i].iters, b[i].iters);
    EXPECT_EQ(a[i].status, b[i].status);
  }
}

TEST(RunSuite, ErrorsAreRecorded) {
  const std::vector<ProblemSpec> probs{{Family::from_file, 0, 0, 0, 0, "/nonexistent.mtx"},
                                       {Family::incoherent_dense, 100, 5, 0, 0, {}}};
  const auto recs = run_suite(probs, {named_solver("ski_dense")}, {});
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].status, Status::error);
  EXPECT_EQ(recs[0].time_s, kFailedTime);
  EXPECT_EQ(recs[1].status, Status::ok);
}

TEST(Csv, RoundTrip) {
  std::vector<BenchRecord> recs{rec("p1", "a", 0.125, 1.0 / 3.0), rec("p1", "b", kFailedTime, 2.5)};
  recs[0].n = 10;
  recs[0].d = 3;
  recs[0].nnz = 30;
  recs[0].iters = 7;
  recs[0].rank = 3;
  recs[1].status = Status::inaccurate;
  std::stringstream ss;
  write_records(ss, recs);
  EXPECT_EQ(ss.str().substr(0, kRecordHeader.size()), kRecordHeader);
  EXPECT_EQ(read_records(ss), recs);
  std::stringstream bad("problem,solver\n");
  EXPECT_THROW(read_records(bad), ParseError);
  std::stringstream bad_row(std::string(kRecordHeader) + "\np,s,1,2,3,x,1,1,1,ok\n");
  try {
    read_records(bad_row);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Csv, ProfileOutput) {
  std::stringstream ss;
  write_profile(ss, profile({rec("p1", "a", 1, 0), rec("p1", "b", 2, 0), rec("p2", "a", 2, 0), rec("p2", "b", 1, 0)}));
  EXPECT_EQ(ss.str(), "solver,log2_ratio,fraction\na,0,0.5\na,1,1\nb,0,0.5\nb,1,1\n");
}

TEST(RunSuite, HashingBeatsGaussianOnSparseIncoherent) {
  const std::vector<ProblemSpec> probs{{Family::incoherent_sparse, 8000, 400, 0, 0, {}},
                                       {Family::incoherent_sparse, 8000, 400, 0, 0, {}}};
  SolverEntry gauss = named_solver("ski_sparse");
  gauss.id = "gaussian";
  gauss.cfg.sketch.kind = SketchKind::gaussian;
  const auto recs = run_suite(probs, {named_solver("ski_sparse"), gauss}, {});
  double t_hash = 0, t_gauss = 0;
  for (const auto& r : recs) {
    EXPECT_EQ(r.status, Status::ok);
    (r.solver == "gaussian" ? t_gauss : t_hash) += r.time_s;
  }
  EXPECT_LT(t_hash, t_gauss);
}

TEST(RunSuite, OracleRowOnRankDeficientProblem) {
  const std::vector<ProblemSpec> probs{{Family::identity_block, 300, 40, 25, 0, {}}};
  const auto recs = run_suite(probs, {named_solver("ski_dense"), named_solver("svd")}, {});
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].rank, 25u);
  EXPECT_EQ(recs[1].rank, 25u);
  EXPECT_NEAR(recs[0].residual, recs[1].residual, 1e-6);
  EXPECT_EQ(recs[0].status, Status::ok);
}
