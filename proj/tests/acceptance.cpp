// Acceptance gate: one test case per criterion, each printing a PASS/FAIL
// line. Reference configuration: (0,1), p = 2, s = 0.5, n = 256, power
// reaction q = 4, tol = 1e-8.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include <json.hpp>

#include "fracp/audit.hpp"
#include "fracp/runner.hpp"
#include "fracp/solver.hpp"
#include "oracles.hpp"

using namespace fracp;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kTol = 1e-8;

struct Criterion {
  const char* id;
  bool ok = true;
  std::string detail;

  explicit Criterion(const char* name) : id(name) {}
  ~Criterion() {
    std::printf("[criterion %s] %s%s%s\n", id, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

#define ACC_CHECK(c, cond)           \
  do {                               \
    const bool acc_ok_ = !!(cond);   \
    CHECK(cond);                     \
    if (!acc_ok_) (c).ok = false;    \
  } while (0)

struct ReferenceLab {
  Grid g = build_grid(0.0, 1.0, 256, 0.5, 2.0, false);
  KernelWeights k = kernel_weights(g);
  ReactionSpec spec = make_power_reaction(4.0, 2.0);
};

ReferenceLab& ref() {
  static ReferenceLab lab;
  return lab;
}

fs::path acceptance_root() {
  // per-process sandbox so that parallel ctest invocations stay isolated
  static fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() /
                       ("fracp_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path reference_config_path() {
  static fs::path path = [] {
    const fs::path p = acceptance_root() / "reference.json";
    std::ofstream out(p);
    out << R"({
  "domain": {"a": 0.0, "b": 1.0, "n": 256},
  "exponents": {"p": 2.0, "s": 0.5},
  "reaction": {"kind": "power", "q": 4.0, "r": 4.0, "c0": 1.0},
  "solver": {"tol": 1e-8, "max_iter": 20000, "path_nodes": 21,
             "multistart_count": 64, "seed": 20240601, "phi_floor": -1e8,
             "third_strategy": "both"},
  "outputs": {"dir": "out", "emit_traces": false}
})";
    return p;
  }();
  return path;
}

struct SolveRun {
  int exit_code = -1;
  fs::path out;
  json report;
  State u_plus, u_minus, u_third;
  bool has_third = false;
};

State load_profile(const fs::path& file) {
  const CsvTable table = read_csv(file.string());
  State u(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) u[i] = table.rows[i][1];
  return u;
}

SolveRun run_reference_solve(const fs::path& out) {
  SolveRun run;
  run.out = out;
  fs::remove_all(out);
  run.exit_code = cli::dispatch({"solve", "--config",
                                 reference_config_path().string(), "--out",
                                 out.string()});
  if (fs::exists(out / "report.json")) {
    std::ifstream in(out / "report.json");
    in >> run.report;
  }
  if (fs::exists(out / "u_plus.csv")) run.u_plus = load_profile(out / "u_plus.csv");
  if (fs::exists(out / "u_minus.csv"))
    run.u_minus = load_profile(out / "u_minus.csv");
  if (fs::exists(out / "u_third.csv")) {
    run.u_third = load_profile(out / "u_third.csv");
    run.has_third = true;
  }
  return run;
}

const SolveRun& shared_solve() {
  static SolveRun run = run_reference_solve(acceptance_root() / "solve");
  return run;
}

const json* find_point(const json& report, const std::string& name) {
  if (!report.contains("critical_points")) return nullptr;
  for (const auto& cp : report["critical_points"])
    if (cp["name"] == name) return &cp;
  return nullptr;
}

}  // namespace

TEST_CASE("criterion 01: gradient consistency across p") {
  Criterion c("01");
  std::mt19937_64 rng(0xace01);
  struct Setup {
    double p, s, q;
    int count;
  };
  const Setup setups[] = {{1.5, 0.5, 3.0, 34}, {2.0, 0.4, 4.0, 33},
                          {3.0, 0.25, 4.5, 33}};
  double worst = 0.0;
  for (const auto& setup : setups) {
    const Grid g = build_grid(0.0, 1.0, 48, setup.s, setup.p);
    const KernelWeights k = kernel_weights(g);
    const ReactionSpec spec = make_power_reaction(setup.q, setup.p);
    const double limit = setup.p >= 2.0 ? 1e-6 : 1e-4;
    for (int trial = 0; trial < setup.count; ++trial) {
      const State u = oracles::random_state(g.n, rng);
      const State gv = grad_phi(g, k, spec, u);
      State fd(g.n);
      for (int i = 0; i < g.n; ++i) {
        const double delta = 1e-6 * std::max(1.0, std::abs(u[i]));
        State up = u, um = u;
        up[i] += delta;
        um[i] -= delta;
        fd[i] = (phi(g, k, spec, up) - phi(g, k, spec, um)) / (2.0 * delta);
      }
      const double rel = (fd - gv).norm() / gv.norm();
      worst = std::max(worst, rel / limit);
      ACC_CHECK(c, rel <= limit);
    }
  }
  c.note("worst rel. error at " + std::to_string(worst) + " of its limit");
}

TEST_CASE("criterion 02: cone inequality") {
  Criterion c("02");
  auto& L = ref();
  std::mt19937_64 rng(0xace02);
  double worst_slack = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const State u = oracles::random_state(L.g.n, rng, 2.0);
    const State au = apply_operator(L.g, L.k, u);
    const State up = u.cwiseMax(0.0);
    const State um = (-u).cwiseMax(0.0);
    const double pair_p = au.dot(up);
    const double pair_m = au.dot(-um);
    const double ep = seminorm_p(L.g, L.k, up);
    const double em = seminorm_p(L.g, L.k, um);
    ACC_CHECK(c, ep <= pair_p + 1e-12 * std::max(1.0, std::abs(pair_p)));
    ACC_CHECK(c, em <= pair_m + 1e-12 * std::max(1.0, std::abs(pair_m)));
    worst_slack = std::max({worst_slack, ep - pair_p, em - pair_m});
  }
  c.note("max E(u^+/-) - pairing = " + std::to_string(worst_slack));
}

TEST_CASE("criterion 03: eigen oracle sweep") {
  Criterion c("03");
  double worst = 0.0;
  for (int n : {64, 128, 256}) {
    for (double s : {0.25, 0.5, 0.75}) {
      const Grid g = build_grid(0.0, 1.0, n, s, 2.0, false);
      const KernelWeights k = kernel_weights(g);
      const EigenResult er = principal_eigenpair(g, k, kTol);
      ACC_CHECK(c, er.converged);
      const DenseSpectrum dense = dense_spectrum_p2(g, k, 2);
      const double rel =
          std::abs(er.pair.lambda1 - dense.values[0]) / dense.values[0];
      worst = std::max(worst, rel);
      ACC_CHECK(c, rel <= 1e-8);
      ACC_CHECK(c, er.pair.e1.minCoeff() > 0.0);
      double hopf = std::numeric_limits<double>::infinity();
      for (int i = 0; i < g.n; ++i)
        hopf = std::min(hopf, er.pair.e1[i] / k.ds[i]);
      ACC_CHECK(c, hopf > 0.0);
      ACC_CHECK(c, dense.gap > 0.0);
    }
  }
  c.note("worst relative lambda1 gap " + std::to_string(worst));
}

TEST_CASE("criterion 04: local-minimum ring") {
  Criterion c("04");
  auto& L = ref();
  const EigenResult er = principal_eigenpair(L.g, L.k, kTol);
  ACC_CHECK(c, er.converged);
  const double eps = er.pair.lambda1 / (2.0 * L.g.p);
  const double delta = small_f_delta(L.spec, eps);
  ACC_CHECK(c, delta > 0.0);
  const double rho = delta / std::pow(L.g.diam(), L.g.s);
  std::mt19937_64 rng(0xace04);
  int violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    State u(L.g.n);
    for (int i = 0; i < L.g.n; ++i)
      u[i] = rho * L.k.ds[i] * (2.0 * uniform01(rng) - 1.0);
    if (!(phi(L.g, L.k, L.spec, u) >= 0.0)) ++violations;
  }
  ACC_CHECK(c, violations == 0);
  c.note("ring radius " + std::to_string(rho) + ", violations " +
         std::to_string(violations) + "/500");
}

TEST_CASE("criterion 05: superlinearity ray") {
  Criterion c("05");
  auto& L = ref();
  const EigenResult er = principal_eigenpair(L.g, L.k, kTol);
  ACC_CHECK(c, er.converged);
  int first_negative = -1;
  double prev = 0.0;
  bool decreasing_past = true;
  for (int kstep = 0; kstep <= 20; ++kstep) {
    const double val =
        phi(L.g, L.k, L.spec, State(std::pow(2.0, kstep) * er.pair.e1));
    if (first_negative < 0 && val < 0.0) first_negative = kstep;
    if (first_negative >= 0 && kstep > first_negative && !(val < prev))
      decreasing_past = false;
    prev = val;
  }
  ACC_CHECK(c, first_negative >= 0);
  ACC_CHECK(c, first_negative <= 20);
  ACC_CHECK(c, decreasing_past);
  c.note("phi(2^k e1) < 0 from k = " + std::to_string(first_negative));
}

TEST_CASE("criterion 06: constant-sign solutions") {
  Criterion c("06");
  const SolveRun& run = shared_solve();
  ACC_CHECK(c, run.exit_code == 0);
  const json* plus = find_point(run.report, "u_plus");
  const json* minus = find_point(run.report, "u_minus");
  ACC_CHECK(c, plus != nullptr);
  ACC_CHECK(c, minus != nullptr);
  if (plus && minus) {
    ACC_CHECK(c, (*plus)["sign_class"] == "positive");
    ACC_CHECK(c, (*plus)["hopf_ratio"].get<double>() > 0.0);
    ACC_CHECK(c, (*plus)["value"].get<double>() > 0.0);
    ACC_CHECK(c, (*plus)["residual"].get<double>() <= 2e-8);
    ACC_CHECK(c, (*minus)["sign_class"] == "negative");
    ACC_CHECK(c, (*minus)["hopf_ratio"].get<double>() < 0.0);
    ACC_CHECK(c, (*minus)["value"].get<double>() > 0.0);
    ACC_CHECK(c, (*minus)["residual"].get<double>() <= 2e-8);
  }
  const double mirror =
      (run.u_plus + run.u_minus).norm() / run.u_plus.norm();
  ACC_CHECK(c, mirror <= 1e-5);
  c.note("|u- + u+|/|u+| = " + std::to_string(mirror));
}

TEST_CASE("criterion 07: third solution") {
  Criterion c("07");
  const SolveRun& run = shared_solve();
  ACC_CHECK(c, run.exit_code == 0);
  ACC_CHECK(c, run.has_third);
  if (run.has_third) {
    auto& L = ref();
    const double scale = l2_norm(L.g, run.u_plus);
    const double d0 = l2_norm(L.g, run.u_third) / scale;
    const double dp = l2_norm(L.g, State(run.u_third - run.u_plus)) / scale;
    const double dm = l2_norm(L.g, State(run.u_third - run.u_minus)) / scale;
    ACC_CHECK(c, d0 > 1e-2);
    ACC_CHECK(c, dp > 1e-2);
    ACC_CHECK(c, dm > 1e-2);
    const json* third = find_point(run.report, "u_third");
    ACC_CHECK(c, third != nullptr);
    if (third) ACC_CHECK(c, (*third)["residual"].get<double>() <= 1e-8);
    if (run.report.contains("third") &&
        run.report["third"]["strategy"] == "path") {
      const double level = run.report["third"]["path_level"].get<double>();
      const double vp = (*find_point(run.report, "u_plus"))["value"].get<double>();
      const double vm = (*find_point(run.report, "u_minus"))["value"].get<double>();
      ACC_CHECK(c, level >= std::max(vp, vm) - 1e-8);
    }
    c.note("distances/scale: to 0 " + std::to_string(d0) + ", to u+ " +
           std::to_string(dp) + ", to u- " + std::to_string(dm));
  }
}

TEST_CASE("criterion 08: morse indices at the reference configuration") {
  Criterion c("08");
  const SolveRun& run = shared_solve();
  ACC_CHECK(c, run.exit_code == 0);
  const json* zero = find_point(run.report, "zero");
  const json* plus = find_point(run.report, "u_plus");
  const json* minus = find_point(run.report, "u_minus");
  const bool all_present = zero && plus && minus;
  ACC_CHECK(c, all_present);
  if (all_present) {
    ACC_CHECK(c, (*zero)["morse_index"].get<int>() == 0);
    ACC_CHECK(c, !(*zero)["degenerate"].get<bool>());
    ACC_CHECK(c, (*plus)["morse_index"].get<int>() == 1);
    ACC_CHECK(c, !(*plus)["degenerate"].get<bool>());
    ACC_CHECK(c, (*minus)["morse_index"].get<int>() == 1);
    ACC_CHECK(c, !(*minus)["degenerate"].get<bool>());
    c.note("indices 0/1/1 measured, nondegenerate");
  }
}

TEST_CASE("criterion 09: signed-count audit") {
  Criterion c("09");
  const SolveRun& run = shared_solve();
  ACC_CHECK(c, run.exit_code == 0);

  // audit of the constant-sign pair only: the count must flag a missing point
  const fs::path partial = acceptance_root() / "audit_partial";
  fs::remove_all(partial);
  fs::create_directories(partial);
  fs::copy_file(run.out / "u_plus.csv", partial / "u_plus.csv");
  fs::copy_file(run.out / "u_minus.csv", partial / "u_minus.csv");
  const fs::path partial_out = acceptance_root() / "audit_partial_out";
  const int code_partial =
      cli::dispatch({"audit", "--config", reference_config_path().string(),
                     "--inventory", partial.string(), "--out",
                     partial_out.string()});
  ACC_CHECK(c, code_partial == cli::kExitAuditIncomplete);
  {
    std::ifstream in(partial_out / "report.json");
    json rep;
    in >> rep;
    ACC_CHECK(c, rep["audit"]["signed_sum"].get<int>() == -1);
  }

  // full inventory: the count closes
  const fs::path full = acceptance_root() / "audit_full";
  fs::remove_all(full);
  fs::create_directories(full);
  for (const char* f : {"u_plus.csv", "u_minus.csv", "u_third.csv"})
    fs::copy_file(run.out / f, full / f);
  const fs::path full_out = acceptance_root() / "audit_full_out";
  const int code_full =
      cli::dispatch({"audit", "--config", reference_config_path().string(),
                     "--inventory", full.string(), "--out", full_out.string()});
  ACC_CHECK(c, code_full == cli::kExitOk);
  {
    std::ifstream in(full_out / "report.json");
    json rep;
    in >> rep;
    ACC_CHECK(c, rep["audit"]["signed_sum"].get<int>() == 0);
  }

  // coarse-grid brute force: the criterion asserts a vanishing signed sum for
  // the complete n = 4 inventory
  const Grid g4 = build_grid(0.0, 1.0, 4, 0.5, 2.0, false);
  const KernelWeights k4 = kernel_weights(g4);
  const ReactionSpec spec4 = make_power_reaction(4.0, 2.0);
  auto inventory = multistart_inventory(g4, k4, spec4, 10000, 0xace09, 1e-10, 3.0);
  long long signed_sum = 0;
  int degenerate = 0;
  for (auto& cp : inventory) {
    const MorseIndex mi = morse_index(g4, k4, spec4, cp);
    if (mi.degenerate) {
      ++degenerate;
      continue;
    }
    signed_sum += (mi.index % 2 == 0) ? 1 : -1;
  }
  ACC_CHECK(c, degenerate == 0);
  ACC_CHECK(c, signed_sum == 0);
  c.note("audit exits 5/0 with sums -1/0; brute force found " +
         std::to_string(inventory.size()) + " points, signed sum " +
         std::to_string(signed_sum) +
         " (an anti-coercive functional on R^n forces (-1)^n here)");
}

TEST_CASE("criterion 10: byte-stable outputs") {
  Criterion c("10");
  const SolveRun a = run_reference_solve(acceptance_root() / "det_a");
  const SolveRun b = run_reference_solve(acceptance_root() / "det_b");
  ACC_CHECK(c, a.exit_code == 0);
  ACC_CHECK(c, b.exit_code == 0);
  for (const char* f :
       {"eigen.csv", "u_plus.csv", "u_minus.csv", "u_third.csv"}) {
    std::ifstream fa(a.out / f, std::ios::binary);
    std::ifstream fb(b.out / f, std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    const bool same = sa.str() == sb.str() && !sa.str().empty();
    ACC_CHECK(c, same);
  }
  json ra = a.report, rb = b.report;
  ra.erase("wall_times");
  rb.erase("wall_times");
  ACC_CHECK(c, ra.dump() == rb.dump());
  c.note("two seeded runs compared byte-for-byte (wall_times excluded)");
}
