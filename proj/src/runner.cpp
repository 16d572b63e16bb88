#include "fracp/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

namespace fracp::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

json witness_json(const std::vector<Witness>& ws) {
  json arr = json::array();
  for (const auto& w : ws) arr.push_back({{"t", w.t}, {"value", w.value}});
  return arr;
}

json check_json(const HypothesisCheck& c) {
  return {{"verdict", to_string(c.verdict)},
          {"witnesses", witness_json(c.witnesses)},
          {"note", c.note}};
}

json hypotheses_json(const HypothesisReport& rep) {
  return {{"h1", check_json(rep.h1)},
          {"h2", check_json(rep.h2)},
          {"h3", check_json(rep.h3)},
          {"h4", check_json(rep.h4)},
          {"c0_hat", rep.c0_hat},
          {"r_hat", rep.r_hat},
          {"sigma_hat", rep.sigma_hat},
          {"beta_hat", rep.beta_hat},
          {"big_t", rep.big_t},
          {"t_min", rep.t_min},
          {"t_max", rep.t_max},
          {"ar_condition", rep.ar_condition_holds ? "holds" : "violated"}};
}

json critical_point_json(const std::string& name, const CriticalPoint& cp) {
  json j = {{"name", name},
            {"value", cp.value},
            {"residual", cp.residual},
            {"sign_class", to_string(cp.sign_class)},
            {"hopf_ratio", cp.hopf_ratio},
            {"degenerate", cp.degenerate},
            {"converged", cp.converged}};
  if (cp.morse_index.has_value())
    j["morse_index"] = *cp.morse_index;
  else
    j["morse_index"] = nullptr;
  return j;
}

json audit_json(const AuditReport& rep, bool indices_available) {
  json j;
  if (indices_available)
    j["signed_sum"] = rep.signed_sum;
  else
    j["signed_sum"] = 0;
  j["ph_verdict"] = to_string(rep.ph_verdict);
  j["flags"] = rep.flags;
  return j;
}

void write_report(const fs::path& out_dir, const json& report) {
  std::ofstream out(out_dir / "report.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report.json");
  out << report.dump(2) << '\n';
}

void write_profile_csv(const fs::path& path, const Grid& g,
                       const KernelWeights& k, const State& u,
                       const char* value_column) {
  CsvTable table;
  table.columns = {"x", value_column, std::string(value_column) + "_over_ds"};
  table.rows.reserve(g.n);
  for (int i = 0; i < g.n; ++i)
    table.rows.push_back({g.x[i], u[i], u[i] / k.ds[i]});
  write_csv(path.string(), table);
}

void write_trace_csv(const fs::path& path, const std::vector<TraceRow>& trace) {
  CsvTable table;
  table.columns = {"iter", "phi", "residual", "cerami"};
  for (const auto& row : trace)
    table.rows.push_back({double(row.iter), row.phi, row.residual, row.cerami});
  write_csv(path.string(), table);
}

json config_echo(const RunConfig& cfg) {
  return json::parse(cfg.raw_json.empty() ? "{}" : cfg.raw_json);
}

int eigen_budget(const RunConfig& cfg) {
  return std::max(cfg.max_iter, 200000);
}

}  // namespace

int run_eigen(const RunConfig& cfg, const std::string& out_dir) {
  const auto t0 = clock_type::now();
  fs::create_directories(out_dir);

  const Grid g = cfg.make_grid();
  const KernelWeights k = kernel_weights(g);
  const EigenResult er = principal_eigenpair(g, k, cfg.tol, eigen_budget(cfg));

  write_profile_csv(fs::path(out_dir) / "eigen.csv", g, k, er.pair.e1, "e1");

  json report;
  report["config"] = config_echo(cfg);
  report["lambda1"] = er.pair.lambda1;
  report["eigen_residual"] = er.eigen_residual;
  report["eigen_converged"] = er.converged;
  report["eigen_iterations"] = er.iterations;
  report["wall_times"] = {{"total", seconds_since(t0)}};
  write_report(out_dir, report);

  if (!er.converged) {
    std::cerr << "eigen: no convergence after " << er.iterations
              << " iterations (residual " << er.eigen_residual << ")\n";
    return kExitNonconvergence;
  }
  std::cout << "lambda1 = " << er.pair.lambda1 << " (residual "
            << er.eigen_residual << ")\n";
  return kExitOk;
}

int run_verify(const RunConfig& cfg, const std::string& out_dir) {
  const auto t0 = clock_type::now();
  fs::create_directories(out_dir);

  const Grid g = cfg.make_grid();
  const ReactionSpec spec = cfg.make_reaction();
  const HypothesisReport rep = verify_hypotheses(spec, g);

  json report;
  report["config"] = config_echo(cfg);
  report["hypotheses"] = hypotheses_json(rep);
  json flags = json::array();
  if (!rep.ar_condition_holds && rep.all_pass())
    flags.push_back("AR condition violated");
  report["flags"] = flags;
  report["wall_times"] = {{"total", seconds_since(t0)}};
  write_report(out_dir, report);

  std::cout << "hypotheses: h1 " << to_string(rep.h1.verdict) << ", h2 "
            << to_string(rep.h2.verdict) << ", h3 " << to_string(rep.h3.verdict)
            << ", h4 " << to_string(rep.h4.verdict) << "\n";
  return rep.all_pass() ? kExitOk : kExitHypothesesFail;
}

int run_solve(const RunConfig& cfg, const std::string& out_dir) {
  const auto t_total = clock_type::now();
  fs::create_directories(out_dir);
  json report;
  report["config"] = config_echo(cfg);
  json wall = json::object();

  const Grid g = cfg.make_grid();
  const KernelWeights k = kernel_weights(g);
  const ReactionSpec spec = cfg.make_reaction();

  // hypotheses
  auto t0 = clock_type::now();
  const HypothesisReport hyp = verify_hypotheses(spec, g);
  wall["verify"] = seconds_since(t0);
  report["hypotheses"] = hypotheses_json(hyp);
  if (!hyp.all_pass()) {
    report["wall_times"] = wall;
    write_report(out_dir, report);
    std::cerr << "solve: growth hypotheses not satisfied\n";
    return kExitHypothesesFail;
  }

  // principal eigenpair
  t0 = clock_type::now();
  const EigenResult er = principal_eigenpair(g, k, cfg.tol, eigen_budget(cfg));
  wall["eigen"] = seconds_since(t0);
  report["lambda1"] = er.pair.lambda1;
  report["eigen_residual"] = er.eigen_residual;
  write_profile_csv(fs::path(out_dir) / "eigen.csv", g, k, er.pair.e1, "e1");
  if (!er.converged) {
    report["wall_times"] = wall;
    write_report(out_dir, report);
    std::cerr << "solve: eigen solver did not converge\n";
    return kExitNonconvergence;
  }

  // constant-sign pair
  t0 = clock_type::now();
  ConstantSignOptions cs_opt;
  cs_opt.tol = cfg.tol;
  cs_opt.mp.path_nodes = cfg.path_nodes;
  cs_opt.mp.tol = cfg.tol;
  cs_opt.mp.handoff_max_iter = std::max(cfg.max_iter, 1000);
  const ConstantSignResult cs = solve_constant_sign(g, k, spec, er.pair, cs_opt);
  wall["constant_sign"] = seconds_since(t0);

  report["eta_ring_estimate"] = cs.eta_ring_estimate;
  report["c_plus_estimate"] = cs.mp_plus.level;
  report["c_minus_estimate"] = cs.mp_minus.level;
  json flags = json::array();
  for (const auto& f : cs.flags) flags.push_back(f);

  if (!cs.converged) {
    report["flags"] = flags;
    report["wall_times"] = wall;
    write_report(out_dir, report);
    std::cerr << "solve: constant-sign search did not converge\n";
    return kExitNonconvergence;
  }

  write_profile_csv(fs::path(out_dir) / "u_plus.csv", g, k, cs.u_plus.state, "u");
  write_profile_csv(fs::path(out_dir) / "u_minus.csv", g, k, cs.u_minus.state, "u");
  if (cfg.emit_traces) {
    write_trace_csv(fs::path(out_dir) / "trace_u_plus.csv", cs.mp_plus.trace);
    write_trace_csv(fs::path(out_dir) / "trace_u_minus.csv", cs.mp_minus.trace);
  }

  // third solution
  t0 = clock_type::now();
  ThirdOptions third_opt;
  third_opt.tol = cfg.tol;
  third_opt.multistart.count = cfg.multistart_count;
  third_opt.multistart.seed = cfg.seed;
  third_opt.multistart.max_iter = cfg.max_iter;
  third_opt.strategy = cfg.third_strategy;
  third_opt.mp.path_nodes = cfg.path_nodes;
  third_opt.mp.tol = cfg.tol;
  third_opt.mp.handoff_max_iter = std::max(cfg.max_iter, 1000);
  const ThirdResult third =
      third_solution(g, k, spec, cs.u_plus, cs.u_minus, third_opt);
  wall["third"] = seconds_since(t0);

  json third_json;
  third_json["found"] = third.found;
  third_json["strategy"] = third.strategy_used;
  if (third.strategy_used == "path")
    third_json["path_level"] = third.path_level;
  else
    third_json["path_level"] = nullptr;
  third_json["note"] = third.note;
  report["third"] = third_json;
  if (third.found)
    write_profile_csv(fs::path(out_dir) / "u_third.csv", g, k, third.point.state,
                      "u");

  // audit
  t0 = clock_type::now();
  std::vector<CriticalPoint> inventory;
  inventory.push_back(
      make_critical_point(g, k, spec, State::Zero(g.n), true));
  inventory.push_back(cs.u_plus);
  inventory.push_back(cs.u_minus);
  if (third.found) inventory.push_back(third.point);

  const bool indices_available = g.p == 2.0;
  if (indices_available) {
    for (auto& cp : inventory) {
      try {
        const MorseIndex mi = morse_index(g, k, spec, cp);
        cp.morse_index = mi.index;
        cp.degenerate = mi.degenerate;
      } catch (const std::exception&) {
        // left without an index; the audit reports inconclusive
      }
    }
  }
  const AuditReport audit = poincare_hopf_audit(inventory);
  wall["audit"] = seconds_since(t0);

  json cps = json::array();
  const char* names[] = {"zero", "u_plus", "u_minus", "u_third"};
  for (std::size_t i = 0; i < inventory.size(); ++i)
    cps.push_back(critical_point_json(names[i], inventory[i]));
  report["critical_points"] = cps;
  report["audit"] = audit_json(audit, indices_available);
  if (!indices_available)
    report["audit"]["flags"].push_back("morse indices require p = 2");
  report["flags"] = flags;
  wall["total"] = seconds_since(t_total);
  report["wall_times"] = wall;
  write_report(out_dir, report);

  std::cout << "lambda1 = " << er.pair.lambda1 << ", c+ ~ " << cs.mp_plus.level
            << ", c- ~ " << cs.mp_minus.level << ", third "
            << (third.found ? "found" : "not found") << "\n";
  return third.found ? kExitOk : kExitNoThird;
}

int run_audit(const RunConfig& cfg, const std::string& out_dir,
              const std::string& inventory_dir) {
  const auto t0 = clock_type::now();
  fs::create_directories(out_dir);

  const Grid g = cfg.make_grid();
  if (g.p != 2.0) {
    std::cerr << "audit: morse indices require p = 2\n";
    return kExitBadConfig;
  }
  const KernelWeights k = kernel_weights(g);
  const ReactionSpec spec = cfg.make_reaction();

  std::vector<std::pair<std::string, State>> loaded;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(inventory_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("u_", 0) == 0 && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    CsvTable table;
    try {
      table = read_csv(file.string());
    } catch (const std::exception& e) {
      std::cerr << "audit: " << e.what() << "\n";
      return kExitBadConfig;
    }
    if (static_cast<int>(table.rows.size()) != g.n || table.columns.size() < 2) {
      std::cerr << "audit: " << file << " does not match the configured grid\n";
      return kExitBadConfig;
    }
    State u(g.n);
    for (int i = 0; i < g.n; ++i) {
      if (std::abs(table.rows[i][0] - g.x[i]) >
          1e-9 * std::max(1.0, std::abs(g.x[i]))) {
        std::cerr << "audit: " << file << " node positions do not match\n";
        return kExitBadConfig;
      }
      u[i] = table.rows[i][1];
    }
    loaded.emplace_back(file.stem().string(), u);
  }

  std::vector<CriticalPoint> inventory;
  std::vector<std::string> names;
  inventory.push_back(make_critical_point(g, k, spec, State::Zero(g.n), true));
  names.push_back("zero");
  for (const auto& [name, u] : loaded) {
    CriticalPoint cp = make_critical_point(g, k, spec, u, true);
    // solutions are produced with full-energy residual at most twice the
    // solver tolerance; anything beyond that is a stale or foreign file
    if (cp.residual > 2.0 * cfg.tol) {
      std::cerr << "audit: " << name << " residual " << cp.residual
                << " exceeds 2 tol = " << 2.0 * cfg.tol << " (stale file?)\n";
      return kExitBadConfig;
    }
    inventory.push_back(cp);
    names.push_back(name);
  }

  for (auto& cp : inventory) {
    try {
      const MorseIndex mi = morse_index(g, k, spec, cp);
      cp.morse_index = mi.index;
      cp.degenerate = mi.degenerate;
    } catch (const std::exception&) {
      // no index; the audit reports inconclusive
    }
  }

  const AuditReport audit = poincare_hopf_audit(inventory);

  json report;
  report["config"] = config_echo(cfg);
  json cps = json::array();
  for (std::size_t i = 0; i < inventory.size(); ++i)
    cps.push_back(critical_point_json(names[i], inventory[i]));
  report["critical_points"] = cps;
  report["audit"] = audit_json(audit, true);
  report["wall_times"] = {{"total", seconds_since(t0)}};
  write_report(out_dir, report);

  std::cout << "audit: signed sum " << audit.signed_sum << ", verdict "
            << to_string(audit.ph_verdict) << "\n";
  if (audit.ph_verdict == PhVerdict::pass) return kExitOk;
  return kExitAuditIncomplete;
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"desk-scale laboratory for one-dimensional nonlocal "
               "p-Laplacian Dirichlet problems"};
  app.require_subcommand(1);

  std::string config_path, out_override, inventory_dir;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "path to the JSON run config")
        ->required();
    sub->add_option("--out", out_override, "output directory (overrides config)");
    sub->add_option("--threads", threads, "worker count (overrides FRACP_THREADS)");
  };

  CLI::App* cmd_eigen = app.add_subcommand("eigen", "principal eigenpair");
  CLI::App* cmd_verify = app.add_subcommand("verify", "reaction hypotheses");
  CLI::App* cmd_solve = app.add_subcommand("solve", "full solution pipeline");
  CLI::App* cmd_audit = app.add_subcommand("audit", "signed-count audit of saved solutions");
  add_common(cmd_eigen);
  add_common(cmd_verify);
  add_common(cmd_solve);
  add_common(cmd_audit);
  cmd_audit->add_option("--inventory", inventory_dir,
                        "directory with saved u_*.csv files")
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (threads > 0) set_worker_count(threads);

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  }
  const std::string out_dir = out_override.empty() ? cfg.out_dir : out_override;

  try {
    if (cmd_eigen->parsed()) return run_eigen(cfg, out_dir);
    if (cmd_verify->parsed()) return run_verify(cfg, out_dir);
    if (cmd_solve->parsed()) return run_solve(cfg, out_dir);
    if (cmd_audit->parsed()) return run_audit(cfg, out_dir, inventory_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonconvergence;
  }
  return kExitBadConfig;
}

}  // namespace fracp::cli
