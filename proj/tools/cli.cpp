#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <rag/rag.hpp>

namespace rag::cli {

namespace {

// RAG_THREADS overrides the worker count for experiment runs
int thread_count() {
  if (const char* env = std::getenv("RAG_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

struct CommonFlags {
  std::string welfare_file;
  std::string utility_file;
  std::string game_file;
  std::string out_file;
  std::string format = "json";
  int b = 0;
  double c = -1.0;
  int nmax = kDefaultNMax;
};

WelfareRule welfare_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open welfare file: " + path);
  json j;
  try { in >> j; } catch (const json::exception& e) {
    throw ValidationError(std::string("welfare file: ") + e.what());
  }
  WelfareRule w;
  try {
    w.values = j.at("values").get<std::vector<double>>();
    w.label = j.value("name", path);
    if (j.contains("flags"))
      for (const auto& fl : j.at("flags")) {
        if (fl == "submodular") w.submodular = true;
        if (fl == "supermodular") w.supermodular = true;
      }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("welfare file: ") + e.what());
  }
  w.n_max = static_cast<int>(w.values.size()) - 1;
  w.validate();
  return w;
}

UtilityRule utility_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open utility file: " + path);
  json j;
  try { in >> j; } catch (const json::exception& e) {
    throw ValidationError(std::string("utility file: ") + e.what());
  }
  UtilityRule f;
  try {
    std::vector<double> vals = j.at("values").get<std::vector<double>>();
    f.values.assign(1, 0.0);
    f.values.insert(f.values.end(), vals.begin(), vals.end());
    f.n_max = static_cast<int>(vals.size());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("utility file: ") + e.what());
  }
  f.validate();
  return f;
}

// --welfare FILE wins; otherwise --b/--c build a b-covering rule
WelfareRule resolve_welfare(const CommonFlags& flags) {
  if (!flags.welfare_file.empty()) return welfare_from_file(flags.welfare_file);
  if (flags.b >= 1 && flags.c >= 0.0) return b_covering(flags.b, flags.c, flags.nmax);
  throw ValidationError("need --welfare FILE or --b/--c");
}

void emit(const json& j, const CommonFlags& flags, std::ostream& out) {
  std::ostringstream body;
  if (flags.format == "json") {
    body << j.dump(2) << "\n";
  } else if (flags.format == "csv") {
    // flat key,value rows; arrays expand to key,index,value
    body << "key,index,value\n";
    for (const auto& [key, val] : j.items()) {
      if (val.is_array()) {
        int idx = 0;
        for (const auto& v : val) body << key << "," << ++idx << "," << v.dump() << "\n";
      } else if (val.is_object()) {
        for (const auto& [k2, v2] : val.items()) body << key << "." << k2 << ",," << v2.dump() << "\n";
      } else {
        body << key << ",," << val.dump() << "\n";
      }
    }
  } else {
    throw ValidationError("unknown format: " + flags.format);
  }
  if (!flags.out_file.empty()) {
    std::ofstream f(flags.out_file);
    if (!f) throw ValidationError("cannot open output file: " + flags.out_file);
    f << body.str();
  } else {
    out << body.str();
  }
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_welfare = true) {
  cmd->add_option("--out", flags.out_file, "write the result to FILE");
  cmd->add_option("--format", flags.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--nmax", flags.nmax, "table truncation");
  if (with_welfare) {
    cmd->add_option("--welfare", flags.welfare_file, "welfare rule file");
    cmd->add_option("--b", flags.b, "b-covering basis index");
    cmd->add_option("--c", flags.c, "curvature in [0,1]");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"resource allocation game toolkit"};
  app.require_subcommand(1);
  CommonFlags flags;

  // ---- design ----------------------------------------------------------
  CLI::App* design = app.add_subcommand("design", "synthesize utility rules");
  design->require_subcommand(1);

  int trunc_y = 40, trunc_z = 40;
  CLI::App* d_optimal = design->add_subcommand("optimal", "one-round-optimal rule via the design program");
  add_common(d_optimal, flags);
  d_optimal->add_option("--y", trunc_y, "constraint truncation in y");
  d_optimal->add_option("--z", trunc_z, "constraint truncation in z");
  d_optimal->callback([&] {
    DesignResult r = optimal_utility_lp(resolve_welfare(flags), trunc_y, trunc_z, flags.nmax);
    emit(design_to_json(r), flags, out);
  });

  CLI::App* d_curv = design->add_subcommand("curvature", "closed-form optimal rule for b-covering");
  add_common(d_curv, flags);
  d_curv->callback([&] {
    if (flags.b < 1 || flags.c < 0.0) throw ValidationError("design curvature needs --b and --c");
    DesignResult r = bcovering_optimal_f(flags.b, flags.c, flags.nmax);
    json j = design_to_json(r);
    j["one_round_optimal"] = optimal_one_round_curvature(flags.c);
    j["greedy_guarantee"] = greedy_guarantee(flags.c);
    emit(j, flags, out);
  });

  auto rule_json = [](const std::string& method, const UtilityRule& f) {
    std::vector<double> vals(f.values.begin() + 1, f.values.end());
    return json{{"method", method}, {"f", vals}};
  };

  CLI::App* d_mc = design->add_subcommand("mc", "marginal-contribution rule");
  add_common(d_mc, flags);
  d_mc->callback([&] {
    WelfareRule w = resolve_welfare(flags);
    json j = rule_json("marginal-contribution", mc_utility(w));
    if (w.submodular && w.n_max >= 2) j["guarantee"] = greedy_guarantee(curvature(w));
    emit(j, flags, out);
  });

  CLI::App* d_shap = design->add_subcommand("shapley", "equal-split rule");
  add_common(d_shap, flags);
  d_shap->callback([&] {
    emit(rule_json("shapley", shapley_utility(resolve_welfare(flags))), flags, out);
  });

  CLI::App* d_const = design->add_subcommand("constant", "all-ones rule");
  add_common(d_const, flags, /*with_welfare=*/false);
  d_const->callback([&] {
    emit(rule_json("constant", constant_utility(flags.nmax)), flags, out);
  });

  CLI::App* d_poa = design->add_subcommand("poa", "asymptotically optimal rule");
  add_common(d_poa, flags);
  d_poa->callback([&] {
    if (flags.b < 1) throw ValidationError("design poa needs --b");
    emit(design_to_json(poa_optimal_f(flags.b, flags.nmax)), flags, out);
  });

  double chi = -1.0;
  CLI::App* d_pareto = design->add_subcommand("pareto", "trade-off rule for a poa target 1/(1+chi)");
  add_common(d_pareto, flags, /*with_welfare=*/false);
  d_pareto->add_option("--chi", chi, "poa slack parameter, >= 1/(e-1)")->required();
  d_pareto->callback([&] {
    DesignResult r;
    r.f = pareto_utility(chi, flags.nmax);
    r.method = "pareto";
    r.params = {{"chi", chi}};
    r.beta = 1.0 / pob_setcover_formula(r.f, flags.nmax);
    emit(design_to_json(r), flags, out);
  });

  // ---- eff -------------------------------------------------------------
  CLI::App* eff = app.add_subcommand("eff", "efficiency metrics");
  eff->require_subcommand(1);

  int k_rounds = 1, n_agents = 2, n1 = 12;
  double tol = 1e-9;
  std::string traj_file;
  CLI::App* e_walk = eff->add_subcommand("walk", "exhaustive pob(G;k) of a game file");
  add_common(e_walk, flags, /*with_welfare=*/false);
  e_walk->add_option("--game", flags.game_file, "game file")->required();
  e_walk->add_option("--k", k_rounds, "rounds");
  e_walk->add_option("--tol", tol, "tie tolerance");
  e_walk->add_option("--traj", traj_file, "dump a first-index walk trajectory CSV");
  e_walk->callback([&] {
    ResourceGame game = load_game(flags.game_file);
    EfficiencyReport rep = pob_exhaustive(game, k_rounds, tol);
    if (!traj_file.empty()) {
      std::ofstream f(traj_file);
      if (!f) throw ValidationError("cannot open trajectory file: " + traj_file);
      trajectory_to_csv(game, round_robin_walk(game, k_rounds, {TieMode::first_index, tol}), f);
    }
    emit(report_to_json(rep), flags, out);
  });

  CLI::App* e_lp = eff->add_subcommand("lp", "one-round efficiency of (w, f) via the tractable program");
  add_common(e_lp, flags);
  e_lp->add_option("--utility", flags.utility_file, "utility rule file")->required();
  e_lp->add_option("--y", trunc_y, "truncation in y");
  e_lp->add_option("--z", trunc_z, "truncation in z");
  e_lp->callback([&] {
    double beta = pob_dual_lp(resolve_welfare(flags), utility_from_file(flags.utility_file),
                              trunc_y, trunc_z);
    emit(json{{"beta", beta}, {"pob", 1.0 / beta}}, flags, out);
  });

  CLI::App* e_primal = eff->add_subcommand("primal", "fixed-n one-round efficiency (n <= 3)");
  add_common(e_primal, flags);
  e_primal->add_option("--utility", flags.utility_file)->required();
  e_primal->add_option("--n", n_agents, "agents");
  e_primal->callback([&] {
    double pob = pob_primal_lp(resolve_welfare(flags), utility_from_file(flags.utility_file), n_agents);
    emit(json{{"pob", pob}, {"n", n_agents}}, flags, out);
  });

  CLI::App* e_poa = eff->add_subcommand("poa", "price of anarchy: exact on --game, program on (w, f)");
  add_common(e_poa, flags);
  e_poa->add_option("--game", flags.game_file, "game file for exact enumeration");
  e_poa->add_option("--utility", flags.utility_file, "utility rule file for the program");
  e_poa->add_option("--n1", n1, "index truncation for the program");
  e_poa->callback([&] {
    if (!flags.game_file.empty()) {
      emit(report_to_json(poa_exact(load_game(flags.game_file))), flags, out);
    } else {
      double poa = poa_lp(resolve_welfare(flags), utility_from_file(flags.utility_file), n1);
      emit(json{{"poa", poa}, {"n1", n1}}, flags, out);
    }
  });

  CLI::App* e_setcover = eff->add_subcommand("setcover", "set-covering closed forms for a utility rule");
  add_common(e_setcover, flags, /*with_welfare=*/false);
  e_setcover->add_option("--utility", flags.utility_file)->required();
  e_setcover->callback([&] {
    UtilityRule f = utility_from_file(flags.utility_file);
    json j{{"pob", pob_setcover_formula(f, flags.nmax)}};
    if (flags.nmax >= 2) j["poa"] = poa_setcover_formula(f, flags.nmax);
    emit(j, flags, out);
  });

  // ---- frontier ----------------------------------------------------------
  double q_target = 0.5;
  int jmax = 200;
  CLI::App* frontier = app.add_subcommand("frontier", "set-covering trade-off frontier value");
  add_common(frontier, flags, /*with_welfare=*/false);
  frontier->add_option("--q", q_target, "poa target in [1/2, 1-1/e]")->required();
  frontier->add_option("--jmax", jmax, "series truncation");
  frontier->callback([&] {
    FrontierResult r = pareto_frontier(q_target, jmax);
    emit(json{{"q", q_target}, {"pob", r.value}, {"diverged", r.diverged}}, flags, out);
  });

  // ---- construct ---------------------------------------------------------
  CLI::App* construct = app.add_subcommand("construct", "worst-case game instances");
  construct->require_subcommand(1);
  double f2 = 0.0, c_par = 1.0;
  int x_unit = 8, n_par = 3, v_unit = 1000, b_par = 1;

  auto emit_construction = [&](const Construction& con) {
    if (flags.out_file.empty()) {
      out << game_to_json(con.game, &con.spec).dump(2) << "\n";
    } else {
      save_game(flags.out_file, con.game, &con.spec);
      out << "wrote " << flags.out_file << " (claimed bound " << con.spec.claimed_bound << ")\n";
    }
  };

  CLI::App* c_two = construct->add_subcommand("two-agent", "two-agent curvature game");
  add_common(c_two, flags, /*with_welfare=*/false);
  c_two->add_option("--c", c_par)->required();
  c_two->add_option("--f2", f2, "utility value f(2)")->required();
  c_two->add_option("--x", x_unit, "resource block unit");
  c_two->callback([&] { emit_construction(two_agent_curvature_game(c_par, f2, x_unit)); });

  CLI::App* c_chain = construct->add_subcommand("ci-chain", "marginal-contribution chain game");
  add_common(c_chain, flags, /*with_welfare=*/false);
  c_chain->add_option("--n", n_par)->required();
  c_chain->add_option("--c", c_par)->required();
  c_chain->callback([&] { emit_construction(ci_chain_game(n_par, c_par)); });

  CLI::App* c_stack = construct->add_subcommand("stack", "set-covering stack-or-spread game");
  add_common(c_stack, flags, /*with_welfare=*/false);
  c_stack->add_option("--n", n_par)->required();
  c_stack->add_option("--utility", flags.utility_file)->required();
  c_stack->add_option("--v", v_unit, "stack block size");
  c_stack->callback([&] {
    emit_construction(setcover_stack_game(n_par, utility_from_file(flags.utility_file), v_unit));
  });

  CLI::App* c_bad = construct->add_subcommand("poa-bad", "transients of the asymptotically optimal rule");
  add_common(c_bad, flags, /*with_welfare=*/false);
  c_bad->add_option("--n", n_par)->required();
  c_bad->add_option("--b", b_par);
  c_bad->add_option("--v", v_unit);
  c_bad->callback([&] { emit_construction(poa_design_bad_game(n_par, b_par, v_unit)); });

  CLI::App* c_super = construct->add_subcommand("supermodular", "supermodular stack game");
  add_common(c_super, flags);
  c_super->add_option("--n", n_par)->required();
  c_super->callback([&] {
    if (flags.welfare_file.empty()) throw ValidationError("construct supermodular needs --welfare");
    emit_construction(supermodular_stack_game(n_par, welfare_from_file(flags.welfare_file)));
  });

  // ---- experiment ----------------------------------------------------------
  CLI::App* experiment = app.add_subcommand("experiment", "randomized studies");
  experiment->require_subcommand(1);
  SensorConfig cfg;
  std::string replay_file;
  CLI::App* x_sensor = experiment->add_subcommand("sensor", "sensor-coverage design comparison");
  add_common(x_sensor, flags, /*with_welfare=*/false);
  x_sensor->add_option("--seed", cfg.seed);
  x_sensor->add_option("--instances", cfg.n_instances);
  x_sensor->add_option("--agents", cfg.n_agents);
  x_sensor->add_option("--resources", cfg.n_resources);
  x_sensor->add_option("--k", cfg.rounds);
  x_sensor->add_option("--detect", cfg.detect_prob);
  x_sensor->add_option("--replay", replay_file, "write per-instance stream keys");
  x_sensor->callback([&] {
    ExperimentReport rep = run_sensor_experiment(cfg, {SensorDesign::one_round_optimal,
                                                   SensorDesign::marginal_contribution,
                                                   SensorDesign::poa_optimal},
                                            thread_count());
    std::ostringstream csv;
    experiment_to_csv(rep, csv);
    if (!flags.out_file.empty()) {
      std::ofstream f(flags.out_file);
      if (!f) throw ValidationError("cannot open output file: " + flags.out_file);
      f << csv.str();
    } else {
      out << csv.str();
    }
    if (!replay_file.empty()) {
      std::ofstream f(replay_file);
      if (!f) throw ValidationError("cannot open replay file: " + replay_file);
      replay_to_csv(rep, f);
    }
  });

  // ---- game ----------------------------------------------------------------
  CLI::App* game_cmd = app.add_subcommand("game", "game file utilities");
  game_cmd->require_subcommand(1);
  CLI::App* g_validate = game_cmd->add_subcommand("validate", "check a game file against the schema");
  g_validate->add_option("--game", flags.game_file)->required();
  g_validate->callback([&] {
    load_game(flags.game_file);
    out << "ok\n";
  });

  // ---- repro -----------------------------------------------------------------
  CLI::App* repro = app.add_subcommand("repro", "figure data reproduction");
  repro->require_subcommand(1);

  CLI::App* fig2 = repro->add_subcommand("fig2", "guarantees against curvature");
  add_common(fig2, flags, /*with_welfare=*/false);
  fig2->callback([&] {
    std::ostringstream csv;
    csv << "c,one_round_optimal,greedy,asymptotic\n";
    for (int i = 0; i <= 100; ++i) {
      double c = i / 100.0;
      csv << c << "," << optimal_one_round_curvature(c) << "," << greedy_guarantee(c) << ","
          << 1.0 - c / std::exp(1.0) << "\n";
    }
    if (!flags.out_file.empty()) { std::ofstream f(flags.out_file); f << csv.str(); }
    else out << csv.str();
  });

  CLI::App* fig3 = repro->add_subcommand("fig3", "trade-off frontier sweep");
  add_common(fig3, flags, /*with_welfare=*/false);
  fig3->add_option("--jmax", jmax);
  fig3->callback([&] {
    std::ostringstream csv;
    csv << "q,pob,diverged\n";
    const double hi = 1.0 - 1.0 / std::exp(1.0);
    for (int i = 0; i <= 100; ++i) {
      double q = 0.5 + (hi - 0.5) * i / 100.0;
      FrontierResult r = pareto_frontier(q, jmax);
      csv << q << "," << r.value << "," << (r.diverged ? 1 : 0) << "\n";
    }
    if (!flags.out_file.empty()) { std::ofstream f(flags.out_file); f << csv.str(); }
    else out << csv.str();
  });

  CLI::App* fig4 = repro->add_subcommand("fig4", "sensor experiment at reference defaults");
  add_common(fig4, flags, /*with_welfare=*/false);
  fig4->add_option("--seed", cfg.seed);
  fig4->callback([&] {
    SensorConfig ref_cfg;
    ref_cfg.seed = cfg.seed;
    ExperimentReport rep = run_sensor_experiment(ref_cfg,
                                             {SensorDesign::one_round_optimal,
                                              SensorDesign::marginal_contribution,
                                              SensorDesign::poa_optimal},
                                             thread_count());
    std::ostringstream csv;
    experiment_to_csv(rep, csv);
    if (!flags.out_file.empty()) { std::ofstream f(flags.out_file); f << csv.str(); }
    else out << csv.str();
  });

  // ---- dispatch -----------------------------------------------------------
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: validation: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    err << "error: infeasible: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    err << "error: numerical: " << e.what() << "\n";
    return 3;
  } catch (const ResourceLimitError& e) {
    err << "error: resource-limit: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

}  // namespace rag::cli
