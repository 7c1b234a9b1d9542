// sbfe: evaluate monotone DNF formulas under test costs and a product
// distribution. Subcommands: eval, compare, gap, vc, ratio-study.
//
// Exit codes: 0 success, 2 parse/usage error, 3 semantic or guard error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbfe/sbfe.hpp"

namespace {

using nlohmann::json;

struct Output {
  std::string path;  // empty: stdout
  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      if (!text.empty() && text.back() != '\n') std::cout << '\n';
      return;
    }
    std::ofstream out(path);
    if (!out) throw sbfe::Error("cannot write output file: " + path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
  }
  void write(const json& doc) const { write(doc.dump(2)); }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

json trace_json(const std::vector<sbfe::TraceStep>& trace) {
  json steps = json::array();
  for (const auto& s : trace)
    steps.push_back({{"owner", s.owner},
                     {"variable", s.variable + 1},
                     {"outcome", s.outcome ? 1 : 0},
                     {"charge", s.charge},
                     {"k0", s.k0},
                     {"k1", s.k1}});
  return steps;
}

json result_json(const sbfe::StrategyResult& r, const sbfe::PartialAssignment& x,
                 bool with_trace) {
  json doc{{"value", r.value},
           {"cost", r.total_cost},
           {"certificate", r.certificate.to_string()},
           {"x", x.to_string()}};
  if (with_trace) doc["trace"] = trace_json(r.trace);
  return doc;
}

sbfe::EvalProblem load(const std::string& formula_path, const std::string& config_path) {
  return sbfe::load_problem(formula_path, config_path);
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------
struct EvalArgs {
  std::string formula, config, strategy = "naive", x_bits, share = "off", format = "json";
  std::string export_tree;  // policy strategies only
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool trace = false;
  Output out;
};

int cmd_eval(const EvalArgs& args) {
  const sbfe::EvalProblem prob = load(args.formula, args.config);
  if (args.strategy == "uniform-dp")
    sbfe::ensure_unit_uniform(prob, "strategy uniform-dp");
  if (!args.export_tree.empty() && args.strategy != "dp" && args.strategy != "uniform-dp" &&
      args.strategy != "oracle")
    throw sbfe::IncompatibleError("--export-tree applies to dp, uniform-dp and oracle");

  sbfe::PartialAssignment x(prob.n());
  json extra = json::object();
  if (!args.x_bits.empty()) {
    if (static_cast<int>(args.x_bits.size()) != prob.n())
      throw sbfe::ParseError("--x must have exactly n=" + std::to_string(prob.n()) + " bits");
    x = sbfe::PartialAssignment::from_bits(args.x_bits);
  } else if (args.seed_given) {
    sbfe::Rng rng(args.seed);
    x = sbfe::sample_input(rng, prob);
    extra["seed"] = args.seed;
  } else {
    throw sbfe::ParseError("eval needs --x or --seed");
  }

  const bool share = args.share == "on";
  const auto run_policy = [&](const auto& policy) {
    if (!args.export_tree.empty()) {
      std::ofstream tree_out(args.export_tree);
      if (!tree_out) throw sbfe::Error("cannot write tree file: " + args.export_tree);
      tree_out << sbfe::policy_to_tree(policy, prob.n()).to_json().dump(2) << "\n";
    }
    auto proc = sbfe::PolicyProcess(prob, policy);
    while (!proc.finished()) proc.feed(x.value(proc.next_variable()));
    return proc.result();
  };

  sbfe::StrategyResult result;
  if (args.strategy == "naive") {
    sbfe::TestOracle oracle(prob, x);
    result = sbfe::naive_strategy(prob, oracle);
  } else if (args.strategy == "kdnf") {
    sbfe::TestOracle oracle(prob, x);
    result = sbfe::kdnf_strategy(prob, oracle, share);
  } else if (args.strategy == "kterm") {
    sbfe::TestOracle oracle(prob, x);
    result = sbfe::kterm_strategy(prob, oracle, share);
  } else if (args.strategy == "dp") {
    result = run_policy(sbfe::optimal_strategy_dp(prob));
  } else if (args.strategy == "uniform-dp") {
    result = run_policy(sbfe::uniform_unit_dp(prob));
  } else if (args.strategy == "oracle") {
    result = run_policy(sbfe::opt_expected_cost(prob));
  } else {
    throw sbfe::IncompatibleError("unknown strategy: " + args.strategy);
  }

  json doc = result_json(result, x, args.trace);
  doc.update(extra);
  if (args.format == "csv") {
    std::string csv = "key,value\n";
    csv += "value," + std::to_string(result.value) + "\n";
    csv += "cost," + fmt(result.total_cost) + "\n";
    csv += "certificate," + result.certificate.to_string() + "\n";
    csv += "x," + x.to_string() + "\n";
    args.out.write(csv);
  } else {
    args.out.write(doc);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------
struct CompareArgs {
  std::string formula, config, strategies = "naive,kdnf,kterm,dp", mode = "exact",
              share = "off", format = "csv";
  std::uint64_t trials = 0, seed = 0;
  bool seed_given = false;
  bool breakdown = false;  // per-input rows, 2^n of them
  Output out;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

int cmd_compare(const CompareArgs& args) {
  const sbfe::EvalProblem prob = load(args.formula, args.config);
  const bool mc = args.mode == "mc";
  if (args.mode != "exact" && args.mode != "mc")
    throw sbfe::ParseError("--mode must be exact or mc");
  if (mc && (args.trials < 1 || !args.seed_given))
    throw sbfe::IncompatibleError("mc mode requires --trials >= 1 and --seed");
  if (args.breakdown && (mc || args.format != "json"))
    throw sbfe::IncompatibleError("--breakdown needs exact mode and --format json");
  const bool share = args.share == "on";
  const std::vector<std::string> names = split_csv(args.strategies);
  // validate the whole request before any pricing work
  for (const auto& name : names) {
    if (name != "naive" && name != "kdnf" && name != "kterm" && name != "dp" &&
        name != "uniform-dp" && name != "oracle")
      throw sbfe::IncompatibleError("unknown strategy: " + name);
    if (name == "uniform-dp") sbfe::ensure_unit_uniform(prob, "strategy uniform-dp");
  }

  json breakdowns = json::object();
  const auto price = [&](const std::string& name, auto process) -> double {
    if (mc) return sbfe::mc_strategy_cost(prob, process, args.trials, args.seed).expected_cost;
    if (args.breakdown) {
      const sbfe::CostReport report = sbfe::enumerate_strategy_cost(prob, process, true);
      breakdowns[name] = report.to_json().at("breakdown");
      return report.expected_cost;
    }
    return sbfe::exact_strategy_cost(prob, process);
  };

  std::optional<sbfe::DpStrategy> dp;
  std::optional<sbfe::UniformUnitStrategy> udp;
  std::optional<sbfe::OraclePolicy> oracle_policy;
  const auto ensure_oracle = [&]() -> const sbfe::OraclePolicy& {
    if (!oracle_policy) oracle_policy.emplace(sbfe::opt_expected_cost(prob));
    return *oracle_policy;
  };

  std::vector<std::pair<std::string, double>> rows;
  for (const auto& name : names) {
    double cost = 0.0;
    if (name == "naive")
      cost = price(name, sbfe::SeekerProcess<sbfe::NaiveSeeker>(prob, sbfe::NaiveSeeker(prob), -1));
    else if (name == "kdnf")
      cost = price(name, sbfe::make_kdnf_process(prob, share));
    else if (name == "kterm")
      cost = price(name, sbfe::make_kterm_process(prob, share));
    else if (name == "dp") {
      if (!dp) dp.emplace(sbfe::optimal_strategy_dp(prob));
      cost = mc || args.breakdown ? price(name, sbfe::PolicyProcess<sbfe::DpStrategy>(prob, *dp))
                                  : dp->expected_cost();
    } else if (name == "uniform-dp") {
      if (!udp) udp.emplace(sbfe::uniform_unit_dp(prob));
      cost = mc || args.breakdown
                 ? price(name, sbfe::PolicyProcess<sbfe::UniformUnitStrategy>(prob, *udp))
                 : udp->expected_cost();
    } else {  // oracle
      cost = mc || args.breakdown
                 ? price(name, sbfe::PolicyProcess<sbfe::OraclePolicy>(prob, ensure_oracle()))
                 : ensure_oracle().expected_cost();
    }
    rows.emplace_back(name, cost);
  }

  const double e_cert =
      mc ? sbfe::expected_certificate_cost_mc(prob, args.trials, args.seed).expected_cost
         : sbfe::expected_certificate_cost(prob);
  std::optional<double> e_opt;
  if (mc) {
    // in sampling mode the exhaustive optimum may be out of reach; omit its row
    try {
      e_opt = ensure_oracle().expected_cost();
    } catch (const sbfe::SizeLimitError&) {
    }
  } else {
    e_opt = ensure_oracle().expected_cost();
  }

  if (args.format == "json") {
    json doc{{"mode", args.mode}, {"e_cert", e_cert}};
    if (e_opt) doc["e_opt"] = *e_opt;
    json list = json::array();
    for (const auto& [name, cost] : rows) {
      json row{{"strategy", name},
               {"e_cost", cost},
               {"ratio_vs_cert", cost / e_cert}};
      if (e_opt) row["ratio_vs_opt"] = cost / *e_opt;
      if (args.breakdown) row["breakdown"] = breakdowns.at(name);
      list.push_back(row);
    }
    doc["strategies"] = list;
    args.out.write(doc);
  } else {
    std::string csv = "strategy,e_cost,ratio_vs_cert,ratio_vs_opt\n";
    for (const auto& [name, cost] : rows)
      csv += name + "," + fmt(cost) + "," + fmt(cost / e_cert) + "," +
             (e_opt ? fmt(cost / *e_opt) : "") + "\n";
    csv += "cert," + fmt(e_cert) + ",,\n";
    if (e_opt) csv += "opt," + fmt(*e_opt) + ",,\n";
    args.out.write(csv);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// gap / vc / ratio-study
// ---------------------------------------------------------------------------
int cmd_gap(int n, double beta, const std::string& format, const Output& out) {
  const sbfe::GapInstance inst = sbfe::gap_instance(n, beta);
  const sbfe::GapValues closed = sbfe::gap_closed_forms(inst);
  json doc{{"n", inst.n},        {"m", inst.m},
           {"k", inst.k},        {"beta", inst.beta},
           {"e_opt", closed.e_opt}, {"e_cert", closed.e_cert},
           {"ratio", closed.e_opt / closed.e_cert}};
  if (inst.n <= 12) {
    const sbfe::EvalProblem prob = sbfe::EvalProblem::with_defaults(inst.formula);
    doc["e_opt_oracle"] = sbfe::opt_expected_cost(prob).expected_cost();
    doc["e_cert_oracle"] = sbfe::expected_certificate_cost(prob);
  }
  if (format == "csv") {
    std::string csv = "key,value\n";
    for (const auto& [key, value] : doc.items())
      csv += key + "," + (value.is_number_float() ? fmt(value.get<double>()) : value.dump()) + "\n";
    out.write(csv);
  } else {
    out.write(doc);
  }
  return 0;
}

int cmd_vc(const std::string& graph_path, const std::string& format, const Output& out) {
  const sbfe::Graph g = sbfe::parse_graph(sbfe::read_text_file(graph_path));
  const std::vector<int> cover = sbfe::vertex_cover_demo(g);
  json vertices = json::array();
  for (int v : cover) vertices.push_back(v + 1);
  if (format == "csv") {
    std::string csv = "vertex\n";
    for (int v : cover) csv += std::to_string(v + 1) + "\n";
    out.write(csv);
  } else {
    out.write(json{{"cover", vertices}, {"size", cover.size()}});
  }
  return 0;
}

int cmd_ratio(const std::string& family, int count, std::uint64_t seed, int n, int k,
              double rho_min, const std::string& format, const Output& out) {
  sbfe::RatioFamily fam;
  if (family == "kdnf") fam.kind = sbfe::RatioFamily::Kind::KDnf;
  else if (family == "kterm") fam.kind = sbfe::RatioFamily::Kind::KTerm;
  else throw sbfe::ParseError("--family must be kdnf or kterm");
  fam.n = n;
  fam.k = k;
  fam.rho_lo = rho_min;
  const auto rows = sbfe::ratio_study(fam, count, seed);
  if (format == "json") {
    json list = json::array();
    for (const auto& r : rows)
      list.push_back({{"instance_id", r.instance_id}, {"n", r.n}, {"k", r.k},
                      {"rho", r.rho}, {"e_cost", r.e_cost}, {"e_cert", r.e_cert},
                      {"e_opt", r.e_opt}, {"ratio", r.ratio}, {"bound", r.bound}});
    out.write(list);
  } else {
    out.write(sbfe::ratio_rows_csv(rows));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic evaluation of monotone DNF formulas"};
  app.require_subcommand(1);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "run one strategy execution on an input");
  eval->add_option("--formula", eval_args.formula, "formula file")->required();
  eval->add_option("--config", eval_args.config, "costs/probs JSON config");
  eval->add_option("--strategy", eval_args.strategy,
                   "naive|kdnf|kterm|dp|uniform-dp|oracle");
  eval->add_option("--x", eval_args.x_bits, "explicit input bits");
  eval->add_option("--seed", eval_args.seed, "sample x from D_p with this seed")
      ->each([&](const std::string&) { eval_args.seed_given = true; });
  eval->add_option("--share", eval_args.share, "on|off: share test results")
      ->check(CLI::IsMember({"on", "off"}));
  eval->add_flag("--trace", eval_args.trace, "include the step trace");
  eval->add_option("--format", eval_args.format)->check(CLI::IsMember({"json", "csv"}));
  eval->add_option("--out", eval_args.out.path, "output file (default stdout)");
  eval->add_option("--export-tree", eval_args.export_tree,
                   "write the policy's decision tree as JSON (dp/uniform-dp/oracle)");

  CompareArgs cmp_args;
  auto* cmp = app.add_subcommand("compare", "expected-cost table for several strategies");
  cmp->add_option("--formula", cmp_args.formula)->required();
  cmp->add_option("--config", cmp_args.config);
  cmp->add_option("--strategies", cmp_args.strategies, "comma-separated list");
  cmp->add_option("--mode", cmp_args.mode, "exact|mc");
  cmp->add_option("--trials", cmp_args.trials);
  cmp->add_option("--seed", cmp_args.seed)->each([&](const std::string&) {
    cmp_args.seed_given = true;
  });
  cmp->add_option("--share", cmp_args.share)->check(CLI::IsMember({"on", "off"}));
  cmp->add_option("--format", cmp_args.format)->check(CLI::IsMember({"json", "csv"}));
  cmp->add_flag("--breakdown", cmp_args.breakdown,
                "attach per-input (probability, cost) rows; exact mode, json only");
  cmp->add_option("--out", cmp_args.out.path);

  int gap_n = 0;
  double gap_beta = 0.5;
  std::string gap_format = "json";
  Output gap_out;
  auto* gap = app.add_subcommand("gap", "opt/cert gap family closed forms");
  gap->add_option("--n", gap_n)->required();
  gap->add_option("--beta", gap_beta)->required();
  gap->add_option("--format", gap_format)->check(CLI::IsMember({"json", "csv"}));
  gap->add_option("--out", gap_out.path);

  std::string vc_graph, vc_format = "json";
  Output vc_out;
  auto* vc = app.add_subcommand("vc", "recover a minimum vertex cover by evaluation");
  vc->add_option("--graph", vc_graph, "graph file: 'V E' then E 'u v' lines")->required();
  vc->add_option("--format", vc_format)->check(CLI::IsMember({"json", "csv"}));
  vc->add_option("--out", vc_out.path);

  std::string rs_family = "kdnf", rs_format = "csv";
  int rs_count = 20, rs_n = 6, rs_k = 2;
  std::uint64_t rs_seed = 0;
  double rs_rho = 0.2;
  Output rs_out;
  auto* rs = app.add_subcommand("ratio-study", "bound audits on random instances");
  rs->add_option("--family", rs_family, "kdnf|kterm");
  rs->add_option("--count", rs_count);
  rs->add_option("--seed", rs_seed);
  rs->add_option("--n", rs_n);
  rs->add_option("--k", rs_k);
  rs->add_option("--rho-min", rs_rho);
  rs->add_option("--format", rs_format)->check(CLI::IsMember({"json", "csv"}));
  rs->add_option("--out", rs_out.path);

  try {
    app.parse(argc, argv);
    if (*eval) return cmd_eval(eval_args);
    if (*cmp) return cmd_compare(cmp_args);
    if (*gap) return cmd_gap(gap_n, gap_beta, gap_format, gap_out);
    if (*vc) return cmd_vc(vc_graph, vc_format, vc_out);
    if (*rs)
      return cmd_ratio(rs_family, rs_count, rs_seed, rs_n, rs_k, rs_rho, rs_format, rs_out);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const sbfe::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sbfe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
