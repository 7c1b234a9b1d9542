#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbfe/errors.hpp"
#include "sbfe/formula.hpp"
#include "sbfe/generators.hpp"
#include "sbfe/oracle.hpp"
#include "sbfe/problem.hpp"
#include "sbfe/random.hpp"
#include "sbfe/strategies.hpp"

namespace sbfe {

// ---------------------------------------------------------------------------
// The read-once gap family: k = n/m pairwise disjoint terms of length
// m = round(beta * log2 n), unit costs, uniform distribution. Its optimal
// evaluation cost grows like a power of n while the expected certificate cost
// stays logarithmic.
// ---------------------------------------------------------------------------
struct GapInstance {
  int n = 0;
  double beta = 0.0;
  int m = 0;  // term length
  int k = 0;  // term count
  DnfFormula formula = DnfFormula::constant(0, false);
};

// Direct (n, m) construction: term i owns variables [i*m, (i+1)*m).
inline GapInstance gap_instance_nm(int n, int m) {
  if (m < 1 || n < 1 || n % m != 0)
    throw InvalidInputError("term length must divide n");
  GapInstance inst;
  inst.n = n;
  inst.m = m;
  inst.k = n / m;
  inst.beta = static_cast<double>(m) / std::log2(static_cast<double>(n));
  std::vector<Term> terms;
  for (int t = 0; t < inst.k; ++t) {
    Term term;
    for (int i = 0; i < m; ++i) term.push_back(t * m + i);
    terms.push_back(std::move(term));
  }
  inst.formula = DnfFormula::make(n, std::move(terms));
  return inst;
}

inline int gap_term_length(int n, double beta) {
  return static_cast<int>(std::lround(beta * std::log2(static_cast<double>(n))));
}

inline GapInstance gap_instance(int n, double beta) {
  if (n < 1) throw InvalidInputError("n must be positive");
  const int m = gap_term_length(n, beta);
  if (m < 1) throw InvalidInputError("beta * log2(n) rounds below 1");
  if (n % m != 0) {
    std::vector<int> nearby;
    const auto valid = [&](int cand) {
      const int cm = gap_term_length(cand, beta);
      return cand >= 1 && cm >= 1 && cand % cm == 0;
    };
    for (int delta = 1; delta <= 64 && nearby.size() < 6; ++delta) {
      if (valid(n - delta)) nearby.push_back(n - delta);
      if (nearby.size() < 6 && valid(n + delta)) nearby.push_back(n + delta);
    }
    std::sort(nearby.begin(), nearby.end());
    std::string listed;
    for (int cand : nearby) {
      if (!listed.empty()) listed += ", ";
      listed += std::to_string(cand);
    }
    throw InvalidInputError("term length " + std::to_string(m) + " does not divide n=" +
                            std::to_string(n) + "; nearby valid n: " + listed);
  }
  GapInstance inst = gap_instance_nm(n, m);
  inst.beta = beta;
  return inst;
}

struct GapValues {
  double e_opt = 0.0;
  double e_cert = 0.0;
};

// Closed forms under unit costs and the uniform distribution. Evaluating one
// m-term costs B = 2(1 - 2^-m) in expectation and the terms are evaluated
// until one is satisfied, so
//   E[OPT]  = sum_{i=1..k} B (1 - 2^-m)^{i-1},
//   E[CERT] = k P0 + m (1 - P0) with P0 = (1 - 2^-m)^k
// (0-inputs need one variable per term, 1-inputs one satisfied term).
inline GapValues gap_closed_forms(const GapInstance& inst) {
  const double p_term = std::ldexp(1.0, -inst.m);  // term satisfied: 2^-m
  const double block = 2.0 * (1.0 - p_term);
  GapValues out;
  double survive = 1.0;  // (1 - 2^-m)^(i-1)
  for (int i = 0; i < inst.k; ++i) {
    out.e_opt += block * survive;
    survive *= 1.0 - p_term;
  }
  const double p0 = std::pow(1.0 - p_term, inst.k);
  out.e_cert = inst.k * p0 + inst.m * (1.0 - p0);
  return out;
}

// ---------------------------------------------------------------------------
// Vertex-cover reduction: one 2-variable term per edge, unit costs, and the
// heavily-zero-biased probabilities p = 1 - q, q = (n^2 - 0.5)/n^2. Under
// these, the optimal strategy's path on the all-zero input tests exactly a
// minimum vertex cover.
// ---------------------------------------------------------------------------
inline double cox_probability(int n) {
  if (n < 1) throw InvalidInputError("n must be positive");
  const double nn = static_cast<double>(n) * n;
  return (nn - 0.5) / nn;
}

inline Graph parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  Graph g;
  int edge_count = 0;
  if (!(in >> g.vertices >> edge_count) || g.vertices < 1 || edge_count < 0)
    throw ParseError("graph header must be 'V E' with V >= 1");
  for (int i = 0; i < edge_count; ++i) {
    int u = 0, v = 0;
    if (!(in >> u >> v)) throw ParseError("missing edge line");
    if (u < 1 || v < 1 || u > g.vertices || v > g.vertices)
      throw ParseError("edge endpoint out of range");
    if (u == v) throw ParseError("self-loops are not allowed");
    g.edges.emplace_back(std::min(u, v) - 1, std::max(u, v) - 1);
  }
  std::string leftover;
  if (in >> leftover) throw ParseError("trailing tokens after edges");
  return g;
}

inline EvalProblem vc_reduction(const Graph& g) {
  std::vector<Term> terms;
  for (const auto& [u, v] : g.edges) terms.push_back({u, v});
  DnfFormula f = terms.empty() ? DnfFormula::constant(g.vertices, false)
                               : DnfFormula::make(g.vertices, std::move(terms));
  const double q = cox_probability(g.vertices);
  const auto n = static_cast<std::size_t>(g.vertices);
  return EvalProblem(std::move(f), std::vector<double>(n, 1.0),
                     std::vector<double>(n, 1.0 - q));
}

// Follows the optimal strategy's root-to-leaf path on the all-zero input and
// returns the tested variables: a minimum vertex cover of g.
inline std::vector<int> vertex_cover_demo(const Graph& g) {
  if (g.vertices > 16) throw SizeLimitError("vertex_cover_demo limited to 16 vertices");
  if (g.edges.empty()) return {};
  const EvalProblem prob = vc_reduction(g);
  const OraclePolicy policy = opt_expected_cost(prob);
  PartialAssignment b(prob.n());
  std::vector<int> tested;
  for (int v = policy.next_test(b); v >= 0; v = policy.next_test(b)) {
    tested.push_back(v);
    b.set(v, false);
  }
  std::sort(tested.begin(), tested.end());
  return tested;
}

// ---------------------------------------------------------------------------
// Batch approximation-ratio study: random instances, exact pricing, and the
// per-family bound the ratio is audited against.
// ---------------------------------------------------------------------------
struct RatioFamily {
  enum class Kind { KDnf, KTerm };
  Kind kind = Kind::KDnf;
  int n = 6;
  int k = 2;            // max term size (KDnf) or term count (KTerm)
  double rho_lo = 0.2;  // probabilities drawn from [rho_lo, 1 - rho_lo]
};

struct RatioRow {
  int instance_id = 0;
  int n = 0;
  int k = 0;
  double rho = 0.0;
  double e_cost = 0.0;
  double e_cert = 0.0;
  double e_opt = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
};

inline std::vector<RatioRow> ratio_study(const RatioFamily& family, int instances,
                                         std::uint64_t seed) {
  if (family.n > 12) throw SizeLimitError("ratio_study limited to n <= 12");
  std::vector<RatioRow> rows;
  rows.reserve(static_cast<std::size_t>(instances));
  for (int id = 0; id < instances; ++id) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(id));
    DnfFormula f = family.kind == RatioFamily::Kind::KDnf
                       ? random_monotone_dnf(rng, family.n, family.k, 2 * family.n)
                       : random_monotone_kterm(rng, family.n, family.k, family.n);
    EvalProblem prob = random_problem(rng, std::move(f), 0.1, 10.0, family.rho_lo,
                                      1.0 - family.rho_lo);
    RatioRow row;
    row.instance_id = id;
    row.n = family.n;
    const FormulaClass cls = prob.formula().classify();
    row.rho = prob.rho();
    if (family.kind == RatioFamily::Kind::KDnf) {
      row.k = cls.max_term_size;
      row.e_cost = exact_strategy_cost(prob, make_kdnf_process(prob));
      row.bound = 4.0 / std::pow(row.rho, row.k);
    } else {
      row.k = cls.term_count;
      row.e_cost = exact_strategy_cost(prob, make_kterm_process(prob));
      row.bound = std::max(2.0 * row.k, (2.0 / row.rho) * (1.0 + std::log(row.k)));
    }
    row.e_cert = expected_certificate_cost(prob);
    row.e_opt = opt_expected_cost(prob).expected_cost();
    row.ratio = row.e_cost / row.e_cert;
    rows.push_back(row);
  }
  return rows;
}

inline std::string ratio_rows_csv(const std::vector<RatioRow>& rows) {
  std::string out = "instance_id,n,k,rho,e_cost,e_cert,e_opt,ratio,bound\n";
  char line[256];
  for (const RatioRow& r : rows) {
    std::snprintf(line, sizeof line, "%d,%d,%d,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f\n",
                  r.instance_id, r.n, r.k, r.rho, r.e_cost, r.e_cert, r.e_opt, r.ratio,
                  r.bound);
    out += line;
  }
  return out;
}

}  // namespace sbfe
