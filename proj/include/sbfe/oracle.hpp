#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sbfe/errors.hpp"
#include "sbfe/formula.hpp"
#include "sbfe/problem.hpp"
#include "sbfe/random.hpp"
#include "sbfe/set_cover.hpp"
#include "sbfe/strategies.hpp"

namespace sbfe {

// Comparison tolerance used by the exact-cost machinery and its tests.
inline constexpr double kCostEps = 1e-9;

namespace detail {

// Bitmask view of a formula for fast restricted-value checks, n <= 31.
struct MaskedFormula {
  std::vector<std::uint32_t> terms;
  bool constant_one = false;
  bool constant_zero = false;

  explicit MaskedFormula(const DnfFormula& f) {
    if (f.is_constant()) {
      (f.constant_value() ? constant_one : constant_zero) = true;
      return;
    }
    for (const Term& t : f.terms()) {
      std::uint32_t m = 0;
      for (int v : t) m |= std::uint32_t{1} << v;
      terms.push_back(m);
    }
  }

  // -1: not constant under (zeros, ones); 0/1 otherwise.
  int restricted_value(std::uint32_t zeros, std::uint32_t ones) const {
    if (constant_one) return 1;
    if (constant_zero) return 0;
    bool all_dead = true;
    for (std::uint32_t t : terms) {
      if ((t & zeros) != 0) continue;  // term killed by a 0
      if ((t & ones) == t) return 1;   // term satisfied
      all_dead = false;
    }
    return all_dead ? 0 : -1;
  }
};

inline std::pair<std::uint32_t, std::uint32_t> masks_of(const PartialAssignment& b) {
  std::uint32_t zeros = 0, ones = 0;
  for (int i = 0; i < b.size(); ++i) {
    if (!b.assigned(i)) continue;
    (b.value(i) ? ones : zeros) |= std::uint32_t{1} << i;
  }
  return {zeros, ones};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// opt_expected_cost: exhaustive dynamic program over {0,1,*}^n.
//   OPT(a) = 0 when f|a is constant, else
//   OPT(a) = min_i c_i + p_i OPT(a, i<-1) + (1-p_i) OPT(a, i<-0).
// The returned policy replays the argmins. Guarded at n <= 16 (3^n states).
// ---------------------------------------------------------------------------
class OraclePolicy {
 public:
  explicit OraclePolicy(EvalProblem prob)
      : prob_(checked(std::move(prob))), masked_(prob_.formula()) {
    const int n = prob_.n();
    pow3_.resize(static_cast<std::size_t>(n) + 1);
    pow3_[0] = 1;
    for (int i = 0; i < n; ++i) pow3_[static_cast<std::size_t>(i) + 1] = pow3_[static_cast<std::size_t>(i)] * 3;
    table_.assign(pow3_[static_cast<std::size_t>(n)], std::numeric_limits<double>::quiet_NaN());
    expected_cost_ = solve(0, 0);
  }

  double expected_cost() const { return expected_cost_; }
  const EvalProblem& problem() const { return prob_; }

  // Policy interface: next variable for the state b, or -1 at terminals.
  int next_test(const PartialAssignment& b) const {
    const auto [zeros, ones] = detail::masks_of(b);
    if (masked_.restricted_value(zeros, ones) >= 0) return -1;
    return argmin(zeros, ones);
  }

  int value_at(const PartialAssignment& b) const {
    const auto [zeros, ones] = detail::masks_of(b);
    const int v = masked_.restricted_value(zeros, ones);
    if (v < 0) throw InvalidInputError("state is not terminal");
    return v;
  }

 private:
  // Runs before any bit masks are built: the formula must fit in them.
  static EvalProblem checked(EvalProblem prob) {
    if (prob.n() > 16) throw SizeLimitError("opt_expected_cost limited to n <= 16");
    return prob;
  }

  std::size_t index_of(std::uint32_t zeros, std::uint32_t ones) const {
    std::size_t idx = 0;
    for (int i = 0; i < prob_.n(); ++i) {
      const std::uint32_t bit = std::uint32_t{1} << i;
      const std::size_t digit = (zeros & bit) ? 1 : (ones & bit) ? 2 : 0;
      idx += digit * pow3_[static_cast<std::size_t>(i)];
    }
    return idx;
  }

  double solve(std::uint32_t zeros, std::uint32_t ones) {
    if (masked_.restricted_value(zeros, ones) >= 0) return 0.0;
    const std::size_t idx = index_of(zeros, ones);
    if (!std::isnan(table_[idx])) return table_[idx];
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < prob_.n(); ++i) {
      const std::uint32_t bit = std::uint32_t{1} << i;
      if ((zeros | ones) & bit) continue;
      const double value = prob_.cost(i) + prob_.p(i) * solve(zeros, ones | bit) +
                           prob_.q(i) * solve(zeros | bit, ones);
      if (value < best) best = value;
    }
    table_[idx] = best;
    return best;
  }

  // Re-derives the argmin of a solved state with the same float operations.
  int argmin(std::uint32_t zeros, std::uint32_t ones) const {
    double best = std::numeric_limits<double>::infinity();
    int best_var = -1;
    for (int i = 0; i < prob_.n(); ++i) {
      const std::uint32_t bit = std::uint32_t{1} << i;
      if ((zeros | ones) & bit) continue;
      const double value = prob_.cost(i) + prob_.p(i) * lookup(zeros, ones | bit) +
                           prob_.q(i) * lookup(zeros | bit, ones);
      if (value < best) {
        best = value;
        best_var = i;
      }
    }
    return best_var;
  }

  double lookup(std::uint32_t zeros, std::uint32_t ones) const {
    if (masked_.restricted_value(zeros, ones) >= 0) return 0.0;
    return table_[index_of(zeros, ones)];
  }

  EvalProblem prob_;
  detail::MaskedFormula masked_;
  std::vector<std::size_t> pow3_;
  std::vector<double> table_;
  double expected_cost_ = 0.0;
};

inline OraclePolicy opt_expected_cost(const EvalProblem& prob) {
  return OraclePolicy(prob);
}

// ---------------------------------------------------------------------------
// Min-cost certificate contained in a full assignment. For f(x) = 1 this is
// the cheapest fully-satisfied term; for f(x) = 0 an exact minimum set cover
// over the zero variables.
// ---------------------------------------------------------------------------
struct CertificateResult {
  double cost = 0.0;
  PartialAssignment certificate;
};

inline CertificateResult min_cost_certificate(const EvalProblem& prob,
                                              const PartialAssignment& x) {
  const DnfFormula& f = prob.formula();
  if (x.size() != prob.n() || !x.fully_assigned())
    throw InvalidInputError("min_cost_certificate needs a full assignment");
  if (f.is_constant()) return {0.0, PartialAssignment(prob.n())};

  if (f.evaluate(x)) {
    const Term* best = nullptr;
    double best_cost = 0.0;
    for (const Term& t : f.terms()) {
      bool sat = true;
      for (int v : t)
        if (!x.value(v)) { sat = false; break; }
      if (!sat) continue;
      const double c = detail::term_cost(t, prob);
      if (!best || c < best_cost - kCoverEps ||
          (std::abs(c - best_cost) <= kCoverEps && t < *best)) {
        best = &t;
        best_cost = c;
      }
    }
    PartialAssignment cert(prob.n());
    for (int v : *best) cert.set(v, true);
    return {best_cost, cert};
  }

  std::vector<int> zero_vars;
  for (int i = 0; i < prob.n(); ++i)
    if (!x.value(i)) zero_vars.push_back(i);
  const auto cover = brute_min_cover(build_instance(f, zero_vars, prob.costs()));
  PartialAssignment cert(prob.n());
  for (int v : cover.subset_ids) cert.set(v, false);
  return {cover.weight, cert};
}

// ---------------------------------------------------------------------------
// Expectations over D_p.
// ---------------------------------------------------------------------------
namespace detail {
inline PartialAssignment assignment_from_bits(std::uint32_t bits, int n) {
  PartialAssignment x(n);
  for (int i = 0; i < n; ++i) x.set(i, (bits >> i) & 1u);
  return x;
}
}  // namespace detail

// E[CERT]: exact sum over all 2^n inputs; n <= 16.
inline double expected_certificate_cost(const EvalProblem& prob) {
  const int n = prob.n();
  if (n > 16) throw SizeLimitError("exact E[CERT] limited to n <= 16");
  long double total = 0.0L;
  for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << n); ++bits) {
    const PartialAssignment x = detail::assignment_from_bits(bits, n);
    total += static_cast<long double>(prob.input_probability(x)) *
             min_cost_certificate(prob, x).cost;
  }
  return static_cast<double>(total);
}

struct McStats {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double std_error = 0.0;
};

struct CostReport {
  double expected_cost = 0.0;
  std::optional<McStats> mc;
  // Exact mode only, gated: per-input (probability, incurred cost), 2^n rows.
  std::optional<std::vector<std::tuple<std::string, double, double>>> breakdown;

  nlohmann::json to_json() const {
    nlohmann::json doc{{"expected_cost", expected_cost},
                       {"mode", mc ? "mc" : "exact"}};
    if (mc) {
      doc["trials"] = mc->trials;
      doc["seed"] = mc->seed;
      doc["std_error"] = mc->std_error;
    }
    if (breakdown) {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& [x, pr, cost] : *breakdown)
        rows.push_back({{"x", x}, {"prob", pr}, {"cost", cost}});
      doc["breakdown"] = rows;
    }
    return doc;
  }
};

inline CostReport expected_certificate_cost_mc(const EvalProblem& prob,
                                               std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw InvalidInputError("mc mode needs trials >= 1");
  long double sum = 0.0L, sumsq = 0.0L;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, t);
    PartialAssignment x(prob.n());
    for (int i = 0; i < prob.n(); ++i) x.set(i, rng.bernoulli(prob.p(i)));
    const double c = min_cost_certificate(prob, x).cost;
    sum += c;
    sumsq += static_cast<long double>(c) * c;
  }
  CostReport report;
  report.expected_cost = static_cast<double>(sum / trials);
  const long double var =
      trials > 1 ? (sumsq - sum * sum / trials) / (trials - 1) : 0.0L;
  report.mc = McStats{trials, seed,
                      static_cast<double>(std::sqrt(std::max(var, 0.0L) / trials))};
  return report;
}

// ---------------------------------------------------------------------------
// Strategy pricing. A strategy is any copyable process exposing finished(),
// next_variable(), feed(bool) and cost(). Exact pricing branches on each
// distinct variable the process asks for (re-tests are answered from the
// path, with their charges kept), which traverses the strategy's decision
// structure instead of all 2^n inputs.
// ---------------------------------------------------------------------------
template <class Process>
double exact_strategy_cost(const EvalProblem& prob, const Process& prototype) {
  if (prob.n() > 16) throw SizeLimitError("exact pricing limited to n <= 16");
  std::vector<std::int8_t> known(static_cast<std::size_t>(prob.n()), -1);
  const auto walk = [&](auto&& self, Process proc) -> double {
    while (!proc.finished()) {
      const int v = proc.next_variable();
      const auto vi = static_cast<std::size_t>(v);
      if (known[vi] >= 0) {
        proc.feed(known[vi] == 1);
        continue;
      }
      Process high = proc;
      known[vi] = 1;
      high.feed(true);
      const double e1 = self(self, std::move(high));
      known[vi] = 0;
      proc.feed(false);
      const double e0 = self(self, std::move(proc));
      known[vi] = -1;
      return prob.p(v) * e1 + prob.q(v) * e0;
    }
    return proc.cost();
  };
  return walk(walk, prototype);
}

// Reference pricing by full input enumeration; n <= 16. Exists to cross-check
// exact_strategy_cost, and to emit the optional per-input breakdown.
template <class Process>
CostReport enumerate_strategy_cost(const EvalProblem& prob, const Process& prototype,
                                   bool with_breakdown = false) {
  const int n = prob.n();
  if (n > 16) throw SizeLimitError("enumeration pricing limited to n <= 16");
  CostReport report;
  if (with_breakdown) report.breakdown.emplace();
  long double total = 0.0L;
  for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << n); ++bits) {
    const PartialAssignment x = detail::assignment_from_bits(bits, n);
    Process proc = prototype;
    while (!proc.finished()) proc.feed(x.value(proc.next_variable()));
    const double pr = prob.input_probability(x);
    total += static_cast<long double>(pr) * proc.cost();
    if (with_breakdown) report.breakdown->emplace_back(x.to_string(), pr, proc.cost());
  }
  report.expected_cost = static_cast<double>(total);
  return report;
}

// Monte-Carlo pricing with counter-derived per-trial streams.
template <class Process>
CostReport mc_strategy_cost(const EvalProblem& prob, const Process& prototype,
                            std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw InvalidInputError("mc mode needs trials >= 1");
  long double sum = 0.0L, sumsq = 0.0L;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, t);
    PartialAssignment x(prob.n());
    for (int i = 0; i < prob.n(); ++i) x.set(i, rng.bernoulli(prob.p(i)));
    Process proc = prototype;
    while (!proc.finished()) proc.feed(x.value(proc.next_variable()));
    sum += proc.cost();
    sumsq += static_cast<long double>(proc.cost()) * proc.cost();
  }
  CostReport report;
  report.expected_cost = static_cast<double>(sum / trials);
  const long double var =
      trials > 1 ? (sumsq - sum * sum / trials) / (trials - 1) : 0.0L;
  report.mc = McStats{trials, seed,
                      static_cast<double>(std::sqrt(std::max(var, 0.0L) / trials))};
  return report;
}

}  // namespace sbfe
