#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "sbfe/errors.hpp"
#include "sbfe/formula.hpp"
#include "sbfe/problem.hpp"

namespace sbfe {

// ---------------------------------------------------------------------------
// Sibling classes: variables that appear in exactly the same set of terms.
// Terms of such a formula are unions of whole classes, so a k-term formula has
// at most 2^k - 1 classes. Within a class the optimal test order is by
// decreasing ratio R(i) = (1 - p_i) / c_i (ties by index), and a 0 anywhere in
// a class kills every term the class sits in.
// ---------------------------------------------------------------------------
struct SiblingClass {
  std::vector<int> variables;   // in testing order
  std::uint64_t term_mask = 0;  // terms containing this class
};

struct SiblingDecomposition {
  std::vector<SiblingClass> classes;          // ordered by their leading variable
  std::vector<std::uint32_t> term_classes;    // per term: mask over class ids
};

inline SiblingDecomposition sibling_classes(const EvalProblem& prob) {
  const DnfFormula& f = prob.formula();
  SiblingDecomposition dec;
  if (f.is_constant()) return dec;
  const auto& terms = f.terms();
  if (terms.size() > 64) throw SizeLimitError("sibling decomposition limited to 64 terms");

  std::map<std::uint64_t, std::vector<int>> by_signature;  // keeps members sorted
  std::vector<std::uint64_t> signature(static_cast<std::size_t>(f.n()), 0);
  for (std::size_t t = 0; t < terms.size(); ++t)
    for (int v : terms[t]) signature[static_cast<std::size_t>(v)] |= std::uint64_t{1} << t;
  for (int v = 0; v < f.n(); ++v)
    if (signature[static_cast<std::size_t>(v)] != 0)
      by_signature[signature[static_cast<std::size_t>(v)]].push_back(v);

  std::vector<SiblingClass> classes;
  for (auto& [mask, vars] : by_signature) {
    SiblingClass c;
    c.term_mask = mask;
    c.variables = std::move(vars);
    // Decreasing q/c; cross-multiplied to dodge division. Ties by index, which
    // std::stable_sort preserves from the ascending input.
    std::stable_sort(c.variables.begin(), c.variables.end(), [&](int a, int b) {
      return prob.q(a) * prob.cost(b) > prob.q(b) * prob.cost(a);
    });
    classes.push_back(std::move(c));
  }
  std::sort(classes.begin(), classes.end(), [](const SiblingClass& a, const SiblingClass& b) {
    return a.variables.front() < b.variables.front();
  });

  if (classes.size() > 31) throw SizeLimitError("sibling decomposition limited to 31 classes");
  dec.classes = std::move(classes);
  dec.term_classes.assign(terms.size(), 0);
  for (std::size_t j = 0; j < dec.classes.size(); ++j)
    for (std::size_t t = 0; t < terms.size(); ++t)
      if (dec.classes[j].term_mask & (std::uint64_t{1} << t))
        dec.term_classes[t] |= std::uint32_t{1} << j;
  return dec;
}

namespace detail {

// Shared digit logic for the class-state DPs. A digit d_j encodes class j:
// 0 = untouched, 1..l_j = that many leading variables seen 1, l_j + 1 =
// some variable seen 0 (the class is dead along with its terms).
struct ClassStateSpace {
  std::vector<int> radix;          // l_j + 2
  std::vector<std::uint64_t> stride;
  std::uint64_t states = 1;

  explicit ClassStateSpace(const SiblingDecomposition& dec, std::uint64_t budget) {
    for (const auto& c : dec.classes) radix.push_back(static_cast<int>(c.variables.size()) + 2);
    stride.resize(radix.size());
    for (std::size_t j = 0; j < radix.size(); ++j) {
      stride[j] = states;
      if (radix[j] != 0 && states > budget / static_cast<std::uint64_t>(radix[j]))
        throw SizeLimitError("class-state space exceeds the configured budget");
      states *= static_cast<std::uint64_t>(radix[j]);
    }
  }

  std::uint64_t index(const std::vector<int>& digits) const {
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < digits.size(); ++j)
      idx += stride[j] * static_cast<std::uint64_t>(digits[j]);
    return idx;
  }
};

// Term status under a digit vector: a term is dead if any of its classes is
// blocked, satisfied if all of its classes are fully 1.
inline int restricted_value(const SiblingDecomposition& dec, const std::vector<int>& digits) {
  bool all_dead = true;
  for (std::size_t t = 0; t < dec.term_classes.size(); ++t) {
    bool dead = false, sat = true;
    for (std::uint32_t m = dec.term_classes[t]; m; m &= m - 1) {
      const auto j = static_cast<std::size_t>(std::countr_zero(m));
      const int blocked = static_cast<int>(dec.classes[j].variables.size()) + 1;
      if (digits[j] == blocked) { dead = true; break; }
      if (digits[j] != blocked - 1) sat = false;  // not all 1 yet
    }
    if (dead) continue;
    if (sat) return 1;
    all_dead = false;
  }
  return all_dead ? 0 : -1;
}

// Rule-2 canonicalization: a class all of whose terms are dead is irrelevant;
// collapse it to the blocked digit so equivalent states share an entry.
inline void canonicalize(const SiblingDecomposition& dec, std::vector<int>& digits) {
  std::vector<char> term_dead(dec.term_classes.size(), 0);
  for (std::size_t t = 0; t < dec.term_classes.size(); ++t)
    for (std::uint32_t m = dec.term_classes[t]; m; m &= m - 1) {
      const auto j = static_cast<std::size_t>(std::countr_zero(m));
      if (digits[j] == static_cast<int>(dec.classes[j].variables.size()) + 1) {
        term_dead[t] = 1;
        break;
      }
    }
  for (std::size_t j = 0; j < dec.classes.size(); ++j) {
    bool alive = false;
    for (std::size_t t = 0; t < dec.term_classes.size() && !alive; ++t)
      if (!term_dead[t] && (dec.term_classes[t] & (std::uint32_t{1} << j))) alive = true;
    if (!alive) digits[j] = static_cast<int>(dec.classes[j].variables.size()) + 1;
  }
}

// Digits of a policy-generated partial assignment: any 0 blocks the class,
// otherwise the leading variables of the class order must have been set 1.
inline std::vector<int> digits_of(const SiblingDecomposition& dec, const PartialAssignment& b) {
  std::vector<int> digits(dec.classes.size(), 0);
  for (std::size_t j = 0; j < dec.classes.size(); ++j) {
    const auto& vars = dec.classes[j].variables;
    bool blocked = false;
    int ones = 0;
    for (int v : vars)
      if (b.assigned(v) && !b.value(v)) { blocked = true; break; }
    if (blocked) {
      digits[j] = static_cast<int>(vars.size()) + 1;
      continue;
    }
    for (int v : vars) {
      if (b.assigned(v) && b.value(v)) ++ones;
    }
    digits[j] = ones;
  }
  return digits;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact optimal strategy for monotone k-term DNF, arbitrary costs and probs:
// dynamic program over class states with
//   P[s] = min_j c^j_i + p^j_i P[s, class j advanced] + q^j_i P[s, class j blocked]
// where x^j_i is class j's next variable in its fixed order. Terminal states
// cost 0; irrelevant classes are collapsed before lookup.
// ---------------------------------------------------------------------------
class DpStrategy {
 public:
  explicit DpStrategy(EvalProblem prob, std::uint64_t state_budget)
      : prob_(std::move(prob)),
        dec_(sibling_classes(prob_)),
        space_(dec_, state_budget),
        table_(space_.states, std::numeric_limits<double>::quiet_NaN()),
        best_(space_.states, -2) {
    std::vector<int> digits(dec_.classes.size(), 0);
    expected_cost_ = solve(digits);
  }

  double expected_cost() const { return expected_cost_; }
  const EvalProblem& problem() const { return prob_; }
  const SiblingDecomposition& decomposition() const { return dec_; }
  std::uint64_t state_count() const { return space_.states; }

  int next_test(const PartialAssignment& b) const {
    std::vector<int> digits = detail::digits_of(dec_, b);
    detail::canonicalize(dec_, digits);
    if (detail::restricted_value(dec_, digits) >= 0) return -1;
    const int j = best_[space_.index(digits)];
    if (j < 0) throw InvalidInputError("state was not reached by the solved table");
    const auto& c = dec_.classes[static_cast<std::size_t>(j)];
    return c.variables[static_cast<std::size_t>(digits[static_cast<std::size_t>(j)])];
  }

  int value_at(const PartialAssignment& b) const {
    std::vector<int> digits = detail::digits_of(dec_, b);
    const int v = detail::restricted_value(dec_, digits);
    if (v < 0) throw InvalidInputError("state is not terminal");
    return v;
  }

 private:
  double solve(std::vector<int>& digits) {
    detail::canonicalize(dec_, digits);
    if (detail::restricted_value(dec_, digits) >= 0) return 0.0;
    const std::uint64_t idx = space_.index(digits);
    if (!std::isnan(table_[idx])) return table_[idx];

    double best = std::numeric_limits<double>::infinity();
    int best_class = -1;
    for (std::size_t j = 0; j < dec_.classes.size(); ++j) {
      const auto& cls = dec_.classes[j];
      const int pos = digits[j];
      if (pos > static_cast<int>(cls.variables.size()) - 1) continue;  // blocked or spent
      const int var = cls.variables[static_cast<std::size_t>(pos)];
      std::vector<int> child = digits;
      child[j] = pos + 1;
      const double on_one = solve(child);
      child = digits;
      child[j] = static_cast<int>(cls.variables.size()) + 1;
      const double on_zero = solve(child);
      const double value = prob_.cost(var) + prob_.p(var) * on_one + prob_.q(var) * on_zero;
      if (value < best) {
        best = value;
        best_class = static_cast<int>(j);
      }
    }
    table_[idx] = best;
    best_[idx] = static_cast<std::int16_t>(best_class);
    return best;
  }

  EvalProblem prob_;
  SiblingDecomposition dec_;
  detail::ClassStateSpace space_;
  std::vector<double> table_;
  std::vector<std::int16_t> best_;
  double expected_cost_ = 0.0;
};

inline DpStrategy optimal_strategy_dp(const EvalProblem& prob,
                                      std::uint64_t state_budget = 10'000'000) {
  return DpStrategy(prob, state_budget);
}

// ---------------------------------------------------------------------------
// Unit-cost/uniform-distribution variant: every class is evaluated as one
// contiguous block. Running a block of size l sees its first 0 at position i
// with probability 2^-i at cost i, or all ones with probability 2^-l at cost
// l; the expected block cost is 2(1 - 2^-l). The DP state per class is just
// {untouched, blocked, all-ones}, at most 3^t entries.
// ---------------------------------------------------------------------------
class UniformUnitStrategy {
 public:
  explicit UniformUnitStrategy(EvalProblem prob, std::uint64_t state_budget)
      : prob_(std::move(prob)), dec_(sibling_classes(prob_)) {
    ensure_unit_uniform(prob_, "uniform_unit_dp");
    states_ = 1;
    stride_.resize(dec_.classes.size());
    for (std::size_t j = 0; j < dec_.classes.size(); ++j) {
      stride_[j] = states_;
      if (states_ > state_budget / 3) throw SizeLimitError("class-state space exceeds the configured budget");
      states_ *= 3;
    }
    table_.assign(states_, std::numeric_limits<double>::quiet_NaN());
    best_.assign(states_, -2);
    std::vector<int> digits(dec_.classes.size(), 0);  // 0 untouched, 1 blocked, 2 all-ones
    expected_cost_ = solve(digits);
  }

  double expected_cost() const { return expected_cost_; }
  const SiblingDecomposition& decomposition() const { return dec_; }

  // Policy interface. Mid-block states continue the started class; fresh
  // blocks follow the table.
  int next_test(const PartialAssignment& b) const {
    std::vector<int> fine = detail::digits_of(dec_, b);
    for (std::size_t j = 0; j < dec_.classes.size(); ++j) {
      const auto& vars = dec_.classes[j].variables;
      if (fine[j] > 0 && fine[j] < static_cast<int>(vars.size()) && class_alive(fine, j))
        return vars[static_cast<std::size_t>(fine[j])];  // mid-block: finish it
    }
    std::vector<int> digits = coarse_of(fine);
    canonicalize3(digits);
    if (restricted3(digits) >= 0) return -1;
    const int j = best_[index3(digits)];
    if (j < 0) throw InvalidInputError("state was not reached by the solved table");
    return dec_.classes[static_cast<std::size_t>(j)].variables.front();
  }

  int value_at(const PartialAssignment& b) const {
    std::vector<int> digits = coarse_of(detail::digits_of(dec_, b));
    const int v = restricted3(digits);
    if (v < 0) throw InvalidInputError("state is not terminal");
    return v;
  }

 private:
  // Maps fine digits (0..l+1) to block digits (0 untouched, 1 blocked, 2 done).
  std::vector<int> coarse_of(const std::vector<int>& fine) const {
    std::vector<int> digits(fine.size(), 0);
    for (std::size_t j = 0; j < fine.size(); ++j) {
      const int l = static_cast<int>(dec_.classes[j].variables.size());
      if (fine[j] == l + 1) digits[j] = 1;
      else if (fine[j] == l) digits[j] = 2;
      else if (fine[j] != 0)
        throw InvalidInputError("assignment stops mid-block");
    }
    return digits;
  }

  bool class_alive(const std::vector<int>& fine, std::size_t j) const {
    for (std::size_t t = 0; t < dec_.term_classes.size(); ++t) {
      if (!(dec_.term_classes[t] & (std::uint32_t{1} << j))) continue;
      bool dead = false;
      for (std::uint32_t m = dec_.term_classes[t]; m; m &= m - 1) {
        const auto jj = static_cast<std::size_t>(std::countr_zero(m));
        if (fine[jj] == static_cast<int>(dec_.classes[jj].variables.size()) + 1) {
          dead = true;
          break;
        }
      }
      if (!dead) return true;
    }
    return false;
  }

  std::uint64_t index3(const std::vector<int>& digits) const {
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < digits.size(); ++j)
      idx += stride_[j] * static_cast<std::uint64_t>(digits[j]);
    return idx;
  }

  int restricted3(const std::vector<int>& digits) const {
    bool all_dead = true;
    for (std::size_t t = 0; t < dec_.term_classes.size(); ++t) {
      bool dead = false, sat = true;
      for (std::uint32_t m = dec_.term_classes[t]; m; m &= m - 1) {
        const auto j = static_cast<std::size_t>(std::countr_zero(m));
        if (digits[j] == 1) { dead = true; break; }
        if (digits[j] != 2) sat = false;
      }
      if (dead) continue;
      if (sat) return 1;
      all_dead = false;
    }
    return all_dead ? 0 : -1;
  }

  void canonicalize3(std::vector<int>& digits) const {
    std::vector<char> term_dead(dec_.term_classes.size(), 0);
    for (std::size_t t = 0; t < dec_.term_classes.size(); ++t)
      for (std::uint32_t m = dec_.term_classes[t]; m; m &= m - 1)
        if (digits[static_cast<std::size_t>(std::countr_zero(m))] == 1) {
          term_dead[t] = 1;
          break;
        }
    for (std::size_t j = 0; j < dec_.classes.size(); ++j) {
      bool alive = false;
      for (std::size_t t = 0; t < dec_.term_classes.size() && !alive; ++t)
        if (!term_dead[t] && (dec_.term_classes[t] & (std::uint32_t{1} << j))) alive = true;
      if (!alive) digits[j] = 1;
    }
  }

  double solve(std::vector<int>& digits) {
    canonicalize3(digits);
    if (restricted3(digits) >= 0) return 0.0;
    const std::uint64_t idx = index3(digits);
    if (!std::isnan(table_[idx])) return table_[idx];

    double best = std::numeric_limits<double>::infinity();
    int best_class = -1;
    for (std::size_t j = 0; j < dec_.classes.size(); ++j) {
      if (digits[j] != 0) continue;
      const auto l = static_cast<int>(dec_.classes[j].variables.size());
      const double p_ones = std::ldexp(1.0, -l);  // 2^-l
      const double block_cost = 2.0 * (1.0 - p_ones);
      std::vector<int> child = digits;
      child[j] = 2;
      const double on_ones = solve(child);
      child = digits;
      child[j] = 1;
      const double on_zero = solve(child);
      const double value = block_cost + p_ones * on_ones + (1.0 - p_ones) * on_zero;
      if (value < best) {
        best = value;
        best_class = static_cast<int>(j);
      }
    }
    table_[idx] = best;
    best_[idx] = static_cast<std::int16_t>(best_class);
    return best;
  }

  EvalProblem prob_;
  SiblingDecomposition dec_;
  std::vector<std::uint64_t> stride_;
  std::uint64_t states_ = 1;
  std::vector<double> table_;
  std::vector<std::int16_t> best_;
  double expected_cost_ = 0.0;
};

inline UniformUnitStrategy uniform_unit_dp(const EvalProblem& prob,
                                           std::uint64_t state_budget = 10'000'000) {
  return UniformUnitStrategy(prob, state_budget);
}

inline UniformUnitStrategy uniform_unit_dp(const DnfFormula& f,
                                           std::uint64_t state_budget = 10'000'000) {
  return UniformUnitStrategy(EvalProblem::with_defaults(f), state_budget);
}

}  // namespace sbfe
