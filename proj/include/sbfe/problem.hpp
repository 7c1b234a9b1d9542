#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sbfe/errors.hpp"
#include "sbfe/formula.hpp"

namespace sbfe {

// An evaluation problem: a monotone DNF plus per-variable test costs c_i >= 0
// and bit probabilities 0 < p_i < 1 (the product distribution D_p).
class EvalProblem {
 public:
  EvalProblem(DnfFormula formula, std::vector<double> costs, std::vector<double> probs)
      : formula_(std::move(formula)), costs_(std::move(costs)), probs_(std::move(probs)) {
    const auto n = static_cast<std::size_t>(formula_.n());
    if (costs_.size() != n) throw InvalidInputError("cost vector length does not match n");
    if (probs_.size() != n) throw InvalidInputError("probability vector length does not match n");
    for (double c : costs_)
      if (!(c >= 0.0) || !std::isfinite(c))
        throw InvalidInputError("costs must be finite and nonnegative");
    for (double p : probs_)
      if (!(p > 0.0 && p < 1.0))
        throw InvalidInputError("probabilities must satisfy 0 < p < 1");
  }

  // Unit costs, fair coins.
  static EvalProblem with_defaults(DnfFormula formula) {
    const auto n = static_cast<std::size_t>(formula.n());
    return EvalProblem(std::move(formula), std::vector<double>(n, 1.0),
                       std::vector<double>(n, 0.5));
  }

  const DnfFormula& formula() const { return formula_; }
  int n() const { return formula_.n(); }
  std::span<const double> costs() const { return costs_; }
  std::span<const double> probs() const { return probs_; }
  double cost(int i) const { return costs_[static_cast<std::size_t>(i)]; }
  double p(int i) const { return probs_[static_cast<std::size_t>(i)]; }
  double q(int i) const { return 1.0 - probs_[static_cast<std::size_t>(i)]; }

  // rho = min_i min{p_i, 1-p_i}; 0 < rho <= 1/2.
  double rho() const {
    double r = 0.5;
    for (double p : probs_) r = std::min({r, p, 1.0 - p});
    return r;
  }

  bool unit_uniform() const {
    return std::all_of(costs_.begin(), costs_.end(), [](double c) { return c == 1.0; }) &&
           std::all_of(probs_.begin(), probs_.end(), [](double p) { return p == 0.5; });
  }

  // Probability of a full assignment under D_p.
  double input_probability(const PartialAssignment& x) const {
    double pr = 1.0;
    for (int i = 0; i < n(); ++i) pr *= x.value(i) ? p(i) : q(i);
    return pr;
  }

 private:
  DnfFormula formula_;
  std::vector<double> costs_;
  std::vector<double> probs_;
};

// Problem config: {"costs": [...], "probs": [...]}. Omitted costs default to
// all-1, omitted probs to all-0.5.
inline EvalProblem parse_problem_config(DnfFormula formula, std::string_view json_text) {
  const auto n = static_cast<std::size_t>(formula.n());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad problem config: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("problem config must be a JSON object");
  std::vector<double> costs(n, 1.0);
  std::vector<double> probs(n, 0.5);
  const auto read_array = [&](const char* key, std::vector<double>& out) {
    if (!doc.contains(key)) return;
    const auto& arr = doc.at(key);
    if (!arr.is_array() || arr.size() != n)
      throw ParseError(std::string(key) + " must be an array of length " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (!arr[i].is_number()) throw ParseError(std::string(key) + " entries must be numbers");
      out[i] = arr[i].get<double>();
    }
  };
  read_array("costs", costs);
  read_array("probs", probs);
  return EvalProblem(std::move(formula), std::move(costs), std::move(probs));
}

inline EvalProblem load_problem(const std::string& formula_path, const std::string& config_path) {
  DnfFormula f = load_monotone_dnf(formula_path);
  if (config_path.empty()) return EvalProblem::with_defaults(std::move(f));
  return parse_problem_config(std::move(f), read_text_file(config_path));
}

inline void ensure_unit_uniform(const EvalProblem& prob, const char* what) {
  if (!prob.unit_uniform())
    throw IncompatibleError(std::string(what) + " requires unit costs and uniform probabilities");
}

}  // namespace sbfe
