#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "sbfe/formula.hpp"
#include "sbfe/problem.hpp"
#include "sbfe/random.hpp"
#include "sbfe/set_cover.hpp"

namespace sbfe {

// Random non-constant monotone DNF with term sizes in [1, max_term_size] and
// at most max_terms distinct terms.
inline DnfFormula random_monotone_dnf(Rng& rng, int n, int max_term_size, int max_terms) {
  const int want = rng.uniform_int(1, max_terms);
  std::vector<Term> terms;
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (int t = 0; t < want; ++t) {
    const int size = rng.uniform_int(1, std::min(max_term_size, n));
    // partial Fisher-Yates draw of `size` distinct variables
    for (int i = 0; i < size; ++i)
      std::swap(pool[static_cast<std::size_t>(i)],
                pool[static_cast<std::size_t>(rng.uniform_int(i, n - 1))]);
    terms.emplace_back(pool.begin(), pool.begin() + size);
  }
  return DnfFormula::make(n, std::move(terms));
}

// Random monotone DNF with exactly k (pre-dedup) terms.
inline DnfFormula random_monotone_kterm(Rng& rng, int n, int k, int max_term_size) {
  std::vector<Term> terms;
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (int t = 0; t < k; ++t) {
    const int size = rng.uniform_int(1, std::min(max_term_size, n));
    for (int i = 0; i < size; ++i)
      std::swap(pool[static_cast<std::size_t>(i)],
                pool[static_cast<std::size_t>(rng.uniform_int(i, n - 1))]);
    terms.emplace_back(pool.begin(), pool.begin() + size);
  }
  return DnfFormula::make(n, std::move(terms));
}

inline EvalProblem random_problem(Rng& rng, DnfFormula f, double cost_lo, double cost_hi,
                                  double p_lo, double p_hi) {
  const auto n = static_cast<std::size_t>(f.n());
  std::vector<double> costs(n), probs(n);
  for (auto& c : costs) c = rng.uniform(cost_lo, cost_hi);
  for (auto& p : probs) p = rng.uniform(p_lo, p_hi);
  return EvalProblem(std::move(f), std::move(costs), std::move(probs));
}

inline PartialAssignment sample_input(Rng& rng, const EvalProblem& prob) {
  PartialAssignment x(prob.n());
  for (int i = 0; i < prob.n(); ++i) x.set(i, rng.bernoulli(prob.p(i)));
  return x;
}

// Random feasible weighted cover instance for solver property tests.
inline SetCoverInstance random_cover_instance(Rng& rng, int elements, int subsets,
                                              double w_lo, double w_hi) {
  std::vector<SetCoverInstance::Subset> sets(static_cast<std::size_t>(subsets));
  for (int s = 0; s < subsets; ++s) {
    sets[static_cast<std::size_t>(s)].id = s;
    sets[static_cast<std::size_t>(s)].weight = rng.uniform(w_lo, w_hi);
    for (int e = 0; e < elements; ++e)
      if (rng.bernoulli(0.4)) sets[static_cast<std::size_t>(s)].elements.push_back(e);
  }
  for (int e = 0; e < elements; ++e) {  // patch feasibility
    const int s = rng.uniform_int(0, subsets - 1);
    auto& el = sets[static_cast<std::size_t>(s)].elements;
    if (!std::binary_search(el.begin(), el.end(), e))
      el.insert(std::upper_bound(el.begin(), el.end(), e), e);
  }
  return SetCoverInstance(elements, std::move(sets));
}

struct Graph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based endpoints, u < v
};

inline Graph random_graph(Rng& rng, int vertices, double edge_prob) {
  Graph g;
  g.vertices = vertices;
  for (int u = 0; u < vertices; ++u)
    for (int v = u + 1; v < vertices; ++v)
      if (rng.bernoulli(edge_prob)) g.edges.emplace_back(u, v);
  return g;
}

}  // namespace sbfe
