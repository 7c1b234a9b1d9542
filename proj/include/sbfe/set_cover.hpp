#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sbfe/errors.hpp"
#include "sbfe/formula.hpp"

namespace sbfe {

// Tightness tolerance for dual residuals and weight ties.
inline constexpr double kCoverEps = 1e-12;

// Weighted set cover instance. Ground elements are term indices of the source
// formula; one subset per candidate variable, holding the terms it appears in.
class SetCoverInstance {
 public:
  struct Subset {
    int id = 0;                  // variable index; instance keeps ascending order
    std::vector<int> elements;   // sorted term indices
    double weight = 0.0;
  };

  SetCoverInstance(int num_elements, std::vector<Subset> subsets)
      : num_elements_(num_elements), subsets_(std::move(subsets)) {
    if (num_elements_ < 0) throw InvalidInputError("negative element count");
    std::sort(subsets_.begin(), subsets_.end(),
              [](const Subset& a, const Subset& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < subsets_.size(); ++i) {
      if (i > 0 && subsets_[i].id == subsets_[i - 1].id)
        throw InvalidInputError("duplicate subset id");
      auto& el = subsets_[i].elements;
      std::sort(el.begin(), el.end());
      el.erase(std::unique(el.begin(), el.end()), el.end());
      if (!el.empty() && (el.front() < 0 || el.back() >= num_elements_))
        throw InvalidInputError("subset element out of range");
      if (!(subsets_[i].weight >= 0.0))
        throw InvalidInputError("subset weights must be nonnegative");
    }
  }

  int num_elements() const { return num_elements_; }
  const std::vector<Subset>& subsets() const { return subsets_; }

  bool feasible() const {
    std::vector<char> covered(static_cast<std::size_t>(num_elements_), 0);
    for (const Subset& s : subsets_)
      for (int e : s.elements) covered[static_cast<std::size_t>(e)] = 1;
    return std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
  }

  // alpha: the largest number of subsets any single element appears in.
  int max_frequency() const {
    std::vector<int> freq(static_cast<std::size_t>(num_elements_), 0);
    for (const Subset& s : subsets_)
      for (int e : s.elements) ++freq[static_cast<std::size_t>(e)];
    return freq.empty() ? 0 : *std::max_element(freq.begin(), freq.end());
  }

  double weight_of(std::span<const int> ids) const {
    double total = 0.0;
    for (int id : ids) total += subset_by_id(id).weight;
    return total;
  }

  bool covers_all(std::span<const int> ids) const {
    std::vector<char> covered(static_cast<std::size_t>(num_elements_), 0);
    for (int id : ids)
      for (int e : subset_by_id(id).elements) covered[static_cast<std::size_t>(e)] = 1;
    return std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
  }

  const Subset& subset_by_id(int id) const {
    auto it = std::lower_bound(subsets_.begin(), subsets_.end(), id,
                               [](const Subset& s, int v) { return s.id < v; });
    if (it == subsets_.end() || it->id != id)
      throw InvalidInputError("unknown subset id");
    return *it;
  }

 private:
  int num_elements_;
  std::vector<Subset> subsets_;
};

// Builds the 0-certificate search instance: elements are f's terms, one subset
// per candidate variable. Candidates covering no term are omitted.
inline SetCoverInstance build_instance(const DnfFormula& f, std::span<const int> candidates,
                                       std::span<const double> weights) {
  if (f.is_constant()) throw InvalidInputError("constant formula has no cover instance");
  std::vector<SetCoverInstance::Subset> subsets;
  for (int v : candidates) {
    if (v < 0 || v >= f.n()) throw InvalidInputError("candidate variable out of range");
    SetCoverInstance::Subset s;
    s.id = v;
    s.weight = weights[static_cast<std::size_t>(v)];
    for (std::size_t t = 0; t < f.terms().size(); ++t)
      if (std::binary_search(f.terms()[t].begin(), f.terms()[t].end(), v))
        s.elements.push_back(static_cast<int>(t));
    if (!s.elements.empty()) subsets.push_back(std::move(s));
  }
  return SetCoverInstance(static_cast<int>(f.terms().size()), std::move(subsets));
}

// ---------------------------------------------------------------------------
// Incremental engines. Both present the same interface: the engine proposes
// the subset the rule selects next; the caller either accepts it (committed to
// the cover) or rejects it (removed from the instance, rule re-chooses). The
// offline solvers below drive the engines with accept-only loops, and the
// adaptive 0-certificate seeker drives them with test outcomes, which makes
// "adaptive commits = offline cover on the true candidate set" structural.
// ---------------------------------------------------------------------------

// Chvatal's rule: minimize weight / newly-covered-count; ties to lowest id.
class GreedyCoverEngine {
 public:
  explicit GreedyCoverEngine(const SetCoverInstance& inst)
      : subsets_(inst.subsets()),
        covered_(static_cast<std::size_t>(inst.num_elements()), 0),
        state_(subsets_.size(), State::Open),
        uncovered_(inst.num_elements()) {}

  std::optional<int> next_candidate() {
    if (done() || failed_) return std::nullopt;
    int best = -1;
    double best_w = 0.0;
    int best_cnt = 0;
    for (std::size_t i = 0; i < subsets_.size(); ++i) {
      if (state_[i] != State::Open) continue;
      int cnt = 0;
      for (int e : subsets_[i].elements)
        if (!covered_[static_cast<std::size_t>(e)]) ++cnt;
      if (cnt == 0) continue;
      // w/cnt < best_w/best_cnt, compared without division
      if (best < 0 || subsets_[i].weight * best_cnt < best_w * cnt - kCoverEps) {
        best = static_cast<int>(i);
        best_w = subsets_[i].weight;
        best_cnt = cnt;
      }
    }
    if (best < 0) {
      failed_ = true;  // uncovered element with no remaining subset
      return std::nullopt;
    }
    candidate_ = best;
    return subsets_[static_cast<std::size_t>(best)].id;
  }

  void accept() {
    const auto i = static_cast<std::size_t>(candidate_);
    state_[i] = State::Committed;
    committed_.push_back(subsets_[i].id);
    for (int e : subsets_[i].elements) {
      if (!covered_[static_cast<std::size_t>(e)]) {
        covered_[static_cast<std::size_t>(e)] = 1;
        --uncovered_;
      }
    }
  }

  void reject() { state_[static_cast<std::size_t>(candidate_)] = State::Removed; }

  bool done() const { return uncovered_ == 0; }
  bool failed() const { return failed_; }
  const std::vector<int>& committed() const { return committed_; }

 private:
  enum class State : std::uint8_t { Open, Committed, Removed };

  std::vector<SetCoverInstance::Subset> subsets_;
  std::vector<char> covered_;
  std::vector<State> state_;
  std::vector<int> committed_;
  int uncovered_;
  int candidate_ = -1;
  bool failed_ = false;
};

// Hochbaum's dual greedy, element driven: elements are processed in increasing
// id order; the dual of an uncovered element is raised to the smallest
// residual weight among the subsets containing it, and every subset made tight
// is selected, lowest id first. Zero-weight subsets are tight at y = 0 and are
// selected before any raising. A rejected selection is removed and, if nothing
// from the current raise was accepted, the raise is undone and redone against
// the surviving subsets.
//
// Residuals are recomputed from immutable weights and the dual vector rather
// than updated in place, and an undone dual is reset to exactly zero, so a run
// with rejections visits bitwise-identical numbers to a run on the instance
// with the rejected subsets absent (the adaptive/offline equivalence in
// strategies relies on this).
class DualGreedyCoverEngine {
 public:
  explicit DualGreedyCoverEngine(const SetCoverInstance& inst)
      : subsets_(inst.subsets()),
        covered_(static_cast<std::size_t>(inst.num_elements()), 0),
        state_(subsets_.size(), State::Open),
        duals_(static_cast<std::size_t>(inst.num_elements()), 0.0),
        uncovered_(inst.num_elements()) {
    containing_.resize(static_cast<std::size_t>(inst.num_elements()));
    for (std::size_t i = 0; i < subsets_.size(); ++i)
      for (int e : subsets_[i].elements)
        containing_[static_cast<std::size_t>(e)].push_back(static_cast<int>(i));
    for (std::size_t i = 0; i < subsets_.size(); ++i)
      if (subsets_[i].weight <= kCoverEps) zero_queue_.push_back(static_cast<int>(i));
  }

  std::optional<int> next_candidate() {
    if (failed_) return std::nullopt;
    // Zero-weight phase.
    while (zero_pos_ < zero_queue_.size()) {
      const int i = zero_queue_[zero_pos_];
      if (state_[static_cast<std::size_t>(i)] != State::Open) {
        ++zero_pos_;
        continue;
      }
      candidate_ = i;
      return subsets_[static_cast<std::size_t>(i)].id;
    }
    // Element phase.
    while (true) {
      if (raise_active_) {
        if (tight_pos_ < tight_.size()) {
          candidate_ = tight_[tight_pos_];
          return subsets_[static_cast<std::size_t>(candidate_)].id;
        }
        raise_active_ = false;  // fully processed; an accept covered the element
        ++element_;
      }
      while (element_ < static_cast<int>(covered_.size()) &&
             covered_[static_cast<std::size_t>(element_)])
        ++element_;
      if (element_ >= static_cast<int>(covered_.size())) return std::nullopt;  // done
      if (!begin_raise(element_)) {
        failed_ = true;
        return std::nullopt;
      }
    }
  }

  void accept() {
    const auto i = static_cast<std::size_t>(candidate_);
    state_[i] = State::Committed;
    committed_.push_back(subsets_[i].id);
    for (int e : subsets_[i].elements) {
      if (!covered_[static_cast<std::size_t>(e)]) {
        covered_[static_cast<std::size_t>(e)] = 1;
        --uncovered_;
      }
    }
    if (raise_active_) {
      accepted_in_raise_ = true;
      ++tight_pos_;
    }
  }

  void reject() {
    const auto i = static_cast<std::size_t>(candidate_);
    state_[i] = State::Removed;
    if (!raise_active_) return;  // zero-weight phase: nothing to undo
    if (accepted_in_raise_) {
      ++tight_pos_;  // the raise stands; keep testing remaining tight subsets
      return;
    }
    // Undo the raise attributable to the current element and re-choose.
    duals_[static_cast<std::size_t>(raise_element_)] = 0.0;
    raise_active_ = false;
  }

  bool done() const { return uncovered_ == 0; }
  bool failed() const { return failed_; }
  const std::vector<int>& committed() const { return committed_; }
  const std::vector<double>& duals() const { return duals_; }

  // weight(S) - sum of the duals of S's elements; elements in ascending order
  // so both the offline and the adaptive run sum identically.
  double residual(int subset_index) const {
    const auto& s = subsets_[static_cast<std::size_t>(subset_index)];
    double r = s.weight;
    for (int e : s.elements) r -= duals_[static_cast<std::size_t>(e)];
    return r;
  }

 private:
  enum class State : std::uint8_t { Open, Committed, Removed };

  bool begin_raise(int e) {
    tight_.clear();
    std::vector<int> members;
    double delta = std::numeric_limits<double>::infinity();
    for (int s : containing_[static_cast<std::size_t>(e)]) {
      if (state_[static_cast<std::size_t>(s)] != State::Open) continue;
      members.push_back(s);
      delta = std::min(delta, residual(s));
    }
    if (members.empty()) return false;
    duals_[static_cast<std::size_t>(e)] = delta;
    for (int s : members)  // ascending subset order by construction
      if (residual(s) <= kCoverEps) tight_.push_back(s);
    raise_active_ = true;
    raise_element_ = e;
    accepted_in_raise_ = false;
    tight_pos_ = 0;
    return true;
  }

  std::vector<SetCoverInstance::Subset> subsets_;
  std::vector<char> covered_;
  std::vector<State> state_;
  std::vector<double> duals_;
  std::vector<std::vector<int>> containing_;
  std::vector<int> committed_;
  std::vector<int> zero_queue_;
  std::size_t zero_pos_ = 0;
  int uncovered_;
  int element_ = 0;
  bool raise_active_ = false;
  int raise_element_ = -1;
  bool accepted_in_raise_ = false;
  std::vector<int> tight_;
  std::size_t tight_pos_ = 0;
  int candidate_ = -1;
  bool failed_ = false;
};

namespace detail {
template <class Engine>
std::vector<int> run_offline(Engine engine) {
  while (auto id = engine.next_candidate()) {
    (void)id;
    engine.accept();
  }
  if (engine.failed()) throw InvalidInputError("set cover instance is infeasible");
  return engine.committed();
}
}  // namespace detail

// Chvatal greedy; total weight <= H(m) * optimum.
inline std::vector<int> greedy_cover(const SetCoverInstance& inst) {
  return detail::run_offline(GreedyCoverEngine(inst));
}

// Hochbaum dual greedy; total weight <= alpha * optimum.
inline std::vector<int> dual_greedy_cover(const SetCoverInstance& inst) {
  return detail::run_offline(DualGreedyCoverEngine(inst));
}

struct BruteCoverResult {
  double weight = 0.0;
  std::vector<int> subset_ids;  // sorted ascending
};

// Exact minimum-weight cover by branch and bound over the lowest-id uncovered
// element. Ties at the minimum weight resolve to the lexicographically
// smallest sorted subset-id list. Guarded at 25 subsets.
inline BruteCoverResult brute_min_cover(const SetCoverInstance& inst) {
  const auto& subsets = inst.subsets();
  if (subsets.size() > 25) throw SizeLimitError("brute_min_cover limited to 25 subsets");
  if (!inst.feasible()) throw InvalidInputError("set cover instance is infeasible");

  const int m = inst.num_elements();
  std::vector<std::vector<int>> containing(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < subsets.size(); ++i)
    for (int e : subsets[i].elements)
      containing[static_cast<std::size_t>(e)].push_back(static_cast<int>(i));

  BruteCoverResult best;
  best.weight = std::numeric_limits<double>::infinity();
  std::vector<int> chosen;
  std::vector<int> cover_count(static_cast<std::size_t>(m), 0);

  auto better = [&](double w, const std::vector<int>& ids_sorted) {
    if (w < best.weight - kCoverEps) return true;
    if (w > best.weight + kCoverEps) return false;
    return ids_sorted < best.subset_ids;
  };

  const auto recurse = [&](auto&& self, double weight) -> void {
    if (weight > best.weight + kCoverEps) return;
    int e = -1;
    for (int i = 0; i < m; ++i)
      if (cover_count[static_cast<std::size_t>(i)] == 0) { e = i; break; }
    if (e < 0) {
      std::vector<int> ids;
      ids.reserve(chosen.size());
      for (int i : chosen) ids.push_back(subsets[static_cast<std::size_t>(i)].id);
      std::sort(ids.begin(), ids.end());
      if (better(weight, ids)) best = BruteCoverResult{weight, std::move(ids)};
      return;
    }
    for (int s : containing[static_cast<std::size_t>(e)]) {
      chosen.push_back(s);
      for (int el : subsets[static_cast<std::size_t>(s)].elements)
        ++cover_count[static_cast<std::size_t>(el)];
      self(self, weight + subsets[static_cast<std::size_t>(s)].weight);
      for (int el : subsets[static_cast<std::size_t>(s)].elements)
        --cover_count[static_cast<std::size_t>(el)];
      chosen.pop_back();
    }
  };
  recurse(recurse, 0.0);
  return best;
}

}  // namespace sbfe
