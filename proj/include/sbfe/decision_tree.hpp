#pragma once

#include <memory>
#include <utility>

#include <json.hpp>

#include "sbfe/errors.hpp"
#include "sbfe/formula.hpp"
#include "sbfe/problem.hpp"
#include "sbfe/strategies.hpp"

namespace sbfe {

// An explicit testing strategy: internal nodes test a variable and branch on
// its value, leaves output the function value.
class DecisionTree {
 public:
  struct Node {
    int test = -1;  // variable when internal
    int leaf = -1;  // 0/1 when leaf
    std::unique_ptr<Node> zero, one;
    bool is_leaf() const { return leaf >= 0; }
  };

  DecisionTree() = default;
  explicit DecisionTree(std::unique_ptr<Node> root) : root_(std::move(root)) {}

  static std::unique_ptr<Node> make_leaf(int value) {
    auto n = std::make_unique<Node>();
    n->leaf = value;
    return n;
  }

  static std::unique_ptr<Node> make_test(int variable, std::unique_ptr<Node> zero,
                                         std::unique_ptr<Node> one) {
    auto n = std::make_unique<Node>();
    n->test = variable;
    n->zero = std::move(zero);
    n->one = std::move(one);
    return n;
  }

  const Node* root() const { return root_.get(); }
  bool empty() const { return root_ == nullptr; }

  std::size_t node_count() const { return count(root_.get()); }

  int evaluate(const PartialAssignment& x) const {
    const Node* n = root_.get();
    while (!n->is_leaf()) n = x.value(n->test) ? n->one.get() : n->zero.get();
    return n->leaf;
  }

  // Cost of the tests along x's path.
  double path_cost(const PartialAssignment& x, std::span<const double> costs) const {
    double total = 0.0;
    const Node* n = root_.get();
    while (!n->is_leaf()) {
      total += costs[static_cast<std::size_t>(n->test)];
      n = x.value(n->test) ? n->one.get() : n->zero.get();
    }
    return total;
  }

  // Expected test cost under D_p.
  double expected_cost(const EvalProblem& prob) const {
    return expected(root_.get(), prob);
  }

  // JSON form: {"test": <1-based var>, "zero": ..., "one": ...} | {"leaf": 0|1}.
  nlohmann::json to_json() const { return to_json(root_.get()); }

  static DecisionTree from_json(const nlohmann::json& doc) {
    return DecisionTree(parse(doc));
  }

 private:
  static std::size_t count(const Node* n) {
    if (!n) return 0;
    return 1 + count(n->zero.get()) + count(n->one.get());
  }

  static double expected(const Node* n, const EvalProblem& prob) {
    if (n->is_leaf()) return 0.0;
    return prob.cost(n->test) + prob.p(n->test) * expected(n->one.get(), prob) +
           prob.q(n->test) * expected(n->zero.get(), prob);
  }

  static nlohmann::json to_json(const Node* n) {
    if (!n) return nullptr;
    if (n->is_leaf()) return nlohmann::json{{"leaf", n->leaf}};
    return nlohmann::json{{"test", n->test + 1},
                          {"zero", to_json(n->zero.get())},
                          {"one", to_json(n->one.get())}};
  }

  static std::unique_ptr<Node> parse(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("decision tree node must be an object");
    if (doc.contains("leaf")) {
      const int v = doc.at("leaf").get<int>();
      if (v != 0 && v != 1) throw ParseError("leaf must be 0 or 1");
      return make_leaf(v);
    }
    if (!doc.contains("test") || !doc.contains("zero") || !doc.contains("one"))
      throw ParseError("decision tree node needs test/zero/one or leaf");
    const int var = doc.at("test").get<int>();
    if (var < 1) throw ParseError("test variables are 1-based");
    return make_test(var - 1, parse(doc.at("zero")), parse(doc.at("one")));
  }

  std::unique_ptr<Node> root_;
};

// Materializes any policy (next_test(b) -> variable or -1, value_at(b) at
// terminals) into an explicit tree, guarded by a node budget.
template <class Policy>
DecisionTree policy_to_tree(const Policy& policy, int n, std::size_t max_nodes = 1u << 20) {
  std::size_t nodes = 0;
  PartialAssignment b(n);
  const auto build = [&](auto&& self) -> std::unique_ptr<DecisionTree::Node> {
    if (++nodes > max_nodes) throw SizeLimitError("decision tree exceeds node budget");
    const int v = policy.next_test(b);
    if (v < 0) return DecisionTree::make_leaf(policy.value_at(b));
    b.set(v, false);
    auto zero = self(self);
    b.set(v, true);
    auto one = self(self);
    b.clear(v);
    return DecisionTree::make_test(v, std::move(zero), std::move(one));
  };
  return DecisionTree(build(build));
}

// Runs a policy as a step process (same duck-typed interface the strategy
// processes use), so policies can be priced and traced uniformly.
template <class Policy>
class PolicyProcess {
 public:
  PolicyProcess(const EvalProblem& prob, const Policy& policy)
      : prob_(&prob), policy_(&policy), b_(prob.n()) {
    pending_ = policy.next_test(b_);
  }

  bool finished() const { return pending_ < 0; }
  int next_variable() const { return pending_; }
  int next_owner() const { return -1; }

  void feed(bool value) {
    cost_ += prob_->cost(pending_);
    b_.set(pending_, value);
    trace_.push_back({-1, pending_, value, prob_->cost(pending_), 0.0, 0.0, -1.0,
                      false, true});
    pending_ = policy_->next_test(b_);
  }

  double cost() const { return cost_; }
  int value() const { return policy_->value_at(b_); }
  const PartialAssignment& tested() const { return b_; }
  const std::vector<TraceStep>& trace() const { return trace_; }

  StrategyResult result() const {
    // Every root-to-leaf path of a correct policy pins the function value, so
    // the tested assignment itself is the certificate.
    return {value(), b_, cost_, trace_};
  }

 private:
  const EvalProblem* prob_;
  const Policy* policy_;
  PartialAssignment b_;
  int pending_ = -1;
  double cost_ = 0.0;
  std::vector<TraceStep> trace_;
};

// A DecisionTree as a policy.
class TreePolicy {
 public:
  explicit TreePolicy(const DecisionTree& tree) : tree_(&tree) {}

  int next_test(const PartialAssignment& b) const {
    const DecisionTree::Node* n = tree_->root();
    while (!n->is_leaf()) {
      if (!b.assigned(n->test)) return n->test;
      n = b.value(n->test) ? n->one.get() : n->zero.get();
    }
    return -1;
  }

  int value_at(const PartialAssignment& b) const {
    const DecisionTree::Node* n = tree_->root();
    while (!n->is_leaf()) n = b.value(n->test) ? n->one.get() : n->zero.get();
    return n->leaf;
  }

 private:
  const DecisionTree* tree_;
};

}  // namespace sbfe
