#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sbfe/errors.hpp"
#include "sbfe/formula.hpp"
#include "sbfe/problem.hpp"
#include "sbfe/random.hpp"
#include "sbfe/set_cover.hpp"

namespace sbfe {

// ---------------------------------------------------------------------------
// TestOracle: the only way a strategy can see the hidden input. Holds either a
// fixed assignment or a live sampler; repeated tests of a variable return the
// same value, and every test appends a charge for the requesting side.
// ---------------------------------------------------------------------------
struct ChargeEntry {
  int requester;  // 0 = Alg0, 1 = Alg1, -1 = single-algorithm run
  int variable;
  double cost;
};

class TestOracle {
 public:
  TestOracle(const EvalProblem& prob, PartialAssignment x)
      : prob_(&prob), values_(static_cast<std::size_t>(prob.n()), -1) {
    if (x.size() != prob.n()) throw InvalidInputError("input length does not match problem");
    if (!x.fully_assigned()) throw InvalidInputError("oracle input must be fully assigned");
    for (int i = 0; i < prob.n(); ++i)
      values_[static_cast<std::size_t>(i)] = x.value(i) ? 1 : 0;
  }

  // Samples each bit from D_p on first test.
  TestOracle(const EvalProblem& prob, Rng rng)
      : prob_(&prob), values_(static_cast<std::size_t>(prob.n()), -1), sampler_(rng) {}

  bool test(int variable, int requester = -1) {
    auto& v = values_.at(static_cast<std::size_t>(variable));
    if (v < 0) {
      if (!sampler_) throw std::logic_error("fixed-input oracle has unset value");
      v = sampler_->bernoulli(prob_->p(variable)) ? 1 : 0;
    }
    log_.push_back({requester, variable, prob_->cost(variable)});
    return v == 1;
  }

  bool tested(int variable) const {
    return std::any_of(log_.begin(), log_.end(),
                       [variable](const ChargeEntry& e) { return e.variable == variable; });
  }

  const std::vector<ChargeEntry>& charge_log() const { return log_; }

  double charged_total(int requester) const {
    double total = 0.0;
    for (const ChargeEntry& e : log_)
      if (e.requester == requester) total += e.cost;
    return total;
  }

 private:
  const EvalProblem* prob_;
  std::vector<std::int8_t> values_;
  std::optional<Rng> sampler_;
  std::vector<ChargeEntry> log_;
};

// ---------------------------------------------------------------------------
// Run records.
// ---------------------------------------------------------------------------
struct TraceStep {
  int owner;                  // 0 = Alg0, 1 = Alg1, -1 = single-algorithm
  int variable;
  bool outcome;
  double charge;
  double k0, k1;              // running totals after the step
  double other_pending_cost;  // the other side's pending-test cost, -1 if none
  bool rule_step;             // chosen by the K0+C0 <= K1+C1 rule
  bool owner_running_after;   // owner still running after receiving the result
};

struct StrategyResult {
  int value = 0;
  PartialAssignment certificate;
  double total_cost = 0.0;
  std::vector<TraceStep> trace;
};

// A single certificate seeker's run: failure is the normal outcome when the
// input holds no certificate of the sought kind, and still carries its cost.
struct SeekerRun {
  bool success = false;
  int value = 0;  // meaningful on success
  PartialAssignment certificate;
  double total_cost = 0.0;
  std::vector<TraceStep> trace;
};

enum class SeekerStatus { Running, Succeeded, Failed };
enum class CoverRule { DualGreedy, Greedy };

namespace detail {

// One-certificate witness: the first term of f fully set to 1 under b.
inline PartialAssignment one_cert_from(const DnfFormula& f, const PartialAssignment& b) {
  if (f.is_constant()) return PartialAssignment(f.n());
  for (const Term& t : f.terms()) {
    bool sat = true;
    for (int v : t)
      if (!b.assigned(v) || !b.value(v)) { sat = false; break; }
    if (sat) {
      PartialAssignment cert(f.n());
      for (int v : t) cert.set(v, true);
      return cert;
    }
  }
  throw std::logic_error("no satisfied term for one-certificate");
}

inline PartialAssignment zero_cert_from(int n, std::span<const int> zero_vars) {
  PartialAssignment cert(n);
  for (int v : zero_vars) cert.set(v, false);
  return cert;
}

// Variables ordered by (cost, index) ascending.
inline std::vector<int> by_cost_then_index(std::span<const int> vars, const EvalProblem& prob) {
  std::vector<int> order(vars.begin(), vars.end());
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (prob.cost(a) != prob.cost(b)) return prob.cost(a) < prob.cost(b);
    return a < b;
  });
  return order;
}

inline double term_cost(const Term& t, const EvalProblem& prob) {
  double c = 0.0;
  for (int v : t) c += prob.cost(v);
  return c;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Naive baseline: test variables in increasing cost order (ties by index)
// until the observed values form a certificate. Never fails.
// ---------------------------------------------------------------------------
class NaiveSeeker {
 public:
  explicit NaiveSeeker(const EvalProblem& prob)
      : prob_(&prob), b_(prob.n()), cert_(prob.n()) {
    std::vector<int> all(static_cast<std::size_t>(prob.n()));
    for (int i = 0; i < prob.n(); ++i) all[static_cast<std::size_t>(i)] = i;
    order_ = detail::by_cost_then_index(all, prob);
    check();
  }

  SeekerStatus status() const { return status_; }
  int pending_test() const { return order_[pos_]; }

  void receive(int variable, bool value) {
    assert(variable == order_[pos_]);
    b_.set(variable, value);
    ++pos_;
    check();
  }

  int value() const { return value_; }
  const PartialAssignment& certificate() const { return cert_; }

 private:
  void check() {
    switch (prob_->formula().certificate_kind(b_)) {
      case CertificateKind::None:
        break;
      case CertificateKind::OneCert:
        status_ = SeekerStatus::Succeeded;
        value_ = 1;
        cert_ = detail::one_cert_from(prob_->formula(), b_);
        break;
      case CertificateKind::ZeroCert: {
        status_ = SeekerStatus::Succeeded;
        value_ = 0;
        std::vector<int> zeros;
        for (int i = 0; i < prob_->n(); ++i)
          if (b_.assigned(i) && !b_.value(i)) zeros.push_back(i);
        cert_ = detail::zero_cert_from(prob_->n(), zeros);
        break;
      }
    }
  }

  const EvalProblem* prob_;
  std::vector<int> order_;
  std::size_t pos_ = 0;
  PartialAssignment b_;
  SeekerStatus status_ = SeekerStatus::Running;
  int value_ = 0;
  PartialAssignment cert_;
};

// ---------------------------------------------------------------------------
// Alg1 for k-DNF: evaluate the min-cost term of the current restricted and
// minimized formula (ties by lexicographic term order), testing its variables
// cheapest first until a 0 appears or the term is satisfied. On a 0, restrict
// by all results and recurse; a constant-0 restriction is failure.
// ---------------------------------------------------------------------------
class Alg1KDnfSeeker {
 public:
  explicit Alg1KDnfSeeker(const EvalProblem& prob)
      : prob_(&prob), b_(prob.n()), cert_(prob.n()),
        current_(prob.formula().minimize()) {
    settle();
  }

  SeekerStatus status() const { return status_; }
  int pending_test() const { return term_order_[tpos_]; }

  void receive(int variable, bool value) {
    assert(variable == term_order_[tpos_]);
    b_.set(variable, value);
    if (value) {
      ++tpos_;
      if (tpos_ == term_order_.size()) succeed();
      return;
    }
    // The term is falsified; substitute everything learned from it.
    current_ = current_.restrict(b_).minimize();
    settle();
  }

  int value() const { return 1; }
  const PartialAssignment& certificate() const { return cert_; }

 private:
  void settle() {
    if (current_.is_constant()) {
      if (current_.constant_value()) {
        // A falsified min-cost term cannot satisfy a sibling once the working
        // formula is kept minimal (the sibling would have been absorbed), but
        // the protocol still terminates with a one-certificate if it happens.
        succeed();
      } else {
        status_ = SeekerStatus::Failed;  // x contains no 1-certificate
      }
      return;
    }
    const auto& terms = current_.terms();
    std::size_t best = 0;
    double best_cost = detail::term_cost(terms[0], *prob_);
    for (std::size_t i = 1; i < terms.size(); ++i) {
      const double c = detail::term_cost(terms[i], *prob_);
      if (c < best_cost || (c == best_cost && terms[i] < terms[best])) {
        best = i;
        best_cost = c;
      }
    }
    term_order_ = detail::by_cost_then_index(terms[best], *prob_);
    tpos_ = 0;
  }

  void succeed() {
    status_ = SeekerStatus::Succeeded;
    cert_ = detail::one_cert_from(prob_->formula(), b_);
  }

  const EvalProblem* prob_;
  PartialAssignment b_;
  PartialAssignment cert_;
  DnfFormula current_;
  std::vector<int> term_order_;
  std::size_t tpos_ = 0;
  SeekerStatus status_ = SeekerStatus::Running;
};

// ---------------------------------------------------------------------------
// Alg1 for k-term DNF: freeze the term order by original total cost (ties
// lexicographic) and evaluate terms in that order, reusing known values and
// abandoning a term at its first 0.
// ---------------------------------------------------------------------------
class Alg1KTermSeeker {
 public:
  explicit Alg1KTermSeeker(const EvalProblem& prob)
      : prob_(&prob), b_(prob.n()), cert_(prob.n()) {
    const auto& f = prob.formula();
    if (f.is_constant()) {
      if (f.constant_value()) succeed_constant();
      else status_ = SeekerStatus::Failed;
      return;
    }
    order_.resize(f.terms().size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b2) {
      const double ca = detail::term_cost(f.terms()[a], prob);
      const double cb = detail::term_cost(f.terms()[b2], prob);
      if (ca != cb) return ca < cb;
      return f.terms()[a] < f.terms()[b2];
    });
    advance_term();
  }

  SeekerStatus status() const { return status_; }
  int pending_test() const { return pending_[ppos_]; }

  void receive(int variable, bool value) {
    assert(variable == pending_[ppos_]);
    b_.set(variable, value);
    if (!value) {
      ++ti_;
      advance_term();
      return;
    }
    ++ppos_;
    if (ppos_ == pending_.size()) succeed();
  }

  int value() const { return 1; }
  const PartialAssignment& certificate() const { return cert_; }

 private:
  void advance_term() {
    const auto& terms = prob_->formula().terms();
    for (; ti_ < order_.size(); ++ti_) {
      const Term& t = terms[order_[ti_]];
      bool falsified = false;
      std::vector<int> untested;
      for (int v : t) {
        if (!b_.assigned(v)) untested.push_back(v);
        else if (!b_.value(v)) { falsified = true; break; }
      }
      if (falsified) continue;
      if (untested.empty()) {  // satisfied entirely by earlier results
        succeed();
        return;
      }
      pending_ = detail::by_cost_then_index(untested, *prob_);
      ppos_ = 0;
      return;
    }
    status_ = SeekerStatus::Failed;  // every term falsified
  }

  void succeed() {
    status_ = SeekerStatus::Succeeded;
    cert_ = detail::one_cert_from(prob_->formula(), b_);
  }

  void succeed_constant() {
    status_ = SeekerStatus::Succeeded;
    cert_ = PartialAssignment(prob_->n());
  }

  const EvalProblem* prob_;
  PartialAssignment b_;
  PartialAssignment cert_;
  std::vector<std::size_t> order_;
  std::size_t ti_ = 0;
  std::vector<int> pending_;
  std::size_t ppos_ = 0;
  SeekerStatus status_ = SeekerStatus::Running;
};

// ---------------------------------------------------------------------------
// Alg0: run a set-cover rule pretending every variable tested 0. A selection
// that tests 0 is committed (useful); one that tests 1 is removed from the
// instance and the rule re-chooses (useless). On f(x) = 0 the committed list
// equals the offline rule's cover for the true zero set.
// ---------------------------------------------------------------------------
class Alg0AdaptiveSeeker {
 public:
  Alg0AdaptiveSeeker(const EvalProblem& prob, CoverRule rule)
      : prob_(&prob), rule_(rule), cert_(prob.n()) {
    const auto& f = prob.formula();
    if (f.is_constant()) {
      status_ = f.constant_value() ? SeekerStatus::Failed : SeekerStatus::Succeeded;
      return;
    }
    std::vector<int> all(static_cast<std::size_t>(prob.n()));
    for (int i = 0; i < prob.n(); ++i) all[static_cast<std::size_t>(i)] = i;
    const SetCoverInstance inst = build_instance(f, all, prob.costs());
    if (rule_ == CoverRule::DualGreedy) dual_.emplace(inst);
    else greedy_.emplace(inst);
    pull();
  }

  SeekerStatus status() const { return status_; }
  int pending_test() const { return candidate_; }

  void receive(int variable, bool value) {
    assert(variable == candidate_);
    if (!value) {
      rule_ == CoverRule::DualGreedy ? dual_->accept() : greedy_->accept();
    } else {
      rule_ == CoverRule::DualGreedy ? dual_->reject() : greedy_->reject();
    }
    pull();
  }

  int value() const { return 0; }
  const PartialAssignment& certificate() const { return cert_; }

  const std::vector<int>& committed() const {
    static const std::vector<int> empty;
    if (prob_->formula().is_constant()) return empty;
    return rule_ == CoverRule::DualGreedy ? dual_->committed() : greedy_->committed();
  }

 private:
  void pull() {
    const auto next = rule_ == CoverRule::DualGreedy ? dual_->next_candidate()
                                                     : greedy_->next_candidate();
    if (next) {
      candidate_ = *next;
      return;
    }
    const bool ok = rule_ == CoverRule::DualGreedy ? dual_->done() : greedy_->done();
    if (ok) {
      status_ = SeekerStatus::Succeeded;
      cert_ = detail::zero_cert_from(prob_->n(), committed());
    } else {
      status_ = SeekerStatus::Failed;  // some term's candidates exhausted: f(x) = 1
    }
  }

  const EvalProblem* prob_;
  CoverRule rule_;
  std::optional<DualGreedyCoverEngine> dual_;
  std::optional<GreedyCoverEngine> greedy_;
  int candidate_ = -1;
  SeekerStatus status_ = SeekerStatus::Running;
  PartialAssignment cert_;
};

// ---------------------------------------------------------------------------
// Processes: resumable runs that surface one test at a time. A driver answers
// next_variable() via feed(); the process does its own charge accounting, so
// the same machinery serves oracle-driven runs, exact expected-cost pricing
// and Monte-Carlo pricing.
// ---------------------------------------------------------------------------
template <class Seeker>
class SeekerProcess {
 public:
  SeekerProcess(const EvalProblem& prob, Seeker seeker, int owner)
      : prob_(&prob), seeker_(std::move(seeker)), owner_(owner) {}

  bool finished() const { return seeker_.status() != SeekerStatus::Running; }
  int next_variable() const { return seeker_.pending_test(); }
  int next_owner() const { return owner_; }

  void feed(bool value) {
    const int v = seeker_.pending_test();
    const double c = prob_->cost(v);
    cost_ += c;
    seeker_.receive(v, value);
    trace_.push_back({owner_, v, value, c, owner_ == 0 ? cost_ : 0.0,
                      owner_ == 1 ? cost_ : 0.0, -1.0, false,
                      seeker_.status() == SeekerStatus::Running});
  }

  double cost() const { return cost_; }
  const Seeker& seeker() const { return seeker_; }

  SeekerRun run_record() const {
    SeekerRun r;
    r.success = seeker_.status() == SeekerStatus::Succeeded;
    r.value = r.success ? seeker_.value() : 0;
    r.certificate = r.success ? seeker_.certificate() : PartialAssignment(prob_->n());
    r.total_cost = cost_;
    r.trace = trace_;
    return r;
  }

  // Process interface for pricing: value of the finished run.
  int value() const { return seeker_.value(); }

 private:
  const EvalProblem* prob_;
  Seeker seeker_;
  int owner_;
  double cost_ = 0.0;
  std::vector<TraceStep> trace_;
};

// The modified round-robin protocol. Maintains K0 and K1; while both seekers
// are live, performs Alg0's pending test when K0 + C0 <= K1 + C1 and Alg1's
// otherwise; when one side fails, runs the other to completion. With sharing
// off each side pays for its own tests even when re-testing a variable the
// other already bought; with sharing on, known values propagate free of
// charge.
template <class A0, class A1>
class RoundRobinProcess {
 public:
  RoundRobinProcess(const EvalProblem& prob, A0 a0, A1 a1, bool share)
      : prob_(&prob), a0_(std::move(a0)), a1_(std::move(a1)), share_(share),
        known_(static_cast<std::size_t>(prob.n()), -1) {
    settle();
  }

  bool finished() const { return phase_ == Phase::Done; }
  int next_variable() const {
    return stepping_ == 0 ? a0_.pending_test() : a1_.pending_test();
  }
  int next_owner() const { return stepping_; }

  void feed(bool value) {
    const int var = next_variable();
    const double c = prob_->cost(var);
    const bool rule_step = phase_ == Phase::Racing;
    double other_pending = -1.0;
    if (stepping_ == 0 && a1_.status() == SeekerStatus::Running)
      other_pending = prob_->cost(a1_.pending_test());
    if (stepping_ == 1 && a0_.status() == SeekerStatus::Running)
      other_pending = prob_->cost(a0_.pending_test());

    (stepping_ == 0 ? k0_ : k1_) += c;
    cost_ += c;
    known_[static_cast<std::size_t>(var)] = value ? 1 : 0;
    if (stepping_ == 0) a0_.receive(var, value);
    else a1_.receive(var, value);

    const bool running_after = (stepping_ == 0 ? a0_.status() : a1_.status()) ==
                               SeekerStatus::Running;
    trace_.push_back({stepping_, var, value, c, k0_, k1_, other_pending,
                      rule_step, running_after});
    settle();
  }

  double cost() const { return cost_; }
  double k0() const { return k0_; }
  double k1() const { return k1_; }
  int value() const { return value_; }
  const PartialAssignment& certificate() const { return cert_; }
  const std::vector<TraceStep>& trace() const { return trace_; }

  StrategyResult result() const {
    if (phase_ != Phase::Done) throw std::logic_error("protocol still running");
    return {value_, cert_, cost_, trace_};
  }

 private:
  enum class Phase { Racing, Completing, Done };

  void settle() {
    while (true) {
      // Success is detected before choosing the next test.
      if (a0_.status() == SeekerStatus::Succeeded) return finish(0);
      if (a1_.status() == SeekerStatus::Succeeded) return finish(1);
      if (phase_ == Phase::Racing) {
        if (a0_.status() == SeekerStatus::Failed && a1_.status() == SeekerStatus::Failed)
          throw std::logic_error("both certificate seekers failed");
        if (a0_.status() == SeekerStatus::Failed) {
          phase_ = Phase::Completing;
          completing_ = 1;
          continue;
        }
        if (a1_.status() == SeekerStatus::Failed) {
          phase_ = Phase::Completing;
          completing_ = 0;
          continue;
        }
        if (share_) {
          if (propagate(a0_) || propagate(a1_)) continue;
        }
        const double c0 = prob_->cost(a0_.pending_test());
        const double c1 = prob_->cost(a1_.pending_test());
        stepping_ = (k0_ + c0 <= k1_ + c1) ? 0 : 1;
        return;
      }
      // Completing: run the surviving side until it outputs a certificate.
      if ((completing_ == 0 ? a0_.status() : a1_.status()) == SeekerStatus::Failed)
        throw std::logic_error("surviving seeker failed");
      if (share_ && (completing_ == 0 ? propagate(a0_) : propagate(a1_))) continue;
      stepping_ = completing_;
      return;
    }
  }

  template <class S>
  bool propagate(S& seeker) {
    if (seeker.status() != SeekerStatus::Running) return false;
    const int v = seeker.pending_test();
    if (known_[static_cast<std::size_t>(v)] < 0) return false;
    seeker.receive(v, known_[static_cast<std::size_t>(v)] == 1);
    return true;
  }

  void finish(int winner) {
    phase_ = Phase::Done;
    value_ = winner == 0 ? 0 : 1;
    cert_ = winner == 0 ? a0_.certificate() : a1_.certificate();
  }

  const EvalProblem* prob_;
  A0 a0_;
  A1 a1_;
  bool share_;
  std::vector<std::int8_t> known_;
  Phase phase_ = Phase::Racing;
  int completing_ = -1;
  int stepping_ = -1;
  double k0_ = 0.0, k1_ = 0.0, cost_ = 0.0;
  int value_ = 0;
  PartialAssignment cert_;
  std::vector<TraceStep> trace_;
};

// Drives a process to completion against a test oracle.
template <class Process>
void run_with_oracle(Process& process, TestOracle& oracle) {
  while (!process.finished())
    process.feed(oracle.test(process.next_variable(), process.next_owner()));
}

// ---------------------------------------------------------------------------
// Entry points.
// ---------------------------------------------------------------------------
inline StrategyResult naive_strategy(const EvalProblem& prob, TestOracle& oracle) {
  SeekerProcess<NaiveSeeker> p(prob, NaiveSeeker(prob), -1);
  run_with_oracle(p, oracle);
  const SeekerRun r = p.run_record();
  return {r.value, r.certificate, r.total_cost, r.trace};
}

inline SeekerRun alg1_kdnf(const EvalProblem& prob, TestOracle& oracle) {
  SeekerProcess<Alg1KDnfSeeker> p(prob, Alg1KDnfSeeker(prob), 1);
  run_with_oracle(p, oracle);
  return p.run_record();
}

inline SeekerRun alg1_kterm(const EvalProblem& prob, TestOracle& oracle) {
  SeekerProcess<Alg1KTermSeeker> p(prob, Alg1KTermSeeker(prob), 1);
  run_with_oracle(p, oracle);
  return p.run_record();
}

inline SeekerRun alg0_adaptive(const EvalProblem& prob, TestOracle& oracle, CoverRule rule) {
  SeekerProcess<Alg0AdaptiveSeeker> p(prob, Alg0AdaptiveSeeker(prob, rule), 0);
  run_with_oracle(p, oracle);
  return p.run_record();
}

using KDnfProcess = RoundRobinProcess<Alg0AdaptiveSeeker, Alg1KDnfSeeker>;
using KTermProcess = RoundRobinProcess<Alg0AdaptiveSeeker, Alg1KTermSeeker>;

inline KDnfProcess make_kdnf_process(const EvalProblem& prob, bool share = false) {
  return KDnfProcess(prob, Alg0AdaptiveSeeker(prob, CoverRule::DualGreedy),
                     Alg1KDnfSeeker(prob), share);
}

inline KTermProcess make_kterm_process(const EvalProblem& prob, bool share = false) {
  return KTermProcess(prob, Alg0AdaptiveSeeker(prob, CoverRule::Greedy),
                      Alg1KTermSeeker(prob), share);
}

// Round-robin of Alg0(dual greedy) and Alg1(min-cost term): the k-DNF strategy.
inline StrategyResult kdnf_strategy(const EvalProblem& prob, TestOracle& oracle,
                                    bool share = false) {
  auto p = make_kdnf_process(prob, share);
  run_with_oracle(p, oracle);
  return p.result();
}

// Round-robin of Alg0(Chvatal greedy) and Alg1(term by term): the k-term strategy.
inline StrategyResult kterm_strategy(const EvalProblem& prob, TestOracle& oracle,
                                     bool share = false) {
  auto p = make_kterm_process(prob, share);
  run_with_oracle(p, oracle);
  return p.result();
}

}  // namespace sbfe
