// Acceptance suite: every criterion prints one PASS/FAIL line; the process
// exits with the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sbfe/sbfe.hpp"

#include "test_support.hpp"

using namespace sbfe;

namespace {

constexpr double kEps = 1e-9;
int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int id, const char* name, bool ok, const std::string& detail, double secs) {
  std::printf("%s criterion %d: %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, name,
              detail.c_str(), secs);
  if (!ok) ++failures;
}

EvalProblem random_instance(Rng& rng, int n, int max_term, int max_terms) {
  DnfFormula f = random_monotone_dnf(rng, n, max_term, max_terms);
  return random_problem(rng, std::move(f), 0.1, 10.0, 0.2, 0.8);
}

// 1. Output correctness and genuine certificates for naive/kdnf/kterm on
//    every input of 500 sampled formulas, n <= 10.
void criterion1() {
  Timer timer;
  Rng rng(101);
  long runs = 0;
  bool ok = true;
  std::string detail;
  for (int round = 0; round < 500 && ok; ++round) {
    const int n = rng.uniform_int(1, 10);
    const EvalProblem prob = random_instance(rng, n, 3, 6);
    for (std::uint32_t m = 0; m < (std::uint32_t{1} << n) && ok; ++m) {
      const PartialAssignment x = test::input_from(m, n);
      const int want = prob.formula().evaluate(x) ? 1 : 0;
      const auto check = [&](const StrategyResult& r, const char* name) {
        const CertificateKind kind = prob.formula().certificate_kind(r.certificate);
        const bool good = r.value == want && r.certificate.contained_in(x) &&
                          kind == (want ? CertificateKind::OneCert : CertificateKind::ZeroCert);
        if (!good) {
          ok = false;
          detail = std::string(name) + " wrong on " + x.to_string();
        }
        ++runs;
      };
      TestOracle o1(prob, x);
      check(naive_strategy(prob, o1), "naive");
      TestOracle o2(prob, x);
      check(kdnf_strategy(prob, o2), "kdnf");
      TestOracle o3(prob, x);
      check(kterm_strategy(prob, o3), "kterm");
    }
  }
  const double secs = timer.seconds();
  if (ok && secs >= 120.0) {
    ok = false;
    detail = "exceeded the 2 minute budget";
  }
  if (ok) detail = std::to_string(runs) + " strategy runs, all correct";
  report(1, "strategy correctness, n <= 10", ok, detail, secs);
}

// 2. Round-robin budget balance after every rule step and the winner-side
//    ordering at termination, over 10^4
//    random round-robin runs.
void criterion2() {
  Timer timer;
  long violations = 0;
  long steps = 0;
  for (int round = 0; round < 10000; ++round) {
    Rng rng = Rng::stream(202, static_cast<std::uint64_t>(round));
    const int n = rng.uniform_int(2, 8);
    const EvalProblem prob = random_instance(rng, n, 3, 6);
    const PartialAssignment x = sample_input(rng, prob);
    TestOracle oracle(prob, x);

    const auto audit = [&](const auto& process) {
      for (const TraceStep& s : process.trace()) {
        if (!s.rule_step || !s.owner_running_after || s.other_pending_cost < 0) continue;
        ++steps;
        const bool fine =
            s.owner == 1 ? (s.k1 - s.other_pending_cost <= s.k0 + kEps && s.k0 <= s.k1 + kEps)
                         : (s.k0 - s.other_pending_cost <= s.k1 + kEps && s.k1 <= s.k0 + kEps);
        if (!fine) ++violations;
      }
      const bool order_ok = process.value() == 1 ? process.k1() >= process.k0() - kEps
                                                 : process.k0() >= process.k1() - kEps;
      if (!order_ok) ++violations;
    };

    if (round % 2 == 0) {
      auto p = make_kdnf_process(prob, false);
      run_with_oracle(p, oracle);
      audit(p);
    } else {
      auto p = make_kterm_process(prob, false);
      run_with_oracle(p, oracle);
      audit(p);
    }
  }
  report(2, "round-robin budget-balance audit", violations == 0,
         std::to_string(steps) + " audited steps, " + std::to_string(violations) +
             " violations",
         timer.seconds());
}

// 3. Adaptive Alg0 commits exactly the offline cover of the true zero set.
void criterion3() {
  Timer timer;
  long mismatches = 0;
  long cases = 0;
  std::uint64_t stream = 0;
  while (cases < 1000) {
    Rng rng = Rng::stream(303, stream++);
    const int n = rng.uniform_int(1, 10);
    const EvalProblem prob = random_instance(rng, n, 3, 6);
    const PartialAssignment x = sample_input(rng, prob);
    if (prob.formula().evaluate(x)) continue;
    ++cases;

    std::vector<int> zeros;
    for (int i = 0; i < n; ++i)
      if (!x.value(i)) zeros.push_back(i);
    const SetCoverInstance z_inst = build_instance(prob.formula(), zeros, prob.costs());

    TestOracle o1(prob, x);
    SeekerProcess<Alg0AdaptiveSeeker> dual(prob, Alg0AdaptiveSeeker(prob, CoverRule::DualGreedy), 0);
    run_with_oracle(dual, o1);
    if (dual.seeker().committed() != dual_greedy_cover(z_inst)) ++mismatches;

    TestOracle o2(prob, x);
    SeekerProcess<Alg0AdaptiveSeeker> greedy(prob, Alg0AdaptiveSeeker(prob, CoverRule::Greedy), 0);
    run_with_oracle(greedy, o2);
    if (greedy.seeker().committed() != greedy_cover(z_inst)) ++mismatches;
  }
  report(3, "Alg0 offline equivalence (both rules)", mismatches == 0,
         std::to_string(cases) + " zero inputs, " + std::to_string(mismatches) +
             " mismatches",
         timer.seconds());
}

// 4. Approximation bounds of both cover solvers against the exact optimum.
void criterion4() {
  Timer timer;
  long violations = 0;
  long cases = 0;
  std::uint64_t stream = 0;
  while (cases < 1000) {
    Rng rng = Rng::stream(404, stream++);
    const int elements = rng.uniform_int(1, 8);
    const int subsets = rng.uniform_int(1, 20);
    const SetCoverInstance inst = random_cover_instance(rng, elements, subsets, 0.1, 10.0);
    if (!inst.feasible()) continue;
    ++cases;
    const double opt = brute_min_cover(inst).weight;
    double harmonic = 0.0;
    for (int i = 1; i <= elements; ++i) harmonic += 1.0 / i;
    if (inst.weight_of(greedy_cover(inst)) > harmonic * opt + kEps) ++violations;
    if (inst.weight_of(dual_greedy_cover(inst)) > inst.max_frequency() * opt + kEps)
      ++violations;
  }
  report(4, "set-cover H(m) and alpha bounds", violations == 0,
         std::to_string(cases) + " instances, " + std::to_string(violations) + " violations",
         timer.seconds());
}

// 5. Expected-cost ratio audits for both strategy compositions.
void criterion5() {
  Timer timer;
  long violations4 = 0, violations5 = 0;
  for (int round = 0; round < 1000; ++round) {
    Rng rng = Rng::stream(505, static_cast<std::uint64_t>(round));
    const int n = rng.uniform_int(2, 8);
    const int k = rng.uniform_int(1, 3);

    DnfFormula f = random_monotone_dnf(rng, n, k, 2 * n);
    EvalProblem prob = random_problem(rng, std::move(f), 0.1, 10.0, 0.2, 0.8);
    double cert = expected_certificate_cost(prob);
    double bound = 4.0 / std::pow(prob.rho(), prob.formula().classify().max_term_size);
    if (exact_strategy_cost(prob, make_kdnf_process(prob)) / cert > bound + kEps)
      ++violations4;

    DnfFormula g = random_monotone_kterm(rng, n, k, n);
    EvalProblem tprob = random_problem(rng, std::move(g), 0.1, 10.0, 0.2, 0.8);
    cert = expected_certificate_cost(tprob);
    const int kk = tprob.formula().classify().term_count;
    bound = std::max(2.0 * kk, (2.0 / tprob.rho()) * (1.0 + std::log(kk)));
    if (exact_strategy_cost(tprob, make_kterm_process(tprob)) / cert > bound + kEps)
      ++violations5;
  }
  report(5, "k-DNF and k-term approximation-ratio audits",
         violations4 == 0 && violations5 == 0,
         "kdnf violations " + std::to_string(violations4) + ", kterm violations " +
             std::to_string(violations5),
         timer.seconds());
}

// 6. The sibling-class DP equals the exhaustive oracle; the block variant
//    matches both under unit costs and the uniform distribution.
void criterion6() {
  Timer timer;
  long mismatches = 0;
  for (int round = 0; round < 300; ++round) {
    Rng rng = Rng::stream(606, static_cast<std::uint64_t>(round));
    const int n = rng.uniform_int(2, 12);
    const int k = rng.uniform_int(1, 3);
    DnfFormula f = random_monotone_kterm(rng, n, k, n);
    const EvalProblem prob = random_problem(rng, f, 0.1, 10.0, 0.1, 0.9);
    if (std::abs(optimal_strategy_dp(prob).expected_cost() -
                 opt_expected_cost(prob).expected_cost()) > kEps)
      ++mismatches;

    const EvalProblem uu = EvalProblem::with_defaults(f);
    const double blocks = uniform_unit_dp(f).expected_cost();
    if (std::abs(blocks - optimal_strategy_dp(uu).expected_cost()) > kEps) ++mismatches;
    if (std::abs(blocks - opt_expected_cost(uu).expected_cost()) > kEps) ++mismatches;
  }
  report(6, "exact DP vs exhaustive oracle (300 instances)", mismatches == 0,
         std::to_string(mismatches) + " mismatches", timer.seconds());
}

// 7. Gap family values at desk scale, closed form and oracle, and the
//    monotone opt/cert ratio across n = 8, 12, 16.
void criterion7() {
  Timer timer;
  bool ok = true;
  std::string detail;

  const GapInstance mid = gap_instance_nm(12, 2);
  const GapValues closed = gap_closed_forms(mid);
  const EvalProblem prob = EvalProblem::with_defaults(mid.formula);
  const double opt_oracle = opt_expected_cost(prob).expected_cost();
  const double cert_oracle = expected_certificate_cost(prob);
  for (const double v : {closed.e_opt, opt_oracle})
    if (std::abs(v - 4.9322) > 1e-4) ok = false;
  for (const double v : {closed.e_cert, cert_oracle})
    if (std::abs(v - 2.7120) > 1e-4) ok = false;

  const GapValues a = gap_closed_forms(gap_instance_nm(8, 2));
  const GapValues c = gap_closed_forms(gap_instance_nm(16, 2));
  const double r8 = a.e_opt / a.e_cert;
  const double r12 = closed.e_opt / closed.e_cert;
  const double r16 = c.e_opt / c.e_cert;
  if (!(r8 < r12 && r12 < r16)) ok = false;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "E[OPT]=%.6f/%.6f E[CERT]=%.6f/%.6f ratios %.3f<%.3f<%.3f", closed.e_opt,
                opt_oracle, closed.e_cert, cert_oracle, r8, r12, r16);
  detail = buf;
  report(7, "gap family reproduction (n=12, m=2)", ok, detail, timer.seconds());
}

// 8. Recovered vertex covers are minimum on 50 random graphs.
void criterion8() {
  Timer timer;
  long wrong = 0;
  for (int round = 0; round < 50; ++round) {
    Rng rng = Rng::stream(808, static_cast<std::uint64_t>(round));
    const Graph g = random_graph(rng, rng.uniform_int(2, 8), 0.4);
    const std::vector<int> cover = vertex_cover_demo(g);
    for (const auto& [u, v] : g.edges) {
      const bool covered = std::find(cover.begin(), cover.end(), u) != cover.end() ||
                           std::find(cover.begin(), cover.end(), v) != cover.end();
      if (!covered) ++wrong;
    }
    if (static_cast<int>(cover.size()) != test::brute_min_vertex_cover(g.vertices, g.edges))
      ++wrong;
  }
  report(8, "vertex-cover recovery on 50 graphs", wrong == 0,
         std::to_string(wrong) + " deviations", timer.seconds());
}

// 9. Engineering targets: n=14 exhaustive oracle under 60 s, a 10^6-state
//    sibling DP under 30 s.
void criterion9() {
  Timer timer;
  Rng rng(909);
  DnfFormula f = random_monotone_dnf(rng, 14, 3, 10);
  const EvalProblem prob = random_problem(rng, std::move(f), 0.1, 10.0, 0.2, 0.8);
  Timer oracle_timer;
  const double opt = opt_expected_cost(prob).expected_cost();
  const double oracle_secs = oracle_timer.seconds();

  // three classes of 98 variables each: a 100^3-state table
  std::vector<Term> terms(2);
  for (int i = 0; i < 98; ++i) {
    terms[0].push_back(i);          // class A, only term 0
    terms[1].push_back(98 + i);     // class B, only term 1
    terms[0].push_back(196 + i);    // class C, both terms
    terms[1].push_back(196 + i);
  }
  const EvalProblem big = EvalProblem::with_defaults(DnfFormula::make(294, terms));
  Timer dp_timer;
  const DpStrategy dp = optimal_strategy_dp(big, 2'000'000);
  const double dp_secs = dp_timer.seconds();

  const bool ok = oracle_secs < 60.0 && dp_secs < 30.0 && opt > 0.0 &&
                  dp.state_count() == 1'000'000 && dp.expected_cost() > 0.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "n=14 oracle %.1fs (<60), %llu-state DP %.1fs (<30)",
                oracle_secs, static_cast<unsigned long long>(dp.state_count()), dp_secs);
  report(9, "performance targets", ok, buf, timer.seconds());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures == 0) std::printf("all acceptance criteria passed\n");
  else std::printf("%d criteria FAILED\n", failures);
  return failures;
}
