#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sbfe/decision_tree.hpp"
#include "sbfe/generators.hpp"
#include "sbfe/oracle.hpp"
#include "sbfe/strategies.hpp"

#include "test_support.hpp"

using namespace sbfe;
using Catch::Matchers::WithinAbs;
using test::bits;
using test::make;
using test::unit_uniform;

TEST_CASE("opt_expected_cost on pinned instances") {
  const EvalProblem path = unit_uniform(make(3, {{0, 1}, {1, 2}}));
  REQUIRE_THAT(opt_expected_cost(path).expected_cost(), WithinAbs(1.75, 1e-9));

  const EvalProblem single(make(1, {{0}}), {7.0}, {0.3});
  REQUIRE_THAT(opt_expected_cost(single).expected_cost(), WithinAbs(7.0, 1e-9));

  const EvalProblem read_once = unit_uniform(make(4, {{0, 1}, {2, 3}}));
  REQUIRE_THAT(opt_expected_cost(read_once).expected_cost(), WithinAbs(2.625, 1e-9));
}

TEST_CASE("oracle policy plays out to its own expected cost") {
  const EvalProblem prob = unit_uniform(make(3, {{0, 1}, {1, 2}}));
  const OraclePolicy policy = opt_expected_cost(prob);

  // first test is the shared variable x2
  REQUIRE(policy.next_test(PartialAssignment(3)) == 1);

  const PolicyProcess<OraclePolicy> proto(prob, policy);
  REQUIRE_THAT(exact_strategy_cost(prob, proto),
               WithinAbs(policy.expected_cost(), 1e-9));

  const DecisionTree tree = policy_to_tree(policy, prob.n());
  REQUIRE_THAT(tree.expected_cost(prob), WithinAbs(policy.expected_cost(), 1e-9));
  for (std::uint32_t m = 0; m < 8; ++m) {
    const PartialAssignment x = test::input_from(m, 3);
    REQUIRE(tree.evaluate(x) == static_cast<int>(prob.formula().evaluate(x)));
  }
}

TEST_CASE("min-cost certificates") {
  const EvalProblem path = unit_uniform(make(3, {{0, 1}, {1, 2}}));

  const CertificateResult zero = min_cost_certificate(path, bits("000"));
  REQUIRE_THAT(zero.cost, WithinAbs(1.0, 1e-12));
  REQUIRE(zero.certificate.to_string() == "*0*");

  const CertificateResult one = min_cost_certificate(path, bits("111"));
  REQUIRE_THAT(one.cost, WithinAbs(2.0, 1e-12));
  REQUIRE(path.formula().certificate_kind(one.certificate) == CertificateKind::OneCert);

  const EvalProblem single(make(1, {{0}}), {7.0}, {0.5});
  REQUIRE_THAT(min_cost_certificate(single, bits("1")).cost, WithinAbs(7.0, 1e-12));
}

TEST_CASE("expected certificate cost") {
  REQUIRE_THAT(expected_certificate_cost(unit_uniform(make(2, {{0}, {1}}))),
               WithinAbs(1.25, 1e-9));
  REQUIRE_THAT(expected_certificate_cost(unit_uniform(make(2, {{0, 1}}))),
               WithinAbs(1.25, 1e-9));
  const EvalProblem single(make(1, {{0}}), {3.5}, {0.7});
  REQUIRE_THAT(expected_certificate_cost(single), WithinAbs(3.5, 1e-9));
  // and the path formula used across the suite
  REQUIRE_THAT(expected_certificate_cost(unit_uniform(make(3, {{0, 1}, {1, 2}}))),
               WithinAbs(1.5, 1e-9));
}

TEST_CASE("naive strategy prices at 1.5 on the two-variable or") {
  const EvalProblem prob = unit_uniform(make(2, {{0}, {1}}));
  const SeekerProcess<NaiveSeeker> proto(prob, NaiveSeeker(prob), -1);
  REQUIRE_THAT(exact_strategy_cost(prob, proto), WithinAbs(1.5, 1e-9));
}

TEST_CASE("tree-walk pricing equals full enumeration") {
  Rng rng(909);
  for (int round = 0; round < 40; ++round) {
    const int n = rng.uniform_int(1, 6);
    DnfFormula f = random_monotone_dnf(rng, n, 3, 4);
    const EvalProblem prob = random_problem(rng, std::move(f), 0.2, 5.0, 0.2, 0.8);

    const auto kdnf = make_kdnf_process(prob, false);
    REQUIRE_THAT(exact_strategy_cost(prob, kdnf),
                 WithinAbs(enumerate_strategy_cost(prob, kdnf).expected_cost, 1e-9));

    const SeekerProcess<NaiveSeeker> naive(prob, NaiveSeeker(prob), -1);
    REQUIRE_THAT(exact_strategy_cost(prob, naive),
                 WithinAbs(enumerate_strategy_cost(prob, naive).expected_cost, 1e-9));
  }
}

TEST_CASE("monte carlo pricing agrees with exact within three standard errors") {
  const EvalProblem prob = unit_uniform(make(3, {{0, 1}, {1, 2}}));
  const auto proto = make_kdnf_process(prob, false);
  const double exact = exact_strategy_cost(prob, proto);
  const CostReport mc = mc_strategy_cost(prob, proto, 100000, 2024);
  REQUIRE(mc.mc.has_value());
  REQUIRE(std::abs(mc.expected_cost - exact) <= 3.0 * mc.mc->std_error + 1e-6);

  // reproducible: same seed, same mean
  const CostReport again = mc_strategy_cost(prob, proto, 100000, 2024);
  REQUIRE(again.expected_cost == mc.expected_cost);
}

TEST_CASE("monte carlo certificate cost tracks the exact value") {
  const EvalProblem prob = unit_uniform(make(3, {{0, 1}, {1, 2}}));
  const double exact = expected_certificate_cost(prob);
  const CostReport mc = expected_certificate_cost_mc(prob, 50000, 11);
  REQUIRE(std::abs(mc.expected_cost - exact) <= 3.0 * mc.mc->std_error + 1e-6);
  REQUIRE(expected_certificate_cost_mc(prob, 50000, 11).expected_cost == mc.expected_cost);
  REQUIRE_THROWS_AS(expected_certificate_cost_mc(prob, 0, 1), InvalidInputError);
}

TEST_CASE("per-input breakdown sums to the expectation") {
  const EvalProblem prob = unit_uniform(make(2, {{0}, {1}}));
  const SeekerProcess<NaiveSeeker> proto(prob, NaiveSeeker(prob), -1);
  const CostReport report = enumerate_strategy_cost(prob, proto, /*with_breakdown=*/true);
  REQUIRE(report.breakdown->size() == 4);
  double total = 0.0, mass = 0.0;
  for (const auto& [x, pr, cost] : *report.breakdown) {
    total += pr * cost;
    mass += pr;
  }
  REQUIRE_THAT(total, WithinAbs(report.expected_cost, 1e-9));
  REQUIRE_THAT(mass, WithinAbs(1.0, 1e-12));

  const auto doc = report.to_json();
  REQUIRE(doc.at("mode") == "exact");
  REQUIRE(doc.at("breakdown").size() == 4);
}

TEST_CASE("cost ordering: E[CERT] <= E[OPT] <= E[strategy]") {
  Rng rng(4242);
  for (int round = 0; round < 40; ++round) {
    const int n = rng.uniform_int(1, 7);
    DnfFormula f = random_monotone_dnf(rng, n, 3, 5);
    const EvalProblem prob = random_problem(rng, std::move(f), 0.2, 6.0, 0.2, 0.8);
    const double cert = expected_certificate_cost(prob);
    const double opt = opt_expected_cost(prob).expected_cost();
    REQUIRE(cert <= opt + 1e-9);
    REQUIRE(opt <= exact_strategy_cost(prob, make_kdnf_process(prob)) + 1e-9);
    REQUIRE(opt <= exact_strategy_cost(prob, make_kterm_process(prob)) + 1e-9);
    const SeekerProcess<NaiveSeeker> naive(prob, NaiveSeeker(prob), -1);
    REQUIRE(opt <= exact_strategy_cost(prob, naive) + 1e-9);
  }
}

TEST_CASE("approximation bounds on the worked examples") {
  const EvalProblem path = unit_uniform(make(3, {{0, 1}, {1, 2}}));
  const double ratio_kdnf = exact_strategy_cost(path, make_kdnf_process(path)) /
                            expected_certificate_cost(path);
  REQUIRE(ratio_kdnf <= 16.0 + 1e-9);  // 4 / rho^k at rho = 1/2, k = 2

  const EvalProblem pairs = unit_uniform(make(4, {{0, 1}, {2, 3}}));
  const double ratio_kterm = exact_strategy_cost(pairs, make_kterm_process(pairs)) /
                             expected_certificate_cost(pairs);
  REQUIRE(ratio_kterm <= std::max(4.0, 4.0 * (1.0 + std::log(2.0))) + 1e-9);
}

TEST_CASE("masked restricted values match formula restriction") {
  Rng rng(31);
  for (int round = 0; round < 80; ++round) {
    const int n = rng.uniform_int(1, 8);
    const DnfFormula f = random_monotone_dnf(rng, n, 3, 5);
    const detail::MaskedFormula masked(f);
    PartialAssignment b(n);
    for (int i = 0; i < n; ++i)
      if (rng.bernoulli(0.5)) b.set(i, rng.bernoulli(0.5));
    const auto [zeros, ones] = detail::masks_of(b);
    const DnfFormula r = f.restrict(b);
    const int status = masked.restricted_value(zeros, ones);
    if (r.is_constant()) REQUIRE(status == static_cast<int>(r.constant_value()));
    else REQUIRE(status == -1);
  }
}

TEST_CASE("oracle guards") {
  std::vector<Term> terms{{0}};
  const DnfFormula f = DnfFormula::make(17, std::move(terms));
  REQUIRE_THROWS_AS(opt_expected_cost(EvalProblem::with_defaults(f)), SizeLimitError);
  REQUIRE_THROWS_AS(expected_certificate_cost(EvalProblem::with_defaults(f)), SizeLimitError);
}
