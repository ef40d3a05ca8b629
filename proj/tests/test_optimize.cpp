#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "poalab/basis.hpp"
#include "poalab/characterize.hpp"
#include "poalab/optimize.hpp"
#include "poalab/random.hpp"

using namespace poalab;

namespace {

using V = std::vector<double>;

V powers(int j, int n) {
  V c(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) c[static_cast<std::size_t>(k - 1)] = std::pow(k, j);
  return c;
}

std::vector<V> poly_costs(int d, int n) {
  std::vector<V> out;
  for (int j = 0; j <= d; ++j) out.push_back(powers(j, n));
  return out;
}

double single_poa(const BasisPair& p) { return characterize(std::vector{p}, p.n()).poa; }

}  // namespace

TEST_CASE("optimal rules for polynomial costs at n = 100") {
  const int n = 100;
  const auto rules = optimize_class(polynomial_basis(4, n), n);
  const double reference[] = {2.012, 5.101, 15.55, 55.45};
  CHECK(rules.front().poa == doctest::Approx(1.0).epsilon(1e-9));
  for (int d = 1; d <= 4; ++d) {
    const double poa =
        class_poa_from_rules(std::span(rules).subspan(0, static_cast<std::size_t>(d) + 1));
    CHECK(std::abs(poa - reference[d - 1]) <= 5e-4 * reference[d - 1]);
  }
}

TEST_CASE("rules are never worse than untolled or marginal cost") {
  for (int n : {2, 5, 12}) {
    for (int j = 0; j <= 3; ++j) {
      const auto c = powers(j, n);
      const auto base = from_congestion(c, n);
      const auto rule = optimize_rule(base);
      const auto mc = marginal_cost_pair(c, n);
      CHECK(rule.poa <= single_poa(base) + 1e-9);
      CHECK(rule.poa <= single_poa(mc) + 1e-9);
      CHECK(rule.poa >= 1.0 - 1e-12);
    }
  }
}

TEST_CASE("reported rule PoA matches an independent evaluation") {
  Xoshiro256 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(6));
    V c(static_cast<std::size_t>(n));
    double level = 0.1;
    for (auto& v : c) v = (level += 2.0 * rng.uniform());
    const auto base = from_congestion(c, n);
    const auto rule = optimize_rule(base);
    CHECK(rule.poa ==
          doctest::Approx(oracle::envelope_poa({rule_pair(base, rule)}, n)).epsilon(1e-8));
    // Random perturbations of F* never do better.
    for (int k = 0; k < 20; ++k) {
      V f = rule.f_opt;
      for (auto& v : f) v *= 1.0 + 0.2 * (rng.uniform() - 0.5);
      CHECK(oracle::envelope_poa({base.with_generating(f, "perturbed")}, n) >=
            rule.poa - 1e-8);
    }
  }
}

TEST_CASE("per-pair rules decouple") {
  for (int d = 1; d <= 3; ++d) {
    for (int n : {1, 4, 9, 20}) {
      const auto bases = polynomial_basis(d, n);
      const auto rules = optimize_class(bases, n);
      std::vector<BasisPair> tolled;
      for (std::size_t j = 0; j < bases.size(); ++j) tolled.push_back(rule_pair(bases[j], rules[j]));
      CHECK(characterize(tolled, n).poa ==
            doctest::Approx(class_poa_from_rules(rules)).epsilon(1e-8));
    }
  }
}

TEST_CASE("rules scale with the pair") {
  const auto base = from_congestion(powers(2, 8), 8);
  const auto rule = optimize_rule(base);
  const auto scaled = optimize_rule(base.scaled(7.5));
  CHECK(scaled.poa == doctest::Approx(rule.poa).epsilon(1e-9));
  const auto evaluated = single_poa(rule_pair(base.scaled(7.5), rule));
  CHECK(evaluated == doctest::Approx(rule.poa).epsilon(1e-9));

  OptimizeOptions norm;
  norm.normalize = true;
  const auto normalized = optimize_rule(base.scaled(7.5), norm);
  CHECK(normalized.f_opt.front() == doctest::Approx(7.5));
  CHECK(normalized.poa == doctest::Approx(rule.poa).epsilon(1e-9));
}

TEST_CASE("constant latency needs no incentive") {
  for (int n : {1, 3, 10}) {
    const auto rule = optimize_rule(from_congestion(powers(0, n), n));
    CHECK(rule.rho == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rule.poa == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("coverage with three users beats every grid rule") {
  const auto base = marginal_contribution_welfare(V{0, 1, 1, 1}, 3);
  const auto rule = optimize_rule(base);
  CHECK(rule.side == Side::kWelfareMax);
  CharacterizeOptions geo;
  geo.engine = Engine::kGeometric;
  double grid_best = kInf;
  const int steps = 40;
  for (int a = 0; a <= steps; ++a) {
    for (int b = 0; b <= steps; ++b) {
      const V f{1.0, static_cast<double>(a) / steps, static_cast<double>(b) / steps};
      grid_best = std::min(grid_best,
                           characterize(std::vector{base.with_generating(f, "grid")}, 3, geo).poa);
    }
  }
  CHECK(rule.poa <= grid_best + 1e-9);
  CHECK(grid_best - rule.poa <= 0.02);
  CHECK(rule.poa < single_poa(base));
}

TEST_CASE("optimal welfare rules beat marginal contribution") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const int n = 2 + static_cast<int>(seed % 9);
    const auto base = marginal_contribution_welfare(random_concave_welfare(n, seed), n);
    const auto rule = optimize_rule(base);
    CHECK(rule.poa <= single_poa(base) + 1e-9);
    CHECK(rule.poa >= 1.0 - 1e-12);
    for (double v : rule.f_opt) CHECK(v >= -1e-12);
  }
}

TEST_CASE("degenerate and malformed inputs") {
  const BasisPair flat(2, V{0, 0, 0}, V{0, 1, 1, 0}, "flat");
  const auto rule = optimize_rule(flat);
  CHECK(rule.degenerate);
  CHECK(rule.poa == 1.0);
  CHECK_THROWS_AS(optimize_class(std::vector<BasisPair>{}, 2), ValidationError);
  CHECK_THROWS_AS(class_poa_from_rules(std::vector<OptimalRule>{}), ValidationError);
  CHECK_THROWS_AS(optimize_welfare_rule(from_congestion(powers(1, 2), 2)), ValidationError);
}

TEST_CASE("load-independent incentives") {
  const int n = 100;
  const double reference[] = {2.148, 5.333, 18.36, 89.41};
  for (int d = 1; d <= 4; ++d) {
    const auto costs = poly_costs(d, n);
    const auto fixed = optimize_fixed_incentive(costs, n);
    CHECK(fixed.tau_available);
    CHECK(fixed.tau.size() == costs.size());
    CHECK(std::abs(fixed.poa - reference[d - 1]) <= 5e-4 * reference[d - 1]);
    // Ordering: optimal rules <= fixed incentives <= no incentives.
    const auto rules = optimize_class(polynomial_basis(d, n), n);
    CHECK(class_poa_from_rules(rules) <= fixed.poa + 1e-9);
    CHECK(fixed.poa <= characterize(polynomial_basis(d, n), n).poa + 1e-9);
  }
}

TEST_CASE("locked incentives reproduce the untolled bound") {
  for (int d = 1; d <= 3; ++d) {
    for (int n : {2, 7, 30}) {
      const auto locked = optimize_fixed_incentive(poly_costs(d, n), n, {}, true);
      CHECK(locked.poa == doctest::Approx(characterize(polynomial_basis(d, n), n).poa).epsilon(1e-8));
      for (double t : locked.tau) CHECK(t == 0.0);
    }
  }
  // The computed incentives really achieve the reported bound.
  const int n = 6;
  const auto costs = poly_costs(2, n);
  const auto fixed = optimize_fixed_incentive(costs, n);
  std::vector<BasisPair> tolled;
  for (std::size_t j = 0; j < costs.size(); ++j) {
    tolled.push_back(from_incentivized(costs[j], V(static_cast<std::size_t>(n), fixed.tau[j]), n));
  }
  CHECK(oracle::envelope_poa(tolled, n) == doctest::Approx(fixed.poa).epsilon(1e-7));
  CHECK_THROWS_AS(optimize_fixed_incentive(std::vector<V>{}, n), ValidationError);
  CHECK_THROWS_AS(optimize_fixed_incentive(std::vector<V>{{1.0}}, n), ValidationError);
}
