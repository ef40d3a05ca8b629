#pragma once

#include <span>
#include <string>
#include <vector>

#include "poalab/basis.hpp"
#include "poalab/lp.hpp"

namespace poalab {

struct OptimizeOptions {
  SolverTolerances tol{};
  // Rescale F* so that F*(1) = C(1) whenever both are positive.
  bool normalize = false;
};

struct OptimalRule {
  std::string label;
  Side side = Side::kCostMin;
  int n = 0;
  std::vector<double> f_opt;  // F*(1..n)
  double rho = 1.0;
  double poa = 1.0;
  bool degenerate = false;  // all-zero C or W: F = 0, rho = 1 by convention
};

// The pair {C, F*} induced by a rule.
BasisPair rule_pair(const BasisPair& base, const OptimalRule& rule);

OptimalRule optimize_cost_rule(const BasisPair& base,
                               const OptimizeOptions& opts = {});
OptimalRule optimize_welfare_rule(const BasisPair& base,
                                  const OptimizeOptions& opts = {});
OptimalRule optimize_rule(const BasisPair& base,
                          const OptimizeOptions& opts = {});

// One independent program per pair, solved concurrently; output order
// follows the input.
std::vector<OptimalRule> optimize_class(std::span<const BasisPair> bases, int n,
                                        const OptimizeOptions& opts = {});

// Worst per-pair PoA. Throws ValidationError on an empty or mixed list.
double class_poa_from_rules(std::span<const OptimalRule> rules);

struct FixedIncentiveResult {
  std::vector<double> tau;  // one constant incentive per basis
  double poa = 1.0;
  double rho = 1.0;
  double nu = 0.0;
  bool nu_floor_used = false;   // re-solved with nu >= 1e-6
  bool tau_available = true;    // false when nu* stayed at zero
  double floor_discrepancy = 0.0;
};

// Congestion bases c^j(1..n) with a load-independent incentive tau^j added
// to every F^j. With lock_incentive the incentives are pinned at zero.
FixedIncentiveResult optimize_fixed_incentive(
    std::span<const std::vector<double>> c_bases, int n,
    const SolverTolerances& tol = {}, bool lock_incentive = false);

}  // namespace poalab
