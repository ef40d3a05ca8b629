#include "poalab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "poalab/characterize.hpp"
#include "poalab/index_set.hpp"
#include "poalab/parallel.hpp"

namespace poalab {

BasisPair rule_pair(const BasisPair& base, const OptimalRule& rule) {
  return base.with_generating(rule.f_opt, rule.label);
}

namespace {

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return a == 0.0; });
}

// Variables F(1..n) then rho. Rows read
//   (x - z) F(x) - (y - z) F(x + 1) - C(x) rho >= -C(y)     (cost)
//  -(x - z) F(x) + (y - z) F(x + 1) - W(x) rho' >=  W(y)    (welfare, rho' = -rho)
LinearProgram rule_lp(const BasisPair& base) {
  const int n = base.n();
  const bool cost = base.side() == Side::kCostMin;
  LinearProgram lp(n + 1);
  lp.objective[static_cast<std::size_t>(n)] = 1.0;
  if (!cost) {
    for (int k = 0; k < n; ++k) lp.lower_bounds[static_cast<std::size_t>(k)] = 0.0;
  }
  const double sign = cost ? 1.0 : -1.0;
  for (const auto& t : enumerate_reduced(n).triplets) {
    std::vector<double> coef(static_cast<std::size_t>(n) + 1, 0.0);
    if (t.x >= 1) coef[static_cast<std::size_t>(t.x - 1)] += sign * (t.x - t.z);
    if (t.x + 1 <= n) coef[static_cast<std::size_t>(t.x)] -= sign * (t.y - t.z);
    coef[static_cast<std::size_t>(n)] = -base.c(t.x);
    lp.add_row(std::move(coef), -sign * base.c(t.y),
               {RowTag::Kind::kTriplet, 0, t});
  }
  return lp;
}

OptimalRule optimize_impl(const BasisPair& base, const OptimizeOptions& opts) {
  OptimalRule rule;
  rule.label = base.label() + "-opt";
  rule.side = base.side();
  rule.n = base.n();
  rule.f_opt.assign(static_cast<std::size_t>(base.n()), 0.0);
  if (all_zero(base.c_values())) {
    rule.degenerate = true;
    return rule;
  }
  const auto lp = rule_lp(base);
  const auto sol = solve(lp, opts.tol);
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError("rule synthesis LP for '" + base.label() + "' reported " +
                      std::string(to_string(sol.status)));
  }
  std::copy(sol.values.begin(), sol.values.end() - 1, rule.f_opt.begin());
  const double rho_var = sol.values.back();
  if (base.side() == Side::kCostMin) {
    rule.rho = rho_var;
    rule.poa = rho_var > opts.tol.activity_tol ? 1.0 / rho_var : kInf;
  } else {
    rule.rho = -rho_var;
    rule.poa = rule.rho;
  }
  if (opts.normalize && base.c(1) > 0.0 && rule.f_opt.front() > 0.0) {
    const double factor = base.c(1) / rule.f_opt.front();
    for (auto& v : rule.f_opt) v *= factor;
  }
  return rule;
}

}  // namespace

OptimalRule optimize_cost_rule(const BasisPair& base, const OptimizeOptions& opts) {
  if (base.side() != Side::kCostMin) {
    throw ValidationError("optimize_cost_rule needs a cost-side pair");
  }
  return optimize_impl(base, opts);
}

OptimalRule optimize_welfare_rule(const BasisPair& base,
                                  const OptimizeOptions& opts) {
  if (base.side() != Side::kWelfareMax) {
    throw ValidationError("optimize_welfare_rule needs a welfare-side pair");
  }
  return optimize_impl(base, opts);
}

OptimalRule optimize_rule(const BasisPair& base, const OptimizeOptions& opts) {
  return optimize_impl(base, opts);
}

std::vector<OptimalRule> optimize_class(std::span<const BasisPair> bases, int n,
                                        const OptimizeOptions& opts) {
  if (bases.empty()) throw ValidationError("basis list is empty");
  validate_class(bases, n, bases.front().side());
  return parallel_map<OptimalRule>(
      bases.size(), [&](std::size_t j) { return optimize_impl(bases[j], opts); });
}

double class_poa_from_rules(std::span<const OptimalRule> rules) {
  if (rules.empty()) throw ValidationError("rule list is empty");
  double worst = 0.0;
  for (const auto& r : rules) {
    if (r.n != rules.front().n || r.side != rules.front().side) {
      throw ValidationError("rules disagree in n or side");
    }
    worst = std::max(worst, r.poa);
  }
  return worst;
}

namespace {

LinearProgram fixed_incentive_lp(std::span<const std::vector<double>> c_bases,
                                 int n) {
  const int m = static_cast<int>(c_bases.size());
  LinearProgram lp(2 + m);
  lp.objective[1] = 1.0;
  lp.lower_bounds[0] = 0.0;
  const auto set = enumerate_reduced(n);
  for (int j = 0; j < m; ++j) {
    const auto& c = c_bases[static_cast<std::size_t>(j)];
    auto c_at = [&](int k) {
      return k >= 1 && k <= n ? c[static_cast<std::size_t>(k - 1)] : 0.0;
    };
    for (const auto& t : set.triplets) {
      // C(y) - rho C(x) + nu [(x-z) c(x) - (y-z) c(x+1)]
      //   + sigma [(x-z) 1{x>=1} - (y-z) 1{x+1<=n}] >= 0
      const double cx = t.x * c_at(t.x);
      const double cy = t.y * c_at(t.y);
      const double s_nu = (t.x - t.z) * c_at(t.x) - (t.y - t.z) * c_at(t.x + 1);
      const double s_sigma = (t.x >= 1 ? t.x - t.z : 0) - (t.x + 1 <= n ? t.y - t.z : 0);
      if (cx == 0.0 && s_nu == 0.0 && s_sigma == 0.0) continue;
      std::vector<double> coef(static_cast<std::size_t>(2 + m), 0.0);
      coef[0] = s_nu;
      coef[1] = -cx;
      coef[static_cast<std::size_t>(2 + j)] = s_sigma;
      lp.add_row(std::move(coef), -cy, {RowTag::Kind::kTriplet, j, t});
    }
  }
  return lp;
}

}  // namespace

FixedIncentiveResult optimize_fixed_incentive(
    std::span<const std::vector<double>> c_bases, int n,
    const SolverTolerances& tol, bool lock_incentive) {
  if (c_bases.empty()) throw ValidationError("basis list is empty");
  if (n < 1) throw ValidationError("n must be >= 1");
  for (const auto& c : c_bases) {
    if (c.size() != static_cast<std::size_t>(n)) {
      throw ValidationError("congestion vectors must have n entries");
    }
    if (std::any_of(c.begin(), c.end(), [](double v) { return v < 0.0; })) {
      throw ValidationError("congestion values must be >= 0");
    }
  }
  auto lp = fixed_incentive_lp(c_bases, n);
  if (lock_incentive) {
    for (std::size_t j = 0; j < c_bases.size(); ++j) {
      lp.lower_bounds[2 + j] = 0.0;
      lp.upper_bounds[2 + j] = 0.0;
    }
  }
  auto sol = solve(lp, tol);
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError("fixed-incentive LP reported " +
                      std::string(to_string(sol.status)));
  }
  FixedIncentiveResult out;
  out.rho = sol.values[1];
  out.poa = out.rho > tol.activity_tol ? 1.0 / out.rho : kInf;
  if (sol.values[0] < 1e-7) {
    lp.lower_bounds[0] = 1e-6;
    const auto again = solve(lp, tol);
    out.nu_floor_used = true;
    if (again.status == LpStatus::kOptimal) {
      out.floor_discrepancy = std::abs(again.values[1] - out.rho);
      sol = again;
    } else {
      out.tau_available = false;
    }
  }
  out.nu = sol.values[0];
  out.tau.assign(c_bases.size(), 0.0);
  if (lock_incentive) {
    // Pinned; leave the exact zeros rather than polished round-off.
  } else if (out.tau_available && out.nu > 0.0) {
    for (std::size_t j = 0; j < c_bases.size(); ++j) {
      out.tau[j] = sol.values[2 + j] / out.nu;
    }
  } else {
    out.tau_available = false;
  }
  return out;
}

}  // namespace poalab
