#include "poalab/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace poalab {

Engine engine_from_string(std::string_view text) {
  if (text == "simplex") return Engine::kSimplex;
  if (text == "geometric") return Engine::kGeometric;
  throw ValidationError("unknown solver '" + std::string(text) +
                        "' (expected simplex or geometric)");
}

double nu_coefficient(const BasisPair& p, const Triplet& t) {
  return (t.x - t.z) * p.f(t.x) - (t.y - t.z) * p.f(t.x + 1);
}

LinearProgram characterization_lp(std::span<const BasisPair> bases, int n,
                                  Side side, bool full_set) {
  validate_class(bases, n, side);
  const auto set = full_set ? enumerate_full(n) : enumerate_reduced(n);
  LinearProgram lp(2);
  lp.objective = {0.0, 1.0};
  lp.lower_bounds[0] = 0.0;

  double ceiling = kInf;
  RowTag ceiling_tag{RowTag::Kind::kCeiling, -1, {}};
  double ceiling_slope = 0.0;
  double ceiling_rhs = 0.0;
  for (std::size_t j = 0; j < bases.size(); ++j) {
    const auto& p = bases[j];
    const RowTag base_tag{RowTag::Kind::kTriplet, static_cast<int>(j), {}};
    for (const auto& t : set.triplets) {
      const double cx = p.c(t.x);
      const double cy = p.c(t.y);
      const double s = nu_coefficient(p, t);
      RowTag tag = base_tag;
      tag.triplet = t;
      if (side == Side::kCostMin) {
        // C(y) - rho C(x) + nu s >= 0
        if (cx == 0.0) {
          if (s >= 0.0) continue;
          // Only nu is constrained; keep the tightest such row.
          const double bound = cy / -s;
          if (bound < ceiling) {
            ceiling = bound;
            ceiling_tag.basis = static_cast<int>(j);
            ceiling_tag.triplet = t;
            ceiling_slope = s;
            ceiling_rhs = -cy;
          }
          continue;
        }
        lp.add_row({s, -cx}, -cy, tag);
      } else {
        // W(y) - rho W(x) + nu s <= 0 with rho = -rho'
        if (cx == 0.0 && cy == 0.0 && s <= 0.0) continue;
        lp.add_row({-s, -cx}, cy, tag);
      }
    }
  }
  if (ceiling < kInf) lp.add_row({ceiling_slope, 0.0}, ceiling_rhs, ceiling_tag);
  return lp;
}

namespace {

LpSolution run(const LinearProgram& lp, const CharacterizeOptions& opts) {
  return opts.engine == Engine::kGeometric ? solve_two_var_geometric(lp, opts.tol)
                                           : solve(lp, opts.tol);
}

void collect_active(const LinearProgram& lp, const LpSolution& sol,
                    PoaReport& report) {
  for (int r : sol.active_rows) {
    const auto& tag = lp.rows[static_cast<std::size_t>(r)].tag;
    if (tag.kind == RowTag::Kind::kPlain) continue;
    report.active.push_back(
        {tag.basis, tag.triplet, tag.kind == RowTag::Kind::kCeiling});
  }
}

double ceiling_of(const LinearProgram& lp) {
  for (const auto& row : lp.rows) {
    if (row.tag.kind == RowTag::Kind::kCeiling) return row.rhs / row.coef[0];
  }
  return kInf;
}

}  // namespace

PoaReport characterize_cost(std::span<const BasisPair> bases, int n,
                            const CharacterizeOptions& opts) {
  const auto lp = characterization_lp(bases, n, Side::kCostMin, opts.full_set);
  PoaReport report;
  report.side = Side::kCostMin;
  report.nu_ceiling = ceiling_of(lp);
  if (lp.rows.empty() ||
      std::all_of(lp.rows.begin(), lp.rows.end(),
                  [](const LpRow& r) { return r.coef[1] == 0.0; })) {
    throw ValidationError("class has identically zero cost; PoA undefined");
  }
  const auto sol = run(lp, opts);
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError("cost characterization LP reported " +
                      std::string(to_string(sol.status)));
  }
  report.nu_star = sol.values[0];
  report.rho_star = sol.values[1];
  collect_active(lp, sol, report);
  if (report.rho_star <= opts.tol.activity_tol) {
    report.bounded = false;
    report.poa = kInf;
  } else {
    report.poa = 1.0 / report.rho_star;
  }
  return report;
}

PoaReport characterize_welfare(std::span<const BasisPair> bases, int n,
                               const CharacterizeOptions& opts) {
  const auto lp = characterization_lp(bases, n, Side::kWelfareMax, opts.full_set);
  PoaReport report;
  report.side = Side::kWelfareMax;
  if (std::all_of(lp.rows.begin(), lp.rows.end(),
                  [](const LpRow& r) { return r.coef[1] == 0.0; })) {
    throw ValidationError("class has identically zero welfare; PoA undefined");
  }
  const auto sol = run(lp, opts);
  if (sol.status == LpStatus::kInfeasible) {
    report.bounded = false;
    report.poa = kInf;
    report.rho_star = kInf;
    return report;
  }
  if (sol.status == LpStatus::kUnbounded) {
    throw ValidationError("welfare characterization unbounded below; class is degenerate");
  }
  report.nu_star = sol.values[0];
  report.rho_star = -sol.values[1];
  report.poa = report.rho_star;
  collect_active(lp, sol, report);
  return report;
}

PoaReport characterize(std::span<const BasisPair> bases, int n,
                       const CharacterizeOptions& opts) {
  if (bases.empty()) throw ValidationError("basis list is empty");
  return bases.front().side() == Side::kCostMin
             ? characterize_cost(bases, n, opts)
             : characterize_welfare(bases, n, opts);
}

Certificate certificate_from_report(const PoaReport& report) {
  if (!report.bounded || !(report.nu_star > 0.0)) {
    throw ValidationError("certificate needs a bounded report with nu* > 0");
  }
  const double lambda = 1.0 / report.nu_star;
  const double ratio = report.rho_star / report.nu_star;
  return report.side == Side::kCostMin ? Certificate{lambda, 1.0 - ratio}
                                       : Certificate{lambda, ratio - 1.0};
}

TwoParameterBound two_parameter_bound(int n, const SolverTolerances& tol) {
  if (n < 1) throw ValidationError("n must be >= 1");
  // min gamma s.t. gamma y^2 - x^2 + kappa [x^2 - (x + 1) y] >= 0, stated for
  // gamma' = -gamma.
  LinearProgram lp(2);
  lp.objective = {0.0, 1.0};
  lp.lower_bounds[0] = 0.0;
  for (int x = 0; x <= n; ++x) {
    for (int y = 0; y <= n; ++y) {
      const double xx = static_cast<double>(x) * x;
      const double yy = static_cast<double>(y) * y;
      lp.add_row({xx - static_cast<double>(x + 1) * y, -yy}, xx);
    }
  }
  const auto sol = solve(lp, tol);
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError("baseline LP reported " + std::string(to_string(sol.status)));
  }
  return {sol.values[0], -sol.values[1]};
}

bool check_reduction_equivalence(std::span<const BasisPair> bases, int n,
                                 const SolverTolerances& tol, int cap) {
  if (n > cap) {
    throw ValidationError("reduction check capped at n = " + std::to_string(cap));
  }
  CharacterizeOptions full;
  full.tol = tol;
  full.full_set = true;
  CharacterizeOptions reduced;
  reduced.tol = tol;
  const auto a = characterize(bases, n, full);
  const auto b = characterize(bases, n, reduced);
  if (!a.bounded || !b.bounded) return a.bounded == b.bounded;
  return std::abs(a.rho_star - b.rho_star) <= 10.0 * tol.feas_tol;
}

}  // namespace poalab
