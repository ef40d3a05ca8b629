#include "poalab/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "poalab/common.hpp"

namespace poalab {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kInfeasible:
      return "infeasible";
  }
  return "?";
}

double normalized_residual(const LpRow& row, const std::vector<double>& v) {
  double lhs = 0.0;
  double scale = std::max(1.0, std::abs(row.rhs));
  for (std::size_t i = 0; i < row.coef.size(); ++i) {
    lhs += row.coef[i] * v[i];
    scale = std::max(scale, std::abs(row.coef[i]));
  }
  return (lhs - row.rhs) / scale;
}

namespace {

void validate(const LinearProgram& lp) {
  const auto nv = static_cast<std::size_t>(lp.num_vars);
  if (lp.num_vars < 1) throw ValidationError("LP needs at least one variable");
  if (lp.objective.size() != nv || lp.lower_bounds.size() != nv ||
      lp.upper_bounds.size() != nv) {
    throw ValidationError("LP objective/bounds length differs from num_vars");
  }
  for (std::size_t i = 0; i < nv; ++i) {
    if (!std::isfinite(lp.objective[i])) {
      throw ValidationError("non-finite LP objective");
    }
    if (!(lp.lower_bounds[i] <= lp.upper_bounds[i]) ||
        lp.lower_bounds[i] == kInf || lp.upper_bounds[i] == -kInf) {
      throw ValidationError("LP bounds inconsistent for variable " +
                            std::to_string(i));
    }
  }
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    const auto& row = lp.rows[r];
    if (row.coef.size() != nv) {
      throw ValidationError("LP row " + std::to_string(r) + " has wrong length");
    }
    if (!std::isfinite(row.rhs) ||
        !std::all_of(row.coef.begin(), row.coef.end(),
                     [](double a) { return std::isfinite(a); })) {
      throw ValidationError("non-finite value in LP row " + std::to_string(r));
    }
  }
}

// Every bound becomes an ordinary row so that the engine only sees
// A v >= b with v free.
std::vector<LpRow> with_bound_rows(const LinearProgram& lp) {
  std::vector<LpRow> all = lp.rows;
  const auto nv = static_cast<std::size_t>(lp.num_vars);
  for (std::size_t i = 0; i < nv; ++i) {
    if (lp.lower_bounds[i] > -kInf) {
      std::vector<double> coef(nv, 0.0);
      coef[i] = 1.0;
      all.push_back({std::move(coef), lp.lower_bounds[i], {}});
    }
    if (lp.upper_bounds[i] < kInf) {
      std::vector<double> coef(nv, 0.0);
      coef[i] = -1.0;
      all.push_back({std::move(coef), -lp.upper_bounds[i], {}});
    }
  }
  return all;
}

struct Scaled {
  Eigen::MatrixXd a;  // rows x vars
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Eigen::VectorXd var_scale;
};

Scaled scale_problem(const std::vector<LpRow>& rows,
                     const std::vector<double>& objective) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto nv = static_cast<Eigen::Index>(objective.size());
  Scaled s;
  s.a.resize(m, nv);
  s.b.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < nv; ++i) {
      s.a(j, i) = rows[static_cast<std::size_t>(j)].coef[static_cast<std::size_t>(i)];
    }
    s.b(j) = rows[static_cast<std::size_t>(j)].rhs;
  }
  s.c = Eigen::Map<const Eigen::VectorXd>(objective.data(), nv);
  s.var_scale = Eigen::VectorXd::Ones(nv);

  auto spread = [](const auto& vec, double& lo, double& hi) {
    lo = kInf;
    hi = 0.0;
    for (Eigen::Index k = 0; k < vec.size(); ++k) {
      const double v = std::abs(vec(k));
      if (v > 0.0) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    return hi > 0.0;
  };

  double lo = 0.0;
  double hi = 0.0;
  for (int pass = 0; pass < 6; ++pass) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (spread(s.a.row(j), lo, hi)) {
        const double f = 1.0 / std::sqrt(lo * hi);
        s.a.row(j) *= f;
        s.b(j) *= f;
      }
    }
    for (Eigen::Index i = 0; i < nv; ++i) {
      if (spread(s.a.col(i), lo, hi)) {
        const double f = 1.0 / std::sqrt(lo * hi);
        s.a.col(i) *= f;
        s.c(i) *= f;
        s.var_scale(i) *= f;
      }
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const double hi_row = s.a.row(j).cwiseAbs().maxCoeff();
    if (hi_row > 0.0) {
      s.a.row(j) /= hi_row;
      s.b(j) /= hi_row;
    }
  }
  const double c_max = s.c.cwiseAbs().maxCoeff();
  if (c_max > 0.0) s.c /= c_max;
  return s;
}

enum class PhaseResult { kOptimal, kUnbounded };

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Tableau for  min cost . u  s.t.  A^T u = -c, u >= 0, with one artificial
// column per equality row. The equality rows are the primal variables; the
// structural columns are the primal rows. Rows are sign-flipped so that the
// right-hand side starts nonnegative.
class DualTableau {
 public:
  DualTableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& c, long cap)
      : rows_(a.cols()),
        structural_(a.rows()),
        cols_(structural_ + rows_),
        orig_(RowMajor::Zero(rows_, cols_)),
        rhs0_(rows_),
        sign_(rows_),
        basis_(static_cast<std::size_t>(rows_)),
        d_(cols_),
        cost_(Eigen::VectorXd::Zero(cols_)),
        cap_(cap) {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const double target = -c(i);
      sign_(i) = target < 0.0 ? -1.0 : 1.0;
      rhs0_(i) = sign_(i) * target;
      orig_.row(i).head(structural_) = sign_(i) * a.col(i).transpose();
      orig_(i, structural_ + i) = 1.0;
      basis_[static_cast<std::size_t>(i)] = structural_ + i;
    }
    t_ = orig_;
    rhs_ = rhs0_;
  }

  long iterations() const { return iterations_; }

  double phase_one() {
    cost_.setZero();
    cost_.tail(rows_).setOnes();
    run(cols_);
    double infeas = 0.0;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] >= structural_) infeas += rhs_(i);
    }
    return infeas;
  }

  // Pivots basic artificials out wherever a structural column allows it.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < structural_) continue;
      Eigen::Index best = -1;
      const double best_abs = t_.row(i).head(structural_).cwiseAbs().maxCoeff(&best);
      if (best_abs > 1e-9) {
        rhs_(i) = 0.0;
        pivot(i, best);
      }
    }
  }

  PhaseResult phase_two(const Eigen::VectorXd& structural_cost) {
    cost_.setZero();
    cost_.head(structural_) = structural_cost;
    return run(structural_);
  }

  // Simplex multipliers of the original (unsigned) equality rows, read off
  // the reduced costs of the artificial columns.
  Eigen::VectorXd multipliers() const {
    return -(d_.tail(rows_).array() * sign_.array()).matrix();
  }

  std::vector<Eigen::Index> basic_structural() const {
    std::vector<Eigen::Index> out;
    for (auto j : basis_) {
      if (j < structural_) out.push_back(j);
    }
    return out;
  }

 private:
  void price() {
    Eigen::VectorXd cb(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      cb(i) = cost_(basis_[static_cast<std::size_t>(i)]);
    }
    d_ = cost_ - t_.transpose() * cb;
    for (auto j : basis_) d_(j) = 0.0;
  }

  // Rebuilds the tableau from the original columns to shed accumulated
  // rounding. Returns false if the basis matrix is numerically singular.
  bool refactor() {
    Eigen::MatrixXd b(rows_, rows_);
    for (Eigen::Index k = 0; k < rows_; ++k) {
      b.col(k) = orig_.col(basis_[static_cast<std::size_t>(k)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    if (!lu.isInvertible()) return false;
    const Eigen::MatrixXd inv = lu.inverse();
    t_.noalias() = inv * orig_;
    rhs_ = inv * rhs0_;
    for (Eigen::Index k = 0; k < rows_; ++k) {
      t_.col(basis_[static_cast<std::size_t>(k)]).setZero();
      t_(k, basis_[static_cast<std::size_t>(k)]) = 1.0;
      if (rhs_(k) < 0.0 && rhs_(k) > -1e-9) rhs_(k) = 0.0;
    }
    since_refactor_ = 0;
    return true;
  }

  void pivot(Eigen::Index r, Eigen::Index q) {
    const double inv = 1.0 / t_(r, q);
    t_.row(r) *= inv;
    t_(r, q) = 1.0;
    rhs_(r) *= inv;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double factor = t_(i, q);
      if (factor == 0.0) continue;
      t_.row(i) -= factor * t_.row(r);
      t_(i, q) = 0.0;
      rhs_(i) -= factor * rhs_(r);
      if (rhs_(i) < 0.0 && rhs_(i) > -1e-12) rhs_(i) = 0.0;
    }
    const double dq = d_(q);
    if (dq != 0.0) {
      d_ -= dq * t_.row(r).transpose();
      d_(q) = 0.0;
    }
    basis_[static_cast<std::size_t>(r)] = q;
    ++since_refactor_;
  }

  // Columns >= limit never enter.
  PhaseResult run(Eigen::Index limit) {
    constexpr double kOptTol = 1e-10;
    constexpr double kPivotTol = 1e-9;
    constexpr double kHarrisTol = 1e-11;
    constexpr int kDegenerateLimit = 50;
    constexpr int kRefactorEvery = 256;
    price();
    int degenerate_run = 0;
    bool bland = false;
    for (;;) {
      Eigen::Index q = -1;
      double best = 0.0;
      for (Eigen::Index j = 0; j < limit; ++j) {
        const double dj = d_(j);
        if (dj < best && dj < -kOptTol * std::max(1.0, std::abs(cost_(j)))) {
          q = j;
          if (bland) break;
          best = dj;
        }
      }
      if (q < 0) {
        // Confirm optimality on a freshly factored tableau.
        if (since_refactor_ > 0 && refactor()) {
          price();
          continue;
        }
        return PhaseResult::kOptimal;
      }

      Eigen::Index r = -1;
      double ratio = kInf;
      if (bland) {
        for (Eigen::Index i = 0; i < rows_; ++i) {
          const double a = t_(i, q);
          if (a <= kPivotTol) continue;
          const double cand = std::max(rhs_(i), 0.0) / a;
          if (cand < ratio ||
              (cand == ratio && basis_[static_cast<std::size_t>(i)] <
                                    basis_[static_cast<std::size_t>(r)])) {
            r = i;
            ratio = cand;
          }
        }
      } else {
        // Harris: find the step allowed by a slightly relaxed bound, then
        // take the largest pivot among the rows that block within it.
        double relaxed = kInf;
        for (Eigen::Index i = 0; i < rows_; ++i) {
          const double a = t_(i, q);
          if (a > kPivotTol) relaxed = std::min(relaxed, (std::max(rhs_(i), 0.0) + kHarrisTol) / a);
        }
        double piv = 0.0;
        for (Eigen::Index i = 0; i < rows_; ++i) {
          const double a = t_(i, q);
          if (a <= kPivotTol) continue;
          const double cand = std::max(rhs_(i), 0.0) / a;
          if (cand <= relaxed && a > piv) {
            r = i;
            piv = a;
            ratio = cand;
          }
        }
      }
      if (r < 0) return PhaseResult::kUnbounded;

      // Bland's rule takes over after a long degenerate stall and hands
      // control back after the first pivot that makes progress.
      if (ratio <= 1e-12) {
        if (++degenerate_run > kDegenerateLimit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      pivot(r, q);
      if (++iterations_ > cap_) {
        throw SolverError("simplex iteration cap (" + std::to_string(cap_) +
                          ") exceeded");
      }
      if (since_refactor_ >= kRefactorEvery && refactor()) price();
    }
  }

  Eigen::Index rows_;
  Eigen::Index structural_;
  Eigen::Index cols_;
  RowMajor orig_;
  RowMajor t_;
  Eigen::VectorXd rhs0_;
  Eigen::VectorXd rhs_;
  Eigen::VectorXd sign_;
  std::vector<Eigen::Index> basis_;
  Eigen::VectorXd d_;
  Eigen::VectorXd cost_;
  long cap_;
  long iterations_ = 0;
  int since_refactor_ = 0;
};

double worst_violation(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& w) {
  if (a.rows() == 0) return 0.0;
  const Eigen::VectorXd slack = a * w - b;
  return std::max(0.0, -slack.minCoeff());
}

// Re-solves the tight rows of the final basis so the returned vertex is as
// exact as double arithmetic allows. Kept only if it does not hurt
// feasibility.
Eigen::VectorXd polish(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       const std::vector<Eigen::Index>& tight,
                       const Eigen::VectorXd& w) {
  if (tight.empty()) return w;
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(tight.size()), a.cols());
  Eigen::VectorXd res(sub.rows());
  for (Eigen::Index k = 0; k < sub.rows(); ++k) {
    sub.row(k) = a.row(tight[static_cast<std::size_t>(k)]);
    res(k) = b(tight[static_cast<std::size_t>(k)]) - sub.row(k).dot(w);
  }
  const Eigen::VectorXd delta = sub.colPivHouseholderQr().solve(res);
  if (!delta.allFinite()) return w;
  Eigen::VectorXd cand = w + delta;
  return worst_violation(a, b, cand) <= worst_violation(a, b, w) ? cand : w;
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolverTolerances& tol) {
  validate(lp);
  const auto rows = with_bound_rows(lp);
  const long cap = static_cast<long>(tol.iteration_factor) *
                   (lp.num_vars + static_cast<long>(rows.size()));
  Scaled s = scale_problem(rows, lp.objective);

  LpSolution out;
  DualTableau tab(s.a, s.c, cap);
  const double infeas = tab.phase_one();
  if (infeas > 10.0 * tol.feas_tol) {
    // The dual is infeasible, so the primal is unbounded or infeasible.
    // Deciding which amounts to a feasibility problem with zero objective.
    DualTableau probe(s.a, Eigen::VectorXd::Zero(s.c.size()),
                      cap - tab.iterations());
    probe.phase_one();
    probe.expel_artificials();
    const auto verdict = probe.phase_two(-s.b);
    out.status = verdict == PhaseResult::kUnbounded ? LpStatus::kInfeasible
                                                    : LpStatus::kUnbounded;
    out.iterations = static_cast<int>(tab.iterations() + probe.iterations());
    return out;
  }
  tab.expel_artificials();
  if (tab.phase_two(-s.b) == PhaseResult::kUnbounded) {
    out.status = LpStatus::kInfeasible;
    out.iterations = static_cast<int>(tab.iterations());
    return out;
  }
  out.iterations = static_cast<int>(tab.iterations());

  Eigen::VectorXd w = -tab.multipliers();
  w = polish(s.a, s.b, tab.basic_structural(), w);

  const auto nv = static_cast<std::size_t>(lp.num_vars);
  out.values.resize(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    out.values[i] = w(static_cast<Eigen::Index>(i)) *
                    s.var_scale(static_cast<Eigen::Index>(i));
  }
  double worst = 0.0;
  std::size_t worst_row = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double res = normalized_residual(rows[r], out.values);
    if (-res > worst) {
      worst = -res;
      worst_row = r;
    }
    if (r < lp.rows.size() && res <= tol.activity_tol) {
      out.active_rows.push_back(static_cast<int>(r));
    }
  }
  if (worst > tol.feas_tol) {
    throw SolverError("simplex vertex violates row " + std::to_string(worst_row) +
                      " by " + std::to_string(worst) + " (normalized)");
  }
  out.status = LpStatus::kOptimal;
  out.objective_value =
      std::inner_product(lp.objective.begin(), lp.objective.end(),
                         out.values.begin(), 0.0);
  return out;
}

namespace {

struct Line {
  double slope;
  double intercept;
};

// Lower envelope of lines, ordered left to right (decreasing slope).
std::vector<Line> lower_envelope(std::vector<Line> lines) {
  std::sort(lines.begin(), lines.end(), [](const Line& p, const Line& q) {
    return p.slope != q.slope ? p.slope > q.slope : p.intercept < q.intercept;
  });
  std::vector<Line> hull;
  // Line m is useless if l and n already meet at or below it.
  auto useless = [](const Line& l, const Line& m, const Line& n) {
    // Intersection abscissae of (l, m) and (m, n); m survives only if the
    // first lies strictly left of the second.
    const long double lm = (static_cast<long double>(m.intercept) - l.intercept) /
                           (static_cast<long double>(l.slope) - m.slope);
    const long double mn = (static_cast<long double>(n.intercept) - m.intercept) /
                           (static_cast<long double>(m.slope) - n.slope);
    return lm >= mn;
  };
  for (const auto& line : lines) {
    if (!hull.empty() && hull.back().slope == line.slope) continue;
    while (hull.size() >= 2 && useless(hull[hull.size() - 2], hull.back(), line)) {
      hull.pop_back();
    }
    hull.push_back(line);
  }
  return hull;
}

}  // namespace

LpSolution solve_two_var_geometric(const LinearProgram& lp,
                                   const SolverTolerances& tol) {
  validate(lp);
  if (lp.num_vars != 2 || lp.objective[0] != 0.0 || !(lp.objective[1] > 0.0)) {
    throw ValidationError("geometric solver expects two variables and maximize v[1]");
  }
  double lo = lp.lower_bounds[0];
  double hi = lp.upper_bounds[0];
  double rho_cap = lp.upper_bounds[1];
  std::vector<Line> lines;
  LpSolution out;
  for (const auto& row : lp.rows) {
    const double a_nu = row.coef[0];
    const double a_rho = row.coef[1];
    if (a_rho > 0.0) {
      throw ValidationError("geometric solver needs nonpositive rho coefficients");
    }
    if (a_rho == 0.0) {
      if (a_nu > 0.0) {
        lo = std::max(lo, row.rhs / a_nu);
      } else if (a_nu < 0.0) {
        hi = std::min(hi, row.rhs / a_nu);
      } else if (row.rhs > tol.feas_tol * std::max(1.0, std::abs(row.rhs))) {
        out.status = LpStatus::kInfeasible;
        return out;
      }
      continue;
    }
    lines.push_back({a_nu / -a_rho, row.rhs / a_rho});
  }
  if (rho_cap < kInf) lines.push_back({0.0, rho_cap});
  if (lo > hi + tol.feas_tol * std::max({1.0, std::abs(lo), std::abs(hi)})) {
    out.status = LpStatus::kInfeasible;
    return out;
  }
  hi = std::max(hi, lo);
  if (lines.empty()) {
    out.status = LpStatus::kUnbounded;
    return out;
  }

  const auto hull = lower_envelope(std::move(lines));
  // The envelope is concave; its leftmost peak is where the slope first
  // becomes nonpositive.
  double peak = kInf;
  std::size_t k = 0;
  while (k < hull.size() && hull[k].slope > 0.0) ++k;
  if (k < hull.size()) {
    peak = k == 0 ? -kInf
                  : (hull[k].intercept - hull[k - 1].intercept) /
                        (hull[k - 1].slope - hull[k].slope);
  }
  double nu = std::clamp(peak, lo, hi);
  if (nu == -kInf && hull.front().slope == 0.0) {
    nu = hull.size() > 1 ? (hull[1].intercept - hull[0].intercept) /
                               (hull[0].slope - hull[1].slope)
                         : 0.0;
    nu = std::min(nu, hi);
  }
  if (!std::isfinite(nu)) {
    out.status = LpStatus::kUnbounded;
    return out;
  }
  double rho = kInf;
  for (const auto& line : hull) rho = std::min(rho, line.slope * nu + line.intercept);
  if (rho < lp.lower_bounds[1] - tol.feas_tol * std::max(1.0, std::abs(rho))) {
    out.status = LpStatus::kInfeasible;
    return out;
  }
  out.status = LpStatus::kOptimal;
  out.values = {nu, rho};
  out.objective_value = lp.objective[1] * rho;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    if (normalized_residual(lp.rows[r], out.values) <= tol.activity_tol) {
      out.active_rows.push_back(static_cast<int>(r));
    }
  }
  return out;
}

}  // namespace poalab
