#pragma once

// Test-side reference implementations. Nothing here calls the simplex or
// the envelope solver, so agreement with them is evidence, not tautology.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "poalab/basis.hpp"
#include "poalab/index_set.hpp"
#include "poalab/lp.hpp"
#include "poalab/random.hpp"

namespace oracle {

// Every (x, y, z) in {0..n}^3, kept when it meets the written conditions.
inline std::vector<poalab::Triplet> brute_triplets(int n, bool reduced) {
  std::vector<poalab::Triplet> out;
  for (int x = 0; x <= n; ++x) {
    for (int y = 0; y <= n; ++y) {
      for (int z = 0; z <= n; ++z) {
        const int total = x + y - z;
        if (total < 1 || total > n || z > std::min(x, y)) continue;
        if (reduced && !(total == n || (x - z) * (y - z) * z == 0)) continue;
        out.push_back({x, y, z});
      }
    }
  }
  return out;
}

struct VertexResult {
  bool feasible = false;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> argmax;
};

// Brute-force vertex enumeration: every choice of num_vars constraints
// (rows and finite bounds) is solved as an equality system; feasible
// solutions are scored. Only meaningful for bounded programs with small
// row counts.
inline VertexResult vertex_enumeration(const poalab::LinearProgram& lp) {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (const auto& row : lp.rows) {
    a.push_back(row.coef);
    b.push_back(row.rhs);
  }
  const auto nv = static_cast<std::size_t>(lp.num_vars);
  for (std::size_t i = 0; i < nv; ++i) {
    std::vector<double> e(nv, 0.0);
    if (std::isfinite(lp.lower_bounds[i])) {
      e[i] = 1.0;
      a.push_back(e);
      b.push_back(lp.lower_bounds[i]);
    }
    if (std::isfinite(lp.upper_bounds[i])) {
      e[i] = -1.0;
      a.push_back(e);
      b.push_back(-lp.upper_bounds[i]);
    }
  }
  VertexResult out;
  const std::size_t m = a.size();
  std::vector<std::size_t> pick(nv);
  // Iterate over all nv-subsets of m rows in lexicographic order.
  for (std::size_t k = 0; k < nv; ++k) pick[k] = k;
  if (m < nv) return out;
  for (;;) {
    Eigen::MatrixXd sys(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nv));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(nv));
    for (std::size_t k = 0; k < nv; ++k) {
      for (std::size_t i = 0; i < nv; ++i) {
        sys(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = a[pick[k]][i];
      }
      rhs(static_cast<Eigen::Index>(k)) = b[pick[k]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    if (lu.isInvertible()) {
      const Eigen::VectorXd v = lu.solve(rhs);
      bool ok = true;
      for (std::size_t r = 0; r < m && ok; ++r) {
        double lhs = 0.0;
        double scale = std::max(1.0, std::abs(b[r]));
        for (std::size_t i = 0; i < nv; ++i) {
          lhs += a[r][i] * v(static_cast<Eigen::Index>(i));
          scale = std::max(scale, std::abs(a[r][i]));
        }
        ok = lhs - b[r] >= -1e-9 * scale;
      }
      if (ok) {
        double obj = 0.0;
        for (std::size_t i = 0; i < nv; ++i) obj += lp.objective[i] * v(static_cast<Eigen::Index>(i));
        out.feasible = true;
        if (obj > out.best) {
          out.best = obj;
          out.argmax.assign(v.data(), v.data() + v.size());
        }
      }
    }
    // Next combination.
    std::size_t k = nv;
    while (k > 0 && pick[k - 1] == m - nv + (k - 1)) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t j = k; j < nv; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

inline bool satisfies(const poalab::LinearProgram& lp, const std::vector<double>& v,
                      double tol = 0.0) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < lp.lower_bounds[i] - tol || v[i] > lp.upper_bounds[i] + tol) return false;
  }
  for (const auto& row : lp.rows) {
    double lhs = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) lhs += row.coef[i] * v[i];
    if (lhs < row.rhs - tol) return false;
  }
  return true;
}

// Largest objective among uniformly sampled feasible points of the box.
inline double sampled_best(const poalab::LinearProgram& lp, double box, int samples,
                           std::uint64_t seed, int* hits = nullptr) {
  poalab::Xoshiro256 rng(seed);
  double best = -std::numeric_limits<double>::infinity();
  int found = 0;
  std::vector<double> v(static_cast<std::size_t>(lp.num_vars));
  for (int s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double lo = std::max(-box, lp.lower_bounds[i]);
      const double hi = std::min(box, lp.upper_bounds[i]);
      v[i] = lo + (hi - lo) * rng.uniform();
    }
    if (!satisfies(lp, v)) continue;
    ++found;
    double obj = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) obj += lp.objective[i] * v[i];
    best = std::max(best, obj);
  }
  if (hits != nullptr) *hits = found;
  return best;
}

// Exact PoA of a class by brute force over the (nu, rho) envelope: every
// pairwise intersection of the lines rho = (C(y) + s nu) / C(x) is a
// candidate nu, so no LP machinery is involved. Returns +inf when the class
// admits no finite bound. O(m^3) in the row count; keep n small.
inline double envelope_poa(const std::vector<poalab::BasisPair>& bases, int n,
                           bool reduced = false) {
  const bool cost = bases.front().side() == poalab::Side::kCostMin;
  struct Line {
    double slope;
    double intercept;
  };
  std::vector<Line> lines;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool empty = false;
  for (const auto& p : bases) {
    for (const auto& t : brute_triplets(n, reduced)) {
      const double s = (t.x - t.z) * p.f(t.x) - (t.y - t.z) * p.f(t.x + 1);
      const double cx = p.c(t.x);
      const double cy = p.c(t.y);
      if (cx > 0.0) {
        lines.push_back({s / cx, cy / cx});
        continue;
      }
      // Pure constraints on nu.
      if (cost) {
        // cy + s nu >= 0
        if (s < 0.0) hi = std::min(hi, cy / -s);
        else if (cy < 0.0 && s == 0.0) empty = true;
      } else {
        // cy + s nu <= 0
        if (s < 0.0) lo = std::max(lo, cy / -s);
        else if (cy > 0.0) empty = true;
      }
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  if (empty || lo > hi) return inf;
  auto value = [&](double nu) {
    double v = cost ? inf : -inf;
    for (const auto& l : lines) {
      const double r = l.intercept + l.slope * nu;
      v = cost ? std::min(v, r) : std::max(v, r);
    }
    return v;
  };
  std::vector<double> cands{lo};
  if (std::isfinite(hi)) cands.push_back(hi);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const double ds = lines[i].slope - lines[j].slope;
      if (ds == 0.0) continue;
      const double nu = (lines[j].intercept - lines[i].intercept) / ds;
      if (nu >= lo && nu <= hi) cands.push_back(nu);
    }
  }
  double best = cost ? -inf : inf;
  for (double nu : cands) best = cost ? std::max(best, value(nu)) : std::min(best, value(nu));
  if (cost) return best > 1e-7 ? 1.0 / best : inf;
  return best;
}

}  // namespace oracle
