#pragma once

#include <span>
#include <vector>

#include "poalab/basis.hpp"
#include "poalab/index_set.hpp"
#include "poalab/lp.hpp"

namespace poalab {

enum class Engine { kSimplex, kGeometric };

Engine engine_from_string(std::string_view text);

struct CharacterizeOptions {
  SolverTolerances tol{};
  Engine engine = Engine::kSimplex;
  bool full_set = false;  // index rows by I(n) instead of IR(n)
};

struct BindingRow {
  int basis = -1;
  Triplet triplet{};
  bool ceiling = false;  // the nu upper-bound row
};

struct PoaReport {
  Side side = Side::kCostMin;
  double poa = 1.0;
  double rho_star = 1.0;
  double nu_star = 0.0;
  bool bounded = true;
  double nu_ceiling = kInf;
  std::vector<BindingRow> active;
};

// Smoothness parameters equivalent to an optimal (nu, rho).
struct Certificate {
  double lambda = 0.0;
  double mu = 0.0;
};

// Slope of the nu term for basis pair p and triplet t:
// (x - z) F(x) - (y - z) F(x + 1).
double nu_coefficient(const BasisPair& p, const Triplet& t);

// The (nu, rho) program for either side. Welfare rows are stated for
// rho' = -rho so that both sides maximize variable 1.
LinearProgram characterization_lp(std::span<const BasisPair> bases, int n,
                                  Side side, bool full_set = false);

PoaReport characterize_cost(std::span<const BasisPair> bases, int n,
                            const CharacterizeOptions& opts = {});
PoaReport characterize_welfare(std::span<const BasisPair> bases, int n,
                               const CharacterizeOptions& opts = {});
// Dispatches on the side of the first pair.
PoaReport characterize(std::span<const BasisPair> bases, int n,
                       const CharacterizeOptions& opts = {});

// Throws ValidationError for unbounded reports or nu* = 0.
Certificate certificate_from_report(const PoaReport& report);

struct TwoParameterBound {
  double kappa = 0.0;
  double gamma = 0.0;
};

// Affine-congestion upper bound from the earlier two-parameter LP in
// (kappa, gamma) over x, y in 0..n.
TwoParameterBound two_parameter_bound(int n, const SolverTolerances& tol = {});

inline constexpr int kReductionCheckCap = 6;

// True iff the programs over I(n) and IR(n) agree in rho* within
// 10 feas_tol.
bool check_reduction_equivalence(std::span<const BasisPair> bases, int n,
                                 const SolverTolerances& tol = {},
                                 int cap = kReductionCheckCap);

}  // namespace poalab
