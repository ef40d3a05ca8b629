#pragma once

#include <span>
#include <string_view>

#include "poalab/basis.hpp"
#include "poalab/characterize.hpp"
#include "poalab/game.hpp"
#include "poalab/index_set.hpp"

namespace poalab {

enum class Scenario { kTwoLines, kNuBarBoundary, kUnbounded };

std::string_view to_string(Scenario s);

inline constexpr double kDefaultUnboundedEta = 1e-3;

struct WorstCaseRecipe {
  Scenario scenario = Scenario::kTwoLines;
  int basis_a = -1;
  Triplet triplet_a{};
  int basis_b = -1;  // unused in the unbounded scenario
  Triplet triplet_b{};
  double eta = 0.0;
  double slope_a = 0.0;
  double slope_b = 0.0;
  double slope_residual = 0.0;  // |eta s_a + (1 - eta) s_b|
  double target_poa = 0.0;      // report PoA, or (1 - eta) / eta when unbounded
};

// Chooses the binding rows and the mixing weight eta. Throws
// VerificationError when no qualifying pair of binding rows exists.
WorstCaseRecipe extract_recipe(const PoaReport& report,
                               std::span<const BasisPair> bases, int n,
                               double unbounded_eta = kDefaultUnboundedEta);

struct WorstCaseGame {
  GameInstance game;
  Allocation a_ne;
  Allocation a_opt;
};

// Two cycles of n resources each (bounded scenarios), or two resources
// shared by x users (unbounded scenario).
WorstCaseGame build_game(const WorstCaseRecipe& recipe,
                         std::span<const BasisPair> bases, int n);

}  // namespace poalab
