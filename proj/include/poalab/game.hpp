#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "poalab/basis.hpp"
#include "poalab/common.hpp"

namespace poalab {

struct Resource {
  std::vector<double> c;  // C_r(0..n_users), or W_r on the welfare side
  std::vector<double> f;  // F_r(0..n_users + 1)
};

using Action = std::vector<int>;       // resource indices
using Allocation = std::vector<int>;   // one action index per user

struct GameInstance {
  int n_users = 0;
  Side side = Side::kCostMin;
  std::vector<Resource> resources;
  std::vector<std::vector<Action>> actions;
};

inline constexpr double kNashSlack = 1e-12;
inline constexpr std::uint64_t kProfileCap = 10'000'000;

// Throws ValidationError on shape or index violations.
void validate_game(const GameInstance& game);
void validate_allocation(const GameInstance& game, const Allocation& a);

std::vector<int> loads(const GameInstance& game, const Allocation& a);

double system_value(const GameInstance& game, const Allocation& a);
// J_i on the cost side, U_i on the welfare side.
double user_cost(const GameInstance& game, const Allocation& a, int user);
// Rosenthal-style potential sum_r sum_{k <= load} F_r(k).
double potential(const GameInstance& game, const Allocation& a);

// No user gains more than kNashSlack (relative) by a unilateral switch.
bool is_nash(const GameInstance& game, const Allocation& a,
             double slack = kNashSlack);

std::uint64_t profile_count(const GameInstance& game);

struct OracleReport {
  std::vector<Allocation> equilibria;
  std::uint64_t num_equilibria = 0;
  double best_value = 0.0;       // optimum over all profiles
  double worst_eq_value = 0.0;   // worst equilibrium value
  double poa = 0.0;              // meaningful only when defined
  bool poa_defined = false;      // false when there is no equilibrium
  std::uint64_t num_profiles = 0;
};

// Exhaustive scan of every profile. Equilibria beyond max_stored are counted
// but not listed.
OracleReport enumerate_equilibria(const GameInstance& game,
                                  std::uint64_t cap = kProfileCap,
                                  std::size_t max_stored = 100'000);

struct DynamicsResult {
  Allocation allocation;
  int improving_moves = 0;
  int rounds = 0;
};

// Round-robin best response from a seeded uniform start (or from start when
// given). Every improving move must strictly decrease the potential (increase
// it on the welfare side); otherwise VerificationError. Non-convergence
// within max_rounds is a VerificationError too.
DynamicsResult best_response_dynamics(const GameInstance& game,
                                      std::uint64_t seed, int max_rounds = 10'000,
                                      const Allocation* start = nullptr);

// Checks  sum_i J_i(a'_i, a_-i) - sum_i J_i(a) + C(a) <= lambda C(a') + mu C(a)
// over all pairs (welfare: >= lambda W(a') - mu W(a)).
bool check_generalized_smoothness(const GameInstance& game, double lambda,
                                  double mu, std::uint64_t cap = kProfileCap);
// Checks  sum_i J_i(a'_i, a_-i) <= lambda C(a') + mu C(a)  (welfare: >=).
bool check_smoothness(const GameInstance& game, double lambda, double mu,
                      std::uint64_t cap = kProfileCap);

// lambda / (1 - mu) on the cost side, (1 + mu) / lambda on the welfare side.
double poa_bound_from_certificate(Side side, double lambda, double mu);

struct RandomGameSpec {
  int n_users = 2;
  int n_resources = 3;
  int max_actions = 3;
  double sparsity = 0.5;  // probability that a coefficient is zero
};

// Resources are nonnegative combinations of the class pairs, truncated to
// n_users; actions are random nonempty resource subsets.
GameInstance random_in_class_game(std::span<const BasisPair> bases,
                                  const RandomGameSpec& spec,
                                  std::uint64_t seed);

}  // namespace poalab
