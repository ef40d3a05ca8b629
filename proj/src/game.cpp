#include "poalab/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "poalab/parallel.hpp"
#include "poalab/random.hpp"

namespace poalab {

void validate_game(const GameInstance& game) {
  if (game.n_users < 1) throw ValidationError("game needs at least one user");
  if (game.actions.size() != static_cast<std::size_t>(game.n_users)) {
    throw ValidationError("game lists " + std::to_string(game.actions.size()) +
                          " action sets for " + std::to_string(game.n_users) +
                          " users");
  }
  const auto len = static_cast<std::size_t>(game.n_users);
  for (std::size_t r = 0; r < game.resources.size(); ++r) {
    const auto& res = game.resources[r];
    if (res.c.size() != len + 1 || res.f.size() != len + 2) {
      throw ValidationError("resource " + std::to_string(r) +
                            ": c needs n+1 and f needs n+2 entries");
    }
    if (res.c.front() != 0.0) {
      throw ValidationError("resource " + std::to_string(r) + ": c[0] must be 0");
    }
  }
  const int n_res = static_cast<int>(game.resources.size());
  for (std::size_t i = 0; i < game.actions.size(); ++i) {
    if (game.actions[i].empty()) {
      throw ValidationError("user " + std::to_string(i) + " has no actions");
    }
    for (const auto& action : game.actions[i]) {
      for (int r : action) {
        if (r < 0 || r >= n_res) {
          throw ValidationError("user " + std::to_string(i) +
                                " references unknown resource " + std::to_string(r));
        }
      }
      auto sorted = action;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ValidationError("user " + std::to_string(i) +
                              " has an action with a repeated resource");
      }
    }
  }
}

void validate_allocation(const GameInstance& game, const Allocation& a) {
  if (a.size() != static_cast<std::size_t>(game.n_users)) {
    throw ValidationError("allocation length differs from the number of users");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || a[i] >= static_cast<int>(game.actions[i].size())) {
      throw ValidationError("user " + std::to_string(i) + " plays unknown action " +
                            std::to_string(a[i]));
    }
  }
}

namespace {

const Action& action_of(const GameInstance& game, const Allocation& a, int user) {
  return game.actions[static_cast<std::size_t>(user)]
                     [static_cast<std::size_t>(a[static_cast<std::size_t>(user)])];
}

void fill_loads(const GameInstance& game, const Allocation& a, std::vector<int>& out) {
  std::fill(out.begin(), out.end(), 0);
  for (int i = 0; i < game.n_users; ++i) {
    for (int r : action_of(game, a, i)) ++out[static_cast<std::size_t>(r)];
  }
}

double value_at(const GameInstance& game, const std::vector<int>& load) {
  double total = 0.0;
  for (std::size_t r = 0; r < game.resources.size(); ++r) {
    total += game.resources[r].c[static_cast<std::size_t>(load[r])];
  }
  return total;
}

double f_at(const GameInstance& game, int r, int k) {
  return game.resources[static_cast<std::size_t>(r)].f[static_cast<std::size_t>(k)];
}

// J_i(b, a_-i) for every action b of user i. member marks a_i's resources.
void deviation_values(const GameInstance& game, const Allocation& a, int user,
                      const std::vector<int>& load, std::vector<char>& member,
                      std::vector<double>& out) {
  const auto& current = action_of(game, a, user);
  for (int r : current) member[static_cast<std::size_t>(r)] = 1;
  const auto& options = game.actions[static_cast<std::size_t>(user)];
  out.resize(options.size());
  for (std::size_t b = 0; b < options.size(); ++b) {
    double v = 0.0;
    for (int r : options[b]) {
      const int k = load[static_cast<std::size_t>(r)] +
                    (member[static_cast<std::size_t>(r)] ? 0 : 1);
      v += f_at(game, r, k);
    }
    out[b] = v;
  }
  for (int r : current) member[static_cast<std::size_t>(r)] = 0;
}

bool better(Side side, double candidate, double current, double slack) {
  const double margin = slack * std::max(1.0, std::abs(current));
  return side == Side::kCostMin ? candidate < current - margin
                                : candidate > current + margin;
}

void decode(const GameInstance& game, std::uint64_t index, Allocation& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto radix = game.actions[i].size();
    a[i] = static_cast<int>(index % radix);
    index /= radix;
  }
}

// Mixed-radix increment, user 0 fastest.
void advance(const GameInstance& game, Allocation& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (++a[i] < static_cast<int>(game.actions[i].size())) return;
    a[i] = 0;
  }
}

bool nash_at(const GameInstance& game, const Allocation& a,
             const std::vector<int>& load, std::vector<char>& member,
             std::vector<double>& scratch, double slack) {
  for (int i = 0; i < game.n_users; ++i) {
    deviation_values(game, a, i, load, member, scratch);
    const double current = scratch[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])];
    for (double v : scratch) {
      if (better(game.side, v, current, slack)) return false;
    }
  }
  return true;
}

double ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace

std::vector<int> loads(const GameInstance& game, const Allocation& a) {
  validate_allocation(game, a);
  std::vector<int> out(game.resources.size(), 0);
  fill_loads(game, a, out);
  return out;
}

double system_value(const GameInstance& game, const Allocation& a) {
  return value_at(game, loads(game, a));
}

double user_cost(const GameInstance& game, const Allocation& a, int user) {
  if (user < 0 || user >= game.n_users) {
    throw ValidationError("unknown user index " + std::to_string(user));
  }
  const auto load = loads(game, a);
  double total = 0.0;
  for (int r : action_of(game, a, user)) {
    total += f_at(game, r, load[static_cast<std::size_t>(r)]);
  }
  return total;
}

double potential(const GameInstance& game, const Allocation& a) {
  const auto load = loads(game, a);
  double total = 0.0;
  for (std::size_t r = 0; r < load.size(); ++r) {
    for (int k = 1; k <= load[r]; ++k) total += f_at(game, static_cast<int>(r), k);
  }
  return total;
}

bool is_nash(const GameInstance& game, const Allocation& a, double slack) {
  const auto load = loads(game, a);
  std::vector<char> member(game.resources.size(), 0);
  std::vector<double> scratch;
  return nash_at(game, a, load, member, scratch, slack);
}

std::uint64_t profile_count(const GameInstance& game) {
  std::uint64_t total = 1;
  for (const auto& options : game.actions) {
    if (total > std::numeric_limits<std::uint64_t>::max() / options.size()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= options.size();
  }
  return total;
}

OracleReport enumerate_equilibria(const GameInstance& game, std::uint64_t cap,
                                  std::size_t max_stored) {
  validate_game(game);
  const std::uint64_t total = profile_count(game);
  if (total > cap) {
    throw ValidationError("game has " + std::to_string(total) +
                          " profiles, above the cap of " + std::to_string(cap));
  }
  const bool cost = game.side == Side::kCostMin;
  const std::size_t chunks = std::min<std::uint64_t>(total, 4ULL * worker_count());
  const auto parts = parallel_map<OracleReport>(chunks, [&](std::size_t c) {
    const std::uint64_t lo = total * c / chunks;
    const std::uint64_t hi = total * (c + 1) / chunks;
    OracleReport part;
    part.best_value = cost ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
    part.worst_eq_value = -part.best_value;
    Allocation a(static_cast<std::size_t>(game.n_users), 0);
    decode(game, lo, a);
    std::vector<int> load(game.resources.size(), 0);
    std::vector<char> member(game.resources.size(), 0);
    std::vector<double> scratch;
    for (std::uint64_t idx = lo; idx < hi; ++idx, advance(game, a)) {
      fill_loads(game, a, load);
      const double v = value_at(game, load);
      part.best_value = cost ? std::min(part.best_value, v) : std::max(part.best_value, v);
      if (!nash_at(game, a, load, member, scratch, kNashSlack)) continue;
      ++part.num_equilibria;
      part.worst_eq_value =
          cost ? std::max(part.worst_eq_value, v) : std::min(part.worst_eq_value, v);
      if (part.equilibria.size() < max_stored) part.equilibria.push_back(a);
    }
    part.num_profiles = hi - lo;
    return part;
  });

  OracleReport out;
  out.best_value = parts.front().best_value;
  out.worst_eq_value = parts.front().worst_eq_value;
  for (const auto& part : parts) {
    out.num_profiles += part.num_profiles;
    out.num_equilibria += part.num_equilibria;
    if (cost) {
      out.best_value = std::min(out.best_value, part.best_value);
      out.worst_eq_value = std::max(out.worst_eq_value, part.worst_eq_value);
    } else {
      out.best_value = std::max(out.best_value, part.best_value);
      out.worst_eq_value = std::min(out.worst_eq_value, part.worst_eq_value);
    }
    for (const auto& eq : part.equilibria) {
      if (out.equilibria.size() < max_stored) out.equilibria.push_back(eq);
    }
  }
  if (out.num_equilibria > 0) {
    out.poa_defined = true;
    out.poa = cost ? ratio(out.worst_eq_value, out.best_value)
                   : ratio(out.best_value, out.worst_eq_value);
  } else {
    out.worst_eq_value = 0.0;
  }
  return out;
}

DynamicsResult best_response_dynamics(const GameInstance& game,
                                      std::uint64_t seed, int max_rounds,
                                      const Allocation* start) {
  validate_game(game);
  DynamicsResult out;
  Allocation& a = out.allocation;
  if (start != nullptr) {
    validate_allocation(game, *start);
    a = *start;
  } else {
    Xoshiro256 rng(seed);
    a.resize(static_cast<std::size_t>(game.n_users));
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = static_cast<int>(rng.below(game.actions[i].size()));
    }
  }
  const bool cost = game.side == Side::kCostMin;
  std::vector<int> load(game.resources.size(), 0);
  std::vector<char> member(game.resources.size(), 0);
  std::vector<double> values;
  fill_loads(game, a, load);
  double phi = potential(game, a);
  for (out.rounds = 0; out.rounds < max_rounds; ++out.rounds) {
    bool moved = false;
    for (int i = 0; i < game.n_users; ++i) {
      deviation_values(game, a, i, load, member, values);
      const double current = values[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])];
      const double target = cost ? *std::min_element(values.begin(), values.end())
                                 : *std::max_element(values.begin(), values.end());
      if (!better(game.side, target, current, kNashSlack)) continue;
      // Lowest-index action attaining the best response value.
      std::size_t pick = 0;
      while (values[pick] != target) ++pick;
      a[static_cast<std::size_t>(i)] = static_cast<int>(pick);
      fill_loads(game, a, load);
      const double next = potential(game, a);
      if (cost ? !(next < phi) : !(next > phi)) {
        throw VerificationError("potential failed to improve on a best-response move");
      }
      phi = next;
      ++out.improving_moves;
      moved = true;
    }
    if (!moved) return out;
  }
  throw VerificationError("best-response dynamics did not converge within " +
                          std::to_string(max_rounds) + " rounds");
}

namespace {

struct ProfileData {
  double value = 0.0;
  double own = 0.0;  // sum_i J_i(a)
  std::vector<std::vector<double>> deviation;  // [user][action]
};

std::vector<ProfileData> profile_table(const GameInstance& game, std::uint64_t cap) {
  validate_game(game);
  const std::uint64_t total = profile_count(game);
  if (total > cap || total > cap / total) {
    throw ValidationError("smoothness check over " + std::to_string(total) +
                          " profiles exceeds the pair cap");
  }
  std::vector<ProfileData> table(total);
  Allocation a(static_cast<std::size_t>(game.n_users), 0);
  std::vector<int> load(game.resources.size(), 0);
  std::vector<char> member(game.resources.size(), 0);
  for (std::uint64_t idx = 0; idx < total; ++idx, advance(game, a)) {
    fill_loads(game, a, load);
    auto& row = table[idx];
    row.value = value_at(game, load);
    row.deviation.resize(static_cast<std::size_t>(game.n_users));
    for (int i = 0; i < game.n_users; ++i) {
      auto& dev = row.deviation[static_cast<std::size_t>(i)];
      deviation_values(game, a, i, load, member, dev);
      row.own += dev[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])];
    }
  }
  return table;
}

template <typename Lhs>
bool check_pairs(const GameInstance& game, double lambda, double mu,
                 std::uint64_t cap, Lhs lhs_of) {
  const auto table = profile_table(game, cap);
  const bool cost = game.side == Side::kCostMin;
  Allocation b(static_cast<std::size_t>(game.n_users), 0);
  for (std::uint64_t jb = 0; jb < table.size(); ++jb, advance(game, b)) {
    for (const auto& pa : table) {
      double swapped = 0.0;
      for (std::size_t i = 0; i < b.size(); ++i) {
        swapped += pa.deviation[i][static_cast<std::size_t>(b[i])];
      }
      const double lhs = lhs_of(swapped, pa);
      const double rhs = cost ? lambda * table[jb].value + mu * pa.value
                              : lambda * table[jb].value - mu * pa.value;
      const double margin = 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
      if (cost ? lhs > rhs + margin : lhs < rhs - margin) return false;
    }
  }
  return true;
}

}  // namespace

bool check_generalized_smoothness(const GameInstance& game, double lambda,
                                  double mu, std::uint64_t cap) {
  return check_pairs(game, lambda, mu, cap, [](double swapped, const ProfileData& pa) {
    return swapped - pa.own + pa.value;
  });
}

bool check_smoothness(const GameInstance& game, double lambda, double mu,
                      std::uint64_t cap) {
  return check_pairs(game, lambda, mu, cap,
                     [](double swapped, const ProfileData&) { return swapped; });
}

double poa_bound_from_certificate(Side side, double lambda, double mu) {
  if (!(lambda > 0.0)) throw ValidationError("certificate needs lambda > 0");
  if (side == Side::kCostMin) {
    if (!(mu < 1.0)) throw ValidationError("certificate needs mu < 1");
    return lambda / (1.0 - mu);
  }
  if (!(mu > -1.0)) throw ValidationError("certificate needs mu > -1");
  return (1.0 + mu) / lambda;
}

GameInstance random_in_class_game(std::span<const BasisPair> bases,
                                  const RandomGameSpec& spec, std::uint64_t seed) {
  if (bases.empty()) throw ValidationError("basis list is empty");
  const int n = bases.front().n();
  if (spec.n_users < 1 || spec.n_users > n) {
    throw ValidationError("random game needs 1 <= users <= n");
  }
  if (spec.n_resources < 1 || spec.n_resources > 20 || spec.max_actions < 1) {
    throw ValidationError("random game needs 1..20 resources and >= 1 action");
  }
  Xoshiro256 rng(seed);
  GameInstance game;
  game.n_users = spec.n_users;
  game.side = bases.front().side();
  const auto len = static_cast<std::size_t>(spec.n_users);
  for (int r = 0; r < spec.n_resources; ++r) {
    Resource res{std::vector<double>(len + 1, 0.0), std::vector<double>(len + 2, 0.0)};
    for (const auto& pair : bases) {
      const double keep = rng.uniform();
      const double alpha = rng.uniform();
      if (keep < spec.sparsity) continue;
      for (std::size_t k = 1; k <= len; ++k) {
        res.c[k] += alpha * pair.c(static_cast<int>(k));
        res.f[k] += alpha * pair.f(static_cast<int>(k));
      }
    }
    game.resources.push_back(std::move(res));
  }
  const std::uint64_t subsets = (std::uint64_t{1} << spec.n_resources) - 1;
  for (int i = 0; i < spec.n_users; ++i) {
    const auto count = 1 + rng.below(static_cast<std::uint64_t>(spec.max_actions));
    std::vector<Action> options;
    for (std::uint64_t k = 0; k < count; ++k) {
      const std::uint64_t mask = 1 + rng.below(subsets);
      Action act;
      for (int r = 0; r < spec.n_resources; ++r) {
        if (mask >> r & 1U) act.push_back(r);
      }
      options.push_back(std::move(act));
    }
    game.actions.push_back(std::move(options));
  }
  return game;
}

}  // namespace poalab
