#include "poalab/worstcase.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace poalab {

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::kTwoLines:
      return "two-lines";
    case Scenario::kNuBarBoundary:
      return "nu-bar-boundary";
    case Scenario::kUnbounded:
      return "unbounded";
  }
  return "?";
}

namespace {

WorstCaseRecipe unbounded_recipe(std::span<const BasisPair> bases, int n,
                                 double eta) {
  if (!(eta > 0.0 && eta < 0.5)) {
    throw ValidationError("unbounded construction needs eta in (0, 0.5)");
  }
  WorstCaseRecipe recipe;
  recipe.scenario = Scenario::kUnbounded;
  double lowest = kInf;
  for (std::size_t j = 0; j < bases.size(); ++j) {
    for (int x = 1; x <= n; ++x) {
      const double fx = bases[j].f(x);
      if (fx <= 0.0 && bases[j].c(x) > 0.0 && fx < lowest) {
        lowest = fx;
        recipe.basis_a = static_cast<int>(j);
        recipe.triplet_a = {x, 0, 0};
      }
    }
  }
  if (recipe.basis_a < 0) {
    throw VerificationError("unbounded report but no pair has F(x) <= 0 with C(x) > 0");
  }
  recipe.eta = eta;
  recipe.target_poa = (1.0 - eta) / eta;
  return recipe;
}

}  // namespace

WorstCaseRecipe extract_recipe(const PoaReport& report,
                               std::span<const BasisPair> bases, int n,
                               double unbounded_eta) {
  if (report.side != Side::kCostMin) {
    throw ValidationError("worst-case construction is defined for cost classes");
  }
  validate_class(bases, n, Side::kCostMin);
  if (!report.bounded) return unbounded_recipe(bases, n, unbounded_eta);

  struct Candidate {
    const BindingRow* row;
    double slope;
  };
  std::vector<Candidate> rising;
  std::vector<Candidate> falling;
  const BindingRow* flat = nullptr;
  for (const auto& row : report.active) {
    const double s = nu_coefficient(bases[static_cast<std::size_t>(row.basis)], row.triplet);
    if (s > 0.0) {
      rising.push_back({&row, s});
    } else {
      falling.push_back({&row, s});
      if (s == 0.0 && !row.ceiling && flat == nullptr) flat = &row;
    }
  }

  WorstCaseRecipe recipe;
  recipe.target_poa = report.poa;
  if (rising.empty() || falling.empty()) {
    // The optimum sits on a flat line; that line alone is tight.
    if (flat == nullptr) {
      throw VerificationError("no binding pair of opposite slopes at the optimum");
    }
    recipe.scenario = Scenario::kTwoLines;
    recipe.basis_a = recipe.basis_b = flat->basis;
    recipe.triplet_a = recipe.triplet_b = flat->triplet;
    recipe.eta = 1.0;
    return recipe;
  }
  // Widest slope gap keeps the eta solve well conditioned.
  const Candidate* best_a = nullptr;
  const Candidate* best_b = nullptr;
  for (const auto& a : rising) {
    for (const auto& b : falling) {
      if (best_a == nullptr || a.slope - b.slope > best_a->slope - best_b->slope) {
        best_a = &a;
        best_b = &b;
      }
    }
  }
  recipe.scenario = best_b->row->ceiling ? Scenario::kNuBarBoundary : Scenario::kTwoLines;
  recipe.basis_a = best_a->row->basis;
  recipe.triplet_a = best_a->row->triplet;
  recipe.basis_b = best_b->row->basis;
  recipe.triplet_b = best_b->row->triplet;
  recipe.slope_a = best_a->slope;
  recipe.slope_b = best_b->slope;
  recipe.eta = -recipe.slope_b / (recipe.slope_a - recipe.slope_b);
  recipe.slope_residual =
      std::abs(recipe.eta * recipe.slope_a + (1.0 - recipe.eta) * recipe.slope_b);
  return recipe;
}

namespace {

Resource scaled_resource(const BasisPair& p, double factor) {
  Resource r;
  for (double v : p.c_values()) r.c.push_back(factor * v);
  for (double v : p.f_values()) r.f.push_back(factor * v);
  return r;
}

// `count` consecutive resources of a cycle of n starting at offset `first`.
void append_run(Action& act, int base, int n, int first, int count) {
  for (int k = 0; k < count; ++k) act.push_back(base + ((first + k) % n + n) % n);
}

}  // namespace

WorstCaseGame build_game(const WorstCaseRecipe& recipe,
                         std::span<const BasisPair> bases, int n) {
  validate_class(bases, n, Side::kCostMin);
  auto pair_at = [&](int j) -> const BasisPair& {
    if (j < 0 || j >= static_cast<int>(bases.size())) {
      throw ValidationError("recipe references basis " + std::to_string(j));
    }
    return bases[static_cast<std::size_t>(j)];
  };
  WorstCaseGame out;
  GameInstance& game = out.game;
  game.side = Side::kCostMin;

  if (recipe.scenario == Scenario::kUnbounded) {
    const int x = recipe.triplet_a.x;
    if (x < 1 || x > n) throw ValidationError("unbounded recipe needs 1 <= x <= n");
    // Truncate the pair to x users.
    const auto& p = pair_at(recipe.basis_a);
    std::vector<double> c(p.c_values().begin(), p.c_values().begin() + x + 1);
    std::vector<double> f(p.f_values().begin(), p.f_values().begin() + x + 1);
    f.push_back(0.0);
    game.n_users = x;
    for (double factor : {recipe.eta, 1.0 - recipe.eta}) {
      Resource r;
      for (double v : c) r.c.push_back(factor * v);
      for (double v : f) r.f.push_back(factor * v);
      game.resources.push_back(std::move(r));
    }
    game.actions.assign(static_cast<std::size_t>(x), {{0}, {1}});
    out.a_ne.assign(static_cast<std::size_t>(x), 1);
    out.a_opt.assign(static_cast<std::size_t>(x), 0);
    return out;
  }

  for (const auto& t : {recipe.triplet_a, recipe.triplet_b}) {
    if (!is_valid_triplet(t, n)) throw ValidationError("recipe triplet out of range");
  }
  game.n_users = n;
  const auto& pa = pair_at(recipe.basis_a);
  const auto& pb = pair_at(recipe.basis_b);
  for (int r = 0; r < n; ++r) game.resources.push_back(scaled_resource(pa, recipe.eta));
  for (int r = 0; r < n; ++r) game.resources.push_back(scaled_resource(pb, 1.0 - recipe.eta));

  const auto& [x, y, z] = recipe.triplet_a;
  const auto& [x2, y2, z2] = recipe.triplet_b;
  for (int i = 0; i < n; ++i) {
    Action ne;
    append_run(ne, 0, n, i, x);
    append_run(ne, n, n, i, x2);
    // The optimal run ends where the first z equilibrium resources end, so
    // it overlaps the equilibrium run in exactly z resources.
    Action opt;
    append_run(opt, 0, n, i + z - y, y);
    append_run(opt, n, n, i + z2 - y2, y2);
    std::sort(ne.begin(), ne.end());
    std::sort(opt.begin(), opt.end());
    game.actions.push_back({std::move(ne), std::move(opt)});
  }
  out.a_ne.assign(static_cast<std::size_t>(n), 0);
  out.a_opt.assign(static_cast<std::size_t>(n), 1);
  return out;
}

}  // namespace poalab
