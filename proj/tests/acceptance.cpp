// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and time limits are fixed here and printed with the
// result so a red line says what was measured.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "poalab/basis.hpp"
#include "poalab/characterize.hpp"
#include "poalab/game.hpp"
#include "poalab/io.hpp"
#include "poalab/optimize.hpp"
#include "poalab/random.hpp"
#include "poalab/worstcase.hpp"

using namespace poalab;

namespace {

// Collects failed sub-checks; the criterion passes when none fail.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      failures_.push_back(what + " = " + str(got) + " (want " + str(want) + " +- " + str(tol) + ")");
    }
  }
  void note(const std::string& text) { notes_.push_back(text); }
  bool ok() const { return failures_.empty(); }

  std::string summary() const {
    std::string s;
    const auto& src = failures_.empty() ? notes_ : failures_;
    for (std::size_t i = 0; i < src.size() && i < 6; ++i) s += (i ? "; " : "") + src[i];
    if (src.size() > 6) s += "; +" + std::to_string(src.size() - 6) + " more";
    return s;
  }

  static std::string str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double class_poa(const std::vector<BasisPair>& bases, int n) { return characterize(bases, n).poa; }

// Reference values for degrees 1..5 at their printed precision.
const double kNoIncentive[] = {2.50, 9.58, 41.54, 267.64, 1513.57};
const double kMarginalCost[] = {3.00, 13.00, 57.36, 391.00, 2124.21};
const double kOptimalLocal[] = {2.012, 5.101, 15.551, 55.452, 220.401};
const double kOptimalFixed[] = {2.15, 5.33, 18.36, 89.41, 469.74};

void polynomial_table(Check& c) {
  for (int d = 1; d <= 5; ++d) {
    const auto t0 = Clock::now();
    const double poa = class_poa(polynomial_basis(d, 5), 5);
    const double dt = seconds_since(t0);
    c.near(poa, kNoIncentive[d - 1], 0.01, "d=" + std::to_string(d));
    c.expect(dt < 1.0, "d=" + std::to_string(d) + " took " + Check::str(dt) + " s");
    c.note("d=" + std::to_string(d) + ":" + Check::str(poa));
  }
}

void saturation(Check& c) {
  for (int d = 1; d <= 5; ++d) {
    const double at5 = class_poa(polynomial_basis(d, 5), 5);
    const double at10 = class_poa(polynomial_basis(d, 10), 10);
    const double at100 = class_poa(polynomial_basis(d, 100), 100);
    c.near(at10, at5, 1e-6, "d=" + std::to_string(d) + " n=10 vs n=5");
    c.near(at100, at5, 1e-6, "d=" + std::to_string(d) + " n=100 vs n=5");
  }
  c.note("n=5, 10, 100 agree to 1e-6 for d=1..5");
}

void affine_small(Check& c) {
  const auto t0 = Clock::now();
  const auto report = characterize(polynomial_basis(1, 2), 2);
  const auto baseline = two_parameter_bound(2);
  const double dt = seconds_since(t0);
  c.near(report.poa, 2.0, 1e-9, "poa");
  c.near(report.nu_star, 0.5, 1e-9, "nu*");
  c.near(report.rho_star, 0.5, 1e-9, "rho*");
  c.near(baseline.gamma, 2.5, 1e-9, "baseline gamma*");
  c.near(baseline.kappa, 1.5, 1e-9, "baseline kappa*");
  c.expect(baseline.gamma > report.poa + 0.1, "no strict gap");
  c.expect(dt < 0.1, "took " + Check::str(dt) + " s");
  c.note("exact 2, baseline 2.5, " + Check::str(dt * 1e3) + " ms");
}

void marginal_cost(Check& c) {
  for (int d = 1; d <= 5; ++d) {
    const double mc = class_poa(polynomial_marginal_cost_basis(d, 100), 100);
    const double none = class_poa(polynomial_basis(d, 100), 100);
    c.near(mc, kMarginalCost[d - 1], 0.5, "d=" + std::to_string(d));
    c.expect(mc > none, "d=" + std::to_string(d) + " not worse than no incentive");
    c.note("d=" + std::to_string(d) + ":" + Check::str(mc));
  }
}

void optimal_incentives(Check& c) {
  const auto t0 = Clock::now();
  const int n = 100;
  // Pairs k^1 .. k^6 with F = k^0 .. k^5; the degree-d class uses the first d + 1.
  const auto rules = optimize_class(polynomial_basis(5, n), n);
  for (int d = 1; d <= 5; ++d) {
    const double local =
        class_poa_from_rules(std::span(rules).subspan(0, static_cast<std::size_t>(d) + 1));
    std::vector<std::vector<double>> costs;
    for (int j = 0; j <= d; ++j) {
      std::vector<double> cj;
      for (int k = 1; k <= n; ++k) cj.push_back(std::pow(k, j));
      costs.push_back(cj);
    }
    const double fixed = optimize_fixed_incentive(costs, n).poa;
    const double none = class_poa(polynomial_basis(d, n), n);
    const auto tag = "d=" + std::to_string(d);
    c.near(local, kOptimalLocal[d - 1], 0.5, tag + " local");
    c.near(fixed, kOptimalFixed[d - 1], 0.5, tag + " fixed");
    c.expect(local <= fixed + 1e-9 && fixed <= none + 1e-9, tag + " ordering");
    c.note(tag + ":" + Check::str(local) + "/" + Check::str(fixed));
  }
  const double dt = seconds_since(t0);
  c.expect(dt < 60.0, "took " + Check::str(dt) + " s");
  c.note(Check::str(dt) + " s");
}

void bpr(Check& c) {
  const double poa = class_poa(bpr_basis(50, 50), 50);
  c.near(poa, 36.09, 0.1, "poa");
  c.expect(poa < 267.64, "not below the quartic bound");
  c.note("poa " + Check::str(poa));
}

void decoupling(Check& c) {
  const int n = 3;
  const std::vector<BasisPair> both{
      BasisPair(n, {0, 1, 4, 9}, {0, 1, 2, 3, 0}, "k2-k"),
      BasisPair(n, {0, 1, 2, 3}, {0, 1, 2, 3, 0}, "k-k")};
  const double joint = class_poa(both, n);
  c.near(joint, 2.6, 0.01, "class");
  c.near(class_poa({both[0]}, n), 2.5, 0.01, "first pair");
  c.near(class_poa({both[1]}, n), 2.0, 0.01, "second pair");
  c.note("class " + Check::str(joint));
}

struct Family {
  std::string name;
  std::vector<BasisPair> pairs;
  int n;
};

std::vector<BasisPair> affine_with_optimal_rules(int n) {
  const auto bases = polynomial_basis(1, n);
  std::vector<BasisPair> out;
  for (const auto& b : bases) out.push_back(rule_pair(b, optimize_rule(b)));
  return out;
}

void tightness(Check& c) {
  const auto t0 = Clock::now();
  std::vector<Family> constructed;
  for (int d = 1; d <= 3; ++d) {
    for (int n = 1; n <= 6; ++n) {
      constructed.push_back({"poly d=" + std::to_string(d) + " n=" + std::to_string(n),
                             polynomial_basis(d, n), n});
    }
  }
  for (int n = 2; n <= 6; ++n) {
    constructed.push_back({"affine+mc n=" + std::to_string(n), polynomial_marginal_cost_basis(1, n), n});
    constructed.push_back({"affine+opt n=" + std::to_string(n), affine_with_optimal_rules(n), n});
  }
  for (double s : {0.5, 1.0, 1.5}) {
    for (double g : {0.5, 1.0, 1.5}) {
      constructed.push_back({"perception " + Check::str(s) + "," + Check::str(g),
                             perception_basis(s, g, 5), 5});
    }
  }
  for (const auto& f : constructed) {
    const auto report = characterize(f.pairs, f.n);
    const auto built = build_game(extract_recipe(report, f.pairs, f.n), f.pairs, f.n);
    const auto oracle = enumerate_equilibria(built.game);
    c.expect(oracle.poa_defined, f.name + " has no equilibrium");
    c.near(oracle.poa, report.poa, 1e-6, f.name + " constructed");
  }

  // Random in-class instances never beat the bound.
  const std::vector<Family> sampled{
      {"poly d=2", polynomial_basis(2, 3), 3},
      {"poly d=3", polynomial_basis(3, 3), 3},
      {"affine+mc", polynomial_marginal_cost_basis(1, 3), 3},
      {"affine+opt", affine_with_optimal_rules(3), 3},
      {"perception", perception_basis(0.5, 1.5, 3), 3}};
  int instances = 0;
  for (const auto& f : sampled) {
    const double bound = class_poa(f.pairs, f.n);
    SplitMix64 seeds(0xACCE97);
    for (int s = 0; s < 200; ++s) {
      Xoshiro256 rng(seeds.next());
      RandomGameSpec spec;
      spec.n_users = 1 + static_cast<int>(rng.below(3));
      spec.n_resources = 1 + static_cast<int>(rng.below(4));
      const auto oracle = enumerate_equilibria(random_in_class_game(f.pairs, spec, rng()));
      ++instances;
      if (oracle.poa_defined) {
        c.expect(oracle.poa <= bound * (1.0 + 1e-9), f.name + " sample " + std::to_string(s));
      }
    }
  }
  const double dt = seconds_since(t0);
  c.expect(dt < 300.0, "took " + Check::str(dt) + " s");
  c.note(std::to_string(constructed.size()) + " constructions tight, " +
         std::to_string(instances) + " samples within bound, " + Check::str(dt) + " s");
}

void reduction(Check& c) {
  int checked = 0;
  for (int n = 1; n <= 6; ++n) {
    std::vector<Family> fams;
    for (int d = 1; d <= 5; ++d) {
      fams.push_back({"poly d=" + std::to_string(d), polynomial_basis(d, n), n});
      fams.push_back({"poly-mc d=" + std::to_string(d), polynomial_marginal_cost_basis(d, n), n});
    }
    fams.push_back({"bpr", bpr_basis(n, n), n});
    for (double s : {0.0, 0.5, 1.0, 2.0}) {
      for (double g : {0.0, 0.5, 1.0, 2.0}) {
        fams.push_back({"perception", perception_basis(s, g, n), n});
      }
    }
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      fams.push_back({"welfare-random",
                      {marginal_contribution_welfare(random_concave_welfare(n, seed), n)}, n});
    }
    for (const auto& f : fams) {
      c.expect(check_reduction_equivalence(f.pairs, f.n), f.name + " n=" + std::to_string(n));
      ++checked;
    }
  }
  c.note(std::to_string(checked) + " classes agree within 1e-8");
}

void welfare_experiment(Check& c) {
  const auto t0 = Clock::now();
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run({"welfare-experiment", "--samples", "10000", "--n", "10", "--seed", "1"},
                            out, err);
  const double dt = seconds_since(t0);
  c.expect(code == cli::kOk, "exit code " + std::to_string(code) + " " + err.str());
  if (code != cli::kOk && code != cli::kVerificationFailure) return;
  const auto s = Json::parse(out.str());
  const double id = s["identical_mean"].get<double>();
  const double opt = s["optimal_mean"].get<double>();
  const double imp = s["improvement_mean"].get<double>();
  c.near(id, 1.259, 0.02, "identical mean");
  c.near(opt, 1.100, 0.02, "optimal mean");
  c.near(imp, 1.144, 0.02, "improvement mean");
  c.expect(s["improvement_min"].get<double>() >= 1.0, "improvement below 1");
  c.expect(dt < 600.0, "took " + Check::str(dt) + " s");
  c.note(Check::str(id) + "/" + Check::str(opt) + "/" + Check::str(imp) + ", min improvement " +
         Check::str(s["improvement_min"].get<double>()) + ", " + Check::str(dt) + " s");
}

void perception_sweep(Check& c) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run({"sweep-perception", "--n", "20"}, out, err);
  c.expect(code == cli::kOk, "exit code " + std::to_string(code));
  const double affine = class_poa(polynomial_basis(1, 20), 20);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  int rows = 0;
  bool found = false;
  while (std::getline(in, line)) {
    double s = 0.0;
    double g = 0.0;
    double poa = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &s, &g, &poa) != 3) {
      // "inf" is acceptable and still >= 1.
      c.expect(line.find("inf") != std::string::npos, "bad row " + line);
      ++rows;
      continue;
    }
    ++rows;
    c.expect(poa >= 1.0, "row " + line + " below 1");
    if (std::abs(s - 1.0) < 1e-12 && std::abs(g - 1.0) < 1e-12) {
      found = true;
      c.near(poa, affine, 1e-9, "sigma=gamma=1");
    }
  }
  c.expect(rows == 441, std::to_string(rows) + " rows");
  c.expect(found, "sigma=gamma=1 row missing");
  c.note(std::to_string(rows) + " rows, sigma=gamma=1 matches affine " + Check::str(affine));
}

void potential_dynamics(Check& c) {
  SplitMix64 seeds(0x5EED);
  int moves = 0;
  for (int s = 0; s < 500; ++s) {
    Xoshiro256 rng(seeds.next());
    const int n = 1 + static_cast<int>(rng.below(4));
    // Three random nondecreasing latencies as the class.
    std::vector<BasisPair> pairs;
    for (int j = 0; j < 3; ++j) {
      std::vector<double> lat;
      double level = rng.uniform();
      for (int k = 0; k < n; ++k) lat.push_back(level += 2.0 * rng.uniform());
      pairs.push_back(from_congestion(lat, n));
    }
    RandomGameSpec spec;
    spec.n_users = n;
    spec.n_resources = 1 + static_cast<int>(rng.below(5));
    const auto game = random_in_class_game(pairs, spec, rng());
    try {
      const auto dyn = best_response_dynamics(game, rng());
      moves += dyn.improving_moves;
      c.expect(is_nash(game, dyn.allocation), "instance " + std::to_string(s) + " not Nash");
      const auto oracle = enumerate_equilibria(game);
      c.expect(std::find(oracle.equilibria.begin(), oracle.equilibria.end(), dyn.allocation) !=
                   oracle.equilibria.end(),
               "instance " + std::to_string(s) + " outside the exhaustive set");
    } catch (const VerificationError& e) {
      c.expect(false, "instance " + std::to_string(s) + ": " + e.what());
    }
  }
  c.note("500 instances converged, " + std::to_string(moves) + " strictly improving moves");
}

void certificates(Check& c) {
  std::vector<Family> fams{{"poly d=1", polynomial_basis(1, 3), 3},
                           {"poly d=2", polynomial_basis(2, 3), 3},
                           {"poly d=3", polynomial_basis(3, 3), 3},
                           {"poly-mc d=2", polynomial_marginal_cost_basis(2, 3), 3},
                           {"bpr", bpr_basis(3, 3), 3},
                           {"perception", perception_basis(1.5, 0.5, 3), 3},
                           {"affine+opt", affine_with_optimal_rules(3), 3}};
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    fams.push_back({"welfare-random",
                    {marginal_contribution_welfare(random_concave_welfare(3, seed), 3)}, 3});
  }
  int games = 0;
  for (const auto& f : fams) {
    const auto report = characterize(f.pairs, f.n);
    if (!report.bounded) continue;
    const auto cert = certificate_from_report(report);
    const double bound = poa_bound_from_certificate(report.side, cert.lambda, cert.mu);
    c.near(bound, report.poa, 1e-9 * report.poa, f.name + " certificate bound");
    SplitMix64 seeds(0xCE27);
    for (int s = 0; s < 50; ++s) {
      Xoshiro256 rng(seeds.next());
      RandomGameSpec spec;
      spec.n_users = 1 + static_cast<int>(rng.below(3));
      spec.n_resources = 1 + static_cast<int>(rng.below(3));
      const auto game = random_in_class_game(f.pairs, spec, rng());
      ++games;
      c.expect(check_generalized_smoothness(game, cert.lambda, cert.mu),
               f.name + " game " + std::to_string(s) + " not smooth");
      const auto oracle = enumerate_equilibria(game);
      if (oracle.poa_defined) {
        c.expect(bound >= oracle.poa * (1.0 - 1e-9), f.name + " game " + std::to_string(s));
      }
    }
  }
  c.note(std::to_string(fams.size()) + " families, " + std::to_string(games) + " games");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"polynomial PoA table, n=5", polynomial_table},
      {"saturation in n", saturation},
      {"affine n=2 and earlier baseline", affine_small},
      {"marginal-cost incentives, n=100", marginal_cost},
      {"optimal local and fixed incentives, n=100", optimal_incentives},
      {"BPR, n=50, K=1..50", bpr},
      {"decoupling counterexample", decoupling},
      {"tightness and oracle upper bound", tightness},
      {"reduced index set equivalence", reduction},
      {"welfare experiment, 10^4 samples", welfare_experiment},
      {"perception sweep, n=20", perception_sweep},
      {"best-response dynamics", potential_dynamics},
      {"certificate transfer", certificates},
  };
  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    passed += c.ok();
    char head[128];
    std::snprintf(head, sizeof head, "AC%02zu %s %-45s %8.2fs  ", i + 1, c.ok() ? "PASS" : "FAIL",
                  criteria[i].first.c_str(), dt);
    std::cout << head << c.summary() << std::endl;
  }
  std::cout << passed << "/" << criteria.size() << " criteria passed" << std::endl;
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
