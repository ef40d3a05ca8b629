#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "poalab/basis.hpp"
#include "poalab/characterize.hpp"
#include "poalab/game.hpp"
#include "poalab/index_set.hpp"
#include "poalab/io.hpp"
#include "poalab/optimize.hpp"
#include "poalab/parallel.hpp"
#include "poalab/random.hpp"
#include "poalab/worstcase.hpp"

namespace poalab::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Options {
  std::string family = "poly";
  int d = 1;
  int n = 5;
  double sigma = 1.0;
  double gamma = 1.0;
  std::string sigma_range = "0:2";
  std::string gamma_range = "0:2";
  double grid_step = 0.1;
  int k_max = 50;
  double t = 1.0;
  std::uint64_t seed = 1;
  int samples = 0;
  bool fixed = false;
  bool normalize = false;
  bool full = false;
  std::string basis;
  std::string out;
  std::string summary;
  std::string format = "json";
  std::string solver = "simplex";
  std::string game;
  double tol = 1e-9;
  double activity_tol = 1e-7;
  double eta = kDefaultUnboundedEta;
  double expect_poa = kNaN;
};

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

SolverTolerances tolerances(const Options& o) {
  if (!(o.tol > 0.0) || !(o.activity_tol > 0.0)) {
    throw ValidationError("tolerances must be positive");
  }
  SolverTolerances tol;
  tol.feas_tol = o.tol;
  tol.activity_tol = o.activity_tol;
  return tol;
}

CharacterizeOptions characterize_options(const Options& o) {
  CharacterizeOptions opts;
  opts.tol = tolerances(o);
  opts.engine = engine_from_string(o.solver);
  return opts;
}

BasisClass make_class(const Options& o) {
  if (!o.basis.empty() || o.family == "custom") {
    if (o.basis.empty()) throw ValidationError("--family custom needs --basis <path>");
    return basis_class_from_json(read_json_file(o.basis));
  }
  if (o.n < 1) throw ValidationError("--n must be >= 1");
  BasisClass cls;
  cls.n = o.n;
  if (o.family == "poly") {
    cls.pairs = polynomial_basis(o.d, o.n);
  } else if (o.family == "poly-mc") {
    cls.pairs = polynomial_marginal_cost_basis(o.d, o.n);
  } else if (o.family == "bpr") {
    cls.pairs = bpr_basis(o.n, o.k_max, o.t);
  } else if (o.family == "perception") {
    cls.pairs = perception_basis(o.sigma, o.gamma, o.n);
  } else if (o.family == "welfare-random") {
    cls.side = Side::kWelfareMax;
    cls.pairs.push_back(
        marginal_contribution_welfare(random_concave_welfare(o.n, o.seed), o.n));
  } else {
    throw ValidationError("unknown family '" + o.family + "'");
  }
  return cls;
}

void emit(const std::string& text, const Options& o, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_text_file(o.out, text);
  }
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  try {
    std::size_t used = 0;
    if (colon == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {v, v};
    }
    const std::string a = text.substr(0, colon);
    const std::string b = text.substr(colon + 1);
    const double lo = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(text);
    const double hi = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(text);
    if (lo > hi) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::exception&) {
    throw ValidationError("bad range '" + text + "' (expected lo:hi or a value)");
  }
}

std::vector<double> grid(const std::string& range, double step) {
  const auto [lo, hi] = parse_range(range);
  if (!(step > 0.0)) throw ValidationError("--grid-step must be > 0");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (long k = 0; k < count; ++k) out.push_back(lo + static_cast<double>(k) * step);
  return out;
}

int cmd_characterize(const Options& o, std::ostream& out) {
  const auto cls = make_class(o);
  const auto report = characterize(cls.pairs, cls.n, characterize_options(o));
  if (o.format == "csv") {
    emit("poa,rho_star,nu_star,bounded\n" + fmt(report.poa) + "," +
             fmt(report.rho_star) + "," + fmt(report.nu_star) + "," +
             (report.bounded ? "true" : "false") + "\n",
         o, out);
  } else {
    Json doc = report_to_json(report);
    doc["n"] = cls.n;
    if (!o.out.empty()) write_text_file(o.out, doc.dump(2) + "\n");
  }
  out << "poa " << fmt(report.poa) << "\n";
  return kOk;
}

std::vector<std::vector<double>> congestion_vectors(const Options& o) {
  std::vector<std::vector<double>> out;
  if (o.family == "poly" && o.basis.empty()) {
    if (o.d < 0) throw ValidationError("--d must be >= 0");
    for (int j = 0; j <= o.d; ++j) {
      std::vector<double> c(static_cast<std::size_t>(o.n));
      for (int k = 1; k <= o.n; ++k) c[static_cast<std::size_t>(k - 1)] = std::pow(k, j);
      out.push_back(std::move(c));
    }
  } else if (o.family == "bpr" && o.basis.empty()) {
    for (const auto& p : bpr_basis(o.n, o.k_max, o.t)) {
      std::vector<double> c(p.f_values().begin() + 1, p.f_values().end() - 1);
      out.push_back(std::move(c));
    }
  } else {
    throw ValidationError("--fixed needs a congestion family (poly or bpr)");
  }
  return out;
}

int cmd_optimize(const Options& o, std::ostream& out) {
  if (o.n < 1) throw ValidationError("--n must be >= 1");
  if (o.fixed) {
    const auto result = optimize_fixed_incentive(congestion_vectors(o), o.n, tolerances(o));
    Json doc;
    doc["poa"] = result.poa;
    doc["rho"] = result.rho;
    doc["nu"] = result.nu;
    doc["tau"] = result.tau;
    doc["tau_available"] = result.tau_available;
    doc["nu_floor_used"] = result.nu_floor_used;
    if (!o.out.empty()) write_text_file(o.out, doc.dump(2) + "\n");
    out << "poa " << fmt(result.poa) << "\n";
    return kOk;
  }
  const auto cls = make_class(o);
  OptimizeOptions opts;
  opts.tol = tolerances(o);
  opts.normalize = o.normalize;
  const auto rules = optimize_class(cls.pairs, cls.n, opts);
  const double poa = class_poa_from_rules(rules);
  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "label,k,f_opt\n";
    for (const auto& r : rules) {
      for (std::size_t k = 0; k < r.f_opt.size(); ++k) {
        csv << r.label << "," << k + 1 << "," << fmt(r.f_opt[k]) << "\n";
      }
    }
    emit(csv.str(), o, out);
  } else if (!o.out.empty()) {
    Json doc;
    doc["class_poa"] = poa;
    doc["rules"] = Json::array();
    for (const auto& r : rules) doc["rules"].push_back(rule_to_json(r));
    write_text_file(o.out, doc.dump(2) + "\n");
  }
  out << "poa " << fmt(poa) << "\n";
  return kOk;
}

int cmd_worst_case(const Options& o, std::ostream& out) {
  const auto cls = make_class(o);
  const auto report = characterize_cost(cls.pairs, cls.n, characterize_options(o));
  const auto recipe = extract_recipe(report, cls.pairs, cls.n, o.eta);
  const auto built = build_game(recipe, cls.pairs, cls.n);
  Json meta;
  meta["scenario"] = std::string(to_string(recipe.scenario));
  meta["eta"] = recipe.eta;
  meta["target_poa"] = recipe.target_poa;
  meta["pair_a"] = {{"basis", recipe.basis_a},
                    {"x", recipe.triplet_a.x},
                    {"y", recipe.triplet_a.y},
                    {"z", recipe.triplet_a.z}};
  if (recipe.scenario != Scenario::kUnbounded) {
    meta["pair_b"] = {{"basis", recipe.basis_b},
                      {"x", recipe.triplet_b.x},
                      {"y", recipe.triplet_b.y},
                      {"z", recipe.triplet_b.z}};
  }
  meta["a_ne"] = built.a_ne;
  meta["a_opt"] = built.a_opt;
  const std::string text = game_to_json(built.game, meta).dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    write_text_file(o.out, text);
    out << "scenario " << to_string(recipe.scenario) << "\neta " << fmt(recipe.eta)
        << "\npoa " << fmt(recipe.target_poa) << "\n";
  }
  return kOk;
}

int verify_game_file(const Options& o, std::ostream& out, std::ostream& err) {
  const auto doc = game_from_json(read_json_file(o.game));
  const auto& game = doc.game;
  const auto report = enumerate_equilibria(game);
  out << "profiles " << report.num_profiles << "\nequilibria " << report.num_equilibria
      << "\noracle_poa " << (report.poa_defined ? fmt(report.poa) : "undefined") << "\n";
  bool ok = true;
  if (doc.meta.contains("a_ne")) {
    const auto a_ne = doc.meta.at("a_ne").get<Allocation>();
    if (!is_nash(game, a_ne)) {
      err << "stored equilibrium profile fails the Nash check\n";
      ok = false;
    }
  }
  double expected = o.expect_poa;
  bool lower_only = false;
  if (std::isnan(expected) && doc.meta.contains("target_poa")) {
    expected = doc.meta.at("target_poa").get<double>();
    lower_only = doc.meta.value("scenario", "") == "unbounded";
  }
  if (!std::isnan(expected)) {
    if (!report.poa_defined) {
      err << "no equilibrium; expected PoA " << fmt(expected) << "\n";
      ok = false;
    } else if (lower_only ? report.poa < expected - 1e-6
                          : std::abs(report.poa - expected) > 1e-6) {
      err << "oracle PoA " << fmt(report.poa) << " differs from expected "
          << fmt(expected) << "\n";
      ok = false;
    }
  }
  return ok ? kOk : kVerificationFailure;
}

int verify_family(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cls = make_class(o);
  const auto copts = characterize_options(o);
  const auto report = characterize(cls.pairs, cls.n, copts);
  const int samples = o.samples > 0 ? o.samples : 200;
  const int max_users = std::min(cls.n, 3);
  SplitMix64 seeds(o.seed);
  std::vector<std::uint64_t> seed_list(static_cast<std::size_t>(samples));
  for (auto& s : seed_list) s = seeds.next();
  const double limit = report.poa + 1e-9 * std::max(1.0, report.poa);

  struct Outcome {
    bool ok = true;
    double poa = 0.0;
  };
  const auto outcomes = parallel_map<Outcome>(seed_list.size(), [&](std::size_t s) {
    Xoshiro256 rng(seed_list[s]);
    RandomGameSpec spec;
    spec.n_users = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_users)));
    spec.n_resources = 1 + static_cast<int>(rng.below(4));
    spec.max_actions = 3;
    const auto game = random_in_class_game(cls.pairs, spec, rng());
    const auto oracle = enumerate_equilibria(game);
    Outcome res;
    if (!oracle.poa_defined) return res;
    res.poa = oracle.poa;
    res.ok = !(oracle.poa > limit);
    return res;
  });
  int violations = 0;
  double worst = 1.0;
  for (const auto& r : outcomes) {
    if (!r.ok) ++violations;
    worst = std::max(worst, r.poa);
  }
  out << "lp_poa " << fmt(report.poa) << "\nsamples " << samples
      << "\nmax_oracle_poa " << fmt(worst) << "\nupper_bound_violations " << violations
      << "\n";
  bool ok = violations == 0;
  if (cls.side == Side::kCostMin && cls.n <= 12) {
    const auto recipe = extract_recipe(report, cls.pairs, cls.n, o.eta);
    const auto built = build_game(recipe, cls.pairs, cls.n);
    const auto oracle = enumerate_equilibria(built.game);
    const bool tight = recipe.scenario == Scenario::kUnbounded
                           ? oracle.poa >= recipe.target_poa - 1e-6
                           : std::abs(oracle.poa - recipe.target_poa) <= 1e-6;
    out << "constructed_poa " << fmt(oracle.poa) << "\n";
    if (!tight) {
      err << "constructed instance PoA " << fmt(oracle.poa) << " misses "
          << fmt(recipe.target_poa) << "\n";
      ok = false;
    }
  }
  if (violations > 0) err << violations << " random instances exceed the LP bound\n";
  return ok ? kOk : kVerificationFailure;
}

int cmd_sweep_perception(const Options& o, std::ostream& out) {
  if (o.n < 1) throw ValidationError("--n must be >= 1");
  const auto sigmas = grid(o.sigma_range, o.grid_step);
  const auto gammas = grid(o.gamma_range, o.grid_step);
  if (sigmas.front() < 0.0 || gammas.front() < 0.0) {
    throw ValidationError("perception parameters must be nonnegative");
  }
  const auto copts = characterize_options(o);
  const auto values = parallel_map<double>(sigmas.size() * gammas.size(), [&](std::size_t k) {
    const auto pairs = perception_basis(sigmas[k / gammas.size()], gammas[k % gammas.size()], o.n);
    return characterize_cost(pairs, o.n, copts).poa;
  });
  std::ostringstream csv;
  csv << "sigma,gamma,poa\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    csv << fmt(sigmas[k / gammas.size()]) << "," << fmt(gammas[k % gammas.size()]) << ","
        << fmt(values[k]) << "\n";
  }
  emit(csv.str(), o, out);
  return kOk;
}

struct Histogram {
  std::vector<double> edges;
  std::vector<long> counts;

  Histogram(double lo, double hi, int bins) : counts(static_cast<std::size_t>(bins) + 1, 0) {
    for (int b = 0; b <= bins; ++b) edges.push_back(lo + (hi - lo) * b / bins);
  }

  // The last count collects everything at or beyond the top edge.
  void add(double v) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    auto idx = static_cast<std::size_t>(std::max<long>(0, it - edges.begin() - 1));
    counts[std::min(idx, counts.size() - 1)] += 1;
  }
};

int cmd_welfare_experiment(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.n < 1) throw ValidationError("--n must be >= 1");
  const int samples = o.samples > 0 ? o.samples : 10000;
  SplitMix64 seeds(o.seed);
  std::vector<std::uint64_t> seed_list(static_cast<std::size_t>(samples));
  for (auto& s : seed_list) s = seeds.next();
  const auto copts = characterize_options(o);
  OptimizeOptions oopts;
  oopts.tol = copts.tol;

  struct Sample {
    double identical = 0.0;
    double optimal = 0.0;
  };
  const auto rows = parallel_map<Sample>(seed_list.size(), [&](std::size_t s) {
    const auto w = random_concave_welfare(o.n, seed_list[s]);
    const std::vector<BasisPair> pairs{marginal_contribution_welfare(w, o.n)};
    return Sample{characterize_welfare(pairs, o.n, copts).poa,
                  optimize_welfare_rule(pairs.front(), oopts).poa};
  });

  std::ostringstream csv;
  csv << "sample,identical_poa,optimal_poa,improvement\n";
  Histogram h_id(1.0, 2.0, 20);
  Histogram h_opt(1.0, 2.0, 20);
  Histogram h_imp(1.0, 2.0, 20);
  double sum_id = 0.0;
  double sum_opt = 0.0;
  double sum_imp = 0.0;
  double min_imp = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < rows.size(); ++s) {
    const double imp = rows[s].identical / rows[s].optimal;
    csv << s << "," << fmt(rows[s].identical) << "," << fmt(rows[s].optimal) << ","
        << fmt(imp) << "\n";
    sum_id += rows[s].identical;
    sum_opt += rows[s].optimal;
    sum_imp += imp;
    min_imp = std::min(min_imp, imp);
    h_id.add(rows[s].identical);
    h_opt.add(rows[s].optimal);
    h_imp.add(imp);
  }
  const auto count = static_cast<double>(rows.size());
  Json summary;
  summary["samples"] = samples;
  summary["n"] = o.n;
  summary["seed"] = o.seed;
  summary["identical_mean"] = sum_id / count;
  summary["optimal_mean"] = sum_opt / count;
  summary["improvement_mean"] = sum_imp / count;
  summary["improvement_min"] = min_imp;
  summary["histogram_edges"] = h_id.edges;
  summary["histograms"] = {{"identical", h_id.counts},
                           {"optimal", h_opt.counts},
                           {"improvement", h_imp.counts}};
  if (!o.out.empty()) write_text_file(o.out, csv.str());
  const std::string text = summary.dump(2) + "\n";
  if (o.summary.empty()) {
    out << text;
  } else {
    write_text_file(o.summary, text);
  }
  if (min_imp < 1.0 - 1e-9) {
    err << "a sample has improvement factor " << fmt(min_imp) << " < 1\n";
    return kVerificationFailure;
  }
  return kOk;
}

int cmd_triplets(const Options& o, std::ostream& out) {
  const auto set = o.full ? enumerate_full(o.n) : enumerate_reduced(o.n);
  std::ostringstream csv;
  csv << "x,y,z\n";
  for (const auto& t : set.triplets) csv << t.x << "," << t.y << "," << t.z << "\n";
  emit(csv.str(), o, out);
  return kOk;
}

void add_family(CLI::App* sub, Options& o) {
  sub->add_option("--family", o.family, "poly|poly-mc|bpr|perception|welfare-random|custom");
  sub->add_option("--d", o.d, "polynomial degree");
  sub->add_option("--n", o.n, "maximum number of users");
  sub->add_option("--sigma", o.sigma, "perception sigma");
  sub->add_option("--gamma", o.gamma, "perception gamma");
  sub->add_option("--k-max", o.k_max, "largest BPR capacity");
  sub->add_option("--t", o.t, "BPR free-flow time");
  sub->add_option("--seed", o.seed, "seed");
  sub->add_option("--basis", o.basis, "basis class JSON file");
}

void add_solver(CLI::App* sub, Options& o) {
  sub->add_option("--tol", o.tol, "feasibility tolerance");
  sub->add_option("--activity-tol", o.activity_tol, "activity tolerance");
  sub->add_option("--solver", o.solver, "simplex|geometric");
}

void add_output(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "output path");
  sub->add_option("--format", o.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Exact price of anarchy for generalized congestion and welfare games"};
  app.require_subcommand(1);

  auto* characterize_cmd = app.add_subcommand("characterize", "PoA of a class");
  add_family(characterize_cmd, o);
  add_solver(characterize_cmd, o);
  add_output(characterize_cmd, o);

  auto* optimize_cmd = app.add_subcommand("optimize", "PoA-minimizing generating functions");
  add_family(optimize_cmd, o);
  add_solver(optimize_cmd, o);
  add_output(optimize_cmd, o);
  optimize_cmd->add_flag("--fixed", o.fixed, "load-independent incentives");
  optimize_cmd->add_flag("--normalize", o.normalize, "scale F so that F(1) = C(1)");

  auto* worst_cmd = app.add_subcommand("worst-case", "instance attaining the class PoA");
  add_family(worst_cmd, o);
  add_solver(worst_cmd, o);
  worst_cmd->add_option("--out", o.out, "game JSON path");
  worst_cmd->add_option("--eta", o.eta, "mixing weight for the unbounded construction");

  auto* verify_cmd = app.add_subcommand("verify", "brute-force oracle checks");
  add_family(verify_cmd, o);
  add_solver(verify_cmd, o);
  verify_cmd->add_option("--game", o.game, "game JSON file");
  verify_cmd->add_option("--expect-poa", o.expect_poa, "expected PoA of --game");
  verify_cmd->add_option("--samples", o.samples, "random instances (default 200)");
  verify_cmd->add_option("--eta", o.eta, "mixing weight for unbounded classes");

  auto* sweep_cmd = app.add_subcommand("sweep-perception", "PoA over a (sigma, gamma) grid");
  sweep_cmd->add_option("--n", o.n, "maximum number of users");
  sweep_cmd->add_option("--sigma", o.sigma_range, "sigma range lo:hi");
  sweep_cmd->add_option("--gamma", o.gamma_range, "gamma range lo:hi");
  sweep_cmd->add_option("--grid-step", o.grid_step, "grid spacing");
  sweep_cmd->add_option("--out", o.out, "CSV path");
  add_solver(sweep_cmd, o);

  auto* welfare_cmd = app.add_subcommand("welfare-experiment",
                                         "identical-interest vs optimal utility rules");
  welfare_cmd->add_option("--n", o.n, "users and values per welfare function");
  welfare_cmd->add_option("--samples", o.samples, "number of welfare functions (default 10000)");
  welfare_cmd->add_option("--seed", o.seed, "seed");
  welfare_cmd->add_option("--out", o.out, "per-sample CSV path");
  welfare_cmd->add_option("--summary", o.summary, "summary JSON path (default stdout)");
  add_solver(welfare_cmd, o);

  auto* triplet_cmd = app.add_subcommand("triplets", "dump a triplet set as CSV");
  triplet_cmd->add_option("--n", o.n, "maximum number of users");
  triplet_cmd->add_flag("--full", o.full, "full set instead of the reduced one");
  triplet_cmd->add_option("--out", o.out, "CSV path");

  // Sweeps default to the two-variable fast path.
  sweep_cmd->preparse_callback([&o](std::size_t) { o.solver = "geometric"; });
  welfare_cmd->preparse_callback([&o](std::size_t) { o.n = 10; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kInputError;
  }

  try {
    if (characterize_cmd->parsed()) return cmd_characterize(o, out);
    if (optimize_cmd->parsed()) return cmd_optimize(o, out);
    if (worst_cmd->parsed()) return cmd_worst_case(o, out);
    if (verify_cmd->parsed()) {
      return o.game.empty() ? verify_family(o, out, err) : verify_game_file(o, out, err);
    }
    if (sweep_cmd->parsed()) return cmd_sweep_perception(o, out);
    if (welfare_cmd->parsed()) return cmd_welfare_experiment(o, out, err);
    if (triplet_cmd->parsed()) return cmd_triplets(o, out);
  } catch (const ValidationError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const VerificationError& e) {
    err << "verification failure: " << e.what() << "\n";
    return kVerificationFailure;
  }
  return kInputError;
}

}  // namespace poalab::cli
