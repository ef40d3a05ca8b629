#include "poalab/basis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "poalab/random.hpp"

namespace poalab {

std::string_view to_string(Side side) {
  return side == Side::kCostMin ? "cost" : "welfare";
}

Side side_from_string(std::string_view text) {
  if (text == "cost") return Side::kCostMin;
  if (text == "welfare") return Side::kWelfareMax;
  throw ValidationError("unknown side '" + std::string(text) +
                        "' (expected cost or welfare)");
}

BasisPair::BasisPair(int n, std::vector<double> c, std::vector<double> f,
                     std::string label, Side side)
    : n_(n),
      c_(std::move(c)),
      f_(std::move(f)),
      label_(std::move(label)),
      side_(side) {
  if (n_ < 1) throw ValidationError("basis pair needs n >= 1");
  const auto len = static_cast<std::size_t>(n_);
  if (c_.size() != len + 1 || f_.size() != len + 2) {
    throw ValidationError("basis pair '" + label_ + "': expected c of length " +
                          std::to_string(len + 1) + " and f of length " +
                          std::to_string(len + 2));
  }
  for (double v : c_) {
    if (!std::isfinite(v)) throw ValidationError("non-finite value in c");
  }
  for (double v : f_) {
    if (!std::isfinite(v)) throw ValidationError("non-finite value in f");
  }
  if (c_.front() != 0.0 || f_.front() != 0.0 || f_.back() != 0.0) {
    throw ValidationError("basis pair '" + label_ +
                          "': c[0], f[0] and f[n+1] must be zero");
  }
  if (std::any_of(c_.begin(), c_.end(), [](double v) { return v < 0.0; })) {
    throw ValidationError("basis pair '" + label_ + "': c must be nonnegative");
  }
  if (side_ == Side::kWelfareMax &&
      std::any_of(f_.begin(), f_.end(), [](double v) { return v < 0.0; })) {
    throw ValidationError("welfare basis pair '" + label_ +
                          "': f must be nonnegative");
  }
}

BasisPair BasisPair::with_generating(std::span<const double> f_1_to_n,
                                     std::string label) const {
  if (f_1_to_n.size() != static_cast<std::size_t>(n_)) {
    throw ValidationError("generating function must have n entries");
  }
  std::vector<double> f(static_cast<std::size_t>(n_) + 2, 0.0);
  std::copy(f_1_to_n.begin(), f_1_to_n.end(), f.begin() + 1);
  return BasisPair(n_, c_, std::move(f), std::move(label), side_);
}

BasisPair BasisPair::scaled(double factor) const {
  if (!(factor > 0.0)) throw ValidationError("scale factor must be positive");
  auto c = c_;
  auto f = f_;
  for (auto& v : c) v *= factor;
  for (auto& v : f) v *= factor;
  return BasisPair(n_, std::move(c), std::move(f), label_, side_);
}

void validate_class(std::span<const BasisPair> bases, int n, Side side) {
  if (bases.empty()) throw ValidationError("basis list is empty");
  if (n < 1) throw ValidationError("n must be >= 1");
  for (const auto& pair : bases) {
    if (pair.n() != n) {
      throw ValidationError("basis pair '" + pair.label() + "' has n = " +
                            std::to_string(pair.n()) + ", expected " +
                            std::to_string(n));
    }
    if (pair.side() != side) {
      throw ValidationError("basis pair '" + pair.label() +
                            "' is on the wrong side (" +
                            std::string(to_string(pair.side())) + ")");
    }
  }
}

namespace {

void check_length(std::span<const double> values, int n, const char* what) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (values.size() != static_cast<std::size_t>(n)) {
    throw ValidationError(std::string(what) + " must have n = " +
                          std::to_string(n) + " entries, got " +
                          std::to_string(values.size()));
  }
}

void check_nonnegative(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (v < 0.0) throw ValidationError(std::string(what) + " must be >= 0");
  }
}

// Builds a cost pair from callables evaluated at k = 1..n.
BasisPair tabulate(int n, const std::function<double(int)>& cost,
                   const std::function<double(int)>& gen, std::string label) {
  const auto len = static_cast<std::size_t>(n);
  std::vector<double> c(len + 1, 0.0);
  std::vector<double> f(len + 2, 0.0);
  for (int k = 1; k <= n; ++k) {
    c[static_cast<std::size_t>(k)] = cost(k);
    f[static_cast<std::size_t>(k)] = gen(k);
  }
  return BasisPair(n, std::move(c), std::move(f), std::move(label));
}

std::string format_param(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

BasisPair from_congestion(std::span<const double> c_vals, int n,
                          std::string label) {
  check_length(c_vals, n, "congestion values");
  check_nonnegative(c_vals, "congestion values");
  return tabulate(
      n, [&](int k) { return k * c_vals[static_cast<std::size_t>(k - 1)]; },
      [&](int k) { return c_vals[static_cast<std::size_t>(k - 1)]; },
      std::move(label));
}

BasisPair from_incentivized(std::span<const double> c_vals,
                            std::span<const double> tau_vals, int n,
                            std::string label) {
  check_length(c_vals, n, "congestion values");
  check_length(tau_vals, n, "incentive values");
  check_nonnegative(c_vals, "congestion values");
  return tabulate(
      n, [&](int k) { return k * c_vals[static_cast<std::size_t>(k - 1)]; },
      [&](int k) {
        const auto i = static_cast<std::size_t>(k - 1);
        return c_vals[i] + tau_vals[i];
      },
      std::move(label));
}

BasisPair marginal_cost_pair(std::span<const double> c_vals, int n,
                             std::string label) {
  check_length(c_vals, n, "congestion values");
  check_nonnegative(c_vals, "congestion values");
  auto c_at = [&](int k) {
    return k == 0 ? 0.0 : c_vals[static_cast<std::size_t>(k - 1)];
  };
  return tabulate(
      n, [&](int k) { return k * c_at(k); },
      [&](int k) { return k * c_at(k) - (k - 1) * c_at(k - 1); },
      std::move(label));
}

namespace {

std::vector<double> monomial_congestion(int degree, int n) {
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    c[static_cast<std::size_t>(k - 1)] = std::pow(static_cast<double>(k), degree);
  }
  return c;
}

}  // namespace

std::vector<BasisPair> polynomial_basis(int d, int n) {
  if (d < 0) throw ValidationError("polynomial degree must be >= 0");
  std::vector<BasisPair> out;
  for (int j = 0; j <= d; ++j) {
    out.push_back(from_congestion(monomial_congestion(j, n), n,
                                  "poly-k^" + std::to_string(j)));
  }
  return out;
}

std::vector<BasisPair> polynomial_marginal_cost_basis(int d, int n) {
  if (d < 0) throw ValidationError("polynomial degree must be >= 0");
  std::vector<BasisPair> out;
  for (int j = 0; j <= d; ++j) {
    out.push_back(marginal_cost_pair(monomial_congestion(j, n), n,
                                     "poly-mc-k^" + std::to_string(j)));
  }
  return out;
}

BasisPair bpr_pair(double free_flow, int capacity, int n) {
  if (capacity < 1) throw ValidationError("BPR capacity K must be >= 1");
  if (free_flow < 0.0) throw ValidationError("BPR free-flow time T must be >= 0");
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const double ratio = static_cast<double>(k) / capacity;
    c[static_cast<std::size_t>(k - 1)] =
        free_flow * (1.0 + 0.15 * ratio * ratio * ratio * ratio);
  }
  return from_congestion(c, n,
                         "bpr-T" + format_param(free_flow) + "-K" +
                             std::to_string(capacity));
}

std::vector<BasisPair> bpr_basis(int n, int k_max, double free_flow) {
  if (k_max < 1) throw ValidationError("k-max must be >= 1");
  std::vector<BasisPair> out;
  for (int cap = 1; cap <= k_max; ++cap) out.push_back(bpr_pair(free_flow, cap, n));
  return out;
}

BasisPair perception_pair(double a, double b, double sigma, double gamma,
                          int n) {
  if (a < 0.0 || b < 0.0 || sigma < 0.0 || gamma < 0.0) {
    throw ValidationError("perception parameters must be nonnegative");
  }
  if (n < 1) throw ValidationError("n must be >= 1");
  return tabulate(
      n, [&](int k) { return k * (a * (1.0 + sigma * (k - 1)) + b); },
      [&](int k) { return a * (1.0 + gamma * (k - 1)) + b; },
      "perception-a" + format_param(a) + "-b" + format_param(b) + "-s" +
          format_param(sigma) + "-g" + format_param(gamma));
}

std::vector<BasisPair> perception_basis(double sigma, double gamma, int n) {
  return {perception_pair(1.0, 0.0, sigma, gamma, n),
          perception_pair(0.0, 1.0, sigma, gamma, n)};
}

BasisPair marginal_contribution_welfare(std::span<const double> w_vals, int n,
                                        bool enforce_monotone,
                                        std::string label) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (w_vals.size() != static_cast<std::size_t>(n) + 1) {
    throw ValidationError("welfare values must cover k = 0..n");
  }
  if (w_vals[0] != 0.0) throw ValidationError("W(0) must be zero");
  const auto len = static_cast<std::size_t>(n);
  std::vector<double> c(w_vals.begin(), w_vals.end());
  std::vector<double> f(len + 2, 0.0);
  for (std::size_t k = 1; k <= len; ++k) {
    const double step = w_vals[k] - w_vals[k - 1];
    if (step < 0.0) {
      if (enforce_monotone) throw ValidationError("welfare must be nondecreasing");
      // Utilities on the welfare side are nonnegative by definition; a
      // decreasing W is clamped only when the caller did not ask to reject it.
      f[k] = 0.0;
    } else {
      f[k] = step;
    }
  }
  return BasisPair(n, std::move(c), std::move(f), std::move(label),
                   Side::kWelfareMax);
}

std::vector<double> random_concave_welfare(int n_vals, std::uint64_t seed) {
  if (n_vals < 1) throw ValidationError("need at least one value");
  Xoshiro256 rng(seed);
  std::vector<double> draws(static_cast<std::size_t>(n_vals));
  for (auto& v : draws) v = rng.uniform();
  std::sort(draws.begin(), draws.end(), std::greater<>());
  std::vector<double> w(draws.size() + 1, 0.0);
  for (std::size_t k = 0; k < draws.size(); ++k) w[k + 1] = w[k] + draws[k];
  return w;
}

}  // namespace poalab
