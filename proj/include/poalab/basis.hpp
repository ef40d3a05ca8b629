#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "poalab/common.hpp"

namespace poalab {

// A tabulated basis function pair {C, F} over user counts. c holds C(0..n)
// (W(0..n) on the welfare side) and f holds F(0..n+1); the boundary values
// C(0), F(0) and F(n+1) are stored explicitly and are always zero.
class BasisPair {
 public:
  // Throws ValidationError unless the boundary and sign conventions hold.
  BasisPair(int n, std::vector<double> c, std::vector<double> f,
            std::string label, Side side = Side::kCostMin);

  int n() const { return n_; }
  Side side() const { return side_; }
  const std::string& label() const { return label_; }

  double c(int k) const { return c_[static_cast<std::size_t>(k)]; }
  double f(int k) const { return f_[static_cast<std::size_t>(k)]; }
  std::span<const double> c_values() const { return c_; }
  std::span<const double> f_values() const { return f_; }

  // Same C, new generating function given for k = 1..n.
  BasisPair with_generating(std::span<const double> f_1_to_n,
                            std::string label) const;
  // Multiplies both columns by factor > 0.
  BasisPair scaled(double factor) const;

  friend bool operator==(const BasisPair&, const BasisPair&) = default;

 private:
  int n_;
  std::vector<double> c_;
  std::vector<double> f_;
  std::string label_;
  Side side_;
};

// A class of games: every pair shares n and side.
struct BasisClass {
  int n = 0;
  Side side = Side::kCostMin;
  std::vector<BasisPair> pairs;
};

// Throws ValidationError on empty lists or mismatched n / side.
void validate_class(std::span<const BasisPair> bases, int n, Side side);

// Congestion pair: C(k) = k c(k), F(k) = c(k). c_vals[k-1] = c(k), k = 1..n.
BasisPair from_congestion(std::span<const double> c_vals, int n,
                          std::string label = "congestion");

// Congestion with an additive incentive: F(k) = c(k) + tau(k).
BasisPair from_incentivized(std::span<const double> c_vals,
                            std::span<const double> tau_vals, int n,
                            std::string label = "incentivized");

// Marginal-cost incentive tau(k) = (k-1)(c(k) - c(k-1)), with c(0) = 0, so
// F(k) = k c(k) - (k-1) c(k-1).
BasisPair marginal_cost_pair(std::span<const double> c_vals, int n,
                             std::string label = "marginal-cost");

// {C^j, F^j} = {k^j, k^(j-1)} for j = 1..d+1.
std::vector<BasisPair> polynomial_basis(int d, int n);

// polynomial_basis with every pair's F replaced by its marginal-cost version.
std::vector<BasisPair> polynomial_marginal_cost_basis(int d, int n);

// BPR latency c(x) = T (1 + 0.15 (x/K)^4) as a congestion pair.
BasisPair bpr_pair(double free_flow, int capacity, int n);

// One BPR pair per capacity K = 1..k_max, all with the same free-flow time.
std::vector<BasisPair> bpr_basis(int n, int k_max, double free_flow = 1.0);

// Perception-parameterized affine pair with c(x) = a x + b:
// C(k) = k c(1 + sigma (k-1)), F(k) = c(1 + gamma (k-1)).
BasisPair perception_pair(double a, double b, double sigma, double gamma,
                          int n);

// The two pairs (a, b) = (1, 0) and (0, 1) that generate every
// perception-parameterized affine game.
std::vector<BasisPair> perception_basis(double sigma, double gamma, int n);

// Welfare pair with marginal-contribution utilities F(k) = W(k) - W(k-1).
// w_vals holds W(0..n). With enforce_monotone, a decreasing W is rejected.
BasisPair marginal_contribution_welfare(std::span<const double> w_vals, int n,
                                        bool enforce_monotone = false,
                                        std::string label = "marginal-contribution");

// W(0..n_vals): W(k) is the sum of the k largest of n_vals uniform [0,1)
// draws. Nondecreasing and concave. Deterministic in seed (Xoshiro256).
std::vector<double> random_concave_welfare(int n_vals, std::uint64_t seed);

}  // namespace poalab
