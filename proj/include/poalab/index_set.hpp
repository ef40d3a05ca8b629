#pragma once

#include <compare>
#include <vector>

namespace poalab {

// Load triplet: x users at equilibrium, y at the optimum, z in both.
struct Triplet {
  int x = 0;
  int y = 0;
  int z = 0;

  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

struct TripletSet {
  int n = 0;
  bool reduced = false;
  std::vector<Triplet> triplets;  // lexicographic in (x, y, z)
};

inline constexpr int kFullSetCap = 64;

// 1 <= x + y - z <= n and z <= min(x, y), all entries in 0..n.
bool is_valid_triplet(const Triplet& t, int n);

// x + y - z = n or (x - z)(y - z) z = 0.
bool in_reduced_set(const Triplet& t, int n);

// Throws ValidationError for n < 1 or n above cap.
TripletSet enumerate_full(int n, int cap = kFullSetCap);
TripletSet enumerate_reduced(int n);

}  // namespace poalab
