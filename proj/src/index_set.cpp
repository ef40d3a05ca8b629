#include "poalab/index_set.hpp"

#include <algorithm>
#include <string>

#include "poalab/common.hpp"

namespace poalab {

bool is_valid_triplet(const Triplet& t, int n) {
  if (t.x < 0 || t.y < 0 || t.z < 0 || t.x > n || t.y > n) return false;
  const int total = t.x + t.y - t.z;
  return total >= 1 && total <= n && t.z <= std::min(t.x, t.y);
}

bool in_reduced_set(const Triplet& t, int n) {
  return t.x + t.y - t.z == n || (t.x - t.z) * (t.y - t.z) * t.z == 0;
}

namespace {

template <typename Keep>
TripletSet enumerate(int n, bool reduced, Keep keep) {
  TripletSet set{n, reduced, {}};
  for (int x = 0; x <= n; ++x) {
    for (int y = 0; y <= n; ++y) {
      // z is bounded below by x + y - n and above by min(x, y).
      const int z_lo = std::max(0, x + y - n);
      const int z_hi = std::min(x, y);
      for (int z = z_lo; z <= z_hi; ++z) {
        const Triplet t{x, y, z};
        if (x + y - z >= 1 && keep(t)) set.triplets.push_back(t);
      }
    }
  }
  return set;
}

}  // namespace

TripletSet enumerate_full(int n, int cap) {
  if (n < 1) throw ValidationError("triplet sets need n >= 1");
  if (n > cap) {
    throw ValidationError("full triplet set requested for n = " +
                          std::to_string(n) + " above cap " +
                          std::to_string(cap));
  }
  return enumerate(n, false, [](const Triplet&) { return true; });
}

TripletSet enumerate_reduced(int n) {
  if (n < 1) throw ValidationError("triplet sets need n >= 1");
  return enumerate(n, true, [n](const Triplet& t) { return in_reduced_set(t, n); });
}

}  // namespace poalab
