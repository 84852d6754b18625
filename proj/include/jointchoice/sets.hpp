#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace jointchoice {

// Subsets of an alternative set are bitsets over canonical indices.
// Every loop over subsets runs in ascending numeric mask order, which is
// the canonical iteration order used throughout the library.
using Mask = std::uint32_t;

inline int set_size(Mask m) { return std::popcount(m); }

inline bool contains(Mask m, int i) { return (m >> i) & 1u; }

inline Mask full_mask(int n) { return n >= 32 ? ~Mask(0) : (Mask(1) << n) - 1; }

inline Mask with(Mask m, int i) { return m | (Mask(1) << i); }

inline Mask without(Mask m, int i) { return m & ~(Mask(1) << i); }

inline bool subset_of(Mask a, Mask b) { return (a & ~b) == 0; }

inline int lowest_element(Mask m) { return std::countr_zero(m); }

inline std::vector<int> elements_of(Mask m) {
  std::vector<int> out;
  while (m) {
    int i = std::countr_zero(m);
    out.push_back(i);
    m = without(m, i);
  }
  return out;
}

// All non-empty subsets of `ground`, ascending mask order.
inline std::vector<Mask> nonempty_subsets(Mask ground) {
  std::vector<Mask> out;
  for (Mask m = 1; m <= ground; ++m)
    if (subset_of(m, ground)) out.push_back(m);
  return out;
}

// Supersets S of `base` within `ground` (including `base` itself),
// ascending mask order.
inline std::vector<Mask> supersets_within(Mask base, Mask ground) {
  std::vector<Mask> out;
  Mask free = ground & ~base;
  // Enumerate submasks of `free` low-to-high by the standard trick, then
  // sort order falls out naturally because we collect and sort once.
  Mask sub = 0;
  while (true) {
    out.push_back(base | sub);
    if (sub == free) break;
    sub = (sub - free) & free;
  }
  return out;
}

}  // namespace jointchoice
