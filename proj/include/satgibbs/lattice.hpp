#pragma once

#include <unordered_set>
#include <vector>

#include "satgibbs/geometry.hpp"

namespace satgibbs {

// Finite site set kept sorted and unique.
using IndexSet = std::vector<Index>;
using IndexLookup = std::unordered_set<Index, IndexHash>;

IndexSet make_set(std::vector<Index> sites);
bool set_contains(const IndexSet& s, const Index& i);
IndexSet set_difference(const IndexSet& a, const IndexSet& b);
IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_intersection(const IndexSet& a, const IndexSet& b);
IndexLookup make_lookup(const IndexSet& s);

// Sites of `lam` within lattice distance `radius` of the complement of `lam`.
IndexSet near_complement(const IndexSet& lam, double radius, int dim);
// Sites outside `lam` within lattice distance `radius` of `lam`.
IndexSet outer_shell(const IndexSet& lam, double radius, int dim);

struct BoundarySets {
  IndexSet exterior;  // j outside, delta*d2(j, lam) <= 2L
  IndexSet inner;     // i inside, delta*d2(i, lam^c) <= 2L + delta
  IndexSet boundary;  // i inside, delta*d2(i, lam^c) <= L + delta
  IndexSet minus;     // i inside, delta*d2(i, lam^c) <= L
};

BoundarySets boundary_operators(const IndexSet& lam, double L, const Tiling& tiling);

// True when every Moore neighbour of every site of `sub` lies in `lam`, i.e. d_inf(sub, lam^c) > 1.
bool well_inside(const IndexSet& sub, const IndexSet& lam, int dim);
int linf_distance(const IndexSet& a, const IndexSet& b);

std::vector<Index> moore_offsets(int dim);

}  // namespace satgibbs
