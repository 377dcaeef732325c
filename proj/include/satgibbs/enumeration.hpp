#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "satgibbs/contours.hpp"
#include "satgibbs/lattice.hpp"

namespace satgibbs {

struct EnumerationLimits {
  std::size_t max_free_sites = 24;
  std::size_t max_candidates = 4096;
  std::size_t max_sets = 5000000;
};

// A finite volume with its boundary layers and the sites left free by the boundary condition.
struct Volume {
  IndexSet sites;
  BoundarySets boundary;
  IndexSet free;     // sites minus the inner boundary
  IndexBox box;      // extraction box with enough margin around every site
  double L = 1.0;
  Tiling tiling{1, 1.0};
};

Volume make_volume(const IndexSet& sites, double L, const Tiling& tiling);
IndexSet box_sites(int dim, int lo, int hi);

// Field with every site of the volume's box at `sharp`, ready for pattern writes on free sites.
SpinField blank_field(const Volume& vol, int sharp);

// Calls fn(field, bits) for each of the 2^|free| patterns consistent with the boundary condition.
void for_each_pattern(const Volume& vol, int sharp, const EnumerationLimits& limits,
                      const std::function<void(const SpinField&, std::uint64_t)>& fn);

// Contour admissible in C^sharp_n(volume).
bool admissible(const Contour& g, const Volume& vol, int sharp, std::size_t max_class);

struct ContourCatalog {
  std::vector<Contour> contours;                 // sorted candidates
  std::vector<std::vector<std::uint32_t>> sets;  // compatible sets as sorted candidate indices; includes {}
};

bool compatible(const Contour& a, const Contour& b);

// Candidates are the admissible contours appearing in some pattern of the volume; the collection is
// every pairwise-compatible subset of them.
ContourCatalog enumerate_compatible_sets(const Volume& vol, int sharp, std::size_t max_class,
                                         const EnumerationLimits& limits = {});

// Oracle: the distinct contour sets of all patterns whose contours are all admissible.
std::vector<std::vector<Contour>> compatible_sets_bruteforce(const Volume& vol, int sharp, std::size_t max_class,
                                                             const EnumerationLimits& limits = {});

std::vector<std::vector<Contour>> expand_sets(const ContourCatalog& catalog);

}  // namespace satgibbs
