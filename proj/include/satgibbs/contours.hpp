#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "satgibbs/geometry.hpp"
#include "satgibbs/lattice.hpp"

namespace satgibbs {

enum class SiteClass { correct0, correct1, non_correct };

SiteClass classify_site(const SpinField& field, const Index& i, double L, const Tiling& tiling);

struct Contour {
  IndexSet support;        // sorted
  std::vector<int> spins;  // aligned with support
  int type = 0;
  IndexSet interior[2];    // sites of bounded complement components labelled 0 and 1
  // In d = 1 the two unbounded sides of a contour may carry different labels. Such a contour
  // separates two phases; it gets the field's exterior spin as type and is flagged here.
  bool wall = false;

  std::size_t size() const { return support.size(); }
  std::size_t interior_size() const { return interior[0].size() + interior[1].size(); }
  int spin_at(const Index& i) const;
  bool operator==(const Contour& o) const;
  bool operator<(const Contour& o) const;
};

struct ContourExtraction {
  std::vector<Contour> contours;      // ordered by the lexicographic minimum of the support
  std::vector<std::size_t> external;  // indices of external contours
};

class ContourError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Contours of a box-domain spin field. Throws ValidationError("contour touches window") when a
// non-correct site lies within l_inf distance 2L/delta + 1 of the first site outside the box.
ContourExtraction extract_contours(const SpinField& field, double L, const Tiling& tiling);

struct Domino {
  Index one;
  Index zero;
  bool operator==(const Domino& o) const { return one == o.one && zero == o.zero; }
};

std::vector<Domino> dominoes(const Contour& contour);

// Field built from contour data only: supports carry their spins, every complement component
// carries the label seen from an adjacent contour, and the far field carries `exterior_spin`.
SpinField reconstruct_field(const std::vector<Contour>& contours, int exterior_spin, const IndexBox& box,
                            const Tiling& tiling);

// Field realizing a single contour: exterior = type, interiors = their labels.
SpinField witness_field(const Contour& contour, double L, const Tiling& tiling);

// Margin (in sites) that an extraction box needs around any non-correct site.
int extraction_margin(double L, const Tiling& tiling);
// Margin around any site whose spin may differ from the exterior spin.
int varying_margin(double L, const Tiling& tiling);

std::string contour_to_json(const Contour& contour, int dim);

}  // namespace satgibbs
