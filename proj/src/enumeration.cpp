#include "satgibbs/enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "satgibbs/errors.hpp"

namespace satgibbs {

Volume make_volume(const IndexSet& sites, double L, const Tiling& tiling) {
  require(!sites.empty(), "volume must be nonempty");
  Volume v;
  v.sites = make_set(sites);
  v.boundary = boundary_operators(v.sites, L, tiling);
  v.free = set_difference(v.sites, v.boundary.inner);
  const int grow = varying_margin(L, tiling) + 1;
  v.box = bounding_box(tiling.dim(), v.sites).grown(grow);
  v.L = L;
  v.tiling = tiling;
  return v;
}

IndexSet box_sites(int dim, int lo, int hi) { return cube_box(dim, lo, hi).sites(); }

SpinField blank_field(const Volume& vol, int sharp) { return SpinField(vol.box, sharp); }

void for_each_pattern(const Volume& vol, int sharp, const EnumerationLimits& limits,
                      const std::function<void(const SpinField&, std::uint64_t)>& fn) {
  require(sharp == 0 || sharp == 1, "boundary condition must be 0 or 1");
  const std::size_t n = vol.free.size();
  if (n > limits.max_free_sites)
    throw ValidationError("enumeration cap exceeded: " + std::to_string(n) + " free sites (cap " +
                          std::to_string(limits.max_free_sites) + ")");
  SpinField field = blank_field(vol, sharp);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (std::size_t k = 0; k < n; ++k) field.set(vol.free[k], static_cast<int>((bits >> k) & 1u));
    fn(field, bits);
  }
}

bool admissible(const Contour& g, const Volume& vol, int sharp, std::size_t max_class) {
  return g.type == sharp && !g.wall && g.interior_size() <= max_class && well_inside(g.support, vol.sites, vol.tiling.dim());
}

bool compatible(const Contour& a, const Contour& b) {
  for (const auto& i : a.support)
    for (const auto& j : b.support)
      if (linf_norm(sub(i, j)) <= 1) return false;
  return true;
}

ContourCatalog enumerate_compatible_sets(const Volume& vol, int sharp, std::size_t max_class,
                                         const EnumerationLimits& limits) {
  std::set<Contour> found;
  for_each_pattern(vol, sharp, limits, [&](const SpinField& field, std::uint64_t) {
    for (auto& g : extract_contours(field, vol.L, vol.tiling).contours)
      if (admissible(g, vol, sharp, max_class)) found.insert(std::move(g));
  });
  ContourCatalog cat;
  cat.contours.assign(found.begin(), found.end());
  if (cat.contours.size() > limits.max_candidates)
    throw ValidationError("enumeration cap exceeded: " + std::to_string(cat.contours.size()) + " candidate contours");

  // Each candidate must be achievable on its own: its witness field re-extracts to exactly it.
  for (const auto& g : cat.contours) {
    const auto ex = extract_contours(witness_field(g, vol.L, vol.tiling), vol.L, vol.tiling);
    if (ex.contours.size() != 1 || !(ex.contours.front() == g))
      throw NumericalError("candidate contour is not reproduced by its witness field");
  }

  const std::size_t m = cat.contours.size();
  std::vector<std::vector<std::uint8_t>> clash(m, std::vector<std::uint8_t>(m, 0));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) clash[a][b] = clash[b][a] = compatible(cat.contours[a], cat.contours[b]) ? 0 : 1;

  std::vector<std::uint32_t> current;
  std::function<void(std::size_t)> grow = [&](std::size_t start) {
    cat.sets.push_back(current);
    if (cat.sets.size() > limits.max_sets) throw ValidationError("enumeration cap exceeded: too many compatible sets");
    for (std::size_t c = start; c < m; ++c) {
      bool ok = true;
      for (auto k : current)
        if (clash[k][c]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      current.push_back(static_cast<std::uint32_t>(c));
      grow(c + 1);
      current.pop_back();
    }
  };
  grow(0);
  std::sort(cat.sets.begin(), cat.sets.end());
  return cat;
}

std::vector<std::vector<Contour>> compatible_sets_bruteforce(const Volume& vol, int sharp, std::size_t max_class,
                                                             const EnumerationLimits& limits) {
  std::set<std::vector<Contour>> found;
  for_each_pattern(vol, sharp, limits, [&](const SpinField& field, std::uint64_t) {
    auto ex = extract_contours(field, vol.L, vol.tiling);
    for (const auto& g : ex.contours)
      if (!admissible(g, vol, sharp, max_class)) return;
    std::sort(ex.contours.begin(), ex.contours.end());
    found.insert(std::move(ex.contours));
  });
  return {found.begin(), found.end()};
}

std::vector<std::vector<Contour>> expand_sets(const ContourCatalog& catalog) {
  std::vector<std::vector<Contour>> out;
  out.reserve(catalog.sets.size());
  for (const auto& s : catalog.sets) {
    std::vector<Contour> v;
    for (auto k : s) v.push_back(catalog.contours[k]);
    std::sort(v.begin(), v.end());
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace satgibbs
