#include "satgibbs/lattice.hpp"

#include <algorithm>
#include <climits>

#include "satgibbs/errors.hpp"

namespace satgibbs {

IndexSet make_set(std::vector<Index> sites) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return sites;
}

bool set_contains(const IndexSet& s, const Index& i) { return std::binary_search(s.begin(), s.end(), i); }

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexLookup make_lookup(const IndexSet& s) { return IndexLookup(s.begin(), s.end()); }

IndexSet near_complement(const IndexSet& lam, double radius, int dim) {
  const auto offs = ball_offsets(dim, radius);
  const auto in = make_lookup(lam);
  IndexSet out;
  for (const auto& i : lam)
    for (const auto& o : offs)
      if (!in.count(add(i, o))) {
        out.push_back(i);
        break;
      }
  return out;
}

IndexSet outer_shell(const IndexSet& lam, double radius, int dim) {
  const auto offs = ball_offsets(dim, radius);
  const auto in = make_lookup(lam);
  std::vector<Index> out;
  for (const auto& i : lam)
    for (const auto& o : offs) {
      Index j = add(i, o);
      if (!in.count(j)) out.push_back(j);
    }
  return make_set(std::move(out));
}

BoundarySets boundary_operators(const IndexSet& lam, double L, const Tiling& tiling) {
  require(L > 0.0, "L must be positive");
  const double dl = tiling.delta();
  const int d = tiling.dim();
  BoundarySets b;
  b.exterior = outer_shell(lam, 2.0 * L / dl, d);
  b.inner = near_complement(lam, (2.0 * L + dl) / dl, d);
  b.boundary = near_complement(lam, (L + dl) / dl, d);
  b.minus = near_complement(lam, L / dl, d);
  return b;
}

std::vector<Index> moore_offsets(int dim) {
  std::vector<Index> out;
  const int rb = dim > 1 ? 1 : 0;
  const int rc = dim > 2 ? 1 : 0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -rb; b <= rb; ++b)
      for (int c = -rc; c <= rc; ++c)
        if (a || b || c) out.push_back({a, b, c});
  return out;
}

bool well_inside(const IndexSet& sub, const IndexSet& lam, int dim) {
  const auto in = make_lookup(lam);
  const auto offs = moore_offsets(dim);
  for (const auto& i : sub) {
    if (!in.count(i)) return false;
    for (const auto& o : offs)
      if (!in.count(add(i, o))) return false;
  }
  return true;
}

int linf_distance(const IndexSet& a, const IndexSet& b) {
  int best = INT_MAX;
  for (const auto& i : a)
    for (const auto& j : b) best = std::min(best, linf_norm(sub(i, j)));
  return best;
}

}  // namespace satgibbs
