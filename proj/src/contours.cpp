#include "satgibbs/contours.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "json.hpp"
#include "satgibbs/errors.hpp"

namespace satgibbs {

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// l_inf distance from i to the first site outside the box.
int distance_to_outside(const IndexBox& box, const Index& i) {
  int best = 1 << 30;
  for (int k = 0; k < box.dim; ++k) best = std::min({best, i[k] - box.lo[k] + 1, box.hi[k] - i[k] + 1});
  return best;
}

// Moore-connected components of the sites of `box` for which `open(flat)` holds.
// Returns component ids (-1 for closed sites) and the number of components.
template <class OpenFn>
int label_components(const IndexBox& box, OpenFn&& open, const std::vector<Index>& moore, std::vector<int>& comp) {
  comp.assign(box.size(), -1);
  int next = 0;
  std::deque<std::size_t> queue;
  for (std::size_t k = 0; k < comp.size(); ++k) {
    if (comp[k] != -1 || !open(k)) continue;
    comp[k] = next;
    queue.push_back(k);
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      const Index ci = box.unflat(cur);
      for (const auto& o : moore) {
        const Index ni = add(ci, o);
        if (!box.contains(ni)) continue;
        const std::size_t nk = box.flat(ni);
        if (comp[nk] == -1 && open(nk)) {
          comp[nk] = next;
          queue.push_back(nk);
        }
      }
    }
    ++next;
  }
  return next;
}

bool touches_box_boundary(const IndexBox& box, const Index& i) { return distance_to_outside(box, i) == 1; }

// Fills type, interiors and the wall flag of a contour whose support and spins are set.
void analyze_contour(Contour& g, const SpinField& field, double L, const Tiling& tiling) {
  const int d = tiling.dim();
  const double delta = tiling.delta();
  const int grow = static_cast<int>(std::ceil((2.0 * L + delta) / delta)) + 2;
  const IndexBox w = bounding_box(d, g.support).grown(grow);
  const auto moore = moore_offsets(d);

  std::vector<std::uint8_t> in_support(w.size(), 0);
  for (const auto& s : g.support) in_support[w.flat(s)] = 1;
  std::vector<int> comp;
  const int n_comp = label_components(w, [&](std::size_t k) { return in_support[k] == 0; }, moore, comp);

  // Unbounded components: those reaching the boundary of w. In d = 1 there is one per side.
  std::vector<std::uint8_t> unbounded(static_cast<std::size_t>(n_comp), 0);
  int left_id = -1, right_id = -1;
  for (std::size_t k = 0; k < comp.size(); ++k) {
    if (comp[k] < 0) continue;
    const Index i = w.unflat(k);
    if (touches_box_boundary(w, i)) {
      unbounded[static_cast<std::size_t>(comp[k])] = 1;
      if (d == 1) (i[0] == w.lo[0] ? left_id : right_id) = comp[k];
    }
  }
  int outer_id = -1;
  if (d > 1) {
    for (int c = 0; c < n_comp; ++c)
      if (unbounded[static_cast<std::size_t>(c)]) {
        if (outer_id != -1) throw ContourError("contour complement has two unbounded components");
        outer_id = c;
      }
  }
  auto comp_of = [&](const Index& t) -> int {
    if (w.contains(t)) return comp[w.flat(t)];
    if (d == 1) return t[0] < w.lo[0] ? left_id : right_id;
    return outer_id;
  };

  std::vector<std::array<bool, 2>> seen(static_cast<std::size_t>(n_comp), {false, false});
  const auto int_offs = ball_offsets(d, (2.0 * L + delta) / delta);
  const auto ext_offs = ball_offsets(d, 2.0 * L / delta);
  for (std::size_t k = 0; k < comp.size(); ++k) {
    const Index s = w.unflat(k);
    const int c = comp[k];
    const int spin = field.get(s);
    if (c >= 0) {
      for (const auto& o : int_offs)
        if (comp_of(add(s, o)) != c) {
          seen[static_cast<std::size_t>(c)][static_cast<std::size_t>(spin)] = true;
          break;
        }
    }
    for (const auto& o : ext_offs) {
      const int ct = comp_of(add(s, o));
      if (ct >= 0 && ct != c) seen[static_cast<std::size_t>(ct)][static_cast<std::size_t>(spin)] = true;
    }
  }
  std::vector<int> label(static_cast<std::size_t>(n_comp), -1);
  for (int c = 0; c < n_comp; ++c) {
    const auto& sc = seen[static_cast<std::size_t>(c)];
    if (sc[0] && sc[1]) throw ContourError("label of a complement component is not constant");
    if (!sc[0] && !sc[1]) throw ContourError("complement component without boundary sites");
    label[static_cast<std::size_t>(c)] = sc[1] ? 1 : 0;
  }

  g.interior[0].clear();
  g.interior[1].clear();
  g.wall = false;
  if (d == 1) {
    const int ll = label[static_cast<std::size_t>(left_id)];
    const int lr = label[static_cast<std::size_t>(right_id)];
    if (ll == lr) {
      g.type = ll;
    } else {
      g.wall = true;
      g.type = field.exterior_spin();
    }
  } else {
    g.type = label[static_cast<std::size_t>(outer_id)];
  }
  for (std::size_t k = 0; k < comp.size(); ++k) {
    const int c = comp[k];
    if (c < 0 || unbounded[static_cast<std::size_t>(c)]) continue;
    g.interior[label[static_cast<std::size_t>(c)]].push_back(w.unflat(k));
  }
}

}  // namespace

int Contour::spin_at(const Index& i) const {
  auto it = std::lower_bound(support.begin(), support.end(), i);
  require(it != support.end() && *it == i, "site is not in the contour support");
  return spins[static_cast<std::size_t>(it - support.begin())];
}

bool Contour::operator==(const Contour& o) const {
  return support == o.support && spins == o.spins && type == o.type && interior[0] == o.interior[0] &&
         interior[1] == o.interior[1] && wall == o.wall;
}

bool Contour::operator<(const Contour& o) const {
  if (support != o.support) return support < o.support;
  if (spins != o.spins) return spins < o.spins;
  if (type != o.type) return type < o.type;
  if (interior[0] != o.interior[0]) return interior[0] < o.interior[0];
  if (interior[1] != o.interior[1]) return interior[1] < o.interior[1];
  return wall < o.wall;
}

SiteClass classify_site(const SpinField& field, const Index& i, double L, const Tiling& tiling) {
  const auto offs = ball_offsets(tiling.dim(), 2.0 * L / tiling.delta());
  const int first = field.get(add(i, offs.front()));
  for (const auto& o : offs)
    if (field.get(add(i, o)) != first) return SiteClass::non_correct;
  return first ? SiteClass::correct1 : SiteClass::correct0;
}

int extraction_margin(double L, const Tiling& tiling) {
  return static_cast<int>(std::floor(2.0 * L / tiling.delta() + 1e-9)) + 1;
}

int varying_margin(double L, const Tiling& tiling) {
  return static_cast<int>(std::ceil(2.0 * L / tiling.delta() - 1e-9)) + extraction_margin(L, tiling);
}

ContourExtraction extract_contours(const SpinField& field, double L, const Tiling& tiling) {
  require(L > 0.0, "L must be positive");
  require(field.dim() == tiling.dim(), "spin field and tiling dimensions differ");
  const IndexBox& box = field.box();
  const int d = tiling.dim();
  const double reach = 2.0 * L / tiling.delta();
  const auto offs = ball_offsets(d, reach);
  const std::size_t n = box.size();

  std::vector<std::uint8_t> bad(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const Index i = box.unflat(k);
    const int first = field.get(add(i, offs.front()));
    for (const auto& o : offs)
      if (field.get(add(i, o)) != first) {
        bad[k] = 1;
        break;
      }
    if (bad[k] && distance_to_outside(box, i) <= reach + 1.0 + 1e-9) throw ValidationError("contour touches window");
  }

  DisjointSets dsu(n);
  const auto moore = moore_offsets(d);
  for (std::size_t k = 0; k < n; ++k) {
    if (!bad[k]) continue;
    const Index i = box.unflat(k);
    for (const auto& o : moore) {
      const Index j = add(i, o);
      if (!box.contains(j)) continue;
      const std::size_t kj = box.flat(j);
      if (bad[kj]) dsu.unite(k, kj);
    }
  }

  ContourExtraction out;
  std::vector<long> slot(n, -1);
  for (std::size_t k = 0; k < n; ++k) {
    if (!bad[k]) continue;
    const std::size_t root = dsu.find(k);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(out.contours.size());
      out.contours.emplace_back();
    }
    Contour& g = out.contours[static_cast<std::size_t>(slot[root])];
    const Index i = box.unflat(k);
    g.support.push_back(i);
    g.spins.push_back(field.get(i));
  }
  // Roots are minimal flat indices, so contours are already ordered by their first site.
  for (auto& g : out.contours) analyze_contour(g, field, L, tiling);

  for (std::size_t a = 0; a < out.contours.size(); ++a) {
    const Index first = out.contours[a].support.front();
    bool external = true;
    for (std::size_t b = 0; b < out.contours.size() && external; ++b) {
      if (a == b) continue;
      const auto& o = out.contours[b];
      if (set_contains(o.interior[0], first) || set_contains(o.interior[1], first)) external = false;
    }
    if (external) out.external.push_back(a);
  }
  return out;
}

std::vector<Domino> dominoes(const Contour& contour) {
  std::vector<Domino> out;
  if (contour.support.empty()) return out;
  // Unused coordinates are 0, so a 3-D box and 3-D offsets cover every dimension.
  const auto box = bounding_box(3, contour.support);
  std::vector<std::int8_t> spin(box.size(), -1);
  for (std::size_t k = 0; k < contour.support.size(); ++k) spin[box.flat(contour.support[k])] = static_cast<std::int8_t>(contour.spins[k]);
  const auto offs = moore_offsets(3);
  for (std::size_t a = 0; a < contour.support.size(); ++a) {
    if (contour.spins[a] != 1) continue;
    for (const auto& o : offs) {
      const auto j = add(contour.support[a], o);
      if (box.contains(j) && spin[box.flat(j)] == 0) out.push_back({contour.support[a], j});
    }
  }
  return out;
}

SpinField reconstruct_field(const std::vector<Contour>& contours, int exterior_spin, const IndexBox& box,
                            const Tiling& tiling) {
  const int d = tiling.dim();
  SpinField field(box, exterior_spin);
  std::vector<int> owner(box.size(), -1);
  for (std::size_t c = 0; c < contours.size(); ++c) {
    const auto& g = contours[c];
    for (std::size_t k = 0; k < g.support.size(); ++k) {
      require(box.contains(g.support[k]), "contour support outside the reconstruction box");
      field.set(g.support[k], g.spins[k]);
      owner[box.flat(g.support[k])] = static_cast<int>(c);
    }
  }
  const auto moore = moore_offsets(d);
  std::vector<int> comp;
  const int n_comp = label_components(box, [&](std::size_t k) { return owner[k] < 0; }, moore, comp);
  std::vector<int> spin(static_cast<std::size_t>(n_comp), -1);
  for (std::size_t k = 0; k < comp.size(); ++k) {
    const int c = comp[k];
    if (c < 0 || spin[static_cast<std::size_t>(c)] != -1) continue;
    const Index i = box.unflat(k);
    if (touches_box_boundary(box, i)) {
      spin[static_cast<std::size_t>(c)] = exterior_spin;
      continue;
    }
    for (const auto& o : moore) {
      const Index j = add(i, o);
      if (!box.contains(j)) continue;
      const int g = owner[box.flat(j)];
      if (g < 0) continue;
      const Contour& gc = contours[static_cast<std::size_t>(g)];
      if (set_contains(gc.interior[0], i))
        spin[static_cast<std::size_t>(c)] = 0;
      else if (set_contains(gc.interior[1], i))
        spin[static_cast<std::size_t>(c)] = 1;
      else if (gc.wall)
        spin[static_cast<std::size_t>(c)] = gc.spin_at(j);
      else
        spin[static_cast<std::size_t>(c)] = gc.type;
      break;
    }
  }
  for (std::size_t k = 0; k < comp.size(); ++k) {
    const int c = comp[k];
    if (c < 0) continue;
    const int s = spin[static_cast<std::size_t>(c)];
    field.set(box.unflat(k), s < 0 ? exterior_spin : s);
  }
  return field;
}

SpinField witness_field(const Contour& contour, double L, const Tiling& tiling) {
  const IndexBox box = bounding_box(tiling.dim(), contour.support).grown(extraction_margin(L, tiling) + 1);
  return reconstruct_field({contour}, contour.type, box, tiling);
}

std::string contour_to_json(const Contour& contour, int dim) {
  auto site = [dim](const Index& i) { return std::vector<int>(i.begin(), i.begin() + dim); };
  nlohmann::json j;
  nlohmann::json support = nlohmann::json::array();
  for (const auto& s : contour.support) support.push_back(site(s));
  j["support"] = support;
  j["spins"] = contour.spins;
  j["type"] = contour.type;
  nlohmann::json interiors = nlohmann::json::array();
  for (int s = 0; s < 2; ++s) {
    nlohmann::json part = nlohmann::json::array();
    for (const auto& i : contour.interior[s]) part.push_back(site(i));
    interiors.push_back(part);
  }
  j["interiors"] = interiors;
  j["class"] = contour.interior_size();
  j["wall"] = contour.wall;
  nlohmann::json dom = nlohmann::json::array();
  for (const auto& dm : dominoes(contour)) dom.push_back({site(dm.one), site(dm.zero)});
  j["dominoes"] = dom;
  return j.dump();
}

}  // namespace satgibbs
