#include "cheeger/grid.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace cheeger {

namespace {

// Angular extent of each direction line in [0, pi) for the 16-neighborhood,
// i.e. half the gap to the previous direction plus half the gap to the next.
double crofton_weight(int dx, int dy, std::span<const std::array<int, 2>> lines) {
  constexpr double kPi = std::numbers::pi;
  std::vector<double> angles;
  angles.reserve(lines.size());
  for (const auto& l : lines) {
    double a = std::atan2(static_cast<double>(l[1]), static_cast<double>(l[0]));
    if (a < 0.0) a += kPi;
    if (a >= kPi) a -= kPi;
    angles.push_back(a);
  }
  std::sort(angles.begin(), angles.end());
  double a = std::atan2(static_cast<double>(dy), static_cast<double>(dx));
  if (a < 0.0) a += kPi;
  if (a >= kPi - 1e-12) a -= kPi;
  const auto n = angles.size();
  std::size_t k = 0;
  while (k < n && std::abs(angles[k] - a) > 1e-12) ++k;
  const double prev = k == 0 ? angles[n - 1] - kPi : angles[k - 1];
  const double next = k + 1 == n ? angles[0] + kPi : angles[k + 1];
  const double dphi = 0.5 * (next - prev);
  return dphi / (2.0 * std::hypot(dx, dy));
}

bool point_in_polygon(const std::vector<Point>& v, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const bool crosses = (v[i].y > y) != (v[j].y > y);
    if (crosses && x < (v[j].x - v[i].x) * (y - v[i].y) / (v[j].y - v[i].y) + v[i].x) in = !in;
  }
  return in;
}

struct Box {
  double x0, y0, x1, y1;
};

Box bounding_box(const Shape& shape) {
  return std::visit(
      [](const auto& s) -> Box {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shapes::Disc>) {
          if (!(s.radius > 0.0)) throw std::invalid_argument("grid: disc radius must be > 0");
          return {-s.radius, -s.radius, s.radius, s.radius};
        } else if constexpr (std::is_same_v<T, shapes::Annulus>) {
          if (!(s.R >= 0.0 && s.R < 1.0))
            throw std::invalid_argument("grid: annulus needs 0 <= R < 1");
          return {-1.0, -1.0, 1.0, 1.0};
        } else if constexpr (std::is_same_v<T, shapes::HalfRing>) {
          if (!(s.R >= 0.0 && s.R < 1.0))
            throw std::invalid_argument("grid: half ring needs 0 <= R < 1");
          return {-1.0, 0.0, 1.0, 1.0};
        } else {
          if (s.vertices.size() < 3)
            throw std::invalid_argument("grid: polygon needs at least 3 vertices");
          Box b{s.vertices[0].x, s.vertices[0].y, s.vertices[0].x, s.vertices[0].y};
          for (const auto& p : s.vertices) {
            b.x0 = std::min(b.x0, p.x);
            b.y0 = std::min(b.y0, p.y);
            b.x1 = std::max(b.x1, p.x);
            b.y1 = std::max(b.y1, p.y);
          }
          return b;
        }
      },
      shape);
}

bool contains(const Shape& shape, double x, double y) {
  return std::visit(
      [x, y](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        const double r2 = x * x + y * y;
        if constexpr (std::is_same_v<T, shapes::Disc>) {
          return r2 < s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, shapes::Annulus>) {
          return r2 < 1.0 && r2 > s.R * s.R;
        } else if constexpr (std::is_same_v<T, shapes::HalfRing>) {
          return y > 0.0 && r2 < 1.0 && r2 > s.R * s.R;
        } else {
          return point_in_polygon(s.vertices, x, y);
        }
      },
      shape);
}

}  // namespace

Stencil::Stencil(StencilKind kind, std::vector<StencilEntry> entries)
    : kind_(kind), entries_(std::move(entries)) {
  reach_ = 1;
  for (const auto& e : entries_) reach_ = std::max({reach_, std::abs(e.dx), std::abs(e.dy)});
}

Stencil Stencil::four_neighbor() {
  return Stencil(StencilKind::four, {{1, 0, 1.0}, {-1, 0, 1.0}, {0, 1, 1.0}, {0, -1, 1.0}});
}

Stencil Stencil::cauchy_crofton16() {
  static constexpr std::array<std::array<int, 2>, 8> kLines{
      {{1, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 1}, {-1, 2}, {-1, 1}, {-2, 1}}};
  std::vector<StencilEntry> entries;
  for (const auto& l : kLines) {
    const double w = crofton_weight(l[0], l[1], kLines);
    entries.push_back({l[0], l[1], w});
    entries.push_back({-l[0], -l[1], w});
  }
  return Stencil(StencilKind::sixteen, std::move(entries));
}

Stencil Stencil::of_kind(StencilKind kind) {
  return kind == StencilKind::four ? four_neighbor() : cauchy_crofton16();
}

double Stencil::length_moment() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.weight * std::hypot(e.dx, e.dy);
  return 0.5 * s;
}

std::string to_string(StencilKind kind) { return kind == StencilKind::four ? "four" : "sixteen"; }

StencilKind stencil_kind_from_string(const std::string& name) {
  if (name == "four" || name == "4") return StencilKind::four;
  if (name == "sixteen" || name == "16") return StencilKind::sixteen;
  throw std::invalid_argument("grid: unknown stencil '" + name + "'");
}

shapes::Polygon unit_square() { return {{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}}; }

std::string shape_name(const Shape& shape) {
  switch (shape.index()) {
    case 0:
      return "disc";
    case 1:
      return "annulus";
    case 2:
      return "half_ring";
    default:
      return "polygon";
  }
}

GridDomain::GridDomain(int width, int height, Membership mask, double cell, Stencil stencil,
                       Point origin, Shape shape, int resolution)
    : width_(width),
      height_(height),
      mask_(std::move(mask)),
      cell_(cell),
      stencil_(std::move(stencil)),
      origin_(origin),
      shape_(std::move(shape)),
      resolution_(resolution) {
  if (width_ <= 0 || height_ <= 0) throw std::invalid_argument("grid: empty lattice");
  if (mask_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
    throw std::invalid_argument("grid: mask size does not match lattice");
  if (!(cell_ > 0.0)) throw std::invalid_argument("grid: cell size must be > 0");
  cell_count_ = static_cast<int>(std::count_if(mask_.begin(), mask_.end(),
                                               [](std::uint8_t v) { return v != 0; }));
  if (cell_count_ == 0) throw std::invalid_argument("grid: empty rasterization");
}

std::vector<int> GridDomain::cells() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(cell_count_));
  for (int i = 0; i < size(); ++i)
    if (mask_[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

Point GridDomain::center(int idx) const {
  return {origin_.x + (x_of(idx) + 0.5) * cell_, origin_.y + (y_of(idx) + 0.5) * cell_};
}

GridDomain rasterize(const Shape& shape, int resolution, StencilKind stencil) {
  if (resolution < 8) throw std::invalid_argument("grid: resolution must be >= 8");
  const Box box = bounding_box(shape);
  const double cell = 1.0 / resolution;
  const int width = std::max(1, static_cast<int>(std::ceil((box.x1 - box.x0) * resolution - 1e-9)));
  const int height = std::max(1, static_cast<int>(std::ceil((box.y1 - box.y0) * resolution - 1e-9)));
  Membership mask(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  for (int y = 0; y < height; ++y) {
    const double cy = box.y0 + (y + 0.5) * cell;
    for (int x = 0; x < width; ++x) {
      const double cx = box.x0 + (x + 0.5) * cell;
      if (contains(shape, cx, cy)) mask[static_cast<std::size_t>(y * width + x)] = 1;
    }
  }
  return GridDomain(width, height, std::move(mask), cell, Stencil::of_kind(stencil),
                    {box.x0, box.y0}, shape, resolution);
}

GridDomain domain_from_rows(const std::vector<std::string>& rows, double cell,
                            StencilKind stencil) {
  if (rows.empty()) throw std::invalid_argument("grid: no rows");
  const int height = static_cast<int>(rows.size());
  int width = 0;
  for (const auto& r : rows) width = std::max(width, static_cast<int>(r.size()));
  Membership mask(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  // Row 0 of the input is the top of the picture, i.e. the largest y.
  for (int r = 0; r < height; ++r) {
    const int y = height - 1 - r;
    for (int x = 0; x < static_cast<int>(rows[static_cast<std::size_t>(r)].size()); ++x) {
      const char c = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)];
      if (c == '#' || c == '1') mask[static_cast<std::size_t>(y * width + x)] = 1;
    }
  }
  std::vector<Point> outline{{0.0, 0.0}, {width * cell, 0.0}, {width * cell, height * cell},
                             {0.0, height * cell}};
  return GridDomain(width, height, std::move(mask), cell, Stencil::of_kind(stencil), {0.0, 0.0},
                    shapes::Polygon{std::move(outline)}, static_cast<int>(std::lround(1.0 / cell)));
}

double perimeter_of(const GridDomain& domain, const Membership& members,
                    std::span<const int> cells) {
  double p = 0.0;
  for (int i : cells) {
    for (const auto& e : domain.stencil().entries()) {
      const int j = domain.neighbor(i, e.dx, e.dy);
      if (j < 0 || !members[static_cast<std::size_t>(j)]) p += e.weight;
    }
  }
  return p * domain.cell();
}

CellSet measure(const GridDomain& domain, std::vector<int> cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  for (int c : cells) {
    if (c < 0 || c >= domain.size() || !domain.inside(c))
      throw std::invalid_argument("grid: cell " + std::to_string(c) + " is outside the domain mask");
  }
  const Membership members = to_membership(domain, cells);
  CellSet out;
  out.perimeter = perimeter_of(domain, members, cells);
  out.area = static_cast<double>(cells.size()) * domain.cell_area();
  out.cells = std::move(cells);
  return out;
}

CellSet measure(const GridDomain& domain, const Membership& members) {
  return measure(domain, cells_of(members));
}

Membership to_membership(const GridDomain& domain, std::span<const int> cells) {
  Membership m(static_cast<std::size_t>(domain.size()), 0);
  for (int c : cells) m[static_cast<std::size_t>(c)] = 1;
  return m;
}

std::vector<int> cells_of(const Membership& members) {
  std::vector<int> out;
  for (std::size_t i = 0; i < members.size(); ++i)
    if (members[i]) out.push_back(static_cast<int>(i));
  return out;
}

double contact_weight(const GridDomain& domain, const CellSet& a, const CellSet& b) {
  const Membership mb = to_membership(domain, b.cells);
  double w = 0.0;
  for (int i : a.cells) {
    for (const auto& e : domain.stencil().entries()) {
      const int j = domain.neighbor(i, e.dx, e.dy);
      if (j >= 0 && mb[static_cast<std::size_t>(j)]) w += e.weight;
    }
  }
  return w * domain.cell();
}

namespace {

template <typename Neighbors>
std::vector<CellSet> components_by(const GridDomain& domain, std::span<const int> cells,
                                   const Neighbors& offsets) {
  Membership pending = to_membership(domain, cells);
  std::vector<int> sorted(cells.begin(), cells.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<CellSet> comps;
  for (int seed : sorted) {
    if (!pending[static_cast<std::size_t>(seed)]) continue;
    std::vector<int> comp;
    std::queue<int> q;
    q.push(seed);
    pending[static_cast<std::size_t>(seed)] = 0;
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      comp.push_back(c);
      for (const auto& d : offsets) {
        const int n = domain.neighbor(c, d[0], d[1]);
        if (n >= 0 && pending[static_cast<std::size_t>(n)]) {
          pending[static_cast<std::size_t>(n)] = 0;
          q.push(n);
        }
      }
    }
    comps.push_back(measure(domain, std::move(comp)));
  }
  std::stable_sort(comps.begin(), comps.end(), [](const CellSet& a, const CellSet& b) {
    if (a.cells.size() != b.cells.size()) return a.cells.size() > b.cells.size();
    return a.cells.front() < b.cells.front();
  });
  return comps;
}

}  // namespace

std::vector<CellSet> connected_components(const GridDomain& domain, std::span<const int> cells) {
  static constexpr std::array<std::array<int, 2>, 4> kAxis{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  return components_by(domain, cells, kAxis);
}

std::vector<CellSet> stencil_components(const GridDomain& domain, std::span<const int> cells) {
  std::vector<std::array<int, 2>> offsets;
  for (const auto& e : domain.stencil().entries()) offsets.push_back({e.dx, e.dy});
  return components_by(domain, cells, offsets);
}

std::vector<Membership> voronoi_regions(const GridDomain& domain, const std::vector<int>& cells, int k,
                                        std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto dist2 = [&](int a, int b) {
    const double dx = domain.x_of(a) - domain.x_of(b);
    const double dy = domain.y_of(a) - domain.y_of(b);
    return dx * dx + dy * dy;
  };
  std::vector<int> sites{cells[static_cast<std::size_t>(unit(rng) * static_cast<double>(cells.size())) % cells.size()]};
  std::vector<double> nearest(cells.size(), std::numeric_limits<double>::infinity());
  while (static_cast<int>(sites.size()) < k) {
    double total = 0.0;
    for (std::size_t t = 0; t < cells.size(); ++t) {
      nearest[t] = std::min(nearest[t], dist2(cells[t], sites.back()));
      total += nearest[t];
    }
    double pick = unit(rng) * total;
    std::size_t chosen = cells.size() - 1;
    for (std::size_t t = 0; t < cells.size(); ++t) {
      if (nearest[t] <= 0.0) continue;
      if (pick < nearest[t]) {
        chosen = t;
        break;
      }
      pick -= nearest[t];
    }
    sites.push_back(cells[chosen]);
  }
  std::vector<Membership> regions(static_cast<std::size_t>(k), Membership(static_cast<std::size_t>(domain.size()), 0));
  for (int c : cells) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < sites.size(); ++s)
      if (dist2(c, sites[s]) < dist2(c, sites[best])) best = s;
    regions[best][static_cast<std::size_t>(c)] = 1;
  }
  return regions;
}

}  // namespace cheeger
