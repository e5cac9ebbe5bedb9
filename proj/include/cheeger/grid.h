#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cheeger {

/// One directed neighbor offset of a stencil. `weight` is the cut weight in
/// units of the cell side; the stencil holds both e and -e with equal weight,
/// so every unordered neighbor pair is counted exactly once by a cut.
struct StencilEntry {
  int dx = 0;
  int dy = 0;
  double weight = 0.0;
};

enum class StencilKind { four, sixteen };

class Stencil {
 public:
  /// Axis neighbors with weight 1: cuts measure Manhattan length.
  static Stencil four_neighbor();
  /// 16-neighborhood with Cauchy-Crofton weights dphi / (2 |e|), so cuts
  /// measure Euclidean length on average over orientations.
  static Stencil cauchy_crofton16();
  static Stencil of_kind(StencilKind kind);

  [[nodiscard]] StencilKind kind() const { return kind_; }
  [[nodiscard]] std::span<const StencilEntry> entries() const { return entries_; }
  [[nodiscard]] int reach() const { return reach_; }
  /// Sum over undirected directions of weight * |e| (pi/2 for Cauchy-Crofton).
  [[nodiscard]] double length_moment() const;

 private:
  Stencil(StencilKind kind, std::vector<StencilEntry> entries);

  StencilKind kind_;
  std::vector<StencilEntry> entries_;
  int reach_ = 1;
};

std::string to_string(StencilKind kind);
StencilKind stencil_kind_from_string(const std::string& name);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

namespace shapes {
struct Disc {
  double radius = 1.0;
};
/// B_1 \ closure(B_R).
struct Annulus {
  double R = 0.5;
};
/// Upper half of the annulus; R = 0 gives the half-disc.
struct HalfRing {
  double R = 0.5;
};
struct Polygon {
  std::vector<Point> vertices;
};
}  // namespace shapes

using Shape = std::variant<shapes::Disc, shapes::Annulus, shapes::HalfRing, shapes::Polygon>;

shapes::Polygon unit_square();
std::string shape_name(const Shape& shape);

/// Membership flags over the full lattice (width * height entries).
using Membership = std::vector<std::uint8_t>;

/// A rasterized planar domain. Immutable after construction.
class GridDomain {
 public:
  GridDomain(int width, int height, Membership mask, double cell, Stencil stencil, Point origin,
             Shape shape, int resolution);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] int size() const { return width_ * height_; }
  [[nodiscard]] double cell() const { return cell_; }
  [[nodiscard]] double cell_area() const { return cell_ * cell_; }
  [[nodiscard]] int resolution() const { return resolution_; }
  [[nodiscard]] const Stencil& stencil() const { return stencil_; }
  [[nodiscard]] const Point& origin() const { return origin_; }
  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] const Membership& mask() const { return mask_; }
  [[nodiscard]] bool inside(int idx) const { return mask_[static_cast<std::size_t>(idx)] != 0; }
  [[nodiscard]] int cell_count() const { return cell_count_; }
  /// All mask cells in increasing index order.
  [[nodiscard]] std::vector<int> cells() const;

  [[nodiscard]] int index(int x, int y) const { return y * width_ + x; }
  [[nodiscard]] int x_of(int idx) const { return idx % width_; }
  [[nodiscard]] int y_of(int idx) const { return idx / width_; }
  [[nodiscard]] Point center(int idx) const;
  /// Neighbor index, or -1 when the offset leaves the lattice.
  [[nodiscard]] int neighbor(int idx, int dx, int dy) const {
    const int x = idx % width_ + dx;
    const int y = idx / width_ + dy;
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return -1;
    return y * width_ + x;
  }
  /// Cut weight (length units) of a stencil entry.
  [[nodiscard]] double weight(const StencilEntry& e) const { return e.weight * cell_; }

 private:
  int width_;
  int height_;
  Membership mask_;
  double cell_;
  Stencil stencil_;
  Point origin_;
  Shape shape_;
  int resolution_;
  int cell_count_ = 0;
};

/// Marks cells whose centers lie inside the shape. `resolution` is the
/// number of cells per unit length (>= 8). Throws on an empty result.
GridDomain rasterize(const Shape& shape, int resolution,
                     StencilKind stencil = StencilKind::sixteen);

/// Domain from an explicit mask (rows listed top to bottom as strings,
/// '#' or '1' = inside). Cell side defaults to 1. For tests and small
/// hand-built instances.
GridDomain domain_from_rows(const std::vector<std::string>& rows, double cell = 1.0,
                            StencilKind stencil = StencilKind::four);

/// Subset of domain cells with cached measures. Perimeter counts cut weight
/// towards every complement cell, including cells outside the mask.
struct CellSet {
  std::vector<int> cells;  // sorted, unique
  double area = 0.0;
  double perimeter = 0.0;

  [[nodiscard]] bool empty() const { return cells.empty(); }
  [[nodiscard]] std::size_t size() const { return cells.size(); }
  [[nodiscard]] double ratio() const { return perimeter / area; }
  friend bool operator==(const CellSet& a, const CellSet& b) { return a.cells == b.cells; }
};

/// Throws std::invalid_argument for cells outside the mask.
CellSet measure(const GridDomain& domain, std::vector<int> cells);
CellSet measure(const GridDomain& domain, const Membership& members);

double perimeter_of(const GridDomain& domain, const Membership& members,
                    std::span<const int> cells);

Membership to_membership(const GridDomain& domain, std::span<const int> cells);
std::vector<int> cells_of(const Membership& members);

/// Cut weight between two disjoint sets.
double contact_weight(const GridDomain& domain, const CellSet& a, const CellSet& b);

/// 4-connected components, largest area first (ties: smallest first cell).
std::vector<CellSet> connected_components(const GridDomain& domain, std::span<const int> cells);

/// Components under the stencil's own adjacency. Distinct components share
/// no cut weight, so P is additive over them.
std::vector<CellSet> stencil_components(const GridDomain& domain, std::span<const int> cells);

/// k sites spread by squared-distance sampling over `cells`; every cell goes
/// to its nearest site (ties to the lower site).
std::vector<Membership> voronoi_regions(const GridDomain& domain, const std::vector<int>& cells,
                                        int k, std::mt19937_64& rng);

}  // namespace cheeger
