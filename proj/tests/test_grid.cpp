#include <doctest.h>

#include <cmath>
#include <numbers>
#include <algorithm>
#include <random>
#include <stdexcept>

#include "cheeger/grid.h"

using namespace cheeger;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("Cauchy-Crofton stencil is symmetric with the expected length moment") {
  const Stencil s = Stencil::cauchy_crofton16();
  CHECK(s.entries().size() == 16);
  CHECK(s.reach() == 2);
  CHECK(s.length_moment() == doctest::Approx(kPi / 2.0).epsilon(1e-14));
  for (const auto& e : s.entries()) {
    CHECK(e.weight > 0.0);
    bool found = false;
    for (const auto& f : s.entries())
      if (f.dx == -e.dx && f.dy == -e.dy) found = f.weight == e.weight;
    CHECK(found);
  }
  // The axis line owns the orientations within atan(1/2) of it: weight atan(1/2)/2.
  CHECK(s.entries()[0].weight == doctest::Approx(std::atan(0.5) / 2.0));
  CHECK(Stencil::four_neighbor().length_moment() == doctest::Approx(2.0));
}

TEST_CASE("stencil names round-trip") {
  CHECK(stencil_kind_from_string("16") == StencilKind::sixteen);
  CHECK(stencil_kind_from_string("four") == StencilKind::four);
  CHECK(to_string(StencilKind::sixteen) == "sixteen");
  CHECK_THROWS_AS(stencil_kind_from_string("8"), std::invalid_argument);
}

TEST_CASE("rasterized areas") {
  const GridDomain disc = rasterize(shapes::Disc{1.0}, 64);
  CHECK(std::abs(disc.cell_count() - kPi * 64 * 64) <= 0.02 * kPi * 64 * 64);
  const GridDomain ring = rasterize(shapes::Annulus{0.5}, 64);
  CHECK(std::abs(ring.cell_count() - 0.75 * kPi * 64 * 64) <= 0.02 * 0.75 * kPi * 64 * 64);
  const GridDomain square = rasterize(unit_square(), 32);
  CHECK(square.cell_count() == 32 * 32);
  CHECK(square.cell() == doctest::Approx(1.0 / 32));
  const GridDomain half = rasterize(shapes::HalfRing{0.0}, 64);
  CHECK(std::abs(half.cell_count() - 0.5 * kPi * 64 * 64) <= 0.02 * 0.5 * kPi * 64 * 64);
}

TEST_CASE("rasterize rejects bad input") {
  CHECK_THROWS_AS(rasterize(shapes::Disc{1.0}, 7), std::invalid_argument);
  CHECK_THROWS_AS(rasterize(shapes::Annulus{1.0}, 16), std::invalid_argument);
  CHECK_THROWS_AS(rasterize(shapes::Disc{-1.0}, 16), std::invalid_argument);
  // A sliver thinner than a cell and away from the centers rasterizes empty.
  CHECK_THROWS_AS(rasterize(shapes::Polygon{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.01}}}, 16),
                  std::invalid_argument);
}

TEST_CASE("rasterization is deterministic") {
  CHECK(rasterize(shapes::HalfRing{0.3}, 40).mask() == rasterize(shapes::HalfRing{0.3}, 40).mask());
}

TEST_CASE("four-neighbor measures of small sets") {
  const GridDomain dom = domain_from_rows({"####", "####"});
  const CellSet one = measure(dom, std::vector<int>{0});
  CHECK(one.perimeter == doctest::Approx(4.0));
  CHECK(one.area == doctest::Approx(1.0));
  const CellSet domino = measure(dom, std::vector<int>{0, 1});
  CHECK(domino.perimeter == doctest::Approx(6.0));
  const CellSet all = measure(dom, dom.cells());
  CHECK(all.perimeter == doctest::Approx(12.0));
}

TEST_CASE("measure rejects cells outside the mask") {
  const GridDomain dom = domain_from_rows({"#.", "##"});
  // Row 0 is the top; the '.' is at x = 1, y = 1.
  CHECK_THROWS_AS(measure(dom, std::vector<int>{dom.index(1, 1)}), std::invalid_argument);
  CHECK_NOTHROW(measure(dom, std::vector<int>{dom.index(0, 1)}));
}

TEST_CASE("disc perimeter under the Cauchy-Crofton stencil") {
  const GridDomain dom = rasterize(shapes::Disc{1.0}, 32);
  const CellSet all = measure(dom, dom.cells());
  CHECK(std::abs(all.perimeter - 2.0 * kPi) <= 0.015 * 2.0 * kPi);
  // Isoperimetric lower bound up to the calibration error.
  CHECK(all.perimeter >= 2.0 * std::sqrt(kPi * all.area) * (1.0 - 0.015));
  // The four-neighbor stencil measures Manhattan length instead.
  const GridDomain manhattan = rasterize(shapes::Disc{1.0}, 32, StencilKind::four);
  CHECK(measure(manhattan, manhattan.cells()).perimeter == doctest::Approx(8.0).epsilon(0.01));
}

TEST_CASE("perimeter additivity with contact") {
  const GridDomain dom = rasterize(shapes::Disc{1.0}, 24);
  std::mt19937 rng(7);
  const auto cells = dom.cells();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> a;
    std::vector<int> b;
    for (int c : cells) {
      const auto v = rng() % 3;
      if (v == 0) a.push_back(c);
      if (v == 1) b.push_back(c);
    }
    std::vector<int> u = a;
    u.insert(u.end(), b.begin(), b.end());
    const CellSet sa = measure(dom, a);
    const CellSet sb = measure(dom, b);
    const CellSet su = measure(dom, u);
    CHECK(su.perimeter == doctest::Approx(sa.perimeter + sb.perimeter - 2.0 * contact_weight(dom, sa, sb)));
  }
}

TEST_CASE("connected components") {
  const GridDomain dom = domain_from_rows({"#.#", "...", "###"});
  SUBCASE("two separated cells") {
    const auto comps = connected_components(dom, std::vector<int>{dom.index(0, 2), dom.index(2, 2)});
    CHECK(comps.size() == 2);
  }
  SUBCASE("block") {
    const GridDomain block = domain_from_rows({"###", "###", "###"});
    CHECK(connected_components(block, block.cells()).size() == 1);
  }
  SUBCASE("ordered by area") {
    const auto comps = connected_components(dom, dom.cells());
    REQUIRE(comps.size() == 3);
    CHECK(comps[0].size() == 3);
    CHECK(comps[1].cells.front() < comps[2].cells.front());
  }
}

TEST_CASE("component areas sum to the total and the best component dominates") {
  const GridDomain dom = rasterize(unit_square(), 16);
  std::mt19937 rng(11);
  auto cells = dom.cells();
  std::shuffle(cells.begin(), cells.end(), rng);
  cells.resize(50);
  const CellSet whole = measure(dom, cells);
  for (const auto& comps : {connected_components(dom, cells), stencil_components(dom, cells)}) {
    double area = 0.0;
    double best = 1e300;
    for (const auto& c : comps) {
      area += c.area;
      best = std::min(best, c.ratio());
    }
    CHECK(area == doctest::Approx(whole.area));
    CHECK(best <= whole.ratio() * (1.0 + 1e-12));
  }
  // Stencil components share no cut weight, so perimeter is additive.
  double p = 0.0;
  for (const auto& c : stencil_components(dom, cells)) p += c.perimeter;
  CHECK(p == doctest::Approx(whole.perimeter));
}

TEST_CASE("measures are translation invariant in the interior") {
  const GridDomain dom = rasterize(unit_square(), 32);
  std::vector<int> a;
  std::vector<int> b;
  for (int y = 5; y < 12; ++y)
    for (int x = 4; x < 9; ++x)
      if ((x + y) % 3 != 0) {
        a.push_back(dom.index(x, y));
        b.push_back(dom.index(x + 11, y + 9));
      }
  CHECK(measure(dom, a).perimeter == doctest::Approx(measure(dom, b).perimeter));
}
