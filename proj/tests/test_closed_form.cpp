#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cheeger/closed_form.h"
#include "cheeger/grid.h"

using namespace cheeger;
using namespace cheeger::closed_form;

namespace {

constexpr double kPi = std::numbers::pi;

struct Seg {
  double ax, ay, bx, by;
};

double dist_to_seg(const Seg& s, double x, double y) {
  const double dx = s.bx - s.ax;
  const double dy = s.by - s.ay;
  double t = ((x - s.ax) * dx + (y - s.ay) * dy) / (dx * dx + dy * dy);
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(x - s.ax - t * dx, y - s.ay - t * dy);
}

// Closed polygon approximating the upper half ring with n vertices per arc.
std::vector<Seg> half_ring_polygon(double R, int n) {
  std::vector<std::pair<double, double>> v;
  for (int i = 0; i <= n; ++i) {
    const double t = kPi * i / n;
    v.emplace_back(std::cos(t), std::sin(t));
  }
  for (int i = 0; i <= n; ++i) {
    const double t = kPi - kPi * i / n;
    v.emplace_back(R * std::cos(t), R * std::sin(t));
  }
  std::vector<Seg> segs;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    if (std::hypot(a.first - b.first, a.second - b.second) > 0.0)
      segs.push_back({a.first, a.second, b.first, b.second});
  }
  return segs;
}

// Length of the part of the circle of radius rho (inside the upper half
// plane) that a rolling disc of radius r touches from inside the polygon:
// the boundary point survives the opening iff the disc tangent there fits.
double opened_arc_length(const std::vector<Seg>& poly, double rho, double r, bool outer, int samples) {
  int kept = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = kPi * (i + 0.5) / samples;
    const double c = outer ? rho - r : rho + r;
    const double cx = c * std::cos(t);
    const double cy = c * std::sin(t);
    double d = 1e300;
    for (const auto& s : poly) d = std::min(d, dist_to_seg(s, cx, cy));
    if (d >= r * (1.0 - 1e-6)) ++kept;
  }
  return rho * kPi * kept / samples;
}

// Distance from (x, y) to the inner parallel set of the half ring,
// {y >= r, R + r <= |c| <= 1 - r}.
double dist_to_inner_parallel(double R, double r, double x, double y) {
  const double lo = R + r;
  const double hi = 1.0 - r;
  const double rad = std::hypot(x, y);
  if (y >= r && rad >= lo && rad <= hi) return 0.0;
  double best = 1e300;
  auto consider = [&](double px, double py) {
    if (py >= r - 1e-15 && std::hypot(px, py) >= lo - 1e-15 && std::hypot(px, py) <= hi + 1e-15)
      best = std::min(best, std::hypot(x - px, y - py));
  };
  if (rad > 0.0) {
    consider(x / rad * lo, y / rad * lo);
    consider(x / rad * hi, y / rad * hi);
  }
  const double a = std::sqrt(lo * lo - r * r);
  const double b = std::sqrt(hi * hi - r * r);
  for (double sign : {-1.0, 1.0}) {
    const double px = std::clamp(sign * x, a, b) * sign;
    consider(px, r);
    consider(sign * a, r);
    consider(sign * b, r);
  }
  return best;
}

}  // namespace

TEST_CASE("half ring terms at r = 0 reduce to the half ring") {
  const auto g = half_ring_terms(0.5, 0.0);
  CHECK(g.arc_corner_outer == 0.0);
  CHECK(g.arc_corner_inner == 0.0);
  CHECK(g.area_corner_outer == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g.area_corner_inner == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g.seg_contact == doctest::Approx(0.5));
  CHECK(g.area_half_ring == doctest::Approx(kPi * 0.75 / 2.0));
}

TEST_CASE("contact segment vanishes when the rolling disc spans the ring") {
  // The disc of radius (1-R)/2 touches both circles and the axis at one point.
  const auto g = half_ring_terms(0.5, 0.25);
  CHECK(g.seg_contact == doctest::Approx(0.0).epsilon(1e-12));
  // Tangent-point abscissae of a disc resting on the axis.
  const auto h = half_ring_terms(0.5, 0.1);
  CHECK(h.seg_contact == doctest::Approx(std::sqrt(1.0 - 0.2) - std::sqrt(0.5 * 0.7)));
}

TEST_CASE("free arcs agree with a polygonal opening") {
  const double R = 0.3;
  const double r = 0.2;
  const auto poly = half_ring_polygon(R, 4000);
  const auto g = half_ring_terms(R, r);
  const double outer = opened_arc_length(poly, 1.0, r, true, 10000);
  const double inner = opened_arc_length(poly, R, r, false, 10000);
  CHECK(std::abs(g.arc_outer_free - outer) <= 1e-3 * outer);
  CHECK(std::abs(g.arc_inner_free - inner) <= 1e-3 * inner);
}

TEST_CASE("domain errors name the violated bound") {
  CHECK_THROWS_AS(half_ring_terms(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(half_ring_terms(-0.1, 0.0), std::domain_error);
  CHECK_THROWS_AS(half_ring_terms(0.5, 0.3), std::domain_error);
  CHECK_THROWS_AS(half_ring_terms(0.5, -0.01), std::domain_error);
  CHECK_NOTHROW(half_ring_terms(0.5, 0.25 + 1e-13));
  CHECK_THROWS_AS(h2_annulus(0.0), std::domain_error);
  CHECK_THROWS_AS(h1_disc(0.0), std::domain_error);
}

TEST_CASE("ratio at r = 0 is the half ring perimeter over area") {
  for (double R : {0.0, 0.2, 0.5, 0.8}) {
    const double expect = (kPi * (1.0 + R) + 2.0 * (1.0 - R)) / (kPi * (1.0 - R * R) / 2.0);
    CHECK(ratio_F(R, 0.0) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("ratio at the widest disc matches its closed form and exceeds 2/(1-R)") {
  for (int i = 1; i < 100; ++i) {
    const double R = i / 100.0;
    const double F = ratio_F(R, 0.5 * (1.0 - R));
    CHECK(F == doctest::Approx(ratio_F_at_max_radius_closed(R)).epsilon(1e-12));
    CHECK(F > 2.0 / (1.0 - R));
  }
}

TEST_CASE("ratio matches the rasterized opening") {
  const double R = 0.4;
  const double r = 0.1;
  const GridDomain dom = rasterize(shapes::HalfRing{R}, 512);
  std::vector<int> cells;
  for (int c : dom.cells()) {
    const Point p = dom.center(c);
    if (dist_to_inner_parallel(R, r, p.x, p.y) <= r) cells.push_back(c);
  }
  const CellSet set = measure(dom, cells);
  CHECK(std::abs(set.ratio() - ratio_F(R, r)) <= 0.02 * ratio_F(R, r));
}

TEST_CASE("minimizer agrees with a dense scan") {
  for (double R : {0.0, 0.1, 0.5, 0.9}) {
    const auto res = minimize_F(R);
    const double rmax = 0.5 * (1.0 - R);
    double scan_min = 1e300;
    double scan_arg = 0.0;
    const int n = 100000;
    for (int i = 0; i <= n; ++i) {
      const double r = rmax * i / n;
      const double f = ratio_F(R, r);
      if (f < scan_min) {
        scan_min = f;
        scan_arg = r;
      }
    }
    CHECK(res.h <= scan_min * (1.0 + 1e-12));
    CHECK(res.h >= scan_min * (1.0 - 1e-8));
    CHECK(std::abs(res.r0 - scan_arg) <= 2.0 * rmax / n + 1e-6);
    CHECK(res.h < ratio_F(R, 0.0));
    CHECK(res.h < ratio_F(R, rmax));
    CHECK(count_local_minima(R, 20000) == 1);
  }
}

TEST_CASE("stationarity and interiority across the admissible range") {
  for (int i = 1; i < 20; ++i) {
    const double R = i / 20.0;
    const auto res = minimize_F(R);
    CHECK(res.kind == Kind::half_ring);
    CHECK(res.r0 > 0.0);
    CHECK(res.r0 < 0.5 * (1.0 - R));
    CHECK(std::abs(res.h - 1.0 / res.r0) <= 1e-8 * res.h);
    CHECK(res.h > 2.0 / (1.0 - R));
  }
}

TEST_CASE("scaled half-ring constant decreases towards the thin-strip limit") {
  // A thin ring of width w behaves like a strip, whose constant is 2/w.
  double prev = 1e300;
  for (int i = 1; i <= 9; ++i) {
    const double R = i / 10.0;
    const double scaled = minimize_F(R).h * (1.0 - R) / 2.0;
    CHECK(scaled > 1.0);
    CHECK(scaled < prev);
    prev = scaled;
  }
  CHECK(prev < 1.05);
}

TEST_CASE("half-disc constant matches the convex inner-parallel characterization") {
  const double expected = half_disc_cheeger_convex();
  CHECK(minimize_F(0.0).h == doctest::Approx(expected).epsilon(1e-9));
  CHECK(h2_disc().h == doctest::Approx(expected).epsilon(1e-9));
  CHECK(h2_disc().h == minimize_F(0.0).h);
  CHECK(h2_disc().kind == Kind::disc_h2);
  // Inner parallel area at r = 0 is the half-disc itself.
  CHECK(half_disc_inner_area(0.0) == doctest::Approx(kPi / 2.0));
}

TEST_CASE("unit square constant from its inner parallel sets") {
  // |[Q]^r| = (1 - 2r)^2 for the unit square.
  const double h = convex_cheeger_from_inner_area([](double r) { return (1 - 2 * r) * (1 - 2 * r); }, 0.5);
  CHECK(h == doctest::Approx(2.0 + std::sqrt(kPi)).epsilon(1e-10));
  CHECK(unit_square_cheeger_convex() == doctest::Approx(2.0 + std::sqrt(kPi)).epsilon(1e-12));
}

TEST_CASE("annulus and disc constants") {
  CHECK(h2_annulus(0.5).h == minimize_F(0.5).h);
  CHECK(h2_annulus(0.5).kind == Kind::annulus_h2);
  for (int i = 1; i < 10; ++i) {
    const double R = i / 10.0;
    CHECK(h2_annulus(R).h < 4.0 / (1.0 - R));
    CHECK(h2_annulus(R).h > h1_annulus(R));
  }
  CHECK(h1_disc(1.0).h == doctest::Approx(2.0));
  CHECK(h1_disc(0.5).h == doctest::Approx(4.0));
  CHECK(h1_annulus(0.5) == doctest::Approx(2.0 * 1.5 / 0.75));
}

TEST_CASE("ring bounds hold with reported margins") {
  const auto half = verify_ring_bounds(0.5);
  CHECK(half.contr1.lhs == doctest::Approx(2.0 * (1.5 * kPi + 1.0) / (0.75 * kPi)));
  CHECK(half.contr1.lhs == doctest::Approx(4.849).epsilon(1e-3));
  CHECK(half.contr1.rhs == doctest::Approx(8.0));
  for (double R : {0.01, 0.5, 0.9}) {
    const auto rep = verify_ring_bounds(R);
    CHECK(rep.all_hold());
    CHECK(rep.contr0.margin() > 0.0);
    CHECK(rep.contr1.margin() > 0.0);
  }
}

TEST_CASE("all lengths and areas are nonnegative on the admissible rectangle") {
  for (int i = 0; i < 100; ++i) {
    const double R = 0.99 * i / 99.0;
    for (int j = 0; j < 100; ++j) {
      const double r = 0.5 * (1.0 - R) * j / 99.0;
      const auto g = half_ring_terms(R, r);
      CHECK(g.arc_outer_free >= 0.0);
      CHECK(g.arc_inner_free >= 0.0);
      CHECK(g.arc_corner_outer >= 0.0);
      CHECK(g.arc_corner_inner >= 0.0);
      CHECK(g.seg_contact >= 0.0);
      CHECK(g.area_corner_outer >= 0.0);
      CHECK(g.area_corner_inner >= 0.0);
      CHECK(g.area_corner_outer < g.area_half_ring);
      CHECK(g.area_corner_inner < g.area_half_ring);
    }
  }
}
