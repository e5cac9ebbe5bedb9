#include "cheeger/closed_form.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cheeger::closed_form {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kClampTol = 1e-12;
constexpr double kMinArea = 1e-14;
constexpr double kDerivStep = 1e-6;
constexpr double kRadiusTol = 1e-10;

[[noreturn]] void domain_fail(const std::string& what) {
  throw std::domain_error("closed_form: " + what);
}

double clamped_asin(double x) {
  if (x > 1.0) {
    if (x > 1.0 + kClampTol) domain_fail("arcsin argument exceeds 1");
    x = 1.0;
  }
  if (x < 0.0) {
    if (x < -kClampTol) domain_fail("arcsin argument below 0");
    x = 0.0;
  }
  return std::asin(x);
}

double clamped_sqrt(double x) {
  if (x < 0.0) {
    if (x < -kClampTol) domain_fail("negative square-root argument");
    x = 0.0;
  }
  return std::sqrt(x);
}

void check_R(double R) {
  if (!(R >= 0.0)) domain_fail("inner radius R must be >= 0");
  if (!(R < 1.0)) domain_fail("inner radius R must be < 1");
}

double derivative(double R, double r) {
  return (ratio_F(R, r + kDerivStep) - ratio_F(R, r - kDerivStep)) / (2.0 * kDerivStep);
}

}  // namespace

AnnulusSpec::AnnulusSpec(double inner_radius) : R(inner_radius) { check_R(R); }

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::half_ring:
      return "half_ring";
    case Kind::annulus_h2:
      return "annulus_h2";
    case Kind::disc_h1:
      return "disc_h1";
    case Kind::disc_h2:
      return "disc_h2";
  }
  return "unknown";
}

double HalfRingGeometry::perimeter() const {
  return arc_outer_free + arc_inner_free + 2.0 * arc_corner_outer + 2.0 * arc_corner_inner +
         2.0 * seg_contact;
}

double HalfRingGeometry::area() const {
  return area_half_ring - 2.0 * area_corner_outer - 2.0 * area_corner_inner;
}

HalfRingGeometry half_ring_terms(double R, double r) {
  check_R(R);
  const double r_max = 0.5 * (1.0 - R);
  if (!(r >= 0.0)) domain_fail("rolling radius r must be >= 0");
  if (r > r_max + kClampTol) {
    std::ostringstream msg;
    msg << "rolling radius r = " << r << " exceeds (1-R)/2 = " << r_max;
    domain_fail(msg.str());
  }
  r = std::min(r, r_max);

  // Angle at the origin between the x-axis and the tangent point of the
  // rolling disc on the outer (resp. inner) circle.
  const double theta_out = clamped_asin(r / (1.0 - r));
  const double theta_in = (R + r > 0.0) ? clamped_asin(r / (R + r)) : 0.0;
  const double foot_out = clamped_sqrt(1.0 - 2.0 * r);      // |O A_1|
  const double foot_in = clamped_sqrt(R * (2.0 * r + R));   // |O A_2|

  HalfRingGeometry g;
  g.arc_outer_free = kPi - 2.0 * theta_out;
  g.arc_inner_free = R * (kPi - 2.0 * theta_in);
  g.arc_corner_outer = r * (0.5 * kPi + theta_out);
  g.arc_corner_inner = r * (0.5 * kPi - theta_in);
  g.seg_contact = foot_out - foot_in;
  g.area_half_ring = 0.5 * kPi * (1.0 - R * R);
  g.area_corner_outer =
      0.5 * theta_out - 0.5 * r * r * (0.5 * kPi + theta_out) - 0.5 * r * foot_out;
  g.area_corner_inner =
      0.5 * r * foot_in - 0.5 * R * R * theta_in - 0.5 * r * r * (0.5 * kPi - theta_in);
  // Rounding can leave -1e-17 residue in the corner areas at r = 0.
  g.area_corner_outer = std::max(g.area_corner_outer, 0.0);
  g.area_corner_inner = std::max(g.area_corner_inner, 0.0);
  g.seg_contact = std::max(g.seg_contact, 0.0);
  return g;
}

double ratio_F(double R, double r) {
  const HalfRingGeometry g = half_ring_terms(R, r);
  const double area = g.area();
  if (!(area > kMinArea)) domain_fail("degenerate geometry: nonpositive area of O_r");
  return g.perimeter() / area;
}

ClosedFormCheeger minimize_F(double R) {
  check_R(R);
  const double r_max = 0.5 * (1.0 - R);
  auto F = [R](double r) { return ratio_F(R, r); };

  // Golden section down to a bracket a few derivative steps wide.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = r_max;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = F(c);
  double fd = F(d);
  while (b - a > 1e-7 * r_max) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = F(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = F(d);
    }
  }
  double r_best = 0.5 * (a + b);

  // Bracket a sign change of F' around the golden-section estimate.
  const double lo_limit = 2.0 * kDerivStep;
  const double hi_limit = r_max - 2.0 * kDerivStep;
  double width = 1e-5 * r_max;
  double lo = std::max(lo_limit, r_best - width);
  double hi = std::min(hi_limit, r_best + width);
  bool bracketed = false;
  for (int expand = 0; expand < 60 && lo < hi; ++expand) {
    if (derivative(R, lo) < 0.0 && derivative(R, hi) > 0.0) {
      bracketed = true;
      break;
    }
    if (lo <= lo_limit && hi >= hi_limit) break;
    width *= 2.0;
    lo = std::max(lo_limit, r_best - width);
    hi = std::min(hi_limit, r_best + width);
  }
  if (bracketed) {
    while (hi - lo > kRadiusTol) {
      const double mid = 0.5 * (lo + hi);
      if (derivative(R, mid) > 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    r_best = 0.5 * (lo + hi);
  }

  ClosedFormCheeger out;
  out.kind = Kind::half_ring;
  out.r0 = r_best;
  out.h = F(r_best);
  // Endpoints are admissible too; keep whichever is smallest.
  for (double endpoint : {0.0, r_max}) {
    const double fe = F(endpoint);
    if (fe < out.h) {
      out.r0 = endpoint;
      out.h = fe;
    }
  }
  if (R > 0.0 && !(out.r0 > 0.0 && out.r0 < r_max)) {
    throw std::logic_error("closed_form: minimizer of F is not interior for R = " +
                           std::to_string(R));
  }
  return out;
}

int count_local_minima(double R, int samples) {
  check_R(R);
  if (samples < 3) throw std::invalid_argument("closed_form: need at least 3 samples");
  const double r_max = 0.5 * (1.0 - R);
  double prev2 = ratio_F(R, 0.0);
  double prev = ratio_F(R, r_max / (samples - 1));
  int minima = 0;
  if (prev2 < prev) ++minima;
  for (int i = 2; i < samples; ++i) {
    const double cur = ratio_F(R, r_max * i / (samples - 1));
    if (prev < prev2 && prev < cur) ++minima;
    prev2 = prev;
    prev = cur;
  }
  if (prev < prev2) ++minima;
  return minima;
}

ClosedFormCheeger h2_annulus(double R) {
  if (!(R > 0.0)) domain_fail("h2_annulus requires R > 0 (use h2_disc for the disc)");
  ClosedFormCheeger out = minimize_F(R);
  out.kind = Kind::annulus_h2;
  return out;
}

ClosedFormCheeger h1_disc(double radius) {
  if (!(radius > 0.0)) domain_fail("disc radius must be positive");
  return {radius, 2.0 / radius, Kind::disc_h1};
}

ClosedFormCheeger h2_disc() {
  ClosedFormCheeger out = minimize_F(0.0);
  out.kind = Kind::disc_h2;
  return out;
}

double h1_annulus(double R) {
  check_R(R);
  return 2.0 / (1.0 - R);
}

double InequalityCheck::margin() const { return std::abs(lhs - rhs); }

double ratio_F_at_max_radius_closed(double R) {
  check_R(R);
  const double s = clamped_asin((1.0 - R) / (1.0 + R));
  return 2.0 / (1.0 - R) * (4.0 * kPi - 4.0 * (1.0 + R) * s) /
         (kPi * (3.0 + R) - 4.0 * (1.0 + R) * s);
}

RingBoundsReport verify_ring_bounds(double R) {
  if (!(R > 0.0 && R < 1.0)) domain_fail("verify_ring_bounds requires 0 < R < 1");
  RingBoundsReport rep;
  rep.R = R;
  rep.contr0.name = "ring_contr0";
  rep.contr0.lhs = ratio_F(R, 0.5 * (1.0 - R));
  rep.contr0.rhs = 2.0 / (1.0 - R);
  rep.contr0.holds = rep.contr0.lhs > rep.contr0.rhs;

  rep.contr1.name = "ring_contr1";
  rep.contr1.lhs = 2.0 * (kPi * (1.0 + R) + 2.0 * (1.0 - R)) / (kPi * (1.0 - R * R));
  rep.contr1.rhs = 4.0 / (1.0 - R);
  rep.contr1.holds = rep.contr1.lhs < rep.contr1.rhs;
  return rep;
}

double convex_cheeger_from_inner_area(const std::function<double(double)>& inner_area,
                                      double inradius, double tol) {
  // g(r) = |[K]^r| - pi r^2 is positive near 0 and negative at the inradius.
  double lo = 0.0;
  double hi = inradius;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (inner_area(mid) - kPi * mid * mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 1.0 / (0.5 * (lo + hi));
}

double half_disc_inner_area(double r) {
  if (r <= 0.0) return 0.5 * kPi;
  if (r >= 0.5) return 0.0;
  const double rho = 1.0 - r;
  return rho * rho * (0.5 * kPi - std::asin(r / rho)) - r * std::sqrt(rho * rho - r * r);
}

double half_disc_cheeger_convex() {
  return convex_cheeger_from_inner_area(half_disc_inner_area, 0.5);
}

double unit_square_cheeger_convex() {
  return convex_cheeger_from_inner_area(
      [](double r) {
        const double side = std::max(0.0, 1.0 - 2.0 * r);
        return side * side;
      },
      0.5);
}

}  // namespace cheeger::closed_form
