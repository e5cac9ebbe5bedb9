#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace cheeger::closed_form {

/// Concentric ring B_1 \ closure(B_R), outer radius normalized to 1.
/// R = 0 is accepted and stands for the disc (and the half-disc for the
/// half-ring constructions below).
struct AnnulusSpec {
  double R = 0.0;

  explicit AnnulusSpec(double inner_radius);
  [[nodiscard]] double max_rolling_radius() const { return 0.5 * (1.0 - R); }
};

/// Boundary and area pieces of the rolling-disc set O_r inside the upper
/// half-ring. Corner pieces are counted once; the ratio uses each twice.
struct HalfRingGeometry {
  double arc_outer_free = 0.0;     // part of the unit circle kept by O_r
  double arc_inner_free = 0.0;     // part of the circle of radius R kept by O_r
  double arc_corner_outer = 0.0;   // rolling-disc arc in the outer corner
  double arc_corner_inner = 0.0;   // rolling-disc arc in the inner corner
  double seg_contact = 0.0;        // flat piece left on the x-axis, one side
  double area_half_ring = 0.0;
  double area_corner_outer = 0.0;  // area cut off in the outer corner
  double area_corner_inner = 0.0;  // area cut off in the inner corner

  [[nodiscard]] double perimeter() const;
  [[nodiscard]] double area() const;
};

enum class Kind { half_ring, annulus_h2, disc_h1, disc_h2 };

std::string_view to_string(Kind kind);

struct ClosedFormCheeger {
  double r0 = 0.0;  // optimal rolling radius (or the disc radius for disc_h1)
  double h = 0.0;
  Kind kind = Kind::half_ring;
};

/// Throws std::domain_error naming the violated bound.
HalfRingGeometry half_ring_terms(double R, double r);

/// Perimeter/area of O_r. Throws std::domain_error on a degenerate
/// (area <= 1e-14) denominator.
double ratio_F(double R, double r);

/// Global minimizer of ratio_F over [0, (1-R)/2]: golden section to
/// bracket, then bisection on a central-difference derivative.
ClosedFormCheeger minimize_F(double R);

/// Number of strict local minima of F seen on a uniform scan of the
/// admissible interval (1 when F is unimodal).
int count_local_minima(double R, int samples);

/// Second Cheeger constant of the ring: two rotated copies of O_{r0}.
ClosedFormCheeger h2_annulus(double R);

ClosedFormCheeger h1_disc(double radius);

/// Second Cheeger constant of the unit disc (= first Cheeger constant of
/// the half-disc).
ClosedFormCheeger h2_disc();

/// First Cheeger constant of the full ring, which is calibrable.
double h1_annulus(double R);

struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;  // strict lhs < rhs or lhs > rhs depending on the check
  [[nodiscard]] double margin() const;
};

struct RingBoundsReport {
  double R = 0.0;
  /// F((1-R)/2) > 2/(1-R): the widest rolling disc is not optimal.
  InequalityCheck contr0;
  /// Two half-rings beat a pair containing a maximal inscribed disc.
  InequalityCheck contr1;
  [[nodiscard]] bool all_hold() const { return contr0.holds && contr1.holds; }
};

RingBoundsReport verify_ring_bounds(double R);

/// F((1-R)/2) written out in closed form.
double ratio_F_at_max_radius_closed(double R);

/// Cheeger constant of a convex planar body from the area of its inner
/// parallel sets: h = 1/r where |[K]^r| = pi r^2, solved by bisection on
/// (0, inradius).
double convex_cheeger_from_inner_area(const std::function<double(double)>& inner_area,
                                      double inradius, double tol = 1e-13);

/// |[half-disc]^r| for the unit half-disc.
double half_disc_inner_area(double r);

/// Value of h_1(half unit disc) from the inner-parallel-set characterization.
double half_disc_cheeger_convex();

/// Value of h_1 for the unit square: 2 + sqrt(pi).
double unit_square_cheeger_convex();

}  // namespace cheeger::closed_form
