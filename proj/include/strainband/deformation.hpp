#ifndef STRAINBAND_DEFORMATION_HPP
#define STRAINBAND_DEFORMATION_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "strainband/vec2.hpp"

namespace strainband {

// Hopping-strength law h(r) with h(1) = 1 and h'(1) = t1.
struct HoppingFunction {
  std::function<double(double)> h;
  double t1 = 0.0;

  static HoppingFunction linear(double t1) {
    return {[t1](double r) { return 1.0 + t1 * (r - 1.0); }, t1};
  }
};

// One-dimensional displacement profile d(X1) with derivative and, when the
// gradient saturates at infinity, the asymptotic slope d_infinity.
struct UnidirectionalProfile {
  std::function<double(double)> d;
  std::function<double(double)> d_prime;
  std::optional<double> d_infinity;
};

enum class DeformationKind { None, UnidirectionalAC, QuadraticZZ, Triaxial, Custom };

// Smooth displacement field u(X) with gradient access.  The gradient is
// analytic when supplied, otherwise evaluated by central differences with
// step h_fd = 1e-5.
class DisplacementField {
 public:
  DisplacementField() = default;
  DisplacementField(DeformationKind kind, std::function<Vec2(Vec2)> u,
                    std::function<Mat2(Vec2)> grad = nullptr);

  Vec2 u(const Vec2& X) const { return u_ ? u_(X) : Vec2{}; }
  Mat2 grad(const Vec2& X) const;
  bool has_analytic_grad() const { return static_cast<bool>(grad_); }

  DeformationKind kind() const { return kind_; }
  // Set for UnidirectionalAC fields: u = (0, d(X1)).
  const std::optional<UnidirectionalProfile>& profile() const { return profile_; }

  static double fd_step() { return 1e-5; }

  // Catalog.
  static DisplacementField none();
  static DisplacementField quadratic_ac();                      // u = (0, X1^2)
  static DisplacementField quadratic_zz();                      // u = (-X2^2, 0)
  static DisplacementField triaxial();                          // u = (2 X1 X2, X1^2 - X2^2)
  static DisplacementField unidirectional_ac(UnidirectionalProfile p,
                                             DeformationKind kind = DeformationKind::UnidirectionalAC);
  // Tabulated profile (X1, d) with natural cubic spline interpolation.
  static DisplacementField from_profile_csv(const std::string& path);

 private:
  DeformationKind kind_ = DeformationKind::None;
  std::function<Vec2(Vec2)> u_;
  std::function<Mat2(Vec2)> grad_;
  std::optional<UnidirectionalProfile> profile_;
};

// Bond strain f_nu(X) = e_nu^T (grad u)(X) e_nu, via the explicit
// component forms.  nu in {1,2,3}.
double bond_strain(const DisplacementField& field, const Vec2& X, int nu);

// Effective magnetic potential:
//   A1 = -(t1/2)(d1 u1 - d2 u2),  A2 = (t1/2)(d1 u2 + d2 u1).
Vec2 effective_potential(const DisplacementField& field, const Vec2& X, double t1);

// Pseudo-magnetic field B = d1 A2 - d2 A1, by central differences on the
// effective potential (step 1e-4; exact for the catalog's linear A fields).
double pseudo_field(const DisplacementField& field, const Vec2& X, double t1);

// Linear regularization of the quadratic profile: d_reg = phi * d_tilde with
// d_tilde quadratic on [-L, L] and linear (slope +-2L) outside; phi is a
// quartic bump of the given width, normalized to unit integral.  d_infinity
// is 2L.  Rejects L <= 0 or mollifier_width <= 0.
UnidirectionalProfile regularized_quadratic(double L, double mollifier_width);

// Quadratic profile d = X1^2 (unbounded gradient; no d_infinity).
UnidirectionalProfile quadratic_profile();

// Natural cubic spline through (x_i, y_i); x strictly increasing.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y);
  double eval(double x) const;
  double deriv(double x) const;

 private:
  std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

}  // namespace strainband

#endif
