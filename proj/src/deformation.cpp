#include "strainband/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace strainband {

namespace {

const double kSqrt3 = std::sqrt(3.0);

// Nodes/weights of n-point Gauss-Legendre on [-1,1], by Newton iteration on
// the Legendre recurrence.
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < n; ++i) {
      double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = xi;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        double dx = p1 / dp;
        xi -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      x[i] = xi;
      w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
  }
};

const GaussLegendre& gl64() {
  static const GaussLegendre g(64);
  return g;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b) {
  const GaussLegendre& g = gl64();
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (size_t i = 0; i < g.x.size(); ++i) sum += g.w[i] * f(mid + half * g.x[i]);
  return half * sum;
}

}  // namespace

DisplacementField::DisplacementField(DeformationKind kind,
                                     std::function<Vec2(Vec2)> u,
                                     std::function<Mat2(Vec2)> grad)
    : kind_(kind), u_(std::move(u)), grad_(std::move(grad)) {}

Mat2 DisplacementField::grad(const Vec2& X) const {
  if (grad_) return grad_(X);
  if (!u_) return {};
  const double h = fd_step();
  Vec2 uxp = u({X.x + h, X.y}), uxm = u({X.x - h, X.y});
  Vec2 uyp = u({X.x, X.y + h}), uym = u({X.x, X.y - h});
  Mat2 g;
  g.a11 = (uxp.x - uxm.x) / (2.0 * h);
  g.a21 = (uxp.y - uxm.y) / (2.0 * h);
  g.a12 = (uyp.x - uym.x) / (2.0 * h);
  g.a22 = (uyp.y - uym.y) / (2.0 * h);
  return g;
}

DisplacementField DisplacementField::none() {
  DisplacementField f(DeformationKind::None, [](Vec2) { return Vec2{0.0, 0.0}; },
                      [](Vec2) { return Mat2{}; });
  return f;
}

DisplacementField DisplacementField::quadratic_ac() {
  return unidirectional_ac(quadratic_profile());
}

DisplacementField DisplacementField::quadratic_zz() {
  return DisplacementField(
      DeformationKind::QuadraticZZ,
      [](Vec2 X) { return Vec2{-X.y * X.y, 0.0}; },
      [](Vec2 X) {
        Mat2 g;
        g.a12 = -2.0 * X.y;
        return g;
      });
}

DisplacementField DisplacementField::triaxial() {
  return DisplacementField(
      DeformationKind::Triaxial,
      [](Vec2 X) { return Vec2{2.0 * X.x * X.y, X.x * X.x - X.y * X.y}; },
      [](Vec2 X) {
        Mat2 g;
        g.a11 = 2.0 * X.y;
        g.a12 = 2.0 * X.x;
        g.a21 = 2.0 * X.x;
        g.a22 = -2.0 * X.y;
        return g;
      });
}

DisplacementField DisplacementField::unidirectional_ac(UnidirectionalProfile p,
                                                       DeformationKind kind) {
  auto d = p.d;
  auto dp = p.d_prime;
  DisplacementField f(
      kind, [d](Vec2 X) { return Vec2{0.0, d(X.x)}; },
      [dp](Vec2 X) {
        Mat2 g;
        g.a21 = dp(X.x);
        return g;
      });
  f.profile_ = std::move(p);
  return f;
}

DisplacementField DisplacementField::from_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open profile CSV: " + path);
  std::vector<double> xs, ys;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ls(line);
    double x, y;
    if (ls >> x >> y) {
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  if (xs.size() < 4)
    throw std::invalid_argument("profile CSV needs at least 4 rows: " + path);
  for (size_t i = 1; i < xs.size(); ++i)
    if (xs[i] <= xs[i - 1])
      throw std::invalid_argument("profile CSV X1 column must be strictly increasing");
  auto spline = std::make_shared<CubicSpline>(xs, ys);
  UnidirectionalProfile p;
  p.d = [spline](double x) { return spline->eval(x); };
  p.d_prime = [spline](double x) { return spline->deriv(x); };
  return unidirectional_ac(std::move(p), DeformationKind::Custom);
}

double bond_strain(const DisplacementField& field, const Vec2& X, int nu) {
  if (nu < 1 || nu > 3) throw std::invalid_argument("bond_strain: nu must be 1..3");
  Mat2 g = field.grad(X);
  const double d1u1 = g.a11, d2u1 = g.a12, d1u2 = g.a21, d2u2 = g.a22;
  switch (nu) {
    case 1:
      return 0.75 * d1u1 + (kSqrt3 / 4.0) * (d1u2 + d2u1) + 0.25 * d2u2;
    case 2:
      return 0.75 * d1u1 - (kSqrt3 / 4.0) * (d1u2 + d2u1) + 0.25 * d2u2;
    default:
      return d2u2;
  }
}

Vec2 effective_potential(const DisplacementField& field, const Vec2& X, double t1) {
  Mat2 g = field.grad(X);
  double A1 = -0.5 * t1 * (g.a11 - g.a22);
  double A2 = 0.5 * t1 * (g.a21 + g.a12);
  return {A1, A2};
}

double pseudo_field(const DisplacementField& field, const Vec2& X, double t1) {
  const double h = 1e-4;
  Vec2 Axp = effective_potential(field, {X.x + h, X.y}, t1);
  Vec2 Axm = effective_potential(field, {X.x - h, X.y}, t1);
  Vec2 Ayp = effective_potential(field, {X.x, X.y + h}, t1);
  Vec2 Aym = effective_potential(field, {X.x, X.y - h}, t1);
  return (Axp.y - Axm.y) / (2.0 * h) - (Ayp.x - Aym.x) / (2.0 * h);
}

UnidirectionalProfile quadratic_profile() {
  UnidirectionalProfile p;
  p.d = [](double x) { return x * x; };
  p.d_prime = [](double x) { return 2.0 * x; };
  return p;
}

UnidirectionalProfile regularized_quadratic(double L, double mollifier_width) {
  if (L <= 0.0) throw std::invalid_argument("regularized_quadratic: L must be > 0");
  if (mollifier_width <= 0.0)
    throw std::invalid_argument("regularized_quadratic: mollifier width must be > 0");
  const double w = mollifier_width;

  // Quartic bump, normalized to unit integral by trapezoid at 201 points.
  double trap = 0.0;
  const int nq = 201;
  for (int i = 0; i < nq; ++i) {
    double t = -w + 2.0 * w * i / (nq - 1);
    double s = 1.0 - (t / w) * (t / w);
    double v = s * s;
    trap += (i == 0 || i == nq - 1) ? 0.5 * v : v;
  }
  trap *= 2.0 * w / (nq - 1);
  const double C = 1.0 / trap;
  auto phi = [C, w](double t) {
    double s = 1.0 - (t / w) * (t / w);
    return (std::abs(t) <= w) ? C * s * s : 0.0;
  };

  auto d_tilde = [L](double x) {
    if (x >= L) return 2.0 * L * (x - L) + L * L;
    if (x <= -L) return -2.0 * L * (x + L) + L * L;
    return x * x;
  };
  auto d_tilde_prime = [L](double x) {
    if (x >= L) return 2.0 * L;
    if (x <= -L) return -2.0 * L;
    return 2.0 * x;
  };

  // Convolution (phi * g)(x); the t-interval is split at the images of the
  // kinks x -+ L so each Gauss-Legendre panel sees a polynomial integrand.
  auto conv_split = [phi, w, L](const std::function<double(double)>& g, double x) {
    std::vector<double> pts = {-w, w};
    for (double kx : {x - L, x + L}) {
      if (kx > -w && kx < w) pts.push_back(kx);
    }
    std::sort(pts.begin(), pts.end());
    double sum = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      sum += gl_integrate([&](double t) { return phi(t) * g(x - t); }, pts[i], pts[i + 1]);
    }
    return sum;
  };

  UnidirectionalProfile p;
  p.d = [conv_split, d_tilde](double x) { return conv_split(d_tilde, x); };
  p.d_prime = [conv_split, d_tilde_prime](double x) { return conv_split(d_tilde_prime, x); };
  p.d_infinity = 2.0 * L;
  return p;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const size_t n = x_.size();
  if (n < 3 || y_.size() != n)
    throw std::invalid_argument("CubicSpline: need >= 3 matching points");
  m_.assign(n, 0.0);
  std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
  b[0] = 1.0;
  b[n - 1] = 1.0;
  for (size_t i = 1; i + 1 < n; ++i) {
    double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    a[i] = h0 / 6.0;
    b[i] = (h0 + h1) / 3.0;
    c[i] = h1 / 6.0;
    r[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
  }
  // Thomas algorithm.
  for (size_t i = 1; i < n; ++i) {
    double f = a[i] / b[i - 1];
    b[i] -= f * c[i - 1];
    r[i] -= f * r[i - 1];
  }
  m_[n - 1] = r[n - 1] / b[n - 1];
  for (size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
}

double CubicSpline::eval(double x) const {
  const size_t n = x_.size();
  if (x <= x_[0]) {
    double s = deriv(x_[0]);
    return y_[0] + s * (x - x_[0]);
  }
  if (x >= x_[n - 1]) {
    double s = deriv(x_[n - 1]);
    return y_[n - 1] + s * (x - x_[n - 1]);
  }
  size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1;
  double h = x_[i + 1] - x_[i];
  double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
  return A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double x) const {
  const size_t n = x_.size();
  if (x < x_[0]) x = x_[0];
  if (x > x_[n - 1]) x = x_[n - 1];
  size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
  if (i > 0) --i;
  if (i + 1 >= n) i = n - 2;
  double h = x_[i + 1] - x_[i];
  double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h -
         (3.0 * A * A - 1.0) / 6.0 * h * m_[i] + (3.0 * B * B - 1.0) / 6.0 * h * m_[i + 1];
}

}  // namespace strainband
