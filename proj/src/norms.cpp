#include "finsler/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "finsler/convex.hpp"
#include "finsler/errors.hpp"

namespace finsler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_p(const Seminorm& s, double p) { return s.kind() == NormKind::pnorm && s.exponent() == p; }

Mat sign_vector_facets(int m) {
  if (m > 16) throw DimensionError("l1 facet expansion limited to dimension 16");
  const int rows = 1 << (m - 1);
  Mat F(rows, m);
  for (int r = 0; r < rows; ++r) {
    F(r, 0) = 1.0;
    for (int j = 1; j < m; ++j) F(r, j) = ((r >> (j - 1)) & 1) ? -1.0 : 1.0;
  }
  return F;
}

// Directions where the representation attains (or is likely to attain) its extreme
// values relative to the Euclidean norm.
std::vector<Vec> candidate_directions(const Seminorm& s) {
  const int m = s.dim();
  std::vector<Vec> out;
  for (int i = 0; i < m; ++i) out.push_back(Vec::Unit(m, i));
  auto push_normalized = [&](const Vec& v) {
    const double n = v.norm();
    if (n > 0 && std::isfinite(n)) out.push_back(v / n);
  };
  switch (s.kind()) {
    case NormKind::gram: {
      Eigen::SelfAdjointEigenSolver<Mat> eig(s.gram_matrix());
      for (int i = 0; i < m; ++i) push_normalized(eig.eigenvectors().col(i));
      break;
    }
    case NormKind::polytopal: {
      const Mat& F = s.facets();
      for (int r = 0; r < F.rows(); ++r) push_normalized(F.row(r).transpose());
      Eigen::JacobiSVD<Mat> svd(F, Eigen::ComputeFullV);
      for (int i = 0; i < m; ++i) push_normalized(svd.matrixV().col(i));
      if (m <= 3 && svd.singularValues().minCoeff() > 1e-12 * svd.singularValues().maxCoeff()) {
        const Polytope ball = Polytope::from_facets(F);
        for (int r = 0; r < ball.vertices().rows(); ++r) push_normalized(ball.vertices().row(r).transpose());
      }
      break;
    }
    case NormKind::pnorm:
    case NormKind::callable:
    case NormKind::euclidean:
      push_normalized(Vec::Ones(m));
      break;
  }
  return out;
}

// Golden-section polish of an angle-parametrized ratio on the circle.
double golden_polish(const std::function<double(double)>& f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::euclidean: return "euclidean";
    case NormKind::gram: return "gram";
    case NormKind::polytopal: return "polytopal";
    case NormKind::pnorm: return "pnorm";
    case NormKind::callable: return "callable";
  }
  return "unknown";
}

Seminorm Seminorm::euclidean(int dim) {
  if (dim < 1) throw DimensionError("euclidean: dimension must be positive");
  return Seminorm(dim, NormKind::euclidean);
}

Seminorm Seminorm::gram(Mat G) {
  if (G.rows() != G.cols() || G.rows() < 1) throw DimensionError("gram: matrix must be square and non-empty");
  const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("gram: matrix is not symmetric");
  if (!G.allFinite()) throw std::invalid_argument("gram: matrix has non-finite entries");
  Mat sym = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale)
    throw std::invalid_argument("gram: matrix is not positive semidefinite");
  Seminorm s(static_cast<int>(sym.rows()), NormKind::gram);
  s.matrix_ = std::make_shared<const Mat>(std::move(sym));
  return s;
}

Seminorm Seminorm::polytopal(Mat facets) {
  if (facets.rows() < 1 || facets.cols() < 1) throw DimensionError("polytopal: facet matrix is empty");
  if (!facets.allFinite()) throw std::invalid_argument("polytopal: non-finite facet entries");
  Seminorm s(static_cast<int>(facets.cols()), NormKind::polytopal);
  s.matrix_ = std::make_shared<const Mat>(std::move(facets));
  return s;
}

Seminorm Seminorm::p_norm(int dim, double p) {
  if (dim < 1) throw DimensionError("p_norm: dimension must be positive");
  if (!(p >= 1.0)) throw std::invalid_argument("p_norm: exponent must lie in [1, inf]");
  Seminorm s(dim, NormKind::pnorm);
  s.p_ = p;
  return s;
}

Seminorm Seminorm::callable(int dim, Evaluator fn, double tolerance) {
  if (dim < 1) throw DimensionError("callable: dimension must be positive");
  if (!fn) throw std::invalid_argument("callable: empty evaluator");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("callable: tolerance must be non-negative");
  Seminorm s(dim, NormKind::callable);
  s.fn_ = std::make_shared<const Evaluator>(std::move(fn));
  s.tolerance_ = tolerance;
  return s;
}

double Seminorm::operator()(const Vec& v) const {
  if (v.size() != dim_) throw DimensionError("seminorm evaluation: dimension mismatch");
  switch (kind_) {
    case NormKind::euclidean: return v.norm();
    case NormKind::gram: return std::sqrt(std::max(0.0, v.dot(*matrix_ * v)));
    case NormKind::polytopal: return (*matrix_ * v).cwiseAbs().maxCoeff();
    case NormKind::pnorm:
      if (p_ == kInf) return v.lpNorm<Eigen::Infinity>();
      if (p_ == 1.0) return v.lpNorm<1>();
      if (p_ == 2.0) return v.norm();
      {
        const double scale = v.lpNorm<Eigen::Infinity>();
        if (scale == 0.0) return 0.0;
        double sum = 0.0;
        for (int i = 0; i < dim_; ++i) sum += std::pow(std::abs(v[i]) / scale, p_);
        return scale * std::pow(sum, 1.0 / p_);
      }
    case NormKind::callable: return (*fn_)(v);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

const Mat& Seminorm::gram_matrix() const {
  if (kind_ != NormKind::gram) throw std::logic_error("gram_matrix: not a gram seminorm");
  return *matrix_;
}

const Mat& Seminorm::facets() const {
  if (kind_ != NormKind::polytopal) throw std::logic_error("facets: not a polytopal seminorm");
  return *matrix_;
}

double Seminorm::exponent() const {
  if (kind_ != NormKind::pnorm) throw std::logic_error("exponent: not a p-norm");
  return p_;
}

bool Seminorm::is_ellipsoidal() const {
  return kind_ == NormKind::euclidean || kind_ == NormKind::gram || is_p(*this, 2.0);
}

Mat Seminorm::ellipsoid_matrix() const {
  if (kind_ == NormKind::gram) return *matrix_;
  if (is_ellipsoidal()) return Mat::Identity(dim_, dim_);
  throw std::logic_error("ellipsoid_matrix: unit ball is not an ellipsoid");
}

std::optional<Mat> Seminorm::polytope_facets() const {
  if (kind_ == NormKind::polytopal) return *matrix_;
  if (is_p(*this, kInf)) return Mat(Mat::Identity(dim_, dim_));
  if (is_p(*this, 1.0)) return sign_vector_facets(dim_);
  return std::nullopt;
}

Seminorm Seminorm::scaled(double lambda) const {
  const double a = std::abs(lambda);
  if (!std::isfinite(a)) throw std::invalid_argument("scaled: non-finite factor");
  if (is_ellipsoidal()) return gram(a * a * ellipsoid_matrix());
  if (auto F = polytope_facets()) return polytopal(a * *F);
  auto base = *this;
  return callable(dim_, [base, a](const Vec& v) { return a * base(v); }, a * tolerance_);
}

Seminorm Seminorm::pullback(const Mat& A) const {
  if (A.rows() != dim_) throw DimensionError("pullback: matrix rows must match the seminorm dimension");
  const int k = static_cast<int>(A.cols());
  if (is_ellipsoidal()) {
    Mat G = A.transpose() * ellipsoid_matrix() * A;
    return gram(0.5 * (G + G.transpose()));
  }
  if (auto F = polytope_facets()) return polytopal(*F * A);
  auto base = *this;
  return callable(k, [base, A](const Vec& v) { return base(A * v); }, tolerance_);
}

AxiomReport check_axioms(const Seminorm& s, std::size_t sample_count, double tol, std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("check_axioms: sample_count must be positive");
  const int m = s.dim();
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  AxiomReport r;
  r.min_unit_value = kInf;
  auto value = [&](const Vec& v) {
    const double x = s(v);
    if (!std::isfinite(x) || x < 0.0) r.nan_detected = true;
    return x;
  };
  Vec u(m), v(m);
  for (std::size_t i = 0; i < sample_count; ++i) {
    for (int j = 0; j < m; ++j) {
      u[j] = normal(rng);
      v[j] = normal(rng);
    }
    const double lambda = scale(rng);
    const double su = value(u), sv = value(v);
    const double hom = std::abs(value(lambda * u) - std::abs(lambda) * su) / std::max(1.0, std::abs(lambda) * su);
    const double tri = std::max(0.0, value(u + v) - su - sv) / std::max(1.0, su + sv);
    if (std::isfinite(hom)) r.homogeneity_residual = std::max(r.homogeneity_residual, hom);
    if (std::isfinite(tri)) r.triangle_residual = std::max(r.triangle_residual, tri);
    if (u.norm() > 0) r.min_unit_value = std::min(r.min_unit_value, value(u / u.norm()));
  }
  for (const Vec& d : candidate_directions(s)) r.min_unit_value = std::min(r.min_unit_value, value(d));
  if (Vec zero = Vec::Zero(m); value(zero) != 0.0) r.nan_detected = true;

  const double residual_cap = std::max(1e-10, 10.0 * s.tolerance());
  r.is_norm = !r.nan_detected && r.min_unit_value >= tol && r.homogeneity_residual <= residual_cap &&
              r.triangle_residual <= residual_cap;
  return r;
}

double min_unit_value(const Seminorm& s, std::size_t direction_count) {
  double best = kInf;
  for (const Vec& d : sphere_directions(s.dim(), direction_count)) best = std::min(best, s(d));
  for (const Vec& d : candidate_directions(s)) best = std::min(best, s(d));
  return best;
}

bool is_degenerate(const Seminorm& s, double threshold) {
  if (s.is_ellipsoidal()) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(s.ellipsoid_matrix(), Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().minCoeff())) < threshold;
  }
  if (s.kind() == NormKind::polytopal) {
    Eigen::JacobiSVD<Mat> svd(s.facets());
    if (s.facets().rows() < s.dim()) return true;
    if (svd.singularValues()(s.dim() - 1) < threshold * std::max(1.0, svd.singularValues()(0))) return true;
  }
  return min_unit_value(s) < threshold;
}

NormComparisonReport compare_to_euclidean(const Seminorm& s, std::size_t direction_count, double tol) {
  if (is_degenerate(s)) throw GeometryError("compare_to_euclidean: seminorm is degenerate");
  const int m = s.dim();
  auto dirs = sphere_directions(m, direction_count);
  auto extra = candidate_directions(s);
  dirs.insert(dirs.end(), extra.begin(), extra.end());

  NormComparisonReport r;
  r.max_ratio = -kInf;
  r.min_ratio = kInf;
  for (const Vec& d : dirs) {
    const double x = s(d) / d.norm();
    if (x > r.max_ratio) {
      r.max_ratio = x;
      r.witness_direction = d / d.norm();
    }
    if (x < r.min_ratio) {
      r.min_ratio = x;
      r.min_direction = d / d.norm();
    }
  }

  if (m == 2) {
    // Polish both extremes on the circle; the lattice spacing brackets the optimum.
    const double h = 2.0 * std::numbers::pi / static_cast<double>(std::max<std::size_t>(direction_count, 8));
    auto at = [](double a) {
      Vec v(2);
      v << std::cos(a), std::sin(a);
      return v;
    };
    const double amax = std::atan2(r.witness_direction[1], r.witness_direction[0]);
    const double bmax = golden_polish([&](double a) { return s(at(a)); }, amax - h, amax + h);
    if (const double x = s(at(bmax)) / at(bmax).norm(); x > r.max_ratio) {
      r.max_ratio = x;
      r.witness_direction = at(bmax);
    }
    const double amin = std::atan2(r.min_direction[1], r.min_direction[0]);
    const double bmin = golden_polish([&](double a) { return -s(at(a)); }, amin - h, amin + h);
    if (const double x = s(at(bmin)) / at(bmin).norm(); x < r.min_ratio) {
      r.min_ratio = x;
      r.min_direction = at(bmin);
    }
  }
  r.dominates_euclidean = r.min_ratio >= 1.0 - tol;
  return r;
}

Seminorm regular_2ngon_norm(int n) {
  if (n < 2) throw std::invalid_argument("regular_2ngon_norm: n must be at least 2");
  const double inradius = std::cos(std::numbers::pi / (2.0 * n));
  Mat F(n, 2);
  for (int k = 0; k < n; ++k) {
    const double a = (k + 0.5) * std::numbers::pi / n;
    F(k, 0) = std::cos(a) / inradius;
    F(k, 1) = std::sin(a) / inradius;
  }
  return Seminorm::polytopal(std::move(F));
}

Seminorm ellipsoidal_norm(const Mat& G) {
  Seminorm s = Seminorm::gram(G);
  Eigen::SelfAdjointEigenSolver<Mat> eig(s.gram_matrix(), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 1e-14 * std::max(1.0, eig.eigenvalues().maxCoeff()))
    throw std::invalid_argument("ellipsoidal_norm: matrix is not positive definite");
  return s;
}

Seminorm polytopal_norm(const Mat& facets) {
  if (facets.rows() < facets.cols()) throw std::invalid_argument("polytopal_norm: facets do not span");
  Eigen::JacobiSVD<Mat> svd(facets);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-12 * std::max(1.0, sv(0)))
    throw std::invalid_argument("polytopal_norm: facets do not span");
  return Seminorm::polytopal(facets);
}

}  // namespace finsler

namespace finsler {

Vec subgradient(const Seminorm& s, const Vec& v) {
  const int m = s.dim();
  if (v.size() != m) throw DimensionError("subgradient: dimension mismatch");
  const double value = s(v);
  if (!(value > 0.0)) return Vec::Zero(m);
  switch (s.kind()) {
    case NormKind::euclidean: return v / value;
    case NormKind::gram: return s.gram_matrix() * v / value;
    case NormKind::polytopal: {
      const Vec w = s.facets() * v;
      int arg;
      w.cwiseAbs().maxCoeff(&arg);
      return (w(arg) >= 0 ? 1.0 : -1.0) * s.facets().row(arg).transpose();
    }
    case NormKind::pnorm: {
      const double p = s.exponent();
      Vec g = Vec::Zero(m);
      if (p == std::numeric_limits<double>::infinity()) {
        int arg;
        v.cwiseAbs().maxCoeff(&arg);
        g(arg) = v(arg) >= 0 ? 1.0 : -1.0;
        return g;
      }
      if (p == 1.0) {
        for (int i = 0; i < m; ++i) g(i) = v(i) > 0 ? 1.0 : (v(i) < 0 ? -1.0 : 0.0);
        return g;
      }
      for (int i = 0; i < m; ++i)
        g(i) = (v(i) >= 0 ? 1.0 : -1.0) * std::pow(std::abs(v(i)) / value, p - 1.0);
      return g;
    }
    case NormKind::callable: {
      const double h = 1e-5 * v.norm();
      Vec g(m);
      Vec e = v;
      for (int i = 0; i < m; ++i) {
        e(i) = v(i) + h;
        const double up = s(e);
        e(i) = v(i) - h;
        const double down = s(e);
        e(i) = v(i);
        g(i) = (up - down) / (2.0 * h);
      }
      return g;
    }
  }
  return Vec::Zero(m);
}

}  // namespace finsler
