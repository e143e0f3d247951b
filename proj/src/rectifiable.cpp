#include "finsler/rectifiable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "finsler/errors.hpp"

namespace finsler {

Box Box::cube(int dim, double lo, double hi) {
  if (dim < 1 || !(hi > lo)) throw DimensionError("Box::cube: need dim >= 1 and hi > lo");
  return {Vec::Constant(dim, lo), Vec::Constant(dim, hi)};
}

bool Box::contains(const Vec& x, double margin) const {
  if (x.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (x(i) < lo(i) + margin || x(i) > hi(i) - margin) return false;
  return true;
}

Ambient Ambient::euclidean(int dim) {
  Ambient a = normed(Seminorm::euclidean(dim));
  a.name_ = "euclidean";
  return a;
}

Ambient Ambient::normed(Seminorm norm) {
  Ambient a;
  a.dim_ = norm.dim();
  a.name_ = std::string("normed:") + std::string(to_string(norm.kind()));
  a.norm_ = std::move(norm);
  return a;
}

Ambient Ambient::metric(int dim, Metric d, std::string name) {
  if (!d) throw std::invalid_argument("Ambient::metric: empty metric");
  Ambient a;
  a.dim_ = dim;
  a.metric_ = std::move(d);
  a.name_ = std::move(name);
  return a;
}

bool Ambient::is_euclidean() const { return norm_ && norm_->kind() == NormKind::euclidean; }

const Seminorm& Ambient::norm() const {
  if (!norm_) throw std::logic_error("Ambient::norm: metric ambient has no norm");
  return *norm_;
}

double Ambient::distance(const Vec& a, const Vec& b) const {
  if (norm_) return (*norm_)(a - b);
  return metric_(a, b);
}

Chart::Chart(Box domain, Map map, double lipschitz, Ambient ambient, Validation validation)
    : domain_(std::move(domain)), map_(std::move(map)), lipschitz_(lipschitz), ambient_(std::move(ambient)) {
  if (!map_) throw std::invalid_argument("Chart: empty map");
  if (!(lipschitz_ >= 0.0) || !std::isfinite(lipschitz_)) throw std::invalid_argument("Chart: Lipschitz constant must be finite");
  const int m = dim();
  if (m < 1 || domain_.hi.size() != m || !(domain_.volume() > 0)) throw DimensionError("Chart: invalid domain box");

  Rng rng(validation.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal;
  const Vec width = domain_.hi - domain_.lo;
  auto random_point = [&]() {
    Vec x(m);
    for (int i = 0; i < m; ++i) x(i) = domain_.lo(i) + width(i) * unif(rng);
    return x;
  };
  const double diam = width.norm();
  for (int k = 0; k < validation.pairs; ++k) {
    const Vec x = random_point();
    Vec y;
    if (k % 2 == 0) {
      y = random_point();
    } else {
      Vec step(m);
      for (int i = 0; i < m; ++i) step(i) = normal(rng);
      y = (x + 1e-3 * diam * step.normalized()).cwiseMax(domain_.lo).cwiseMin(domain_.hi);
    }
    const double dx = (x - y).norm();
    if (dx <= 0) continue;
    const Vec px = map_(x), py = map_(y);
    if (px.size() != ambient_.dim() || py.size() != ambient_.dim())
      throw DimensionError("Chart: map output does not match the ambient dimension");
    observed_lipschitz_ = std::max(observed_lipschitz_, ambient_.distance(px, py) / dx);
  }
  if (observed_lipschitz_ > lipschitz_ * (1.0 + 1e-7) + 1e-12)
    throw std::invalid_argument("Chart: declared Lipschitz constant " + std::to_string(lipschitz_) +
                                " violated (observed " + std::to_string(observed_lipschitz_) + ")");
}

Chart::Chart(Box domain, Map map, double lipschitz, Ambient ambient)
    : Chart(std::move(domain), std::move(map), lipschitz, std::move(ambient), Validation{}) {}

Chart::Chart(Box domain, Map map, double lipschitz)
    : Chart(domain, map, lipschitz, Ambient::euclidean(static_cast<int>(map(0.5 * (domain.lo + domain.hi)).size()))) {}

Vec Chart::operator()(const Vec& x) const {
  if (x.size() != dim()) throw DimensionError("Chart: point dimension mismatch");
  return map_(x);
}

Chart& Chart::with_inverse(Map inverse) {
  inverse_ = std::move(inverse);
  return *this;
}

Chart Chart::compose(const Map& f, double f_lipschitz, Ambient target) const {
  Map phi = map_;
  return Chart(domain_, [phi, f](const Vec& z) { return f(phi(z)); }, lipschitz_ * f_lipschitz, std::move(target));
}

int Atlas::density(std::size_t chart, const Vec& x) const {
  if (densities.empty() || !densities[chart]) return 1;
  return densities[chart](x);
}

std::vector<Vec> default_directions(int m) {
  std::vector<Vec> out;
  if (m == 1) return {Vec::Ones(1)};
  if (m == 2) {
    for (int k = 0; k < 8; ++k) {
      const double a = k * std::numbers::pi / 8.0;
      out.push_back((Vec(2) << std::cos(a), std::sin(a)).finished());
    }
    return out;
  }
  for (int i = 0; i < m; ++i) out.push_back(Vec::Unit(m, i));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      out.push_back((Vec::Unit(m, i) + Vec::Unit(m, j)) / std::sqrt(2.0));
      out.push_back((Vec::Unit(m, i) - Vec::Unit(m, j)) / std::sqrt(2.0));
    }
  return out;
}

namespace {

// The differential only needs smooth maps; deeper steps would just amplify rounding.
constexpr int kDifferentialLevels = 3;

struct Extrapolated {
  double value;
  double disagreement;
};

// Richardson on a symmetric quotient sequence with error expansion in h^2.
template <class Quotient>
Extrapolated richardson(const Quotient& q, double h0, int levels) {
  double prev_d = q(h0);
  double prev_e = prev_d, last_e = prev_d;
  bool have_prev_e = false;
  for (int k = 1; k < levels; ++k) {
    const double d = q(h0 * std::ldexp(1.0, -k));
    const double e = (4.0 * d - prev_d) / 3.0;
    if (k >= 2) have_prev_e = true;
    prev_e = last_e;
    last_e = e;
    prev_d = d;
  }
  return {last_e, have_prev_e ? std::abs(last_e - prev_e) : 0.0};
}

Mat richardson_differential(const Chart& chart, const Vec& x, double h0, int levels) {
  const int m = chart.dim();
  const int N = chart.ambient().dim();
  Mat D(N, m);
  for (int i = 0; i < m; ++i) {
    auto quotient = [&](double h) {
      Vec e = Vec::Zero(m);
      e(i) = h;
      return Vec((chart(x + e) - chart(x - e)) / (2.0 * h));
    };
    Vec prev_d = quotient(h0), last = prev_d;
    for (int k = 1; k < levels; ++k) {
      const Vec d = quotient(h0 * std::ldexp(1.0, -k));
      last = (4.0 * d - prev_d) / 3.0;
      prev_d = d;
    }
    D.col(i) = last;
  }
  return D;
}

void check_interior(const Chart& chart, const Vec& x, double h0) {
  if (x.size() != chart.dim()) throw DimensionError("metric_derivative: point dimension mismatch");
  if (!chart.domain().contains(x, h0))
    throw DimensionError("metric_derivative: point closer to the domain boundary than the largest step");
}

bool gram_degenerate(const Mat& G) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(G, Eigen::EigenvaluesOnly);
  const double hi = eig.eigenvalues().maxCoeff();
  return !(hi > 0.0) || eig.eigenvalues().minCoeff() < 1e-9 * hi;
}

Mat fit_gram(const std::vector<Vec>& dirs, const std::vector<double>& values, int m) {
  const int unknowns = m * (m + 1) / 2;
  Mat A(static_cast<int>(dirs.size()), unknowns);
  Vec b(static_cast<int>(dirs.size()));
  for (std::size_t r = 0; r < dirs.size(); ++r) {
    int c = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) A(static_cast<int>(r), c++) = (i == j ? 1.0 : 2.0) * dirs[r](i) * dirs[r](j);
    b(static_cast<int>(r)) = values[r] * values[r];
  }
  const Vec g = A.colPivHouseholderQr().solve(b);
  Mat G(m, m);
  int c = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) G(i, j) = G(j, i) = g(c++);
  Eigen::SelfAdjointEigenSolver<Mat> eig(G);
  const Vec lam = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

double directional_md(const Chart& chart, const Vec& x, const Vec& v, double h0, int levels, double* disagreement) {
  const Ambient& amb = chart.ambient();
  const Extrapolated e = richardson(
      [&](double h) { return amb.distance(chart(x + h * v), chart(x - h * v)) / (2.0 * h); }, h0, levels);
  if (disagreement) *disagreement = e.disagreement;
  return std::max(0.0, e.value);
}

}  // namespace

MetricDerivativeEstimate metric_derivative(const Chart& chart, const Vec& x, const MetricDerivativeOptions& opts) {
  check_interior(chart, x, opts.h0);
  if (opts.levels < 3) throw std::invalid_argument("metric_derivative: need at least three step levels");
  const int m = chart.dim();
  MetricDerivativeEstimate est;
  est.x = x;
  est.directions = opts.directions.empty() ? default_directions(m) : opts.directions;
  if (static_cast<int>(est.directions.size()) < m * (m + 1) / 2)
    throw std::invalid_argument("metric_derivative: need at least m(m+1)/2 directions for the Gram fit");
  for (auto& v : est.directions) {
    if (v.size() != m) throw DimensionError("metric_derivative: direction dimension mismatch");
    v.normalize();
  }
  double scale = 0.0;
  std::vector<double> disagreements;
  for (const Vec& v : est.directions) {
    double dis = 0.0;
    const double val = directional_md(chart, x, v, opts.h0, opts.levels, &dis);
    est.values.push_back(val);
    disagreements.push_back(dis);
    scale = std::max(scale, val);
  }
  const double floor = std::max(scale, 1e-8 * std::max(chart.lipschitz(), 1e-300));
  for (double d : disagreements) est.max_disagreement = std::max(est.max_disagreement, d / floor);
  est.reliable = est.max_disagreement <= opts.reliability_tol;

  est.gram = fit_gram(est.directions, est.values, m);
  for (std::size_t k = 0; k < est.directions.size(); ++k) {
    const Vec& v = est.directions[k];
    est.euclidean_residual = std::max(est.euclidean_residual, std::abs(est.values[k] - std::sqrt(v.dot(est.gram * v))));
  }
  est.degenerate = gram_degenerate(est.gram);
  if (chart.ambient().is_normed()) est.differential = richardson_differential(chart, x, opts.h0, kDifferentialLevels);
  return est;
}

Seminorm md_seminorm(const Chart& chart, const MetricDerivativeEstimate& est, const MetricDerivativeOptions& opts) {
  if (chart.ambient().is_normed() && est.differential) return chart.ambient().norm().pullback(*est.differential);
  double scale = 0.0;
  for (double v : est.values) scale = std::max(scale, v);
  if (est.euclidean_residual <= 1e-6 * std::max(scale, 1e-300)) return Seminorm::gram(est.gram);
  const Chart c = chart;
  const Vec x = est.x;
  const double h0 = opts.h0;
  const int levels = opts.levels;
  return Seminorm::callable(
      chart.dim(),
      [c, x, h0, levels](const Vec& v) {
        const double n = v.norm();
        if (n == 0.0) return 0.0;
        return n * directional_md(c, x, v / n, h0, levels, nullptr);
      },
      1e-6);
}

MdJacobian md_jacobian(const Chart& chart, const Vec& x, VolumeTag tag, const MetricDerivativeOptions& opts,
                       const BallResolution& res) {
  MdJacobian out;
  if (chart.ambient().is_normed()) {
    check_interior(chart, x, opts.h0);
    const Mat D = richardson_differential(chart, x, opts.h0, kDifferentialLevels);
    if (gram_degenerate(D.transpose() * D)) {
      out.degenerate = true;
      return out;
    }
    const JacobianResult j = jacobian(tag, chart.ambient().norm().pullback(D), res);
    out.value = j.value;
    out.degenerate = j.degenerate;
    return out;
  }
  const MetricDerivativeEstimate est = metric_derivative(chart, x, opts);
  if (est.degenerate) {
    out.degenerate = true;
    return out;
  }
  const JacobianResult j = jacobian(tag, md_seminorm(chart, est, opts), res);
  out.value = j.value;
  out.degenerate = j.degenerate;
  return out;
}

EuclideanReport is_infinitesimally_euclidean(const Chart& chart, const std::vector<Vec>& samples, double tol,
                                             const MetricDerivativeOptions& opts) {
  EuclideanReport r;
  int passing = 0;
  for (const Vec& x : samples) {
    const MetricDerivativeEstimate est = metric_derivative(chart, x, opts);
    double scale = 0.0;
    for (double v : est.values) scale = std::max(scale, v);
    const double rel = scale > 0 ? est.euclidean_residual / scale : 0.0;
    r.worst_residual = std::max(r.worst_residual, rel);
    if (!est.reliable) ++r.unreliable;
    if (rel <= tol) ++passing;
    ++r.samples;
  }
  r.fraction_euclidean = r.samples ? static_cast<double>(passing) / r.samples : 0.0;
  return r;
}

MuMeasureResult mu_measure(const Atlas& atlas, VolumeTag tag, const std::function<bool(const Vec&)>& indicator,
                           const QuadratureOptions& quad, const BallResolution& res) {
  if (quad.cells_per_dim < 1) throw std::invalid_argument("mu_measure: cells_per_dim must be positive");
  MuMeasureResult out;
  const int n = quad.cells_per_dim;
  for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
    const Chart& chart = atlas.charts[c];
    const int m = chart.dim();
    const Vec width = (chart.domain().hi - chart.domain().lo) / n;
    const double cell_volume = width.prod();
    MetricDerivativeOptions opts;
    opts.h0 = std::min(opts.h0, 0.25 * width.minCoeff());
    long total = 1;
    for (int i = 0; i < m; ++i) total *= n;
    Vec z(m);
    for (long idx = 0; idx < total; ++idx) {
      long rest = idx;
      for (int i = 0; i < m; ++i) {
        z(i) = chart.domain().lo(i) + (static_cast<double>(rest % n) + 0.5) * width(i);
        rest /= n;
      }
      if (!indicator(chart(z))) continue;
      ++out.cells;
      const MdJacobian j = md_jacobian(chart, z, tag, opts, res);
      if (j.degenerate) {
        ++out.degenerate_cells;
        continue;
      }
      out.value += std::abs(atlas.density(c, z)) * j.value * cell_volume;
    }
  }
  if (out.cells > 0 && out.degenerate_cells * 10 > out.cells)
    out.warnings.push_back("metric derivative degenerate on " + std::to_string(out.degenerate_cells) + " of " +
                           std::to_string(out.cells) + " cells");
  return out;
}

MapJacobianResult map_jacobian(const Chart& chart, const Chart::Map& f, double f_lipschitz, const Ambient& target,
                               const Vec& x, VolumeTag tag, const BallResolution& res) {
  const MdJacobian base = md_jacobian(chart, x, tag, {}, res);
  if (base.degenerate || !(base.value > 0))
    throw GeometryError("map_jacobian: chart metric derivative is degenerate at the base point");
  const Chart composed = chart.compose(f, f_lipschitz, target);
  const MdJacobian top = md_jacobian(composed, x, tag, {}, res);
  MapJacobianResult out;
  out.degenerate = top.degenerate;
  out.value = top.degenerate ? 0.0 : top.value / base.value;
  return out;
}

IsometryReport infinitesimal_isometry_check(const Chart& chart, const Chart::Map& f, double f_lipschitz,
                                            const Ambient& target, const std::vector<Vec>& samples, double tol,
                                            const MetricDerivativeOptions& opts) {
  IsometryReport r;
  const Chart composed = chart.compose(f, f_lipschitz, target);
  int passing = 0;
  for (const Vec& x : samples) {
    const MetricDerivativeEstimate a = metric_derivative(chart, x, opts);
    const MetricDerivativeEstimate b = metric_derivative(composed, x, opts);
    double dev = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      dev = std::max(dev, std::abs(a.values[k] - b.values[k]));
      scale = std::max(scale, a.values[k]);
    }
    if (!a.reliable || !b.reliable) ++r.unreliable;
    r.max_deviation = std::max(r.max_deviation, dev);
    if (dev <= tol * std::max(1.0, scale)) ++passing;
    ++r.samples;
  }
  r.fraction_passing = r.samples ? static_cast<double>(passing) / r.samples : 0.0;
  return r;
}

ObservedOrder observed_order(const std::vector<double>& h, const std::vector<double>& errors, double floor) {
  if (h.size() != errors.size()) throw std::invalid_argument("observed_order: size mismatch");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (errors[i] > floor) pts.emplace_back(std::log(h[i]), std::log(errors[i]));
  ObservedOrder out;
  if (pts.size() < 2) {
    out.exact = pts.empty();
    out.order = out.exact ? std::numeric_limits<double>::infinity() : 0.0;
    return out;
  }
  double mx = 0, my = 0;
  for (auto& [x, y] : pts) mx += x, my += y;
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0, sxx = 0;
  for (auto& [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
  out.order = sxx > 0 ? sxy / sxx : 0.0;
  return out;
}

Chart linear_chart(const Mat& A, const Box& domain) {
  if (A.cols() != domain.dim()) throw DimensionError("linear_chart: matrix columns must match the domain dimension");
  Eigen::JacobiSVD<Mat> svd(A);
  const double lip = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Chart c(domain, [A](const Vec& x) { return Vec(A * x); }, lip * (1.0 + 1e-12) + 1e-300,
          Ambient::euclidean(static_cast<int>(A.rows())));
  if (svd.singularValues().minCoeff() > 1e-12 * std::max(lip, 1e-300)) {
    const Mat pinv = A.completeOrthogonalDecomposition().pseudoInverse();
    c.with_inverse([pinv](const Vec& y) { return Vec(pinv * y); });
  }
  return c;
}

Chart graph_chart(const std::function<double(const Vec&)>& height, double height_lipschitz, const Box& domain) {
  const int m = domain.dim();
  Chart c(
      domain,
      [height, m](const Vec& x) {
        Vec out(m + 1);
        out.head(m) = x;
        out(m) = height(x);
        return out;
      },
      std::sqrt(1.0 + height_lipschitz * height_lipschitz), Ambient::euclidean(m + 1));
  c.with_inverse([m](const Vec& y) { return Vec(y.head(m)); });
  return c;
}

Chart sphere_face_chart(int axis, int sign) {
  if (axis < 0 || axis > 2 || (sign != 1 && sign != -1)) throw std::invalid_argument("sphere_face_chart: bad face");
  const int b = (axis + 1) % 3, c = (axis + 2) % 3;
  Chart chart(
      Box::cube(2, -1.0, 1.0),
      [axis, sign, b, c](const Vec& uv) {
        Vec p(3);
        p(axis) = sign;
        p(b) = uv(0);
        p(c) = uv(1);
        return Vec(p / p.norm());
      },
      1.0, Ambient::euclidean(3));
  chart.with_inverse([axis, b, c](const Vec& p) {
    const double s = std::abs(p(axis));
    return (Vec(2) << p(b) / s, p(c) / s).finished();
  });
  return chart;
}

Atlas sphere_atlas() {
  Atlas atlas;
  for (int axis = 0; axis < 3; ++axis)
    for (int sign : {1, -1}) atlas.charts.push_back(sphere_face_chart(axis, sign));
  return atlas;
}

}  // namespace finsler
