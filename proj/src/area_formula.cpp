#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "finsler/errors.hpp"
#include "finsler/rectifiable.hpp"

namespace finsler {

namespace {

using Point2 = Eigen::Vector2d;
using Polygon = std::vector<Point2>;

Polygon clip_half_plane(const Polygon& poly, int axis, double bound, bool keep_below) {
  Polygon out;
  const std::size_t n = poly.size();
  auto inside = [&](const Point2& p) { return keep_below ? p(axis) <= bound : p(axis) >= bound; };
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    const bool ia = inside(a), ib = inside(b);
    if (ia) out.push_back(a);
    if (ia != ib) {
      const double t = (bound - a(axis)) / (b(axis) - a(axis));
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

// Signed area and centroid by the shoelace formula.
double polygon_area(const Polygon& poly, Point2& centroid) {
  double a2 = 0.0;
  Point2 c = Point2::Zero();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % poly.size()];
    const double cross = p(0) * q(1) - q(0) * p(1);
    a2 += cross;
    c += (p + q) * cross;
  }
  if (a2 != 0.0) centroid = c / (3.0 * a2);
  return 0.5 * a2;
}

class ImageGrid {
 public:
  ImageGrid(const Chart& chart, int n, VolumeTag tag, const BallResolution& res)
      : chart_(chart), n_(n), m_(chart.dim()), tag_(tag), res_(res) {
    width_ = (chart.domain().hi - chart.domain().lo) / n;
    long total = 1;
    for (int i = 0; i < m_; ++i) total *= n;
    jac_.assign(total, std::numeric_limits<double>::quiet_NaN());
    coverage_.assign(total, 0.0);
    opts_.h0 = std::min(opts_.h0, 0.25 * width_.minCoeff());
  }

  int n() const { return n_; }
  const Vec& width() const { return width_; }
  const Vec& lo() const { return chart_.domain().lo; }

  double jacobian(long cell) {
    if (std::isnan(jac_[cell])) {
      Vec center(m_);
      long rest = cell;
      for (int i = 0; i < m_; ++i) {
        center(i) = lo()(i) + (static_cast<double>(rest % n_) + 0.5) * width_(i);
        rest /= n_;
      }
      const MdJacobian j = md_jacobian(chart_, center, tag_, opts_, res_);
      jac_[cell] = j.degenerate ? 0.0 : j.value;
    }
    return jac_[cell];
  }

  void cover(long cell, double amount) { coverage_[cell] += amount; }

  int max_multiplicity() const {
    const double cell_volume = width_.prod();
    double best = 0.0;
    for (double c : coverage_) best = std::max(best, c / cell_volume);
    return static_cast<int>(std::lround(best));
  }

 private:
  const Chart& chart_;
  int n_, m_;
  VolumeTag tag_;
  BallResolution res_;
  MetricDerivativeOptions opts_;
  Vec width_;
  std::vector<double> jac_;
  std::vector<double> coverage_;
};

struct Context {
  const Chart& chart;
  const Chart::Map& f;
  const Chart::Map& image_inverse;
  const std::function<double(const Vec&)>& g;
  const Atlas& atlas;
  std::size_t chart_index;
  ImageGrid& grid;
  const AreaFormulaOptions& opts;
  AreaFormulaResult& result;

  Vec to_image(const Vec& z) const { return image_inverse(f(chart(z))); }
  double weight(const Vec& z) const { return g(chart(z)) * atlas.density(chart_index, z); }
};

// Orientation test on a probe lattice: every small simplex keeps the same sign.
bool orientation_consistent(const Context& ctx, const Vec& lo, const Vec& hi) {
  const int m = static_cast<int>(lo.size());
  const int p = std::max(2, ctx.opts.injectivity_probes + 1);
  if (m == 1) {
    int sign = 0;
    double prev = ctx.to_image(lo)(0);
    for (int i = 1; i < p; ++i) {
      const Vec z = lo + (hi - lo) * (static_cast<double>(i) / (p - 1));
      const double cur = ctx.to_image(z)(0);
      const int s = cur > prev ? 1 : (cur < prev ? -1 : 0);
      if (s != 0 && sign != 0 && s != sign) return false;
      if (s != 0) sign = s;
      prev = cur;
    }
    return true;
  }
  std::vector<Point2> w(p * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      Vec z(2);
      z(0) = lo(0) + (hi(0) - lo(0)) * i / (p - 1);
      z(1) = lo(1) + (hi(1) - lo(1)) * j / (p - 1);
      w[i * p + j] = ctx.to_image(z).head<2>();
    }
  int sign = 0;
  double scale = 0.0;
  std::vector<double> dets;
  for (int i = 0; i + 1 < p; ++i)
    for (int j = 0; j + 1 < p; ++j) {
      const Point2 a = w[i * p + j], b = w[(i + 1) * p + j], c = w[(i + 1) * p + j + 1], d = w[i * p + j + 1];
      for (auto [u, v] : {std::pair{b - a, c - a}, std::pair{c - a, d - a}}) {
        const double det = u(0) * v(1) - u(1) * v(0);
        dets.push_back(det);
        scale = std::max(scale, std::abs(det));
      }
    }
  for (double det : dets) {
    if (std::abs(det) <= 1e-12 * scale) continue;
    const int s = det > 0 ? 1 : -1;
    if (sign != 0 && s != sign) return false;
    sign = s;
  }
  return true;
}

// Integrates the weight over an injective piece mapped affinely onto the image grid.
double integrate_piece(Context& ctx, const Vec& lo, const Vec& hi) {
  ImageGrid& grid = ctx.grid;
  const int n = grid.n();
  double total = 0.0;
  if (lo.size() == 1) {
    const double w0 = ctx.to_image(lo)(0), w1 = ctx.to_image(hi)(0);
    if (w0 == w1) return 0.0;
    const double a = std::min(w0, w1), b = std::max(w0, w1);
    const long first = std::max(0L, static_cast<long>(std::floor((a - grid.lo()(0)) / grid.width()(0))));
    const long last = std::min<long>(n - 1, static_cast<long>(std::floor((b - grid.lo()(0)) / grid.width()(0))));
    for (long k = first; k <= last; ++k) {
      const double c0 = grid.lo()(0) + k * grid.width()(0);
      const double s = std::max(a, c0), t = std::min(b, c0 + grid.width()(0));
      if (t <= s) continue;
      const double mid = 0.5 * (s + t);
      const double lambda = (mid - w0) / (w1 - w0);
      const Vec z = lo + lambda * (hi - lo);
      total += ctx.weight(z) * grid.jacobian(k) * (t - s);
      grid.cover(k, t - s);
    }
    return total;
  }

  const Vec z00 = lo, z10 = (Vec(2) << hi(0), lo(1)).finished(), z11 = hi, z01 = (Vec(2) << lo(0), hi(1)).finished();
  const Vec zs[4] = {z00, z10, z11, z01};
  Point2 ws[4];
  for (int k = 0; k < 4; ++k) ws[k] = ctx.to_image(zs[k]).head<2>();
  const int tris[2][3] = {{0, 1, 2}, {0, 2, 3}};
  for (const auto& tri : tris) {
    const Point2 w0 = ws[tri[0]], w1 = ws[tri[1]], w2 = ws[tri[2]];
    Eigen::Matrix2d W;
    W.col(0) = w1 - w0;
    W.col(1) = w2 - w0;
    const double det = W.determinant();
    if (std::abs(det) <= 1e-300) continue;
    const Eigen::Matrix2d Winv = W.inverse();
    const Vec z0 = zs[tri[0]], dz1 = zs[tri[1]] - z0, dz2 = zs[tri[2]] - z0;
    const Point2 bmin = w0.cwiseMin(w1).cwiseMin(w2), bmax = w0.cwiseMax(w1).cwiseMax(w2);
    long range[2][2];
    for (int d = 0; d < 2; ++d) {
      range[d][0] = std::max(0L, static_cast<long>(std::floor((bmin(d) - grid.lo()(d)) / grid.width()(d))));
      range[d][1] = std::min<long>(n - 1, static_cast<long>(std::floor((bmax(d) - grid.lo()(d)) / grid.width()(d))));
    }
    Polygon base = det > 0 ? Polygon{w0, w1, w2} : Polygon{w0, w2, w1};
    for (long i = range[0][0]; i <= range[0][1]; ++i)
      for (long j = range[1][0]; j <= range[1][1]; ++j) {
        const double x0 = grid.lo()(0) + i * grid.width()(0), y0 = grid.lo()(1) + j * grid.width()(1);
        Polygon poly = clip_half_plane(base, 0, x0, false);
        poly = clip_half_plane(poly, 0, x0 + grid.width()(0), true);
        poly = clip_half_plane(poly, 1, y0, false);
        poly = clip_half_plane(poly, 1, y0 + grid.width()(1), true);
        if (poly.size() < 3) continue;
        Point2 centroid = Point2::Zero();
        const double area = polygon_area(poly, centroid);
        if (!(area > 0)) continue;
        const Point2 lam = Winv * (centroid - w0);
        const Vec z = z0 + lam(0) * dz1 + lam(1) * dz2;
        const long cell = i + j * n;
        total += ctx.weight(z) * grid.jacobian(cell) * area;
        grid.cover(cell, area);
      }
  }
  return total;
}

void process_cell(Context& ctx, const Vec& lo, const Vec& hi, int depth) {
  if (!orientation_consistent(ctx, lo, hi)) {
    if (depth < ctx.opts.max_depth) {
      const int m = static_cast<int>(lo.size());
      const Vec mid = 0.5 * (lo + hi);
      for (int mask = 0; mask < (1 << m); ++mask) {
        Vec clo = lo, chi = hi;
        for (int d = 0; d < m; ++d) {
          if (mask & (1 << d))
            clo(d) = mid(d);
          else
            chi(d) = mid(d);
        }
        process_cell(ctx, clo, chi, depth + 1);
      }
      return;
    }
    ++ctx.result.capped_pieces;
    ++ctx.result.pieces;
    const double part = integrate_piece(ctx, lo, hi);
    ctx.result.rhs += part;
    ctx.result.error_budget += std::abs(part);
    return;
  }
  ++ctx.result.pieces;
  ctx.result.rhs += integrate_piece(ctx, lo, hi);
}

}  // namespace

AreaFormulaResult area_formula_check(const Atlas& atlas, const Chart::Map& f, double f_lipschitz,
                                     const std::function<double(const Vec&)>& g, VolumeTag tag, const Chart& image_chart,
                                     const AreaFormulaOptions& opts) {
  if (atlas.charts.empty()) throw std::invalid_argument("area_formula_check: empty atlas");
  if (!image_chart.inverse()) throw std::invalid_argument("area_formula_check: image chart needs an inverse");
  if (opts.cells_per_dim < 1 || opts.max_depth < 0) throw std::invalid_argument("area_formula_check: bad options");
  const int m = image_chart.dim();
  if (m > 2) throw DimensionError("area_formula_check: only one- and two-dimensional sets are supported");
  for (const Chart& c : atlas.charts)
    if (c.dim() != m) throw DimensionError("area_formula_check: chart and image chart dimensions differ");

  AreaFormulaResult result;
  const int n = opts.cells_per_dim;
  ImageGrid grid(image_chart, n, tag, opts.resolution);

  for (std::size_t ci = 0; ci < atlas.charts.size(); ++ci) {
    const Chart& chart = atlas.charts[ci];
    const Vec width = (chart.domain().hi - chart.domain().lo) / n;
    const double cell_volume = width.prod();
    const Chart composed = chart.compose(f, f_lipschitz, image_chart.ambient());
    MetricDerivativeOptions md;
    md.h0 = std::min(md.h0, 0.25 * width.minCoeff());
    Context ctx{chart, f, image_chart.inverse(), g, atlas, ci, grid, opts, result};

    long total = 1;
    for (int i = 0; i < m; ++i) total *= n;
    for (long idx = 0; idx < total; ++idx) {
      Vec lo(m), center(m);
      long rest = idx;
      for (int i = 0; i < m; ++i) {
        lo(i) = chart.domain().lo(i) + static_cast<double>(rest % n) * width(i);
        center(i) = lo(i) + 0.5 * width(i);
        rest /= n;
      }
      const MdJacobian j = md_jacobian(composed, center, tag, md, opts.resolution);
      if (!j.degenerate) result.lhs += ctx.weight(center) * j.value * cell_volume;
      process_cell(ctx, lo, Vec(lo + width), 0);
    }
  }
  result.residual = std::abs(result.lhs - result.rhs) / std::max(result.lhs, 1e-12);
  result.max_multiplicity = grid.max_multiplicity();
  return result;
}

}  // namespace finsler
