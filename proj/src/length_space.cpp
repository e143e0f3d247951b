#include "finsler/length_space.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double segment_distance(const NullSet::Segment& s, const Vec3& p) {
  const Vec3 d = s.b - s.a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - s.a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (p - (s.a + t * d)).norm();
}

double circle_distance(const NullSet::Circle& c, const Vec3& p) {
  const Vec3 w = p - c.center;
  const Vec3 along = w.dot(c.normal) * c.normal;
  const Vec3 in_plane = w - along;
  const double r = in_plane.norm();
  if (r == 0.0) return std::sqrt(c.radius * c.radius + along.squaredNorm());
  return (w - c.radius * in_plane / r).norm();
}

double sphere_distance(const Vec3& x, const Vec3& y) { return std::atan2(x.cross(y).norm(), x.dot(y)); }

double circular_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2 * std::numbers::pi);
  return std::min(d, 2 * std::numbers::pi - d);
}

template <class F>
double golden_minimize(F&& f, double lo, double hi, double& arg, int iterations = 40) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  arg = fc < fd ? c : d;
  return std::min(fc, fd);
}

}  // namespace

NullSet& NullSet::add_segment(const Vec3& a, const Vec3& b) {
  segments_.push_back({a, b});
  return *this;
}

NullSet& NullSet::add_circle(const Vec3& center, const Vec3& normal, double radius) {
  if (!(normal.norm() > 0) || !(radius > 0)) throw std::invalid_argument("NullSet: circle needs a normal and radius > 0");
  circles_.push_back({center, normal.normalized(), radius});
  return *this;
}

double NullSet::distance(const Vec3& p) const {
  double best = kInf;
  for (const auto& s : segments_) best = std::min(best, segment_distance(s, p));
  for (const auto& c : circles_) best = std::min(best, circle_distance(c, p));
  return best;
}

double null_set_tolerance(const PolyhedralSurface& surface) {
  Vec3 lo = surface.vertices()[0], hi = lo;
  for (const Vec3& v : surface.vertices()) lo = lo.cwiseMin(v), hi = hi.cwiseMax(v);
  return 1e-9 * std::max((hi - lo).norm(), 1e-300);
}

SegmentFilter null_set_filter(const SteinerGraph& graph, const NullSet& null_set, double tol) {
  if (null_set.empty()) return {};
  auto near = std::make_shared<std::vector<char>>(graph.node_count());
  for (std::size_t i = 0; i < graph.node_count(); ++i)
    (*near)[i] = null_set.distance(graph.position(static_cast<int>(i))) <= tol;
  const SteinerGraph* g = &graph;
  return [near, g, null_set, tol](int a, int b) {
    if (!(*near)[a] || !(*near)[b]) return false;
    const Vec3 pa = g->position(a), pb = g->position(b), mid = 0.5 * (pa + pb);
    for (const auto& s : null_set.segments())
      if (segment_distance(s, pa) <= tol && segment_distance(s, pb) <= tol && segment_distance(s, mid) <= tol)
        return true;
    for (const auto& c : null_set.circles())
      if (circle_distance(c, pa) <= tol && circle_distance(c, pb) <= tol && circle_distance(c, mid) <= tol) return true;
    return false;
  };
}

namespace {

SurfaceDistance search(const SteinerGraph& graph, const Vec3& p, const Vec3& q, const SegmentFilter& filter) {
  SurfaceDistance out;
  out.level = graph.level();
  out.source_node = graph.nearest_node(p);
  out.target_node = graph.nearest_node(q);
  out.snap_error = std::max((graph.position(out.source_node) - p).norm(), (graph.position(out.target_node) - q).norm());
  out.value = shortest_path(graph, out.source_node, out.target_node, filter);
  out.reachable = std::isfinite(out.value);
  if (out.snap_error > 0.5 * graph.surface().min_edge_length())
    out.diagnostic = "query point lies farther than half an edge from the mesh";
  if (!out.reachable) {
    auto isolated = [&](int node) {
      bool any = false;
      graph.for_each_neighbor(node, [&](int other) { any = any || !filter || !filter(node, other); });
      return !any;
    };
    out.diagnostic = filter && (isolated(out.source_node) || isolated(out.target_node))
                         ? "endpoint isolated by the null set"
                         : "endpoints lie in different components";
  }
  return out;
}

}  // namespace

SurfaceDistance graph_distance(const SteinerGraph& graph, const Vec3& p, const Vec3& q) {
  return search(graph, p, q, {});
}

SurfaceDistance graph_distance(const PolyhedralSurface& surface, const Vec3& p, const Vec3& q, int level) {
  return graph_distance(SteinerGraph(surface, level), p, q);
}

SurfaceDistance essential_distance(const SteinerGraph& graph, const Vec3& p, const Vec3& q, const NullSet& null_set) {
  return search(graph, p, q, null_set_filter(graph, null_set, null_set_tolerance(graph.surface())));
}

SurfaceDistance essential_distance(const PolyhedralSurface& surface, const Vec3& p, const Vec3& q,
                                   const NullSet& null_set, int level) {
  return essential_distance(SteinerGraph(surface, level), p, q, null_set);
}

Mat DistanceOracle::distance_matrix(const std::vector<Vec3>& points) const {
  const int n = static_cast<int>(points.size());
  Mat M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = distance(points[i], points[j]);
  return M;
}

double GreatCircleOracle::distance(const Vec3& x, const Vec3& y) const {
  return sphere_distance(x.normalized(), y.normalized());
}

ShortcutSphereOracle::ShortcutSphereOracle(const Vec3& normal, int circle_samples) : samples_(circle_samples) {
  if (circle_samples < 16) throw std::invalid_argument("ShortcutSphereOracle: need at least 16 circle samples");
  if (!(normal.norm() > 0)) throw std::invalid_argument("ShortcutSphereOracle: zero normal");
  normal_ = normal.normalized();
  Vec3 axis = Vec3::Zero();
  int k = 0;
  normal_.cwiseAbs().minCoeff(&k);
  axis(k) = 1.0;
  u_ = (axis - axis.dot(normal_) * normal_).normalized();
  v_ = normal_.cross(u_);
}

Vec3 ShortcutSphereOracle::circle_point(double theta) const { return std::cos(theta) * u_ + std::sin(theta) * v_; }

double ShortcutSphereOracle::distance_to_circle(const Vec3& x) const {
  const Vec3 p = x.normalized();
  const double h = p.dot(normal_);
  return std::atan2(std::abs(h), (p - h * normal_).norm());
}

double ShortcutSphereOracle::tolerance() const {
  const double step = 2 * std::numbers::pi / samples_;
  return step * step;
}

double ShortcutSphereOracle::distance(const Vec3& x_in, const Vec3& y_in) const {
  const Vec3 x = x_in.normalized(), y = y_in.normalized();
  const double direct = sphere_distance(x, y);
  const double ax = distance_to_circle(x), ay = distance_to_circle(y);
  // Any shortcut costs at least the two approaches to C.
  if (direct <= ax + ay) return direct;

  const int S = samples_;
  const double step = 2 * std::numbers::pi / S;
  std::vector<double> A(S), B(S), T(S);
  std::vector<int> from(S);
  for (int j = 0; j < S; ++j) {
    const Vec3 c = circle_point(j * step);
    A[j] = sphere_distance(x, c);
    B[j] = sphere_distance(y, c);
    T[j] = A[j];
    from[j] = j;
  }
  // Slope-1/2 lower envelope around the cycle: T_k = min_j A_j + gap(j, k) / 2.
  const double slope = 0.5 * step;
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 1; i <= S; ++i) {
      const int k = i % S, prev = (i - 1) % S;
      if (T[prev] + slope < T[k]) T[k] = T[prev] + slope, from[k] = from[prev];
    }
    for (int i = S - 1; i >= 0; --i) {
      const int k = i, next = (i + 1) % S;
      if (T[next] + slope < T[k]) T[k] = T[next] + slope, from[k] = from[next];
    }
  }
  int best = 0;
  for (int k = 1; k < S; ++k)
    if (T[k] + B[k] < T[best] + B[best]) best = k;

  double t1 = from[best] * step, t2 = best * step;
  auto objective = [&](double a, double b) {
    return sphere_distance(x, circle_point(a)) + 0.5 * circular_gap(a, b) + sphere_distance(y, circle_point(b));
  };
  double value = objective(t1, t2);
  for (int round = 0; round < 3; ++round) {
    double arg = t1;
    value = std::min(value, golden_minimize([&](double a) { return objective(a, t2); }, t1 - step, t1 + step, arg));
    if (objective(arg, t2) <= objective(t1, t2)) t1 = arg;
    value = std::min(value, golden_minimize([&](double b) { return objective(t1, b); }, t2 - step, t2 + step, arg));
    if (objective(t1, arg) <= objective(t1, t2)) t2 = arg;
  }
  return std::min(direct, value);
}

SurfaceOracle::SurfaceOracle(std::shared_ptr<const PolyhedralSurface> surface, int level, NullSet null_set,
                             std::string name)
    : surface_(std::move(surface)), graph_(*surface_, level), null_set_(std::move(null_set)), name_(std::move(name)) {
  filter_ = null_set_filter(graph_, null_set_, null_set_tolerance(*surface_));
}

int SurfaceOracle::node(const Vec3& p) const { return graph_.nearest_node(p); }

const std::vector<double>& SurfaceOracle::tree(int source) const {
  auto it = trees_.find(source);
  if (it == trees_.end()) it = trees_.emplace(source, shortest_paths(graph_, source, filter_).distance).first;
  return it->second;
}

double SurfaceOracle::distance(const Vec3& x, const Vec3& y) const {
  const int s = node(x), t = node(y);
  if (s == t) return 0.0;
  if (auto it = trees_.find(s); it != trees_.end()) return it->second[t];
  if (auto it = trees_.find(t); it != trees_.end()) return it->second[s];
  return shortest_path(graph_, s, t, filter_);
}

Mat SurfaceOracle::distance_matrix(const std::vector<Vec3>& points) const {
  const int n = static_cast<int>(points.size());
  std::vector<int> nodes(n);
  for (int i = 0; i < n; ++i) nodes[i] = node(points[i]);
  Mat M(n, n);
  for (int i = 0; i < n; ++i) {
    const std::vector<double>& d = tree(nodes[i]);
    for (int j = 0; j < n; ++j) M(i, j) = d[nodes[j]];
  }
  return M;
}

double AsymmetricOracle::distance(const Vec3& x, const Vec3& y) const {
  const bool before = std::lexicographical_compare(x.data(), x.data() + 3, y.data(), y.data() + 3);
  return base_->distance(x, y) * (before ? factor_ : 1.0);
}

MetricAxiomReport check_metric_axioms(const DistanceOracle& oracle, const std::vector<Vec3>& points, int triples,
                                      double tol, std::uint64_t seed) {
  MetricAxiomReport r;
  const int n = static_cast<int>(points.size());
  r.points = n;
  if (n == 0) return r;
  const Mat M = oracle.distance_matrix(points);
  for (int i = 0; i < n; ++i) {
    if (std::abs(M(i, i)) > tol) {
      ++r.identity_violations;
      if (!r.witness) r.witness = std::array<int, 3>{i, i, i};
    }
    for (int j = i + 1; j < n; ++j) {
      if (M(i, j) < -tol || M(j, i) < -tol) ++r.identity_violations;
      const double gap = std::abs(M(i, j) - M(j, i));
      r.worst_asymmetry = std::max(r.worst_asymmetry, gap);
      if (gap > tol) {
        ++r.symmetry_violations;
        if (!r.witness) r.witness = std::array<int, 3>{i, j, i};
      }
    }
  }
  Rng rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int t = 0; t < triples; ++t) {
    const int i = pick(rng), j = pick(rng), k = pick(rng);
    const double excess = M(i, k) - M(i, j) - M(j, k);
    r.worst_triangle_excess = std::max(r.worst_triangle_excess, excess);
    if (excess > tol) {
      ++r.triangle_violations;
      if (!r.witness) r.witness = std::array<int, 3>{i, j, k};
    }
    ++r.triples;
  }
  r.passed = r.symmetry_violations == 0 && r.identity_violations == 0 && r.triangle_violations == 0;
  return r;
}

LipschitzProfile lipschitz_profile(const DistanceOracle& source, const DistanceOracle& target,
                                   const std::function<Vec3(const Vec3&)>& map, const std::vector<Vec3>& points,
                                   int max_pairs, std::uint64_t seed) {
  LipschitzProfile prof;
  const int n = static_cast<int>(points.size());
  std::vector<Vec3> mapped;
  mapped.reserve(n);
  for (const Vec3& p : points) mapped.push_back(map(p));
  auto record = [&](int i, int j, double ds, double dt) {
    if (!(ds > 1e-15)) return;
    const double ratio = dt / ds;
    ++prof.pairs;
    if (ratio > prof.max_ratio) prof.max_ratio = ratio, prof.argmax = {i, j};
    if (ratio < prof.min_ratio) prof.min_ratio = ratio, prof.argmin = {i, j};
  };
  const long all_pairs = static_cast<long>(n) * (n - 1) / 2;
  if (all_pairs <= max_pairs) {
    const Mat S = source.distance_matrix(points), T = target.distance_matrix(mapped);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) record(i, j, S(i, j), T(i, j));
  } else {
    Rng rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int k = 0; k < max_pairs; ++k) {
      const int i = pick(rng), j = pick(rng);
      if (i == j) continue;
      record(i, j, source.distance(points[i], points[j]), target.distance(mapped[i], mapped[j]));
    }
  }
  if (prof.pairs == 0) prof.min_ratio = 0.0;
  return prof;
}

std::vector<Vec3> random_sphere_points(int count, Rng& rng, const Vec3& avoid_normal, double margin) {
  std::vector<Vec3> out;
  const bool avoid = avoid_normal.norm() > 0 && margin > 0;
  const Vec3 n = avoid ? Vec3(avoid_normal.normalized()) : Vec3::UnitZ();
  const double band = std::sin(margin);
  if (avoid && band >= 1.0) throw std::invalid_argument("random_sphere_points: margin leaves no room");
  while (static_cast<int>(out.size()) < count) {
    const Vec p = random_unit_vector(3, rng);
    const Vec3 q(p(0), p(1), p(2));
    if (avoid && std::abs(q.dot(n)) < band) continue;
    out.push_back(q);
  }
  return out;
}

std::vector<Vec3> random_zigzag_points(int count, Rng& rng, int n_max, double extent) {
  std::uniform_real_distribution<double> unif(-extent, extent);
  std::vector<Vec3> out;
  for (int i = 0; i < count; ++i) {
    const double x = unif(rng), y = unif(rng);
    out.emplace_back(x, y, zigzag_height(x, y, n_max));
  }
  return out;
}

Chart zigzag_chart(int n_max, double extent) {
  return graph_chart([n_max](const Vec& p) { return zigzag_height(p(0), p(1), n_max); }, zigzag_height_lipschitz(),
                     Box::cube(2, -extent, extent));
}

void write_distances_csv(std::ostream& out, const std::vector<DistanceRow>& rows) {
  out << "source,target,value,level\n" << std::setprecision(17);
  for (const DistanceRow& r : rows) out << r.source << ',' << r.target << ',' << r.value << ',' << r.level << '\n';
}

}  // namespace finsler
