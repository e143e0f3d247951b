#include "finsler/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "finsler/errors.hpp"

namespace finsler {

DiscreteMeasure::DiscreteMeasure(int dim) : dim_(dim) {
  if (dim < 1) throw DimensionError("DiscreteMeasure: dimension must be positive");
}

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<Atom> atoms) : DiscreteMeasure(dim) {
  for (auto& a : atoms) add(a.point, a.weight);
}

void DiscreteMeasure::add(const Vec& point, double weight) {
  if (point.size() != dim_) throw DimensionError("DiscreteMeasure::add: dimension mismatch");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw std::invalid_argument("DiscreteMeasure::add: weight must be positive");
  if (!point.allFinite()) throw std::invalid_argument("DiscreteMeasure::add: non-finite point");
  atoms_.push_back({point, weight});
  total_mass_ += weight;
}

std::vector<double> radii(const RadiusSchedule& s) {
  if (!(s.r_min > 0.0) || !(s.r_max >= s.r_min) || s.count < 1)
    throw std::invalid_argument("RadiusSchedule: need 0 < r_min <= r_max and count >= 1");
  std::vector<double> out;
  if (s.count == 1) return {s.r_min};
  const double ratio = std::log(s.r_max / s.r_min) / (s.count - 1);
  for (int i = 0; i < s.count; ++i) out.push_back(s.r_min * std::exp(ratio * i));
  return out;
}

MaximalValue maximal_function(const DiscreteMeasure& mu, const Vec& x, const RadiusSchedule& schedule) {
  if (x.size() != mu.dim()) throw DimensionError("maximal_function: dimension mismatch");
  MaximalValue out;
  if (mu.empty()) return out;
  const int m = mu.dim();
  const double alpha = unit_ball_volume(m);

  std::vector<std::pair<double, double>> dist;  // (distance, weight)
  dist.reserve(mu.atoms().size());
  for (const Atom& a : mu.atoms()) {
    const double d = (a.point - x).norm();
    if (d == 0.0) {
      out.value = std::numeric_limits<double>::infinity();
      out.unbounded = true;
      return out;
    }
    dist.emplace_back(d, a.weight);
  }
  std::sort(dist.begin(), dist.end());

  // Between consecutive atom distances the ball mass is constant and r^m grows, so the
  // supremum is attained at an atom distance; grid radii are evaluated as well.
  std::vector<double> candidates = radii(schedule);
  for (const auto& [d, w] : dist) candidates.push_back(d);
  std::sort(candidates.begin(), candidates.end());
  std::size_t next = 0;
  double mass = 0.0;
  for (double r : candidates) {
    while (next < dist.size() && dist[next].first <= r) mass += dist[next++].second;
    const double ratio = mass / (alpha * std::pow(r, m));
    if (ratio > out.value) {
      out.value = ratio;
      out.radius = r;
    }
  }
  return out;
}

DiscreteMeasure pushforward(const DiscreteMeasure& mu, const std::function<Vec(const Vec&)>& map) {
  std::vector<Atom> mapped;
  int dim = -1;
  for (const Atom& a : mu.atoms()) {
    Vec y;
    try {
      y = map(a.point);
    } catch (const std::exception& e) {
      throw GeometryError(std::string("pushforward: map failed on an atom: ") + e.what());
    }
    if (y.size() == 0 || !y.allFinite()) throw GeometryError("pushforward: map returned an invalid point");
    if (dim < 0) dim = static_cast<int>(y.size());
    if (y.size() != dim) throw DimensionError("pushforward: map output dimension varies");
    mapped.push_back({y, a.weight});
  }
  // Merge coincident images, keeping first-seen order.
  auto less = [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  };
  std::map<Vec, std::size_t, decltype(less)> index(less);
  std::vector<Atom> merged;
  for (auto& a : mapped) {
    auto [it, inserted] = index.try_emplace(a.point, merged.size());
    if (inserted)
      merged.push_back(a);
    else
      merged[it->second].weight += a.weight;
  }
  return DiscreteMeasure(dim < 0 ? mu.dim() : dim, std::move(merged));
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

DiscreteMeasure read_measure_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  int dim = -1;
  std::vector<Atom> atoms;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto fields = split_fields(line);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && parse_double(fields[i], values[i]);
    if (!numeric) {
      if (!seen_row) {
        seen_row = true;  // header
        continue;
      }
      throw std::runtime_error("measure CSV line " + std::to_string(line_no) + ": non-numeric field");
    }
    seen_row = true;
    if (values.size() < 2)
      throw std::runtime_error("measure CSV line " + std::to_string(line_no) + ": need coordinates and a weight");
    const int m = static_cast<int>(values.size()) - 1;
    if (dim < 0) dim = m;
    if (m != dim)
      throw std::runtime_error("measure CSV line " + std::to_string(line_no) + ": expected " + std::to_string(dim + 1) +
                               " fields");
    Atom a;
    a.point = Eigen::Map<const Vec>(values.data(), m);
    a.weight = values.back();
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw std::runtime_error("measure CSV line " + std::to_string(line_no) + ": weight must be positive");
    atoms.push_back(std::move(a));
  }
  if (dim < 0) throw std::runtime_error("measure CSV: no atoms");
  return DiscreteMeasure(dim, std::move(atoms));
}

DiscreteMeasure read_measure_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open measure CSV '" + path + "'");
  return read_measure_csv(in);
}

}  // namespace finsler
