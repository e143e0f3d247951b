#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "finsler/sampling.hpp"

namespace finsler {

struct Atom {
  Vec point;
  double weight = 0.0;
};

// Finite positive combination of point masses in R^m.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(int dim);
  DiscreteMeasure(int dim, std::vector<Atom> atoms);

  // Throws std::invalid_argument for non-positive or non-finite weights.
  void add(const Vec& point, double weight);

  int dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const { return total_mass_; }
  bool empty() const { return atoms_.empty(); }

 private:
  int dim_;
  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
};

// Geometric radius grid; the maximal function augments it with the exact atom distances.
struct RadiusSchedule {
  double r_min = 1e-3;
  double r_max = 1e3;
  int count = 61;
};

std::vector<double> radii(const RadiusSchedule& schedule);

struct MaximalValue {
  double value = 0.0;
  bool unbounded = false;  // x carries an atom: the ratio diverges as r -> 0
  double radius = 0.0;     // radius attaining the maximum
};

// sup_r mu(closed ball(x, r)) / (alpha_m r^m). Exact for discrete measures.
MaximalValue maximal_function(const DiscreteMeasure& mu, const Vec& x, const RadiusSchedule& schedule = {});

// Atoms mapped pointwise, weights kept; atoms landing on the same point are merged.
// Throws GeometryError when the map fails or returns a non-finite point.
DiscreteMeasure pushforward(const DiscreteMeasure& mu, const std::function<Vec(const Vec&)>& map);

// Weighted point cloud CSV: one atom per line, coordinates then weight. An optional header
// line and '#' comments are skipped. Throws std::runtime_error with the line number on bad input.
DiscreteMeasure read_measure_csv(std::istream& in);
DiscreteMeasure read_measure_csv(const std::string& path);

}  // namespace finsler
