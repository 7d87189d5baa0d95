#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tsspl/discrete.hpp"
#include "tsspl/random.hpp"
#include "tsspl/types.hpp"

namespace tsspl {

/// Range of guard truthfulness levels. With `open_low` the lower end is
/// excluded and levels are lo + (hi - lo)(j + 1)/n, which is how the
/// informative prior over (0.5, 1] is discretized.
struct TruthRange {
  double lo = 0.0;
  double hi = 1.0;
  bool open_low = false;

  static constexpr TruthRange full() { return {0.0, 1.0, false}; }
  static constexpr TruthRange informative() { return {0.5, 1.0, true}; }
  static constexpr TruthRange single(double t) { return {t, t, false}; }
};

inline std::vector<double> truth_levels(std::size_t n, TruthRange range) {
  if (n == 0) throw std::invalid_argument("truth grid needs at least one level");
  if (!(range.lo >= 0.0 && range.hi <= 1.0 && range.lo <= range.hi)) {
    throw std::invalid_argument("truth range must lie inside [0, 1]");
  }
  if (n > 1 && range.lo == range.hi) {
    throw std::invalid_argument("degenerate truth range needs exactly one level");
  }
  if (!range.open_low) return linspace(range.lo, range.hi, n);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = range.lo + (range.hi - range.lo) * static_cast<double>(j + 1) / static_cast<double>(n);
  }
  out.back() = range.hi;
  return out;
}

/// Joint posterior over (door, truthfulness) pairs.
///
/// Weights are stored row-major, one row per door. Every mutating call
/// renormalizes, so the total is 1 after each update. The door marginal is
/// maintained alongside the weights since every policy reads it each step.
class SolutionGrid {
 public:
  /// Uniform weights over the given supports.
  SolutionGrid(std::vector<double> doors, std::vector<double> truths)
      : doors_(std::move(doors)), truths_(std::move(truths)) {
    if (doors_.empty()) throw std::invalid_argument("door grid is empty");
    if (truths_.empty()) throw std::invalid_argument("truth grid is empty");
    if (std::adjacent_find(doors_.begin(), doors_.end(), std::greater_equal<>{}) != doors_.end()) {
      throw std::invalid_argument("door positions must be strictly increasing");
    }
    if (std::adjacent_find(truths_.begin(), truths_.end(), std::greater_equal<>{}) != truths_.end()) {
      throw std::invalid_argument("truth levels must be strictly increasing");
    }
    for (double t : truths_) {
      if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("truth level outside [0, 1]");
    }
    complements_.resize(truths_.size());
    std::transform(truths_.begin(), truths_.end(), complements_.begin(),
                   [](double t) { return 1.0 - t; });
    const double w = 1.0 / static_cast<double>(doors_.size() * truths_.size());
    weights_.assign(doors_.size() * truths_.size(), w);
    door_mass_.assign(doors_.size(), 1.0 / static_cast<double>(doors_.size()));
  }

  /// Evenly spaced doors on [0, 1] and evenly spaced truth levels, all pairs
  /// equally likely.
  static SolutionGrid uniform(std::size_t num_doors, std::size_t num_truth_levels,
                              TruthRange range = TruthRange::full()) {
    if (num_doors < 2) throw std::invalid_argument("door grid needs at least two doors");
    return SolutionGrid(door_positions(num_doors), truth_levels(num_truth_levels, range));
  }

  /// Product prior P(d) P(t), normalized. D and T are independent a priori.
  [[nodiscard]] SolutionGrid with_prior(std::span<const double> door_prior,
                                        std::span<const double> truth_prior) const {
    if (door_prior.size() != doors_.size() || truth_prior.size() != truths_.size()) {
      throw std::invalid_argument("prior length does not match grid");
    }
    auto check = [](std::span<const double> p, const char* what) {
      double s = 0.0;
      for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw std::invalid_argument(std::string(what) + " prior has a negative or non-finite entry");
        }
        s += v;
      }
      if (!(s > 0.0)) throw std::invalid_argument(std::string(what) + " prior has zero mass");
    };
    check(door_prior, "door");
    check(truth_prior, "truth");

    SolutionGrid out = *this;
    const std::size_t nt = truths_.size();
    for (std::size_t i = 0; i < doors_.size(); ++i) {
      for (std::size_t j = 0; j < nt; ++j) out.weights_[i * nt + j] = door_prior[i] * truth_prior[j];
    }
    out.renormalize();
    return out;
  }

  /// Multiplies every cell by P(answer | door, t) and renormalizes.
  ///
  /// Doors left of the query see "Left" with probability t, doors right of it
  /// with probability 1 - t. A door exactly at the query position is
  /// answer-neutral (0.5). Guard queries lie strictly inside (0, 1); door
  /// queries may sit on the endpoint doors.
  void update(const QueryPoint& query, Direction answer) {
    const double x = query.position;
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("query position must lie in [0, 1]");

    const bool left = answer == Direction::Left;
    const std::vector<double>& below = left ? truths_ : complements_;
    const std::vector<double>& above = left ? complements_ : truths_;
    const std::size_t nt = truths_.size();

    const auto first_not_below = std::lower_bound(doors_.begin(), doors_.end(), x);
    const auto first_above = std::upper_bound(first_not_below, doors_.end(), x);
    const auto lo = static_cast<std::size_t>(first_not_below - doors_.begin());
    const auto hi = static_cast<std::size_t>(first_above - doors_.begin());

    double total = 0.0;
    for (std::size_t i = 0; i < doors_.size(); ++i) {
      double* row = weights_.data() + i * nt;
      double s = 0.0;
      if (i >= lo && i < hi) {
        for (std::size_t j = 0; j < nt; ++j) {
          row[j] *= 0.5;
          s += row[j];
        }
      } else {
        const double* f = (i < lo ? below : above).data();
        for (std::size_t j = 0; j < nt; ++j) {
          row[j] *= f[j];
          s += row[j];
        }
      }
      door_mass_[i] = s;
      total += s;
    }
    scale(total);
  }

  [[nodiscard]] SolutionGrid updated(const QueryPoint& query, Direction answer) const {
    SolutionGrid out = *this;
    out.update(query, answer);
    return out;
  }

  /// P(d | answers): row sums.
  [[nodiscard]] const std::vector<double>& door_marginal() const noexcept { return door_mass_; }

  /// P(t | answers): column sums.
  [[nodiscard]] std::vector<double> truth_marginal() const {
    const std::size_t nt = truths_.size();
    std::vector<double> out(nt, 0.0);
    for (std::size_t i = 0; i < doors_.size(); ++i) {
      const double* row = weights_.data() + i * nt;
      for (std::size_t j = 0; j < nt; ++j) out[j] += row[j];
    }
    return out;
  }

  /// Door mass inside the closed interval [lo, hi] (see interval_mass for
  /// the endpoint slack).
  [[nodiscard]] double mass_in_interval(double lo, double hi) const {
    return interval_mass(doors_, door_mass_, lo, hi);
  }

  /// Draws (door index, truth index) with probability equal to its weight.
  /// Consumes two uniform draws: one picks the row, one the cell within it.
  [[nodiscard]] std::pair<std::size_t, std::size_t> sample_joint(Rng& rng) const {
    const std::size_t i = sample_index(door_mass_, rng);
    const std::size_t nt = truths_.size();
    const std::size_t j =
        sample_index(std::span<const double>(weights_.data() + i * nt, nt), rng);
    return {i, j};
  }

  [[nodiscard]] double weight(std::size_t door, std::size_t truth) const {
    return weights_.at(door * truths_.size() + truth);
  }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] const std::vector<double>& doors() const noexcept { return doors_; }
  [[nodiscard]] const std::vector<double>& truths() const noexcept { return truths_; }
  [[nodiscard]] std::size_t num_doors() const noexcept { return doors_.size(); }
  [[nodiscard]] std::size_t num_truths() const noexcept { return truths_.size(); }

  /// (door, truth, weight) triples, one per line.
  void write_csv(std::ostream& os) const {
    os << "door,truth,weight\n";
    const std::size_t nt = truths_.size();
    char buf[96];
    for (std::size_t i = 0; i < doors_.size(); ++i) {
      for (std::size_t j = 0; j < nt; ++j) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.17g\n", doors_[i], truths_[j],
                      weights_[i * nt + j]);
        os << buf;
      }
    }
  }

 private:
  void renormalize() {
    const std::size_t nt = truths_.size();
    double total = 0.0;
    for (std::size_t i = 0; i < doors_.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < nt; ++j) s += weights_[i * nt + j];
      door_mass_[i] = s;
      total += s;
    }
    scale(total);
  }

  // Divides by `total`; cells that drop below the smallest normal double are
  // set to zero to keep the arithmetic out of the subnormal range.
  void scale(double total) {
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw std::domain_error("posterior has no remaining mass; every hypothesis was ruled out");
    }
    const double inv = 1.0 / total;
    for (double& w : weights_) {
      w *= inv;
      w = w < DBL_MIN ? 0.0 : w;
    }
    for (double& m : door_mass_) m *= inv;
  }

  std::vector<double> doors_;
  std::vector<double> truths_;
  std::vector<double> complements_;
  std::vector<double> weights_;
  std::vector<double> door_mass_;
};

/// Gaussian-shaped prior weights exp(-(x - mu)^2 / (2 sigma^2)) at each point.
inline std::vector<double> gaussian_weights(std::span<const double> points, double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("prior sigma must be positive");
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double z = (points[i] - mu) / sigma;
    out[i] = std::exp(-0.5 * z * z);
  }
  return out;
}

}  // namespace tsspl
