#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdinsert {

/// Absolute tolerance, in seconds, for every time/weight comparison.
inline constexpr double kTimeEps = 1e-9;
/// Tolerance used when dropping collinear interior breakpoints.
inline constexpr double kCollinearEps = 1e-12;
inline constexpr std::size_t kDefaultMaxPoints = 100000;

class PwlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Breakpoint {
  double t;  // departure time, seconds of day
  double w;  // travel time, seconds

  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Piecewise-linear travel-time function over [t_1, t_k].
///
/// Evaluation interpolates between bracketing breakpoints and clamps to the
/// first/last weight outside the domain. Values are immutable once built.
class PwlFunction {
 public:
  /// Validates strictly increasing times and non-negative weights.
  explicit PwlFunction(std::vector<Breakpoint> points);

  static PwlFunction constant(double value, double t_lo, double t_hi);
  static PwlFunction zero(double t_lo, double t_hi) {
    return constant(0.0, t_lo, t_hi);
  }

  double eval(double t) const;
  double arrival(double t) const { return t + eval(t); }

  std::span<const Breakpoint> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double domain_begin() const { return points_.front().t; }
  double domain_end() const { return points_.back().t; }
  double min_weight() const;
  double max_weight() const;

  friend bool operator==(const PwlFunction&, const PwlFunction&) = default;

 private:
  struct Unchecked {};
  PwlFunction(Unchecked, std::vector<Breakpoint> points)
      : points_(std::move(points)) {}

  friend PwlFunction make_compacted(std::vector<Breakpoint>, std::size_t);

  std::vector<Breakpoint> points_;
};

/// Composition: h(t) = g(t + f(t)) + f(t), on f's domain.
/// Throws PwlError when either input violates FIFO or the result would
/// exceed `max_points` breakpoints.
PwlFunction link(const PwlFunction& f, const PwlFunction& g,
                 std::size_t max_points = kDefaultMaxPoints);

/// Pointwise minimum on the intersection of both domains.
PwlFunction merge(const PwlFunction& f, const PwlFunction& g,
                  std::size_t max_points = kDefaultMaxPoints);

/// Largest departure time t >= domain_begin() with t + f(t) <= deadline.
///
/// Past the domain end f is constant, so the answer may exceed
/// domain_end(). Returns nullopt when even the earliest departure is late.
std::optional<double> latest_departure(const PwlFunction& f, double deadline);

/// True iff every segment has slope >= -1 (non-decreasing arrival).
bool fifo_check(const PwlFunction& f);

/// Raises offending weights to w_i - (t_{i+1} - t_i) so the result is FIFO.
PwlFunction fifo_repair(const PwlFunction& f);

/// Cuts f to [t_lo, t_hi], inserting interpolated endpoints.
PwlFunction restrict_domain(const PwlFunction& f, double t_lo, double t_hi);

/// Removes interior breakpoints collinear with their neighbours.
PwlFunction compact(const PwlFunction& f);

std::string to_string(const PwlFunction& f);

}  // namespace tdinsert
