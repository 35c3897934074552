#include "tdinsert/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tdinsert {

namespace {

double interpolate(const Breakpoint& a, const Breakpoint& b, double t) {
  return a.w + (t - a.t) * ((b.w - a.w) / (b.t - a.t));
}

void check_size(std::size_t size, std::size_t max_points) {
  if (size > max_points) {
    throw PwlError("piecewise-linear function exceeds " +
                   std::to_string(max_points) + " breakpoints");
  }
}

void require_fifo(const PwlFunction& f, const char* what) {
  if (!fifo_check(f)) {
    throw PwlError(std::string(what) + " violates FIFO: " + to_string(f));
  }
}

// Every dropped point in (anchor, candidate) must stay within tolerance of
// the chord that replaces it.
bool chord_covers(const std::vector<Breakpoint>& pts, std::size_t anchor,
                  std::size_t candidate) {
  const auto& a = pts[anchor];
  const auto& b = pts[candidate];
  for (std::size_t m = anchor + 1; m < candidate; ++m) {
    if (std::abs(interpolate(a, b, pts[m].t) - pts[m].w) > kCollinearEps) {
      return false;
    }
  }
  return true;
}

}  // namespace

PwlFunction make_compacted(std::vector<Breakpoint> pts,
                           std::size_t max_points) {
  for (auto& p : pts) {
    // Rounding in composition can leave -1e-15 style residue.
    if (p.w < 0.0 && p.w > -kTimeEps) p.w = 0.0;
  }
  if (pts.size() > 2) {
    std::vector<Breakpoint> out;
    out.reserve(pts.size());
    std::size_t anchor = 0;
    std::vector<Breakpoint> src = std::move(pts);
    out.push_back(src.front());
    for (std::size_t m = 1; m + 1 < src.size(); ++m) {
      if (chord_covers(src, anchor, m + 1)) continue;
      out.push_back(src[m]);
      anchor = m;
    }
    out.push_back(src.back());
    pts = std::move(out);
  }
  check_size(pts.size(), max_points);
  return PwlFunction(PwlFunction::Unchecked{}, std::move(pts));
}

PwlFunction::PwlFunction(std::vector<Breakpoint> points)
    : points_(std::move(points)) {
  if (points_.empty()) {
    throw PwlError("piecewise-linear function needs at least one breakpoint");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.t) || !std::isfinite(p.w)) {
      throw PwlError("non-finite breakpoint");
    }
    if (p.w < 0.0) throw PwlError("negative travel time in breakpoint");
    if (i > 0 && !(points_[i - 1].t < p.t)) {
      throw PwlError("non-increasing breakpoint times");
    }
  }
}

PwlFunction PwlFunction::constant(double value, double t_lo, double t_hi) {
  if (t_lo == t_hi) return PwlFunction({{t_lo, value}});
  return PwlFunction({{t_lo, value}, {t_hi, value}});
}

double PwlFunction::eval(double t) const {
  if (t <= points_.front().t) return points_.front().w;
  if (t >= points_.back().t) return points_.back().w;
  auto hi = std::upper_bound(
      points_.begin(), points_.end(), t,
      [](double value, const Breakpoint& p) { return value < p.t; });
  return interpolate(*(hi - 1), *hi, t);
}

double PwlFunction::min_weight() const {
  return std::min_element(points_.begin(), points_.end(),
                          [](auto& a, auto& b) { return a.w < b.w; })
      ->w;
}

double PwlFunction::max_weight() const {
  return std::max_element(points_.begin(), points_.end(),
                          [](auto& a, auto& b) { return a.w < b.w; })
      ->w;
}

bool fifo_check(const PwlFunction& f) {
  const auto pts = f.points();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a0 = pts[i].t + pts[i].w;
    const double a1 = pts[i + 1].t + pts[i + 1].w;
    if (a1 < a0 - kTimeEps) return false;
  }
  return true;
}

PwlFunction fifo_repair(const PwlFunction& f) {
  std::vector<Breakpoint> pts(f.points().begin(), f.points().end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double floor = pts[i].w - (pts[i + 1].t - pts[i].t);
    if (pts[i + 1].w < floor) pts[i + 1].w = floor;
  }
  return PwlFunction(std::move(pts));
}

PwlFunction link(const PwlFunction& f, const PwlFunction& g,
                 std::size_t max_points) {
  require_fifo(f, "first link operand");
  require_fifo(g, "second link operand");

  const auto fp = f.points();
  const auto gp = g.points();
  std::vector<Breakpoint> out;
  out.reserve(fp.size() + gp.size());

  // g's breakpoints strictly above the arrival at f's first point.
  std::size_t gi = 0;
  const double first_arrival = fp.front().t + fp.front().w;
  while (gi < gp.size() && gp[gi].t <= first_arrival) ++gi;

  out.push_back({fp.front().t, g.eval(first_arrival) + fp.front().w});
  for (std::size_t i = 0; i + 1 < fp.size(); ++i) {
    const Breakpoint& a = fp[i];
    const Breakpoint& b = fp[i + 1];
    const double arr_a = a.t + a.w;
    const double arr_b = b.t + b.w;
    if (arr_b > arr_a) {
      for (; gi < gp.size() && gp[gi].t < arr_b; ++gi) {
        if (gp[gi].t <= arr_a) continue;
        const double t = a.t + (gp[gi].t - arr_a) * ((b.t - a.t) / (arr_b - arr_a));
        if (t <= out.back().t || t >= b.t) continue;
        out.push_back({t, gp[gi].w + interpolate(a, b, t)});
      }
    }
    while (gi < gp.size() && gp[gi].t <= arr_b) ++gi;
    out.push_back({b.t, g.eval(arr_b) + b.w});
  }
  return make_compacted(std::move(out), max_points);
}

PwlFunction merge(const PwlFunction& f, const PwlFunction& g,
                  std::size_t max_points) {
  const double lo = std::max(f.domain_begin(), g.domain_begin());
  const double hi = std::min(f.domain_end(), g.domain_end());
  if (lo > hi) throw PwlError("merge of functions with disjoint domains");
  if (lo == hi) return PwlFunction({{lo, std::min(f.eval(lo), g.eval(lo))}});

  std::vector<double> times;
  times.reserve(f.size() + g.size() + 2);
  times.push_back(lo);
  times.push_back(hi);
  for (const auto& p : f.points()) {
    if (p.t > lo && p.t < hi) times.push_back(p.t);
  }
  for (const auto& p : g.points()) {
    if (p.t > lo && p.t < hi) times.push_back(p.t);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<Breakpoint> out;
  out.reserve(times.size() * 2);
  double prev_t = times.front();
  double prev_diff = f.eval(prev_t) - g.eval(prev_t);
  out.push_back({prev_t, std::min(f.eval(prev_t), g.eval(prev_t))});
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double t = times[i];
    const double fv = f.eval(t);
    const double gv = g.eval(t);
    const double diff = fv - gv;
    if ((prev_diff < 0.0 && diff > 0.0) || (prev_diff > 0.0 && diff < 0.0)) {
      const double cross = prev_t + (t - prev_t) * (prev_diff / (prev_diff - diff));
      if (cross > prev_t && cross < t) {
        out.push_back({cross, std::min(f.eval(cross), g.eval(cross))});
      }
    }
    out.push_back({t, std::min(fv, gv)});
    prev_t = t;
    prev_diff = diff;
  }
  return make_compacted(std::move(out), max_points);
}

std::optional<double> latest_departure(const PwlFunction& f, double deadline) {
  const auto pts = f.points();
  const double first_arrival = pts.front().t + pts.front().w;
  if (first_arrival > deadline) return std::nullopt;
  const double last_arrival = pts.back().t + pts.back().w;
  if (last_arrival <= deadline) return pts.back().t + (deadline - last_arrival);

  // Arrival values are non-decreasing; find the last breakpoint on time.
  auto after = std::upper_bound(
      pts.begin(), pts.end(), deadline,
      [](double d, const Breakpoint& p) { return d < p.t + p.w; });
  const Breakpoint& a = *(after - 1);
  const Breakpoint& b = *after;
  const double arr_a = a.t + a.w;
  const double arr_b = b.t + b.w;
  return a.t + (deadline - arr_a) * ((b.t - a.t) / (arr_b - arr_a));
}

PwlFunction restrict_domain(const PwlFunction& f, double t_lo, double t_hi) {
  if (t_lo > t_hi) throw PwlError("restrict_domain with empty window");
  if (t_lo == t_hi) return PwlFunction({{t_lo, f.eval(t_lo)}});
  std::vector<Breakpoint> out;
  out.push_back({t_lo, f.eval(t_lo)});
  for (const auto& p : f.points()) {
    if (p.t > t_lo && p.t < t_hi) out.push_back(p);
  }
  out.push_back({t_hi, f.eval(t_hi)});
  return make_compacted(std::move(out), kDefaultMaxPoints);
}

PwlFunction compact(const PwlFunction& f) {
  return make_compacted({f.points().begin(), f.points().end()},
                        std::max(kDefaultMaxPoints, f.size()));
}

std::string to_string(const PwlFunction& f) {
  std::ostringstream os;
  os.precision(17);
  os << '{';
  bool first = true;
  for (const auto& p : f.points()) {
    if (!first) os << ", ";
    os << '(' << p.t << ", " << p.w << ')';
    first = false;
  }
  os << '}';
  return os.str();
}

}  // namespace tdinsert
