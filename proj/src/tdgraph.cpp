#include "tdinsert/tdgraph.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <utility>

namespace tdinsert {

void TdGraph::add_edge(VertexId tail, VertexId head, PwlFunction travel) {
  if (!valid(tail) || !valid(head)) {
    throw NetworkError("edge " + std::to_string(tail) + "->" +
                       std::to_string(head) + " references an unknown vertex");
  }
  out_[tail].push_back({head, std::move(travel)});
  ++edge_count_;
}

std::size_t TdGraph::breakpoint_count() const {
  std::size_t total = 0;
  for (const auto& edges : out_) {
    for (const auto& e : edges) total += e.travel.size();
  }
  return total;
}

PwlFunction normalize_to_day(const PwlFunction& f) {
  const auto pts = f.points();
  if (f.domain_begin() == kDayBegin && f.domain_end() == kDayEnd) return f;
  std::vector<Breakpoint> out;
  out.push_back({kDayBegin, f.eval(kDayBegin)});
  for (const auto& p : pts) {
    if (p.t > kDayBegin && p.t < kDayEnd) out.push_back(p);
  }
  out.push_back({kDayEnd, f.eval(kDayEnd)});
  return PwlFunction(std::move(out));
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw NetworkError("line " + std::to_string(line) + ": " + what);
}

class LineReader {
 public:
  LineReader(const std::string& text, std::size_t line)
      : text_(text), line_(line) {}

  template <typename T>
  T next(const char* what) {
    skip_space();
    if (pos_ >= text_.size()) parse_fail(line_, std::string("missing ") + what);
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    T value{};
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || (ptr != last && !is_space(*ptr))) {
      parse_fail(line_, std::string("malformed ") + what);
    }
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  const std::string& text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

void write_double(std::ostream& out, double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.write(buf, ptr - buf);
}

}  // namespace

TdGraph parse_network(std::istream& in, const LoadOptions& options) {
  std::string text;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, text)) {
      ++line_no;
      if (!blank(text)) return true;
    }
    return false;
  };

  if (!next_line()) throw NetworkError("empty network file");
  LineReader header(text, line_no);
  const auto vertex_count = header.next<std::uint64_t>("vertex count");
  const auto edge_count = header.next<std::uint64_t>("edge count");
  if (!header.at_end()) parse_fail(line_no, "trailing tokens in header");

  TdGraph graph(vertex_count);
  for (std::uint64_t e = 0; e < edge_count; ++e) {
    if (!next_line()) {
      throw NetworkError("expected " + std::to_string(edge_count) +
                         " edges, found " + std::to_string(e));
    }
    LineReader row(text, line_no);
    const auto u = row.next<std::uint64_t>("tail vertex");
    const auto v = row.next<std::uint64_t>("head vertex");
    const auto k = row.next<std::uint64_t>("breakpoint count");
    if (u >= vertex_count || v >= vertex_count) {
      parse_fail(line_no, "dangling vertex id in edge " + std::to_string(u) +
                              "->" + std::to_string(v));
    }
    if (k == 0) parse_fail(line_no, "edge needs at least one breakpoint");
    std::vector<Breakpoint> pts;
    pts.reserve(k);
    for (std::uint64_t i = 0; i < k; ++i) {
      const double t = row.next<double>("breakpoint time");
      const double w = row.next<double>("breakpoint weight");
      if (!pts.empty() && !(pts.back().t < t)) {
        parse_fail(line_no, "non-increasing breakpoint times");
      }
      if (w < 0.0) parse_fail(line_no, "negative travel time");
      pts.push_back({t, w});
    }
    if (!row.at_end()) parse_fail(line_no, "trailing tokens after breakpoints");

    PwlFunction fn = normalize_to_day(PwlFunction(std::move(pts)));
    if (!fifo_check(fn)) {
      if (!options.repair_fifo) {
        parse_fail(line_no, "FIFO violation on edge " + std::to_string(u) +
                                "->" + std::to_string(v));
      }
      fn = fifo_repair(fn);
    }
    graph.add_edge(static_cast<VertexId>(u), static_cast<VertexId>(v),
                   std::move(fn));
  }
  if (next_line()) parse_fail(line_no, "unexpected content after last edge");
  return graph;
}

TdGraph load_network(const std::filesystem::path& path,
                     const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw NetworkError("cannot open network file " + path.string());
  return parse_network(in, options);
}

void serialize_network(const TdGraph& graph, std::ostream& out) {
  out << graph.vertex_count() << ' ' << graph.edge_count() << '\n';
  for (VertexId u = 0; u < graph.vertex_count(); ++u) {
    for (const auto& e : graph.out_edges(u)) {
      out << u << ' ' << e.head << ' ' << e.travel.size();
      for (const auto& p : e.travel.points()) {
        out << ' ';
        write_double(out, p.t);
        out << ' ';
        write_double(out, p.w);
      }
      out << '\n';
    }
  }
}

void save_network(const TdGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw NetworkError("cannot write network file " + path.string());
  serialize_network(graph, out);
}

namespace {

// Morning and evening congestion bumps, in [0, 1].
double rush_profile(double t, double shift) {
  constexpr double sigma = 5400.0;
  auto bump = [&](double centre) {
    const double z = (t - centre - shift) / sigma;
    return std::exp(-0.5 * z * z);
  };
  return std::max(bump(30600.0), bump(64800.0));
}

PwlFunction synthetic_edge(std::mt19937_64& rng, std::size_t breakpoints,
                           const SyntheticOptions& opt) {
  std::uniform_real_distribution<double> base_dist(opt.base_weight_min,
                                                   opt.base_weight_max);
  std::uniform_real_distribution<double> amp_dist(0.3, 1.0);
  std::uniform_real_distribution<double> shift_dist(-1800.0, 1800.0);
  const double base = base_dist(rng);
  const double amplitude = amp_dist(rng);
  const double shift = shift_dist(rng);

  std::vector<Breakpoint> pts;
  const std::size_t k = std::max<std::size_t>(breakpoints, 1);
  for (std::size_t i = 0; i < k; ++i) {
    const double t =
        k == 1 ? kDayBegin
               : kDayBegin + (kDayEnd - kDayBegin) * static_cast<double>(i) /
                                 static_cast<double>(k - 1);
    const double factor =
        opt.factor_min +
        (opt.factor_max - opt.factor_min) * amplitude * rush_profile(t, shift);
    pts.push_back({t, base * factor});
  }
  return fifo_repair(normalize_to_day(PwlFunction(std::move(pts))));
}

}  // namespace

TdGraph generate_synthetic(std::size_t vertices, double avg_degree,
                           std::size_t breakpoints_per_edge, std::uint64_t seed,
                           const SyntheticOptions& options) {
  if (vertices < 2) throw NetworkError("synthetic network needs >= 2 vertices");
  std::mt19937_64 rng(seed);
  TdGraph graph(vertices);
  std::set<std::pair<VertexId, VertexId>> present;

  for (VertexId u = 0; u < vertices; ++u) {
    const auto v = static_cast<VertexId>((u + 1) % vertices);
    if (present.emplace(u, v).second) {
      graph.add_edge(u, v, synthetic_edge(rng, breakpoints_per_edge, options));
    }
  }

  const auto target = static_cast<std::size_t>(
      std::llround(avg_degree * static_cast<double>(vertices)));
  const std::size_t max_edges = vertices * (vertices - 1);
  std::uniform_int_distribution<VertexId> pick(
      0, static_cast<VertexId>(vertices - 1));
  while (graph.edge_count() < std::min(target, max_edges)) {
    const VertexId u = pick(rng);
    const VertexId v = pick(rng);
    if (u == v || !present.emplace(u, v).second) continue;
    graph.add_edge(u, v, synthetic_edge(rng, breakpoints_per_edge, options));
  }
  return graph;
}

bool strongly_connected(const TdGraph& graph) {
  const std::size_t n = graph.vertex_count();
  if (n == 0) return true;
  std::vector<std::vector<VertexId>> reverse(n);
  for (VertexId u = 0; u < n; ++u) {
    for (const auto& e : graph.out_edges(u)) reverse[e.head].push_back(u);
  }
  auto reaches_all = [n](auto&& neighbours) {
    std::vector<char> seen(n, 0);
    std::vector<VertexId> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const VertexId u = stack.back();
      stack.pop_back();
      for (VertexId v : neighbours(u)) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  const bool forward = reaches_all([&](VertexId u) {
    std::vector<VertexId> heads;
    for (const auto& e : graph.out_edges(u)) heads.push_back(e.head);
    return heads;
  });
  return forward && reaches_all([&](VertexId u) { return reverse[u]; });
}

}  // namespace tdinsert
