#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdinsert/pwl.hpp"

namespace tdinsert {

using VertexId = std::uint32_t;

inline constexpr double kDayBegin = 0.0;
inline constexpr double kDayEnd = 86400.0;

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  VertexId head;
  PwlFunction travel;
};

/// Directed road network whose edges carry FIFO travel-time functions on
/// the day domain [0, 86400].
class TdGraph {
 public:
  explicit TdGraph(std::size_t vertex_count) : out_(vertex_count) {}

  /// Appends u->v. The function is validated but not normalized.
  void add_edge(VertexId tail, VertexId head, PwlFunction travel);

  std::size_t vertex_count() const { return out_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<Edge>& out_edges(VertexId u) const { return out_[u]; }
  bool valid(VertexId v) const { return v < out_.size(); }

  std::size_t breakpoint_count() const;

 private:
  std::vector<std::vector<Edge>> out_;
  std::size_t edge_count_ = 0;
};

struct LoadOptions {
  /// Raise non-FIFO weights instead of rejecting the edge.
  bool repair_fifo = false;
};

/// Extends or cuts `f` so its domain is exactly the day [0, 86400].
PwlFunction normalize_to_day(const PwlFunction& f);

TdGraph parse_network(std::istream& in, const LoadOptions& options = {});
TdGraph load_network(const std::filesystem::path& path,
                     const LoadOptions& options = {});

/// Writes `V E` then one `u v k t1 w1 ... tk wk` line per edge.
void serialize_network(const TdGraph& graph, std::ostream& out);
void save_network(const TdGraph& graph, const std::filesystem::path& path);

struct SyntheticOptions {
  double base_weight_min = 30.0;
  double base_weight_max = 600.0;
  double factor_min = 1.0;
  double factor_max = 3.0;
};

/// Ring backbone 0->1->...->V-1->0 plus random chords up to
/// round(avg_degree * V) edges; deterministic for a given seed.
TdGraph generate_synthetic(std::size_t vertices, double avg_degree,
                           std::size_t breakpoints_per_edge, std::uint64_t seed,
                           const SyntheticOptions& options = {});

bool strongly_connected(const TdGraph& graph);

}  // namespace tdinsert
