#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace csne {

/// One undirected edge with endpoints in dense index space, u < v.
struct Edge {
  int32_t u = 0;
  int32_t v = 0;
  int8_t sign = 1;  // -1 or +1
};

/// Undirected signed network over dense 0-based node indices.
///
/// Immutable after construction: adjacency lists are built once, sorted by
/// neighbor index, and safe for concurrent reads. Original (string) node ids
/// are kept so results can be reported in the input's vocabulary.
class SignedGraph {
 public:
  SignedGraph() = default;

  /// Validates edges (no self-loops, no duplicate pairs, signs in {-1,+1},
  /// endpoints in range) and builds sorted adjacency.
  /// Throws std::invalid_argument on any violation.
  static SignedGraph build(std::vector<std::string> labels, std::vector<Edge> edges);

  int32_t node_count() const { return static_cast<int32_t>(labels_.size()); }
  int64_t edge_count() const { return static_cast<int64_t>(edges_.size()); }
  int64_t positive_edge_count() const { return positive_edges_; }
  int64_t negative_edge_count() const { return edge_count() - positive_edges_; }

  /// Edges sorted by (u, v), u < v.
  const std::vector<Edge>& edges() const { return edges_; }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int32_t i) const { return labels_[i]; }
  /// Dense index for an original id, or -1 if absent.
  int32_t index_of(const std::string& label) const;

  int32_t degree(int32_t i) const;
  std::span<const int32_t> neighbors(int32_t i) const;
  std::span<const int8_t> neighbor_signs(int32_t i) const;

  /// Sign of edge {i,j} in {-1,+1}, or 0 if the pair is not an edge.
  int sign_of(int32_t i, int32_t j) const;
  bool has_edge(int32_t i, int32_t j) const { return sign_of(i, j) != 0; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int32_t> label_index_;
  std::vector<Edge> edges_;           // sorted by (u, v)
  std::vector<int64_t> adj_offsets_;  // size n+1
  std::vector<int32_t> adj_nbr_;      // sorted within each node's range
  std::vector<int8_t> adj_sign_;
  int64_t positive_edges_ = 0;
};

/// A directed record as it appeared in the input, before undirecting.
struct RawRecord {
  std::string source;
  std::string target;
  int8_t sign = 1;
};

struct RawEdgeList {
  std::vector<RawRecord> records;
  int64_t zero_weight_dropped = 0;
};

struct ParseOptions {
  /// 0 means "split on any run of spaces, tabs or commas".
  char delimiter = 0;
  /// When true the third field is a weight and is reduced to sign(w);
  /// when false it must be exactly -1 or 1.
  bool weight_column = false;
  std::vector<std::string> comment_prefixes = {"#", "%"};
};

/// Parses a directed multi-edge list, one record per line:
///   <source> <target> <sign-or-weight> [ignored extra fields...]
/// Zero-weight records are dropped and counted. Throws std::runtime_error
/// with the line number on malformed lines and on empty input.
RawEdgeList parse_edge_list(std::istream& in, const ParseOptions& opts = {});
RawEdgeList parse_edge_list_file(const std::string& path, const ParseOptions& opts = {});

/// How to merge conflicting directed records for the same unordered pair.
enum class ConflictPolicy {
  kSumThenSign,    // sign of the summed signs; zero-sum pairs are dropped
  kKeepFirst,      // first record in input order wins
  kDropConflicts,  // any disagreement drops the pair
};

struct UndirectStats {
  int64_t self_loops_removed = 0;
  int64_t records_merged = 0;  // records beyond the first for their pair
  int64_t pairs_dropped = 0;   // zero-sum or conflicting pairs
};

/// Collapses directed records into an undirected SignedGraph. Self-loops are
/// removed. Node indices follow first appearance in the record stream.
SignedGraph to_undirected(const RawEdgeList& raw,
                          ConflictPolicy policy = ConflictPolicy::kSumThenSign,
                          UndirectStats* stats = nullptr);

/// Induced subgraph on the largest sign-blind connected component, indices
/// re-densified (relative order preserved). Ties between equal-size
/// components go to the one containing the smallest original label.
/// Throws std::invalid_argument on an empty graph.
SignedGraph largest_connected_component(const SignedGraph& g);

/// Exact triangle counts by sign multiset.
struct TriangleCensus {
  int64_t t_ppp = 0;
  int64_t t_ppm = 0;
  int64_t t_pmm = 0;
  int64_t t_mmm = 0;
  int64_t total() const { return t_ppp + t_ppm + t_pmm + t_mmm; }
};

/// Common-neighbor enumeration over sorted adjacency; each triangle counted
/// exactly once.
TriangleCensus triangle_census(const SignedGraph& g);

struct GraphStats {
  int64_t n = 0;
  int64_t m = 0;
  double density = 0.0;            // m / n
  double positive_fraction = 0.0;  // |E+| / |E|
  bool has_balanced_fraction = false;
  double balanced_fraction = 0.0;  // (t_ppp + t_pmm) / t_total
};

GraphStats graph_stats(const SignedGraph& g);

/// Numeric-aware label order: integer labels compare numerically, everything
/// else lexicographically. Used for deterministic tie-breaks.
bool label_less(const std::string& a, const std::string& b);

/// parse -> to_undirected -> optional largest connected component.
SignedGraph load_network(const std::string& path, const ParseOptions& opts = {},
                         ConflictPolicy policy = ConflictPolicy::kSumThenSign,
                         bool keep_largest_component = true);

}  // namespace csne
