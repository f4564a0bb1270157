#pragma once

#include <cstdint>
#include <vector>

#include "csne/graph.hpp"

namespace csne {

/// Wedge counts for an unordered pair {i,j}: common neighbors split by the
/// sign pattern of the two connecting edges.
struct PairFeatures {
  int32_t f_pp = 0;
  int32_t f_pm = 0;
  int32_t f_mm = 0;
  int32_t common_neighbors() const { return f_pp + f_pm + f_mm; }
};

/// Sum of the signs of the edges incident to node l.
/// Throws std::invalid_argument if l is out of range.
int64_t polarity(const SignedGraph& g, int32_t l);

/// Wedge counts for {i,j} against g. The pair need not be an edge of g, so
/// held-out test pairs can be featurized against a training graph.
/// Throws std::invalid_argument if i == j or out of range.
PairFeatures wedge_features(const SignedGraph& g, int32_t i, int32_t j);

/// Observed constraint targets plus the per-edge feature cache.
struct StatisticSet {
  std::vector<int64_t> polarity_targets;  // c_l, one per node
  bool use_triangles = false;
  int64_t c_pp = 0;
  int64_t c_pm = 0;
  int64_t c_mm = 0;
  /// Aligned with the graph's edge list; empty unless use_triangles.
  std::vector<PairFeatures> edge_features;
};

StatisticSet observed_statistics(const SignedGraph& g, bool use_triangles);

}  // namespace csne
