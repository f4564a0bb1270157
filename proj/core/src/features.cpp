#include "csne/features.hpp"

#include <stdexcept>

namespace csne {

int64_t polarity(const SignedGraph& g, int32_t l) {
  if (l < 0 || l >= g.node_count())
    throw std::invalid_argument("polarity: node " + std::to_string(l) + " out of range");
  int64_t sum = 0;
  for (int8_t s : g.neighbor_signs(l)) sum += s;
  return sum;
}

PairFeatures wedge_features(const SignedGraph& g, int32_t i, int32_t j) {
  if (i == j) throw std::invalid_argument("wedge_features: i == j");
  if (i < 0 || j < 0 || i >= g.node_count() || j >= g.node_count())
    throw std::invalid_argument("wedge_features: node out of range");
  const auto ni = g.neighbors(i);
  const auto si = g.neighbor_signs(i);
  const auto nj = g.neighbors(j);
  const auto sj = g.neighbor_signs(j);
  PairFeatures f;
  size_t a = 0, b = 0;
  while (a < ni.size() && b < nj.size()) {
    if (ni[a] < nj[b])
      ++a;
    else if (ni[a] > nj[b])
      ++b;
    else {
      const bool pi = si[a] > 0, pj = sj[b] > 0;
      if (pi && pj)
        ++f.f_pp;
      else if (!pi && !pj)
        ++f.f_mm;
      else
        ++f.f_pm;
      ++a;
      ++b;
    }
  }
  return f;
}

StatisticSet observed_statistics(const SignedGraph& g, bool use_triangles) {
  StatisticSet s;
  s.use_triangles = use_triangles;
  s.polarity_targets.resize(g.node_count());
  for (int32_t l = 0; l < g.node_count(); ++l) s.polarity_targets[l] = polarity(g, l);
  if (use_triangles) {
    s.edge_features.reserve(g.edge_count());
    for (const auto& e : g.edges()) {
      const PairFeatures f = wedge_features(g, e.u, e.v);
      s.edge_features.push_back(f);
      s.c_pp += static_cast<int64_t>(f.f_pp) * e.sign;
      s.c_pm += static_cast<int64_t>(f.f_pm) * e.sign;
      s.c_mm += static_cast<int64_t>(f.f_mm) * e.sign;
    }
  }
  return s;
}

}  // namespace csne
