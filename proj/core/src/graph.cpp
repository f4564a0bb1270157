#include "csne/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace csne {

SignedGraph SignedGraph::build(std::vector<std::string> labels, std::vector<Edge> edges) {
  const auto n = static_cast<int32_t>(labels.size());
  for (auto& e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u == e.v) throw std::invalid_argument("self-loop on node " + std::to_string(e.u));
    if (e.u < 0 || e.v >= n)
      throw std::invalid_argument("edge endpoint out of range: " + std::to_string(e.v));
    if (e.sign != 1 && e.sign != -1)
      throw std::invalid_argument("edge sign must be -1 or +1, got " + std::to_string(e.sign));
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  for (size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].u == edges[k - 1].u && edges[k].v == edges[k - 1].v)
      throw std::invalid_argument("duplicate edge {" + std::to_string(edges[k].u) + "," +
                                  std::to_string(edges[k].v) + "}");
  }

  SignedGraph g;
  g.labels_ = std::move(labels);
  g.label_index_.reserve(g.labels_.size());
  for (int32_t i = 0; i < n; ++i) {
    if (!g.label_index_.emplace(g.labels_[i], i).second)
      throw std::invalid_argument("duplicate node label '" + g.labels_[i] + "'");
  }
  g.edges_ = std::move(edges);

  std::vector<int32_t> deg(n, 0);
  for (const auto& e : g.edges_) {
    ++deg[e.u];
    ++deg[e.v];
    if (e.sign > 0) ++g.positive_edges_;
  }
  g.adj_offsets_.assign(n + 1, 0);
  for (int32_t i = 0; i < n; ++i) g.adj_offsets_[i + 1] = g.adj_offsets_[i] + deg[i];
  g.adj_nbr_.resize(g.adj_offsets_[n]);
  g.adj_sign_.resize(g.adj_offsets_[n]);
  std::vector<int64_t> cursor(g.adj_offsets_.begin(), g.adj_offsets_.end() - 1);
  // edges_ is sorted by (u,v); filling in that order keeps each u's list
  // sorted, but v's entries need a final per-node sort.
  for (const auto& e : g.edges_) {
    g.adj_nbr_[cursor[e.u]] = e.v;
    g.adj_sign_[cursor[e.u]++] = e.sign;
    g.adj_nbr_[cursor[e.v]] = e.u;
    g.adj_sign_[cursor[e.v]++] = e.sign;
  }
  for (int32_t i = 0; i < n; ++i) {
    const auto lo = g.adj_offsets_[i], hi = g.adj_offsets_[i + 1];
    std::vector<std::pair<int32_t, int8_t>> row;
    row.reserve(hi - lo);
    for (int64_t k = lo; k < hi; ++k) row.emplace_back(g.adj_nbr_[k], g.adj_sign_[k]);
    std::sort(row.begin(), row.end());
    for (int64_t k = lo; k < hi; ++k) {
      g.adj_nbr_[k] = row[k - lo].first;
      g.adj_sign_[k] = row[k - lo].second;
    }
  }
  return g;
}

int32_t SignedGraph::index_of(const std::string& label) const {
  auto it = label_index_.find(label);
  return it == label_index_.end() ? -1 : it->second;
}

int32_t SignedGraph::degree(int32_t i) const {
  return static_cast<int32_t>(adj_offsets_[i + 1] - adj_offsets_[i]);
}

std::span<const int32_t> SignedGraph::neighbors(int32_t i) const {
  return {adj_nbr_.data() + adj_offsets_[i],
          static_cast<size_t>(adj_offsets_[i + 1] - adj_offsets_[i])};
}

std::span<const int8_t> SignedGraph::neighbor_signs(int32_t i) const {
  return {adj_sign_.data() + adj_offsets_[i],
          static_cast<size_t>(adj_offsets_[i + 1] - adj_offsets_[i])};
}

int SignedGraph::sign_of(int32_t i, int32_t j) const {
  const auto nbr = neighbors(i);
  const auto it = std::lower_bound(nbr.begin(), nbr.end(), j);
  if (it == nbr.end() || *it != j) return 0;
  return adj_sign_[adj_offsets_[i] + (it - nbr.begin())];
}

namespace {

bool is_comment(const std::string& line, const std::vector<std::string>& prefixes) {
  size_t first = line.find_first_not_of(" \t");
  if (first == std::string::npos) return false;
  for (const auto& p : prefixes) {
    if (!p.empty() && line.compare(first, p.size(), p) == 0) return true;
  }
  return false;
}

void split_fields(const std::string& line, char delimiter, std::vector<std::string>& out) {
  out.clear();
  const auto is_sep = [delimiter](char c) {
    if (delimiter != 0) return c == delimiter;
    return c == ' ' || c == '\t' || c == ',';
  };
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
}

double parse_number(const std::string& tok, int64_t line_no) {
  double value = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || p != last)
    throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                             ": non-numeric weight '" + tok + "'");
  return value;
}

}  // namespace

RawEdgeList parse_edge_list(std::istream& in, const ParseOptions& opts) {
  RawEdgeList out;
  std::string line;
  std::vector<std::string> fields;
  int64_t line_no = 0;
  int64_t data_lines = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (is_comment(line, opts.comment_prefixes)) continue;
    split_fields(line, opts.delimiter, fields);
    if (fields.size() < 3)
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": expected at least 3 fields, got " +
                               std::to_string(fields.size()));
    ++data_lines;
    const double w = parse_number(fields[2], line_no);
    if (!opts.weight_column && w != 1.0 && w != -1.0)
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": sign must be -1 or 1, got '" + fields[2] +
                               "' (use the weight-column option for rated data)");
    if (w == 0.0) {
      ++out.zero_weight_dropped;
      continue;
    }
    out.records.push_back({fields[0], fields[1], static_cast<int8_t>(w > 0 ? 1 : -1)});
  }
  if (data_lines == 0) throw std::runtime_error("empty input: no data lines found");
  return out;
}

RawEdgeList parse_edge_list_file(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_edge_list(in, opts);
}

SignedGraph to_undirected(const RawEdgeList& raw, ConflictPolicy policy, UndirectStats* stats) {
  UndirectStats local;
  std::vector<std::string> labels;
  std::unordered_map<std::string, int32_t> index;
  index.reserve(raw.records.size() * 2);
  const auto intern = [&](const std::string& s) {
    auto [it, inserted] = index.emplace(s, static_cast<int32_t>(labels.size()));
    if (inserted) labels.push_back(s);
    return it->second;
  };

  struct PairState {
    int64_t sum = 0;
    int8_t first = 0;
    bool conflict = false;
    bool seen = false;
  };
  std::unordered_map<int64_t, PairState> pairs;
  pairs.reserve(raw.records.size() * 2);
  std::vector<int64_t> order;  // first-appearance order of surviving pairs

  for (const auto& r : raw.records) {
    const int32_t a = intern(r.source);
    const int32_t b = intern(r.target);
    if (a == b) {
      ++local.self_loops_removed;
      continue;
    }
    const int32_t u = std::min(a, b), v = std::max(a, b);
    const int64_t key = static_cast<int64_t>(u) << 32 | static_cast<uint32_t>(v);
    auto& st = pairs[key];
    if (st.seen) {
      ++local.records_merged;
      if (st.first != r.sign) st.conflict = true;
    } else {
      st.seen = true;
      st.first = r.sign;
      order.push_back(key);
    }
    st.sum += r.sign;
  }

  std::vector<Edge> edges;
  edges.reserve(order.size());
  for (const int64_t key : order) {
    const auto& st = pairs[key];
    int8_t sign = 0;
    switch (policy) {
      case ConflictPolicy::kSumThenSign:
        if (st.sum == 0) {
          ++local.pairs_dropped;
          continue;
        }
        sign = st.sum > 0 ? 1 : -1;
        break;
      case ConflictPolicy::kKeepFirst:
        sign = st.first;
        break;
      case ConflictPolicy::kDropConflicts:
        if (st.conflict) {
          ++local.pairs_dropped;
          continue;
        }
        sign = st.first;
        break;
    }
    edges.push_back({static_cast<int32_t>(key >> 32), static_cast<int32_t>(key & 0xffffffff), sign});
  }
  if (stats) *stats = local;
  return SignedGraph::build(std::move(labels), std::move(edges));
}

bool label_less(const std::string& a, const std::string& b) {
  const auto as_int = [](const std::string& s, long long& v) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
  };
  long long va = 0, vb = 0;
  const bool na = as_int(a, va), nb = as_int(b, vb);
  if (na && nb) return va < vb;
  if (na != nb) return na;  // numeric labels sort before non-numeric
  return a < b;
}

SignedGraph largest_connected_component(const SignedGraph& g) {
  const int32_t n = g.node_count();
  if (n == 0) throw std::invalid_argument("largest_connected_component: empty graph");

  std::vector<int32_t> comp(n, -1);
  int32_t n_comp = 0;
  std::vector<int32_t> queue;
  for (int32_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = n_comp;
    queue.assign(1, s);
    while (!queue.empty()) {
      const int32_t u = queue.back();
      queue.pop_back();
      for (int32_t v : g.neighbors(u)) {
        if (comp[v] < 0) {
          comp[v] = n_comp;
          queue.push_back(v);
        }
      }
    }
    ++n_comp;
  }

  std::vector<int64_t> size(n_comp, 0);
  for (int32_t i = 0; i < n; ++i) ++size[comp[i]];
  // min label per component, for the deterministic tie-break
  std::vector<int32_t> min_label_node(n_comp, -1);
  for (int32_t i = 0; i < n; ++i) {
    int32_t& cur = min_label_node[comp[i]];
    if (cur < 0 || label_less(g.label(i), g.label(cur))) cur = i;
  }
  int32_t best = 0;
  for (int32_t c = 1; c < n_comp; ++c) {
    if (size[c] > size[best] ||
        (size[c] == size[best] &&
         label_less(g.label(min_label_node[c]), g.label(min_label_node[best]))))
      best = c;
  }

  std::vector<int32_t> remap(n, -1);
  std::vector<std::string> labels;
  labels.reserve(size[best]);
  for (int32_t i = 0; i < n; ++i) {
    if (comp[i] == best) {
      remap[i] = static_cast<int32_t>(labels.size());
      labels.push_back(g.label(i));
    }
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    if (comp[e.u] == best) edges.push_back({remap[e.u], remap[e.v], e.sign});
  }
  return SignedGraph::build(std::move(labels), std::move(edges));
}

TriangleCensus triangle_census(const SignedGraph& g) {
  TriangleCensus c;
  for (const auto& e : g.edges()) {
    const auto nu = g.neighbors(e.u);
    const auto su = g.neighbor_signs(e.u);
    const auto nv = g.neighbors(e.v);
    const auto sv = g.neighbor_signs(e.v);
    // common neighbors k > v close triangle {u < v < k} exactly once
    size_t a = std::lower_bound(nu.begin(), nu.end(), e.v + 1) - nu.begin();
    size_t b = std::lower_bound(nv.begin(), nv.end(), e.v + 1) - nv.begin();
    while (a < nu.size() && b < nv.size()) {
      if (nu[a] < nv[b])
        ++a;
      else if (nu[a] > nv[b])
        ++b;
      else {
        const int neg = (e.sign < 0) + (su[a] < 0) + (sv[b] < 0);
        switch (neg) {
          case 0: ++c.t_ppp; break;
          case 1: ++c.t_ppm; break;
          case 2: ++c.t_pmm; break;
          default: ++c.t_mmm; break;
        }
        ++a;
        ++b;
      }
    }
  }
  return c;
}

GraphStats graph_stats(const SignedGraph& g) {
  GraphStats s;
  s.n = g.node_count();
  s.m = g.edge_count();
  s.density = s.n > 0 ? static_cast<double>(s.m) / static_cast<double>(s.n) : 0.0;
  s.positive_fraction =
      s.m > 0 ? static_cast<double>(g.positive_edge_count()) / static_cast<double>(s.m) : 0.0;
  const TriangleCensus c = triangle_census(g);
  if (c.total() > 0) {
    s.has_balanced_fraction = true;
    s.balanced_fraction =
        static_cast<double>(c.t_ppp + c.t_pmm) / static_cast<double>(c.total());
  }
  return s;
}

SignedGraph load_network(const std::string& path, const ParseOptions& opts, ConflictPolicy policy,
                         bool keep_largest_component) {
  const RawEdgeList raw = parse_edge_list_file(path, opts);
  SignedGraph g = to_undirected(raw, policy);
  if (keep_largest_component) g = largest_connected_component(g);
  return g;
}

}  // namespace csne
