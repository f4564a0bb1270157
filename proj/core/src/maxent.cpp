#include "csne/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace csne {

namespace {
constexpr double kProbClamp = 1e-12;

double clamp_prob(double p) { return std::min(1.0 - kProbClamp, std::max(kProbClamp, p)); }

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

MaxEntDual::MaxEntDual(const SignedGraph& g, const StatisticSet& stats, double l2)
    : g_(&g), stats_(&stats), l2_(l2) {
  const int32_t n = g.node_count();
  dim_ = n + (stats.use_triangles ? 3 : 0);
  targets_.assign(dim_, 0.0);
  // {0,1} recoding: t_l = (c_l + deg(l)) / 2 = positive incident edges
  for (int32_t l = 0; l < n; ++l)
    targets_[l] = 0.5 * (static_cast<double>(stats.polarity_targets[l]) + g.degree(l));
  if (stats.use_triangles) {
    int64_t fsum_pp = 0, fsum_pm = 0, fsum_mm = 0;
    for (const auto& f : stats.edge_features) {
      fsum_pp += f.f_pp;
      fsum_pm += f.f_pm;
      fsum_mm += f.f_mm;
    }
    targets_[n + 0] = 0.5 * static_cast<double>(stats.c_pp + fsum_pp);
    targets_[n + 1] = 0.5 * static_cast<double>(stats.c_pm + fsum_pm);
    targets_[n + 2] = 0.5 * static_cast<double>(stats.c_mm + fsum_mm);
  }
}

namespace {

struct EdgeTerm {
  int32_t u, v;
  double f_pp, f_pm, f_mm;
};

std::vector<EdgeTerm> edge_terms(const SignedGraph& g, const StatisticSet& stats) {
  std::vector<EdgeTerm> terms;
  terms.reserve(g.edge_count());
  const auto& edges = g.edges();
  for (size_t e = 0; e < edges.size(); ++e) {
    EdgeTerm t{edges[e].u, edges[e].v, 0, 0, 0};
    if (stats.use_triangles) {
      t.f_pp = stats.edge_features[e].f_pp;
      t.f_pm = stats.edge_features[e].f_pm;
      t.f_mm = stats.edge_features[e].f_mm;
    }
    terms.push_back(t);
  }
  return terms;
}

double edge_score(const EdgeTerm& t, std::span<const double> theta, int32_t n, bool tri) {
  double s = theta[t.u] + theta[t.v];
  if (tri) s += t.f_pp * theta[n] + t.f_pm * theta[n + 1] + t.f_mm * theta[n + 2];
  return s;
}

}  // namespace

double MaxEntDual::value(std::span<const double> theta) const {
  const int32_t n = g_->node_count();
  const bool tri = stats_->use_triangles;
  double v = 0.0;
  for (const auto& e : g_->edges()) {
    double s = theta[e.u] + theta[e.v];
    if (tri) {
      const auto& f = stats_->edge_features[&e - g_->edges().data()];
      s += f.f_pp * theta[n] + f.f_pm * theta[n + 1] + f.f_mm * theta[n + 2];
    }
    v += softplus(s);
  }
  for (int k = 0; k < dim_; ++k) v -= targets_[k] * theta[k];
  if (l2_ > 0.0) {
    double sq = 0.0;
    for (int k = 0; k < dim_; ++k) sq += theta[k] * theta[k];
    v += 0.5 * l2_ * sq;
  }
  return v;
}

void MaxEntDual::gradient(std::span<const double> theta, std::span<double> out) const {
  const int32_t n = g_->node_count();
  const bool tri = stats_->use_triangles;
  std::fill(out.begin(), out.end(), 0.0);
  const auto& edges = g_->edges();
  for (size_t e = 0; e < edges.size(); ++e) {
    double s = theta[edges[e].u] + theta[edges[e].v];
    const PairFeatures* f = nullptr;
    if (tri) {
      f = &stats_->edge_features[e];
      s += f->f_pp * theta[n] + f->f_pm * theta[n + 1] + f->f_mm * theta[n + 2];
    }
    const double p = logistic(s);
    out[edges[e].u] += p;
    out[edges[e].v] += p;
    if (tri) {
      out[n] += f->f_pp * p;
      out[n + 1] += f->f_pm * p;
      out[n + 2] += f->f_mm * p;
    }
  }
  for (int k = 0; k < dim_; ++k) {
    out[k] -= targets_[k];
    if (l2_ > 0.0) out[k] += l2_ * theta[k];
  }
}

MaxEntModel MaxEntModel::fit(std::shared_ptr<const SignedGraph> g, StatisticSet stats,
                             const PriorFitConfig& cfg) {
  if (!g) throw std::invalid_argument("fit: null graph");
  if (g->edge_count() == 0) throw std::invalid_argument("fit: graph has no edges");
  if (stats.use_triangles && stats.edge_features.size() != static_cast<size_t>(g->edge_count()))
    throw std::invalid_argument("fit: feature cache does not match the edge list");

  const MaxEntDual dual(*g, stats, cfg.l2);
  const int K = dual.dimension();
  const int32_t n = g->node_count();
  const bool tri = stats.use_triangles;
  const auto terms = edge_terms(*g, stats);

  std::vector<double> theta(K, 0.0), grad(K, 0.0), trial(K, 0.0);
  double value = dual.value(theta);
  dual.gradient(theta, grad);
  const auto linf = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  FitDiagnostics diag;
  Eigen::VectorXd delta(K);
  std::vector<Eigen::Triplet<double>> trip;
  bool converged = false;

  for (int iter = 0;; ++iter) {
    if (!std::isfinite(value))
      throw std::runtime_error("fit: dual became non-finite at iteration " + std::to_string(iter));
    if (linf(grad) <= cfg.grad_tol) {
      converged = true;
      break;
    }
    if (iter >= cfg.max_iter) break;

    // Newton system: (sum_e w_e x_e x_e^T + ridge I) delta = -grad
    trip.clear();
    std::vector<double> diag_h(K, 0.0);
    for (const auto& t : terms) {
      const double p = logistic(edge_score(t, theta, n, tri));
      const double w = p * (1.0 - p);
      trip.emplace_back(t.u, t.u, w);
      trip.emplace_back(t.v, t.v, w);
      trip.emplace_back(t.u, t.v, w);
      trip.emplace_back(t.v, t.u, w);
      diag_h[t.u] += w;
      diag_h[t.v] += w;
      if (tri) {
        const double ft[3] = {t.f_pp, t.f_pm, t.f_mm};
        for (int a = 0; a < 3; ++a) {
          if (ft[a] == 0.0) continue;
          trip.emplace_back(t.u, n + a, w * ft[a]);
          trip.emplace_back(n + a, t.u, w * ft[a]);
          trip.emplace_back(t.v, n + a, w * ft[a]);
          trip.emplace_back(n + a, t.v, w * ft[a]);
          for (int b = 0; b < 3; ++b) {
            if (ft[b] == 0.0) continue;
            trip.emplace_back(n + a, n + b, w * ft[a] * ft[b]);
            if (a == b) diag_h[n + a] += w * ft[a] * ft[b];
          }
        }
      }
    }
    double max_diag = 0.0;
    for (double d : diag_h) max_diag = std::max(max_diag, d);
    double ridge = cfg.l2 + 1e-10 * (1.0 + max_diag);

    bool stepped = false;
    for (int attempt = 0; attempt < 4 && !stepped; ++attempt) {
      auto trip_damped = trip;
      for (int k = 0; k < K; ++k) trip_damped.emplace_back(k, k, ridge);
      Eigen::SparseMatrix<double> H(K, K);
      H.setFromTriplets(trip_damped.begin(), trip_damped.end());
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(H);

      bool have_dir = false;
      if (solver.info() == Eigen::Success) {
        Eigen::Map<const Eigen::VectorXd> gvec(grad.data(), K);
        delta = solver.solve(-gvec);
        have_dir = solver.info() == Eigen::Success && delta.allFinite();
      }
      if (!have_dir) {
        // quasi-second-order fallback: diagonal preconditioning
        for (int k = 0; k < K; ++k) delta[k] = -grad[k] / (diag_h[k] + ridge + 1e-12);
      }
      double gd = 0.0;
      for (int k = 0; k < K; ++k) gd += grad[k] * delta[k];
      if (gd >= 0.0) {  // not a descent direction; escalate damping
        ridge = std::max(ridge * 100.0, 1e-6);
        continue;
      }

      // Armijo backtracking
      double alpha = 1.0;
      for (int ls = 0; ls < 50; ++ls) {
        for (int k = 0; k < K; ++k) trial[k] = theta[k] + alpha * delta[k];
        const double tv = dual.value(trial);
        if (std::isfinite(tv) && tv <= value + 1e-4 * alpha * gd) {
          theta.swap(trial);
          value = tv;
          stepped = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!stepped) ridge = std::max(ridge * 100.0, 1e-6);
    }
    if (!stepped) break;  // stationary within numerics

    dual.gradient(theta, grad);
    ++diag.iterations;
  }

  diag.grad_norm = linf(grad);
  diag.dual_value = value;
  diag.converged = converged;

  MaxEntModel m;
  m.graph_ = std::move(g);
  m.stats_ = std::move(stats);
  m.lambda_node_.assign(theta.begin(), theta.begin() + n);
  if (tri) {
    m.lambda_pp_ = theta[n];
    m.lambda_pm_ = theta[n + 1];
    m.lambda_mm_ = theta[n + 2];
  }
  m.cfg_ = cfg;
  m.diag_ = diag;
  return m;
}

double MaxEntModel::score(int32_t i, int32_t j, const PairFeatures& f) const {
  double s = lambda_node_[i] + lambda_node_[j];
  if (stats_.use_triangles)
    s += f.f_pp * lambda_pp_ + f.f_pm * lambda_pm_ + f.f_mm * lambda_mm_;
  return s;
}

double MaxEntModel::score(int32_t i, int32_t j) const {
  if (i == j) throw std::invalid_argument("score: i == j");
  if (!stats_.use_triangles) return lambda_node_[i] + lambda_node_[j];
  return score(i, j, wedge_features(*graph_, i, j));
}

double MaxEntModel::prior_probability(int32_t i, int32_t j) const {
  return clamp_prob(logistic(score(i, j)));
}

std::vector<double> MaxEntModel::edge_probabilities() const {
  const auto& edges = graph_->edges();
  std::vector<double> p(edges.size());
  for (size_t e = 0; e < edges.size(); ++e) {
    const PairFeatures f =
        stats_.use_triangles ? stats_.edge_features[e] : PairFeatures{};
    p[e] = clamp_prob(logistic(score(edges[e].u, edges[e].v, f)));
  }
  return p;
}

std::vector<double> MaxEntModel::constraint_residuals() const {
  const int32_t n = graph_->node_count();
  const bool tri = stats_.use_triangles;
  std::vector<double> r(n + (tri ? 3 : 0), 0.0);
  const auto& edges = graph_->edges();
  for (size_t e = 0; e < edges.size(); ++e) {
    const PairFeatures f = tri ? stats_.edge_features[e] : PairFeatures{};
    const double q = 2.0 * logistic(score(edges[e].u, edges[e].v, f)) - 1.0;
    r[edges[e].u] += q;
    r[edges[e].v] += q;
    if (tri) {
      r[n] += f.f_pp * q;
      r[n + 1] += f.f_pm * q;
      r[n + 2] += f.f_mm * q;
    }
  }
  for (int32_t l = 0; l < n; ++l) r[l] -= static_cast<double>(stats_.polarity_targets[l]);
  if (tri) {
    r[n] -= static_cast<double>(stats_.c_pp);
    r[n + 1] -= static_cast<double>(stats_.c_pm);
    r[n + 2] -= static_cast<double>(stats_.c_mm);
  }
  return r;
}

void MaxEntModel::save(std::ostream& out) const {
  char buf[64];
  out << "# maxent triangles=" << (stats_.use_triangles ? 1 : 0)
      << " max_iter=" << cfg_.max_iter;
  write_double(buf, sizeof buf, cfg_.grad_tol);
  out << " grad_tol=" << buf;
  write_double(buf, sizeof buf, cfg_.l2);
  out << " l2=" << buf << " iterations=" << diag_.iterations;
  write_double(buf, sizeof buf, diag_.grad_norm);
  out << " grad_norm=" << buf;
  write_double(buf, sizeof buf, diag_.dual_value);
  out << " dual=" << buf << " converged=" << (diag_.converged ? 1 : 0) << "\n";
  for (int32_t i = 0; i < graph_->node_count(); ++i) {
    write_double(buf, sizeof buf, lambda_node_[i]);
    out << graph_->label(i) << "\t" << buf << "\n";
  }
  write_double(buf, sizeof buf, lambda_pp_);
  out << "lambda_pp\t" << buf << "\n";
  write_double(buf, sizeof buf, lambda_pm_);
  out << "lambda_pm\t" << buf << "\n";
  write_double(buf, sizeof buf, lambda_mm_);
  out << "lambda_mm\t" << buf << "\n";
}

void MaxEntModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  save(out);
}

namespace {
double header_value(const std::string& header, const std::string& key, double fallback) {
  const auto pos = header.find(" " + key + "=");
  if (pos == std::string::npos) return fallback;
  return std::stod(header.substr(pos + key.size() + 2));
}
}  // namespace

MaxEntModel MaxEntModel::load(std::istream& in, std::shared_ptr<const SignedGraph> g) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# maxent", 0) != 0)
    throw std::runtime_error("model file: missing '# maxent' header");
  MaxEntModel m;
  m.graph_ = std::move(g);
  const bool tri = header_value(header, "triangles", 0) != 0;
  m.cfg_.max_iter = static_cast<int>(header_value(header, "max_iter", 20));
  m.cfg_.grad_tol = header_value(header, "grad_tol", 1e-5);
  m.cfg_.l2 = header_value(header, "l2", 0.0);
  m.diag_.iterations = static_cast<int>(header_value(header, "iterations", 0));
  m.diag_.grad_norm = header_value(header, "grad_norm", 0.0);
  m.diag_.dual_value = header_value(header, "dual", 0.0);
  m.diag_.converged = header_value(header, "converged", 0) != 0;

  const int32_t n = m.graph_->node_count();
  m.lambda_node_.assign(n, 0.0);
  std::vector<bool> seen(n, false);
  std::string line;
  int32_t rows = 0;
  double tri_vals[3] = {0, 0, 0};
  int tri_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw std::runtime_error("model file: malformed line '" + line + "'");
    const std::string key = line.substr(0, tab);
    const double val = std::stod(line.substr(tab + 1));
    if (key == "lambda_pp" || key == "lambda_pm" || key == "lambda_mm") {
      tri_vals[key == "lambda_pp" ? 0 : key == "lambda_pm" ? 1 : 2] = val;
      ++tri_rows;
      continue;
    }
    const int32_t idx = m.graph_->index_of(key);
    if (idx < 0) throw std::runtime_error("model file: unknown node label '" + key + "'");
    if (seen[idx]) throw std::runtime_error("model file: duplicate label '" + key + "'");
    seen[idx] = true;
    m.lambda_node_[idx] = val;
    ++rows;
  }
  if (rows != n)
    throw std::runtime_error("model file: has " + std::to_string(rows) + " node multipliers, graph has " +
                             std::to_string(n) + " nodes");
  if (tri_rows != 3) throw std::runtime_error("model file: expected 3 lambda_pp/pm/mm lines");
  m.lambda_pp_ = tri_vals[0];
  m.lambda_pm_ = tri_vals[1];
  m.lambda_mm_ = tri_vals[2];
  m.stats_ = observed_statistics(*m.graph_, tri);
  return m;
}

MaxEntModel MaxEntModel::load_file(const std::string& path, std::shared_ptr<const SignedGraph> g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load(in, std::move(g));
}

}  // namespace csne
