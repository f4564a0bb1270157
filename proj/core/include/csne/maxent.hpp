#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "csne/features.hpp"
#include "csne/graph.hpp"

namespace csne {

struct PriorFitConfig {
  int max_iter = 20;
  double grad_tol = 1e-5;  // infinity norm of the dual gradient
  double l2 = 0.0;         // ridge weight on the multipliers
};

struct FitDiagnostics {
  int iterations = 0;      // Newton updates applied
  double grad_norm = 0.0;  // infinity norm at exit
  double dual_value = 0.0;
  bool converged = false;
};

/// The convex dual objective of the sign prior, on the {0,1} edge recoding
/// b_ij = (a_ij+1)/2:
///
///   L(theta) = sum_edges softplus(s_ij) - sum_k t_k theta_k + l2/2 ||theta||^2
///
/// where s_ij = theta_i + theta_j + f_pp lpp + f_pm lpm + f_mm lmm and t_k are
/// the recoded targets. Variables are ordered node multipliers first, then
/// (when triangles are enabled) lambda_pp, lambda_pm, lambda_mm.
class MaxEntDual {
 public:
  MaxEntDual(const SignedGraph& g, const StatisticSet& stats, double l2);

  int dimension() const { return dim_; }
  double value(std::span<const double> theta) const;
  void gradient(std::span<const double> theta, std::span<double> out) const;
  std::span<const double> targets() const { return targets_; }

 private:
  friend class MaxEntModel;
  const SignedGraph* g_;
  const StatisticSet* stats_;
  int dim_;
  double l2_;
  std::vector<double> targets_;  // recoded {0,1} targets t_k
};

/// Maximum-entropy prior over edge signs: independent Bernoulli per pair with
/// success probability logistic(lambda_i + lambda_j + f . lambda_tri).
class MaxEntModel {
 public:
  MaxEntModel() = default;

  /// Damped Newton on the dual with backtracking line search; falls back to a
  /// diagonally preconditioned descent step when the Hessian solve fails.
  /// Throws std::invalid_argument on a zero-edge graph and std::runtime_error
  /// if the dual turns non-finite (with the iteration index).
  static MaxEntModel fit(std::shared_ptr<const SignedGraph> g, StatisticSet stats,
                         const PriorFitConfig& cfg = {});

  /// Linear predictor lambda_i + lambda_j + f_pp*lpp + f_pm*lpm + f_mm*lmm.
  double score(int32_t i, int32_t j, const PairFeatures& f) const;
  /// Same, with wedge features computed against the training graph.
  double score(int32_t i, int32_t j) const;

  /// logistic(score), clamped to [1e-12, 1-1e-12].
  double prior_probability(int32_t i, int32_t j) const;

  /// Success probabilities for every training edge, in edge-list order.
  std::vector<double> edge_probabilities() const;

  /// Constraint residuals on the {-1,+1} scale, one per statistic (node
  /// polarities first, then pp/pm/mm when triangles are enabled):
  ///   sum_E f_k (2 P(a=1) - 1) - c_k
  std::vector<double> constraint_residuals() const;

  bool use_triangles() const { return stats_.use_triangles; }
  const std::vector<double>& node_multipliers() const { return lambda_node_; }
  double lambda_pp() const { return lambda_pp_; }
  double lambda_pm() const { return lambda_pm_; }
  double lambda_mm() const { return lambda_mm_; }
  const FitDiagnostics& diagnostics() const { return diag_; }
  const PriorFitConfig& config() const { return cfg_; }
  const SignedGraph& graph() const { return *graph_; }
  const std::shared_ptr<const SignedGraph>& graph_ptr() const { return graph_; }
  const StatisticSet& statistics() const { return stats_; }

  /// Model file: one header line with flags and diagnostics, then
  /// node_label<TAB>lambda per node, then lambda_pp/pm/mm lines.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  /// Loads multipliers and rebinds them to `g` by node label; recomputes the
  /// feature cache. Throws std::runtime_error on format or label mismatches.
  static MaxEntModel load(std::istream& in, std::shared_ptr<const SignedGraph> g);
  static MaxEntModel load_file(const std::string& path, std::shared_ptr<const SignedGraph> g);

 private:
  std::shared_ptr<const SignedGraph> graph_;
  StatisticSet stats_;
  std::vector<double> lambda_node_;
  double lambda_pp_ = 0.0;
  double lambda_pm_ = 0.0;
  double lambda_mm_ = 0.0;
  PriorFitConfig cfg_;
  FitDiagnostics diag_;
};

/// Numerically stable logistic and softplus.
double logistic(double x);
double softplus(double x);

}  // namespace csne
