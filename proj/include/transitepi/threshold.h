#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "transitepi/contact_graph.h"

namespace transitepi {

/// Remaining share of the transit degree after an intervention, in [0, 1].
class intervention_alpha {
public:
  /// Throws config_error outside [0, 1].
  explicit intervention_alpha(double alpha);
  double value() const { return alpha_; }

private:
  double alpha_;
};

struct effective_degree_moments {
  double mean_k_alpha{0.0};
  double mean_k_alpha_sq{0.0};
};

/// Moments of k_alpha,i = alpha * k_bus,i + k_nonbus,i. Throws
/// model_error(empty_population).
effective_degree_moments effective_moments(degree_decomposition const&,
                                           intervention_alpha);

struct w_mu {
  double w{1.0};
  double mu{0.0};
};

/// mu = <k_bus> / <k_nonbus>, w = (alpha mu + 1) / (mu + 1). Throws
/// model_error(zero_non_bus_degree) when <k_nonbus> = 0 and
/// std::logic_error if mu = (1 - w) / (w - alpha) fails to hold.
w_mu compute_w_mu(degree_decomposition const&, intervention_alpha);

struct outbreak_estimate {
  double value{1.0};
  bool divergent{false};
};

/// <s> = 1 + T w <k> / (1 - T (v <k^2> - w <k>) / (w <k>)) with
/// v = <k_alpha^2> / <k^2>; divergent when the denominator is <= 0.
/// Throws model_error(zero_mean_degree) when <k> = 0.
outbreak_estimate outbreak_size(degree_decomposition const&, intervention_alpha,
                                double transmissibility_t);

struct threshold_value {
  double t_c{1.0};
  bool above_one{false};  // formula gave T_c > 1, value clamped to 1
};

/// 1 / T_c = <k_alpha^2> / <k_alpha> - 1. Throws model_error
/// (zero_mean_degree) when <k_alpha> = 0 and (degenerate_degrees) when
/// <k_alpha^2> <= <k_alpha>.
threshold_value transmissibility_threshold(degree_decomposition const&,
                                           intervention_alpha);

struct threshold_report {
  double alpha{1.0};
  double mean_k_alpha{0.0};
  double w{1.0};
  double mu{0.0};
  double v{1.0};
  std::optional<threshold_value> t_c;  // empty for degenerate degrees
  double transmissibility_t{0.0};
  outbreak_estimate outbreak;
};

threshold_report make_threshold_report(degree_decomposition const&,
                                       intervention_alpha,
                                       double transmissibility_t);

struct percolation_options {
  std::size_t samples{1000};
  std::uint64_t seed{0};
  /// Random roots per sample; 0 averages over every vertex instead.
  std::size_t roots_per_sample{1};
  /// Largest components at or above this share of m, and at least m^(2/3)
  /// vertices, count as giant.
  double giant_cutoff{0.01};
};

struct percolation_result {
  double mean_component_size{0.0};
  double mean_component_size_se{0.0};
  double giant_fraction{0.0};
  double giant_fraction_se{0.0};
  std::size_t roots{0};  // roots outside the giant that were measured
};

/// Bond percolation on configuration-model multigraphs built from the
/// stochastically rounded effective degrees, each edge kept with
/// probability T. An odd stub total gets one extra stub on a random node.
percolation_result percolation_oracle(degree_decomposition const&,
                                      intervention_alpha,
                                      double transmissibility_t,
                                      percolation_options const&);

struct percolation_crossing {
  double t{0.0};
  double se{0.0};
};

/// Mean over samples of the smallest T at which the largest component
/// reaches `level` * m. Each sample fixes its multigraph and per-edge
/// uniforms, so the largest component grows monotonically in T and the
/// crossing is exact per sample.
percolation_crossing percolation_threshold(degree_decomposition const&,
                                           intervention_alpha, double level,
                                           std::size_t samples,
                                           std::uint64_t seed);

/// One row per (alpha, T): alpha, mean_k_alpha, w, mu, v, t_c,
/// t_c_above_one, T, outbreak_size, plus oracle columns when present.
std::string serialize_threshold_reports(
    std::vector<threshold_report> const&,
    std::vector<std::optional<percolation_result>> const& oracle = {});

}  // namespace transitepi
