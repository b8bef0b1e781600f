#include "transitepi/threshold.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "boost/pending/disjoint_sets.hpp"
#include "fmt/core.h"

#include "transitepi/error.h"
#include "transitepi/rng.h"

namespace transitepi {

intervention_alpha::intervention_alpha(double alpha) : alpha_{alpha} {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw config_error{fmt::format("alpha {} outside [0, 1]", alpha)};
  }
}

effective_degree_moments effective_moments(degree_decomposition const& d,
                                           intervention_alpha alpha) {
  if (d.size() == 0) {
    throw model_error{model_errc::empty_population,
                      "effective moments of an empty population"};
  }
  auto const a = alpha.value();
  effective_degree_moments m;
  for (auto i = std::size_t{0}; i < d.size(); ++i) {
    auto const k = a * d.k_bus[i] + d.k_nonbus[i];
    m.mean_k_alpha += k;
    m.mean_k_alpha_sq += k * k;
  }
  m.mean_k_alpha /= static_cast<double>(d.size());
  m.mean_k_alpha_sq /= static_cast<double>(d.size());
  return m;
}

w_mu compute_w_mu(degree_decomposition const& d, intervention_alpha alpha) {
  auto const m = compute_degree_moments(d);
  if (m.mean_knonbus <= 0.0) {
    throw model_error{model_errc::zero_non_bus_degree,
                      "mean non-transit degree is zero"};
  }
  auto const a = alpha.value();
  w_mu r;
  r.mu = m.mean_kbus / m.mean_knonbus;
  r.w = (a * r.mu + 1.0) / (r.mu + 1.0);
  if (r.w != a) {
    auto const back = (1.0 - r.w) / (r.w - a);
    if (std::abs(back - r.mu) > 1e-9 * std::max(1.0, r.mu)) {
      throw std::logic_error{fmt::format(
          "mu = {} but (1 - w) / (w - alpha) = {}", r.mu, back)};
    }
  }
  return r;
}

outbreak_estimate outbreak_size(degree_decomposition const& d,
                                intervention_alpha alpha, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw config_error{fmt::format("transmissibility {} outside [0, 1]", t)};
  }
  auto const m = compute_degree_moments(d);
  if (m.mean_k <= 0.0) {
    throw model_error{model_errc::zero_mean_degree, "mean degree is zero"};
  }
  auto const [w, mu] = compute_w_mu(d, alpha);
  auto const eff = effective_moments(d, alpha);
  auto const v = eff.mean_k_alpha_sq / m.mean_k2;
  auto const wk = w * m.mean_k;
  auto const denom = 1.0 - t * (v * m.mean_k2 - wk) / wk;
  if (denom <= 0.0) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  return {1.0 + t * wk / denom, false};
}

threshold_value transmissibility_threshold(degree_decomposition const& d,
                                           intervention_alpha alpha) {
  auto const eff = effective_moments(d, alpha);
  if (eff.mean_k_alpha <= 0.0) {
    throw model_error{model_errc::zero_mean_degree,
                      "mean effective degree is zero"};
  }
  if (eff.mean_k_alpha_sq <= eff.mean_k_alpha) {
    throw model_error{
        model_errc::degenerate_degrees,
        fmt::format("<k_alpha^2> = {} <= <k_alpha> = {}", eff.mean_k_alpha_sq,
                    eff.mean_k_alpha)};
  }
  auto const t_c = 1.0 / (eff.mean_k_alpha_sq / eff.mean_k_alpha - 1.0);
  return t_c > 1.0 ? threshold_value{1.0, true} : threshold_value{t_c, false};
}

threshold_report make_threshold_report(degree_decomposition const& d,
                                       intervention_alpha alpha, double t) {
  auto const m = compute_degree_moments(d);
  auto const eff = effective_moments(d, alpha);
  auto const [w, mu] = compute_w_mu(d, alpha);
  threshold_report r;
  r.alpha = alpha.value();
  r.mean_k_alpha = eff.mean_k_alpha;
  r.w = w;
  r.mu = mu;
  r.v = m.mean_k2 > 0.0 ? eff.mean_k_alpha_sq / m.mean_k2 : 1.0;
  try {
    r.t_c = transmissibility_threshold(d, alpha);
  } catch (model_error const& e) {
    if (e.code() != model_errc::degenerate_degrees) {
      throw;
    }
  }
  r.transmissibility_t = t;
  r.outbreak = outbreak_size(d, alpha, t);
  return r;
}

namespace {

struct sample_graph {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<double> u;  // per-edge uniform; the edge is open when u < T
};

sample_graph build_sample(degree_decomposition const& d, double alpha,
                          std::uint64_t seed, std::uint32_t sample) {
  counter_stream rng{seed, sample, 0, stream_tag::percolation};
  std::vector<std::uint32_t> stubs;
  for (auto i = std::uint32_t{0}; i < d.size(); ++i) {
    auto const k = alpha * d.k_bus[i] + d.k_nonbus[i];
    auto const whole = std::floor(k);
    auto const n = static_cast<std::size_t>(whole) +
                   (rng.uniform() < k - whole ? 1U : 0U);
    stubs.insert(stubs.end(), n, i);
  }
  if (stubs.size() % 2 != 0) {
    stubs.push_back(static_cast<std::uint32_t>(rng.below(d.size())));
  }
  shuffle(std::span{stubs}, rng);
  sample_graph g;
  g.edges.reserve(stubs.size() / 2);
  g.u.reserve(stubs.size() / 2);
  for (auto k = std::size_t{0}; k + 1 < stubs.size(); k += 2) {
    g.edges.emplace_back(stubs[k], stubs[k + 1]);
    g.u.push_back(rng.uniform());
  }
  return g;
}

class union_find {
public:
  explicit union_find(std::size_t n)
      : rank_(n), parent_(n), size_(n, 1U), sets_{rank_.data(), parent_.data()} {
    for (auto i = std::size_t{0}; i < n; ++i) {
      sets_.make_set(i);
    }
  }

  std::size_t find(std::size_t x) { return sets_.find_set(x); }

  // Returns the size of the merged component.
  std::size_t unite(std::size_t a, std::size_t b) {
    auto const ra = find(a);
    auto const rb = find(b);
    if (ra == rb) {
      return size_[ra];
    }
    sets_.link(ra, rb);
    auto const r = find(ra);
    size_[r] = size_[ra] + size_[rb];
    return size_[r];
  }

  std::size_t size_of(std::size_t x) { return size_[find(x)]; }

private:
  std::vector<std::size_t> rank_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  boost::disjoint_sets<std::size_t*, std::size_t*> sets_;
};

struct sample_outcome {
  double sum{0.0};    // summed component sizes over measured roots
  double count{0.0};  // measured roots (or vertices)
  double giant{0.0};
};

// Ratio estimator with a between-sample (clustered) standard error.
std::pair<double, double> ratio_mean_se(
    std::vector<sample_outcome> const& s) {
  auto const total = std::accumulate(
      s.begin(), s.end(), 0.0,
      [](double acc, sample_outcome const& o) { return acc + o.sum; });
  auto const n = std::accumulate(
      s.begin(), s.end(), 0.0,
      [](double acc, sample_outcome const& o) { return acc + o.count; });
  if (n == 0.0) {
    return {0.0, 0.0};
  }
  auto const mean = total / n;
  auto var = 0.0;
  for (auto const& o : s) {
    auto const r = o.sum - mean * o.count;
    var += r * r;
  }
  auto const k = static_cast<double>(s.size());
  auto const se = k > 1 ? std::sqrt(var * k / (k - 1)) / n : 0.0;
  return {mean, se};
}

void check_transmissibility(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw config_error{fmt::format("transmissibility {} outside [0, 1]", t)};
  }
}

}  // namespace

percolation_result percolation_oracle(degree_decomposition const& d,
                                      intervention_alpha alpha, double t,
                                      percolation_options const& opt) {
  check_transmissibility(t);
  if (opt.samples == 0) {
    throw config_error{"percolation oracle needs at least one sample"};
  }
  if (d.size() == 0) {
    throw model_error{model_errc::empty_population,
                      "percolation on an empty population"};
  }
  auto const m = d.size();
  // Below the critical cluster size m^(2/3) no component counts as giant,
  // whatever the cutoff; small towns would otherwise drop their largest pair.
  auto const giant_floor =
      std::max(opt.giant_cutoff * static_cast<double>(m),
               std::cbrt(static_cast<double>(m) * static_cast<double>(m)));
  std::vector<sample_outcome> outcomes(opt.samples);

  auto const n_samples = static_cast<std::ptrdiff_t>(opt.samples);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t s = 0; s < n_samples; ++s) {
    auto const sample = static_cast<std::uint32_t>(s);
    auto const g = build_sample(d, alpha.value(), opt.seed, sample);
    union_find uf{m};
    for (auto e = std::size_t{0}; e < g.edges.size(); ++e) {
      if (g.u[e] < t) {
        uf.unite(g.edges[e].first, g.edges[e].second);
      }
    }
    auto giant_root = std::size_t{0};
    auto largest = std::size_t{0};
    for (auto v = std::size_t{0}; v < m; ++v) {
      if (uf.find(v) == v && uf.size_of(v) > largest) {
        largest = uf.size_of(v);
        giant_root = v;
      }
    }
    auto const has_giant = static_cast<double>(largest) >= giant_floor;
    auto const in_giant = [&](std::size_t v) {
      return has_giant && uf.find(v) == giant_root;
    };

    auto& out = outcomes[static_cast<std::size_t>(s)];
    out.giant = static_cast<double>(largest) / static_cast<double>(m);
    if (opt.roots_per_sample == 0) {
      for (auto v = std::size_t{0}; v < m; ++v) {
        if (!in_giant(v)) {
          out.sum += static_cast<double>(uf.size_of(v));
          out.count += 1.0;
        }
      }
    } else {
      counter_stream roots{opt.seed, sample, 1, stream_tag::percolation};
      for (auto r = std::size_t{0}; r < opt.roots_per_sample; ++r) {
        auto const v = static_cast<std::size_t>(roots.below(m));
        if (!in_giant(v)) {
          out.sum += static_cast<double>(uf.size_of(v));
          out.count += 1.0;
        }
      }
    }
  }

  percolation_result res;
  std::tie(res.mean_component_size, res.mean_component_size_se) =
      ratio_mean_se(outcomes);
  auto g_sum = 0.0;
  auto g_sq = 0.0;
  for (auto const& o : outcomes) {
    g_sum += o.giant;
    g_sq += o.giant * o.giant;
    res.roots += static_cast<std::size_t>(o.count);
  }
  auto const k = static_cast<double>(outcomes.size());
  res.giant_fraction = g_sum / k;
  res.giant_fraction_se =
      k > 1 ? std::sqrt(std::max(0.0, (g_sq - g_sum * g_sum / k) / (k - 1)) / k)
            : 0.0;
  return res;
}

percolation_crossing percolation_threshold(degree_decomposition const& d,
                                           intervention_alpha alpha,
                                           double level, std::size_t samples,
                                           std::uint64_t seed) {
  if (samples == 0 || !(level > 0.0 && level <= 1.0)) {
    throw config_error{"crossing needs samples >= 1 and level in (0, 1]"};
  }
  if (d.size() == 0) {
    throw model_error{model_errc::empty_population,
                      "percolation on an empty population"};
  }
  auto const m = d.size();
  auto const target = static_cast<std::size_t>(
      std::ceil(level * static_cast<double>(m) - 1e-9));
  std::vector<double> crossing(samples, 1.0);

  auto const n_samples = static_cast<std::ptrdiff_t>(samples);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t s = 0; s < n_samples; ++s) {
    auto const g =
        build_sample(d, alpha.value(), seed, static_cast<std::uint32_t>(s));
    std::vector<std::size_t> order(g.edges.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return g.u[a] < g.u[b]; });
    union_find uf{m};
    auto& c = crossing[static_cast<std::size_t>(s)];
    if (target <= 1) {
      c = 0.0;
      continue;
    }
    for (auto const e : order) {
      if (uf.unite(g.edges[e].first, g.edges[e].second) >= target) {
        c = g.u[e];
        break;
      }
    }
  }

  auto const k = static_cast<double>(samples);
  auto const mean = std::accumulate(crossing.begin(), crossing.end(), 0.0) / k;
  auto var = 0.0;
  for (auto const c : crossing) {
    var += (c - mean) * (c - mean);
  }
  return {mean, samples > 1 ? std::sqrt(var / (k - 1) / k) : 0.0};
}

std::string serialize_threshold_reports(
    std::vector<threshold_report> const& reports,
    std::vector<std::optional<percolation_result>> const& oracle) {
  auto const with_oracle = std::any_of(
      oracle.begin(), oracle.end(),
      [](auto const& o) { return o.has_value(); });
  std::string out =
      "alpha,mean_k_alpha,w,mu,v,t_c,t_c_above_one,T,outbreak_size";
  if (with_oracle) {
    out += ",oracle_mean_component_size,oracle_mean_component_size_se,"
           "oracle_giant_fraction";
  }
  out += '\n';
  auto const num = [](double x) {
    return std::isinf(x) ? std::string{"inf"} : fmt::format("{:.10g}", x);
  };
  for (auto k = std::size_t{0}; k < reports.size(); ++k) {
    auto const& r = reports[k];
    out += fmt::format(
        "{},{},{},{},{},{},{},{},{}", num(r.alpha), num(r.mean_k_alpha),
        num(r.w), num(r.mu), num(r.v),
        r.t_c ? num(r.t_c->t_c) : std::string{"nan"},
        r.t_c && r.t_c->above_one ? 1 : 0, num(r.transmissibility_t),
        r.outbreak.divergent ? std::string{"divergent"}
                             : num(r.outbreak.value));
    if (with_oracle) {
      if (k < oracle.size() && oracle[k]) {
        out += fmt::format(",{},{},{}", num(oracle[k]->mean_component_size),
                           num(oracle[k]->mean_component_size_se),
                           num(oracle[k]->giant_fraction));
      } else {
        out += ",,,";
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace transitepi
