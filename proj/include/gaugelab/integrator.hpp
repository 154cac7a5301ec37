#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <string>
#include <vector>

#include "gaugelab/core.hpp"
#include "gaugelab/gauge.hpp"
#include "gaugelab/integrand.hpp"
#include "gaugelab/partitioner.hpp"

namespace gaugelab {

struct StoppingRule {
  double tau = 1e-6;
  int max_index = 40;
  int replicates = 3;

  void validate() const {
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    if (max_index < 1) throw Error(ErrorCode::InvalidArgument, "max_index must be >= 1");
    if (replicates < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 replicates");
  }
};

/// Riemann sums per gauge index. Indices are 1-based in the API (stopped_at)
/// and 0-based in the vectors: gaps[stopped_at - 1] is the final gap.
struct ConvergenceReport {
  std::vector<std::vector<double>> sums;
  std::vector<double> gaps;
  double estimate = 0.0;
  bool certified = false;
  int stopped_at = 0;
  std::vector<std::vector<std::size_t>> cell_counts;

  double final_gap() const { return gaps.empty() ? 0.0 : gaps.back(); }
  std::size_t total_cells() const {
    std::size_t n = 0;
    for (const auto& row : cell_counts)
      for (std::size_t c : row) n += c;
    return n;
  }
};

/// Seed of replicate r at gauge index n.
inline std::uint64_t replicate_seed(std::uint64_t seed, int n, int r) {
  return detail::splitmix64(detail::splitmix64(seed ^ (static_cast<std::uint64_t>(n) << 32)) +
                            static_cast<std::uint64_t>(r));
}

inline double max_pairwise_gap(const std::vector<double>& sums) {
  double gap = 0.0;
  for (std::size_t i = 0; i < sums.size(); ++i)
    for (std::size_t j = i + 1; j < sums.size(); ++j) gap = std::max(gap, std::abs(sums[i] - sums[j]));
  return gap;
}

namespace detail {

struct SampledSum {
  double sum;
  std::size_t cells;
};

inline SampledSum fine_sum(const Integrand& f, const Gauge& g, const Interval& interval, const TagPolicy& policy,
                           const PartitionBudget& budget) {
  const TaggedPartition p = cousin_partition(g, interval, policy, budget);
  const double s = riemann_sum(f, p);
  if (!std::isfinite(s)) throw Error(ErrorCode::NonFiniteSum, "Riemann sum of " + f.name() + " is not finite");
  return {s, p.cells.size()};
}

/// One fine sum per policy, computed concurrently and returned in input order.
inline std::vector<SampledSum> fine_sums(const Integrand& f, const Gauge& g, const Interval& interval,
                                         const std::vector<TagPolicy>& policies, const PartitionBudget& budget) {
  std::vector<std::future<SampledSum>> jobs;
  jobs.reserve(policies.size());
  for (const auto& pol : policies) {
    jobs.push_back(std::async(std::launch::async, [&, pol] { return fine_sum(f, g, interval, pol, budget); }));
  }
  std::vector<SampledSum> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

inline std::vector<TagPolicy> replicate_policies(const TagPolicy& policy, std::uint64_t seed, int n, int replicates) {
  std::vector<TagPolicy> out;
  for (int r = 0; r < replicates; ++r) out.push_back(policy.reseeded(replicate_seed(seed, n, r)));
  return out;
}

}  // namespace detail

/// Sequential driver: for n = 1, 2, ... build `replicates` independently
/// seeded delta_n-fine partitions and stop once the largest pairwise gap
/// between their Riemann sums drops below tau.
inline ConvergenceReport integrate_sequential(const Integrand& f, const GaugeSequence& gs, const Interval& interval,
                                              const StoppingRule& rule, const TagPolicy& policy, std::uint64_t seed,
                                              const PartitionBudget& budget = {}) {
  rule.validate();
  if (!f.domain().contains(interval)) {
    throw Error(ErrorCode::EvalDomain, "interval outside the domain of " + f.name());
  }
  ConvergenceReport report;
  for (int n = 1; n <= rule.max_index; ++n) {
    const Gauge g = gs(n);
    const auto results =
        detail::fine_sums(f, g, interval, detail::replicate_policies(policy, seed, n, rule.replicates), budget);
    std::vector<double> sums;
    std::vector<std::size_t> counts;
    for (const auto& r : results) {
      sums.push_back(r.sum);
      counts.push_back(r.cells);
    }
    report.gaps.push_back(max_pairwise_gap(sums));
    report.sums.push_back(std::move(sums));
    report.cell_counts.push_back(std::move(counts));
    report.stopped_at = n;
    if (report.gaps.back() < rule.tau) {
      report.certified = true;
      break;
    }
  }
  const auto& last = report.sums.back();
  double total = 0.0;
  for (double s : last) total += s;
  report.estimate = total / static_cast<double>(last.size());
  return report;
}

/// Integration over a subinterval of the integrand's domain with the same
/// gauge sequence; identical contract to integrate_sequential.
inline ConvergenceReport restrict(const Integrand& f, const GaugeSequence& gs, const Interval& sub,
                                  const StoppingRule& rule, const TagPolicy& policy, std::uint64_t seed,
                                  const PartitionBudget& budget = {}) {
  return integrate_sequential(f, gs, sub, rule, policy, seed, budget);
}

/// Largest |S(f, P) - S(f, Q)| over pairs of g-fine partitions, one per policy.
inline double probe_gap(const Integrand& f, const Gauge& g, const Interval& interval,
                        const std::vector<TagPolicy>& policies, const PartitionBudget& budget = {}) {
  std::vector<double> sums;
  for (const auto& r : detail::fine_sums(f, g, interval, policies, budget)) sums.push_back(r.sum);
  return max_pairwise_gap(sums);
}

inline double cauchy_gap(const Integrand& f, const Gauge& g, const Interval& interval, int replicates,
                         const TagPolicy& policy, std::uint64_t seed, const PartitionBudget& budget = {}) {
  if (replicates < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 replicates");
  std::vector<TagPolicy> policies;
  for (int r = 0; r < replicates; ++r) policies.push_back(policy.reseeded(replicate_seed(seed, 0, r)));
  return probe_gap(f, g, interval, policies, budget);
}

struct DarbouxSums {
  double lower = 0.0;
  double upper = 0.0;
};

/// Sampled lower/upper sums. Per cell, the infimum and supremum are taken over
/// both endpoints, the tag, and samples_per_cell - 3 stratified points drawn
/// from the seed. They bracket the Riemann sum of p but are approximations of
/// the true Darboux sums.
inline DarbouxSums darboux_sums(const Integrand& f, const TaggedPartition& p, int samples_per_cell,
                                std::uint64_t seed) {
  if (samples_per_cell < 2) throw Error(ErrorCode::InvalidArgument, "samples_per_cell must be >= 2");
  const int extra = std::max(0, samples_per_cell - 3);
  DarbouxSums out;
  for (std::size_t i = 0; i < p.cells.size(); ++i) {
    const Cell& c = p.cells[i];
    double lo = std::min(f(Tag(c.left)), f(Tag(c.right)));
    double hi = std::max(f(Tag(c.left)), f(Tag(c.right)));
    const double at_tag = f(c.tag);
    lo = std::min(lo, at_tag);
    hi = std::max(hi, at_tag);
    for (int k = 0; k < extra; ++k) {
      const double u = (k + detail::node_uniform(seed, k, i)) / extra;
      const double y = f(Tag(std::clamp(c.left + u * (c.right - c.left), c.left, c.right)));
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    out.lower += lo * c.width();
    out.upper += hi * c.width();
  }
  return out;
}

struct BracketCheck {
  std::vector<DarbouxSums> brackets;  // one per recorded index
  bool contains_estimate = false;     // final index, tau slack
  bool contains_index_means = false;  // every index, tau slack
  bool widths_shrink = false;         // within 10% slack
  bool ok() const noexcept { return contains_estimate && contains_index_means && widths_shrink; }
  explicit operator bool() const noexcept { return ok(); }
};

/// Regenerates the first replicate's partition at every recorded index of a
/// report and brackets the recorded sums by sampled Darboux sums.
inline BracketCheck darboux_bracket_check(const Integrand& f, const GaugeSequence& gs, const Interval& interval,
                                          const ConvergenceReport& report, double tau, int samples_per_cell,
                                          std::uint64_t seed, const TagPolicy& policy,
                                          const PartitionBudget& budget = {}) {
  BracketCheck out;
  out.contains_index_means = true;
  out.widths_shrink = true;
  for (int n = 1; n <= report.stopped_at; ++n) {
    const auto p = cousin_partition(gs(n), interval, policy.reseeded(replicate_seed(seed, n, 0)), budget);
    out.brackets.push_back(darboux_sums(f, p, samples_per_cell, seed + static_cast<std::uint64_t>(n)));
    const auto& row = report.sums[static_cast<std::size_t>(n - 1)];
    double mean = 0.0;
    for (double s : row) mean += s;
    mean /= static_cast<double>(row.size());
    const auto& b = out.brackets.back();
    if (!(b.lower - tau <= mean && mean <= b.upper + tau)) out.contains_index_means = false;
    if (n > 1) {
      const auto& prev = out.brackets[out.brackets.size() - 2];
      if (b.upper - b.lower > 1.1 * (prev.upper - prev.lower)) out.widths_shrink = false;
    }
  }
  if (!out.brackets.empty()) {
    const auto& last = out.brackets.back();
    out.contains_estimate = last.lower - tau <= report.estimate && report.estimate <= last.upper + tau;
  }
  return out;
}

}  // namespace gaugelab
