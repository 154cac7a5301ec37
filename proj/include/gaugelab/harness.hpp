#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaugelab/integrator.hpp"

namespace gaugelab {

struct CaseFailure {
  std::uint64_t seed = 0;
  std::string detail;
};

/// Outcome of one theorem check. passed() holds exactly when no case failed.
struct PropertyReport {
  std::string property_id;
  int cases = 0;
  std::vector<CaseFailure> failures;
  std::map<std::string, double> tolerances;

  bool passed() const noexcept { return failures.empty(); }

  void fail(std::uint64_t seed, std::string detail) { failures.push_back({seed, std::move(detail)}); }

  nlohmann::json to_json() const {
    nlohmann::json fs = nlohmann::json::array();
    for (const auto& f : failures) fs.push_back({{"seed", f.seed}, {"detail", f.detail}});
    nlohmann::json tol = nlohmann::json::object();
    for (const auto& [k, v] : tolerances) tol[k] = v;
    return {{"propertyId", property_id}, {"cases", cases}, {"failures", fs}, {"tolerances", tol}, {"passed", passed()}};
  }
};

/// The integration setup the checks run against. `bias` is a test hook that
/// shifts every estimate; a correct harness must then report failures.
struct HarnessIntegrator {
  StoppingRule rule{1e-6, 40, 6};
  TagPolicy policy = TagPolicy::hint_first(TagPolicy::random_uniform(0));
  std::function<GaugeSequence(const Integrand&, const Interval&)> gauges;
  PartitionBudget budget;
  double bias = 0.0;

  GaugeSequence gauges_for(const Integrand& f, const Interval& interval) const {
    return gauges ? gauges(f, interval) : GaugeSequence::halving(interval);
  }

  ConvergenceReport run(const Integrand& f, const Interval& interval, std::uint64_t seed) const {
    auto report = integrate_sequential(f, gauges_for(f, interval), interval, rule, policy, seed, budget);
    report.estimate += bias;
    return report;
  }

  /// Integrals are certified at margin * tau so that a property tolerance of
  /// a few tau is not consumed by a lucky replicate agreement.
  double margin = 0.5;

  HarnessIntegrator with_tau(double tau) const {
    HarnessIntegrator out = *this;
    out.rule.tau = tau * margin;
    return out;
  }
};

/// Seed of case c; case 0 uses the run seed itself, so re-running a failing
/// case seed with cases = 1 reproduces it.
inline std::uint64_t case_seed(std::uint64_t seed, int c) {
  return c == 0 ? seed : detail::splitmix64(seed + static_cast<std::uint64_t>(c));
}

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

/// Certified estimate, or a recorded failure when certification did not happen.
inline std::optional<double> certified_integral(const HarnessIntegrator& integ, const Integrand& f,
                                                const Interval& interval, std::uint64_t seed, PropertyReport& rep,
                                                std::uint64_t failure_seed) {
  try {
    const auto r = integ.run(f, interval, seed);
    if (!r.certified) {
      rep.fail(failure_seed, f.name() + ": not certified (gap " + fmt(r.final_gap()) + ")");
      return std::nullopt;
    }
    return r.estimate;
  } catch (const Error& e) {
    rep.fail(failure_seed, f.name() + ": " + e.what());
    return std::nullopt;
  }
}

inline double sampled_sup_abs(const Integrand& f, const Interval& interval, int samples = 1025) {
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = interval.a() + interval.width() * i / (samples - 1);
    m = std::max(m, std::abs(f(x)));
  }
  return m;
}

}  // namespace detail

/// Algebraic properties on random scalar and subinterval draws: positivity,
/// scalar multiple, linear combination, monotonicity, |int f| <= int |f|, and
/// |int f| <= M (b - a).
inline PropertyReport check_algebraic(const Integrand& f, const Integrand& g, const Interval& interval, double tau,
                                      int cases, std::uint64_t seed, const HarnessIntegrator& base = {}) {
  PropertyReport rep{"algebraic", cases, {}, {{"tau", tau}}};
  const HarnessIntegrator integ = base.with_tau(tau);
  for (int c = 0; c < cases; ++c) {
    const std::uint64_t cs = case_seed(seed, c);
    std::mt19937_64 rng(cs);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double alpha = -2.0 + 4.0 * unit(rng);
    const double beta = -2.0 + 4.0 * unit(rng);
    const double w = interval.width();
    const double lo = interval.a() + 0.75 * w * unit(rng);
    const double hi = std::min(interval.b(), lo + 0.25 * w + (interval.b() - lo - 0.25 * w) * unit(rng));
    const Interval sub(lo, hi);

    std::uint64_t k = 0;
    auto integral = [&](const Integrand& h) { return detail::certified_integral(integ, h, sub, cs + (++k), rep, cs); };
    const auto If = integral(f);
    const auto Ig = integral(g);
    const auto Iaf = integral(scaled(alpha, f));
    const auto Icomb = integral(linear_combination(alpha, f, beta, g));
    const auto Iabs_f = integral(absolute(f));
    const auto Iabs_g = integral(absolute(g));
    const auto Imin = integral(pointwise_min(f, g));
    const auto Imax = integral(pointwise_max(f, g));
    if (!If || !Ig || !Iaf || !Icomb || !Iabs_f || !Iabs_g || !Imin || !Imax) continue;

    const double M = detail::sampled_sup_abs(f, sub);
    const std::string where = " on [" + detail::fmt(lo) + ", " + detail::fmt(hi) + "]";
    if (*Iabs_f < -tau || *Iabs_g < -tau) rep.fail(cs, "positivity: integral of |f| or |g| below -tau" + where);
    if (std::abs(*Iaf - alpha * *If) > (std::abs(alpha) + 1.0) * tau) {
      rep.fail(cs, "scalar: |int(af) - a int f| = " + detail::fmt(std::abs(*Iaf - alpha * *If)) + where);
    }
    const double comb_err = std::abs(*Icomb - alpha * *If - beta * *Ig);
    if (comb_err > (std::abs(alpha) + std::abs(beta) + 1.0) * tau) {
      rep.fail(cs, "sum: |int(af+bg) - a int f - b int g| = " + detail::fmt(comb_err) + where);
    }
    if (*Imin > *Imax + 2.0 * tau || *Imin > *If + 2.0 * tau || *Imin > *Ig + 2.0 * tau) {
      rep.fail(cs, "monotonicity: int min(f,g) exceeds an upper integrand" + where);
    }
    if (std::abs(*If) > *Iabs_f + 2.0 * tau) rep.fail(cs, "triangle: |int f| > int |f|" + where);
    if (std::abs(*If) > M * sub.width() + tau) rep.fail(cs, "bound: |int f| > M (b - a)" + where);
  }
  return rep;
}

struct FtcOptions {
  double part1_tol = -1.0;  // default 2 tau
  bool part2 = true;
  double part2_tol = 1e-3;  // relative to max(1, |f(x)|)
  int grid_points = 9;
  int schedule_length = 24;  // h_k = (b - a) / 2^(k + 3), k < schedule_length
};

/// Part I compares the integral of f with F(b) - F(a). Part II compares
/// centered differences (G(x + h) - G(x - h)) / 2h of G(x) = int_a^x f with
/// f(x) on an interior grid; the difference of G is integrated directly over
/// [x - h, x + h] with tolerance part2_tol * h so that integration noise
/// stays below the Part II tolerance. h walks the schedule until it passes.
inline PropertyReport check_ftc(const Integrand& F, const Integrand& f, const Interval& interval, double tau,
                                std::uint64_t seed, const HarnessIntegrator& base = {}, FtcOptions opt = {}) {
  if (opt.part1_tol < 0.0) opt.part1_tol = 2.0 * tau;
  PropertyReport rep{"ftc", 1 + (opt.part2 ? opt.grid_points : 0), {},
                     {{"tau", tau}, {"part1", opt.part1_tol}, {"part2", opt.part2 ? opt.part2_tol : 0.0}}};
  const HarnessIntegrator integ = base.with_tau(tau);
  const double a = interval.a(), b = interval.b();

  if (auto est = detail::certified_integral(integ, f, interval, seed, rep, seed)) {
    const double exact = F(b) - F(a);
    rep.tolerances["part1_error"] = std::abs(*est - exact);
    if (std::abs(*est - exact) > opt.part1_tol) {
      rep.fail(seed, "part I: estimate " + detail::fmt(*est) + " vs F(b) - F(a) = " + detail::fmt(exact));
    }
  }
  if (!opt.part2) return rep;

  for (int j = 1; j <= opt.grid_points; ++j) {
    const std::uint64_t cs = case_seed(seed, j);
    const double x = a + (b - a) * j / (opt.grid_points + 1);
    const double fx = f(x);
    const double tol = opt.part2_tol * std::max(1.0, std::abs(fx));
    double best = std::numeric_limits<double>::infinity();
    bool ok = false;
    for (int k = 0; k < opt.schedule_length && !ok; ++k) {
      const double h = std::ldexp(b - a, -(k + 3));
      if (x - h < a || x + h > b) continue;
      try {
        const auto r = integ.with_tau(0.5 * tol * h).run(f, Interval(x - h, x + h), cs + static_cast<std::uint64_t>(k));
        if (!r.certified) continue;
        const double err = std::abs(r.estimate / (2.0 * h) - fx);
        best = std::min(best, err);
        ok = err <= tol;
      } catch (const Error&) {
        // too fine for the budget: later h are finer still
        break;
      }
    }
    if (!ok) rep.fail(cs, "part II at x = " + detail::fmt(x) + ": best difference error " + detail::fmt(best));
  }
  return rep;
}

struct PartsCase {
  Integrand f1, f1_prime, f2, f2_prime;
  Integrand psi, psi_prime, f_prime;
};

/// Identity A (integration by parts) and identity B (change of variables),
/// each within 3 tau.
inline PropertyReport check_parts_and_substitution(const PartsCase& pc, const Interval& interval, double tau,
                                                   std::uint64_t seed, const HarnessIntegrator& base = {}) {
  PropertyReport rep{"parts", 2, {}, {{"tau", tau}, {"slack", 3.0 * tau}}};
  const HarnessIntegrator integ = base.with_tau(tau);
  const double a = interval.a(), b = interval.b();

  const auto lhs_a = detail::certified_integral(integ, product(pc.f1_prime, pc.f2), interval, seed, rep, seed);
  const auto int_a = detail::certified_integral(integ, product(pc.f1, pc.f2_prime), interval, seed + 1, rep, seed);
  if (lhs_a && int_a) {
    const double rhs = pc.f1(b) * pc.f2(b) - pc.f1(a) * pc.f2(a) - *int_a;
    if (std::abs(*lhs_a - rhs) > 3.0 * tau) {
      rep.fail(seed, "identity A: " + detail::fmt(*lhs_a) + " vs " + detail::fmt(rhs));
    }
  }

  const double pa = pc.psi(a), pb = pc.psi(b);
  std::optional<double> lhs_b = 0.0;
  if (pa != pb) {
    const auto v = detail::certified_integral(integ, pc.f_prime, Interval(std::min(pa, pb), std::max(pa, pb)), seed,
                                              rep, seed);
    lhs_b = v ? std::optional<double>((pa < pb ? 1.0 : -1.0) * *v) : std::nullopt;
  }
  const auto rhs_b =
      detail::certified_integral(integ, product(compose(pc.f_prime, pc.psi), pc.psi_prime), interval, seed, rep, seed);
  if (lhs_b && rhs_b && std::abs(*lhs_b - *rhs_b) > 3.0 * tau) {
    rep.fail(seed, "identity B: " + detail::fmt(*lhs_b) + " vs " + detail::fmt(*rhs_b));
  }
  return rep;
}

struct HenstockResiduals {
  double sum_form = 0.0;  // |S(f, P*) - sum of cell integrals|
  double abs_form = 0.0;  // sum of |f(t) w - cell integral|
};

inline HenstockResiduals henstock_residuals(const Integrand& f, std::span<const Cell> cells) {
  HenstockResiduals r;
  double signed_total = 0.0;
  for (const Cell& c : cells) {
    const double d = f(c.tag) * c.width() - f.exact_integral(c.left, c.right);
    signed_total += d;
    r.abs_form += std::abs(d);
  }
  r.sum_form = std::abs(signed_total);
  return r;
}

/// Policies that realize the extreme tag choices plus two random ones; their
/// largest pairwise gap stands in for the sup over all fine partitions.
inline std::vector<TagPolicy> extremal_policies(std::uint64_t seed) {
  return {TagPolicy::left_endpoint(), TagPolicy::right_endpoint(), TagPolicy::random_uniform(seed),
          TagPolicy::random_uniform(detail::splitmix64(seed))};
}

/// Henstock's lemma on random subpartitions of delta_n-fine partitions, with
/// eps the extremal Cauchy gap at index n.
inline PropertyReport check_henstock_lemma(const Integrand& f, const GaugeSequence& gs, const Interval& interval,
                                           int n, int trials, std::uint64_t seed, double slack = 0.25,
                                           const PartitionBudget& budget = {}) {
  if (!f.antiderivative()) throw Error(ErrorCode::OracleMissing, f.name() + " has no antiderivative");
  PropertyReport rep{"henstock-lemma", trials, {}, {{"slack", slack}, {"n", static_cast<double>(n)}}};
  const Gauge g = gs(n);
  const double eps = probe_gap(f, g, interval, extremal_policies(seed), budget);
  rep.tolerances["eps"] = eps;
  const std::vector<TagPolicy> trial_policies{TagPolicy::random_uniform(0), TagPolicy::left_endpoint(),
                                              TagPolicy::right_endpoint(), TagPolicy::midpoint()};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t cs = case_seed(seed, t);
    const TagPolicy pol = trial_policies[static_cast<std::size_t>(t) % trial_policies.size()].reseeded(cs);
    const TaggedPartition p = cousin_partition(g, interval, pol, budget);
    std::mt19937_64 rng(cs);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
      if (t == 0 || (rng() & 1U)) keep.push_back(i);
    }
    const auto sub = subpartition_sample(p, keep);
    const auto r = henstock_residuals(f, sub);
    if (r.sum_form > (1.0 + slack) * eps) {
      rep.fail(cs, "sum form residual " + detail::fmt(r.sum_form) + " > " + detail::fmt((1.0 + slack) * eps));
    }
    if (r.abs_form > 2.0 * (1.0 + slack) * eps) {
      rep.fail(cs, "absolute form residual " + detail::fmt(r.abs_form) + " > " + detail::fmt(2.0 * (1.0 + slack) * eps));
    }
  }
  return rep;
}

using Family = std::function<Integrand(int)>;

/// |int f_k - int limit| <= (b - a) rate(k) + 2 tau for k = 1..K, the declared
/// rate checked against sampled sup |f_k - limit| and required non-increasing.
inline PropertyReport check_uniform_convergence(const Family& family, const Integrand& limit,
                                                const std::function<double(int)>& rate, const Interval& interval,
                                                int K, double tau, std::uint64_t seed,
                                                const HarnessIntegrator& base = {}) {
  PropertyReport rep{"uniform", K, {}, {{"tau", tau}, {"slack", 2.0 * tau}}};
  const HarnessIntegrator integ = base.with_tau(tau);
  const auto Ilimit = detail::certified_integral(integ, limit, interval, seed, rep, seed);
  if (!Ilimit) return rep;
  for (int k = 1; k <= K; ++k) {
    const std::uint64_t cs = case_seed(seed, k);
    const Integrand fk = family(k);
    const double bound = rate(k);
    if (k > 1 && bound > rate(k - 1)) rep.fail(cs, "rate bound increases at k = " + std::to_string(k));
    for (int i = 0; i <= 200; ++i) {
      const double x = interval.a() + interval.width() * i / 200.0;
      if (std::abs(fk(x) - limit(x)) > bound * (1.0 + 1e-12) + 1e-15) {
        rep.fail(cs, "declared rate violated at k = " + std::to_string(k) + ", x = " + detail::fmt(x));
        break;
      }
    }
    if (const auto Ik = detail::certified_integral(integ, fk, interval, cs, rep, cs)) {
      const double err = std::abs(*Ik - *Ilimit);
      if (err > interval.width() * bound + 2.0 * tau) {
        rep.fail(cs, "k = " + std::to_string(k) + ": |int f_k - int f| = " + detail::fmt(err));
      }
    }
  }
  return rep;
}

enum class Direction { NonDecreasing, NonIncreasing };

struct MonotoneResult {
  PropertyReport report;
  std::vector<double> estimates;
};

/// Monotone convergence: pointwise monotonicity is spot-checked (throws
/// MonotonicityViolated), the estimates must move monotonically within 2 tau
/// per step, and the last one must be within tail_bound(K) + 2 tau of the
/// declared limit integral.
inline MonotoneResult check_monotone_convergence(const Family& family, double limit_integral, Direction dir,
                                                 const std::function<double(int)>& tail_bound,
                                                 const Interval& interval, int K, double tau, std::uint64_t seed,
                                                 const HarnessIntegrator& base = {}) {
  MonotoneResult out{{"monotone", K, {}, {{"tau", tau}, {"slack", 2.0 * tau}}}, {}};
  PropertyReport& rep = out.report;
  const double sign = dir == Direction::NonDecreasing ? 1.0 : -1.0;
  for (int k = 1; k < K; ++k) {
    const Integrand lo = family(k), hi = family(k + 1);
    for (int i = 0; i < 100; ++i) {
      const double x = interval.a() + interval.width() * (i + 0.5) / 100.0;
      if (sign * (hi(x) - lo(x)) < 0.0) {
        throw Error(ErrorCode::MonotonicityViolated,
                    "family not monotone between k = " + std::to_string(k) + " and " + std::to_string(k + 1));
      }
    }
  }
  const HarnessIntegrator integ = base.with_tau(tau);
  for (int k = 1; k <= K; ++k) {
    const std::uint64_t cs = case_seed(seed, k);
    const auto Ik = detail::certified_integral(integ, family(k), interval, cs, rep, cs);
    if (!Ik) return out;
    if (!out.estimates.empty() && sign * (*Ik - out.estimates.back()) < -2.0 * tau) {
      rep.fail(cs, "estimates not monotone at k = " + std::to_string(k));
    }
    out.estimates.push_back(*Ik);
  }
  const double tail = std::abs(out.estimates.back() - limit_integral);
  if (tail > tail_bound(K) + 2.0 * tau) {
    rep.fail(case_seed(seed, K), "|int f_K - int f| = " + detail::fmt(tail) + " exceeds the tail bound");
  }
  return out;
}

}  // namespace gaugelab
