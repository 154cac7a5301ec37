#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gaugelab/core.hpp"

namespace gaugelab {

enum class Provenance { ClosedForm, Oracle, None };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::Oracle: return "oracle";
    case Provenance::None: return "none";
  }
  return "none";
}

/// Reference integral over the interval the integrand was registered with.
struct Reference {
  double value = 0.0;
  Provenance provenance = Provenance::None;
};

/// A real function on a compact domain, evaluated at tags so that
/// rationality-sensitive integrands can read the exact part.
///
/// Evaluation must be pure and reentrant. Points listed in singularities
/// return a finite convention value instead of the (undefined) function value.
class Integrand {
 public:
  using TagFn = std::function<double(const Tag&)>;
  using RealFn = std::function<double(double)>;

  Integrand(std::string name, TagFn eval, Interval domain)
      : name_(std::move(name)), eval_(std::make_shared<const TagFn>(std::move(eval))), domain_(domain) {}

  static Integrand from_real(std::string name, RealFn fn, Interval domain) {
    return Integrand(std::move(name), [fn = std::move(fn)](const Tag& t) { return fn(t.value()); }, domain);
  }

  const std::string& name() const noexcept { return name_; }
  const Interval& domain() const noexcept { return domain_; }
  const std::optional<Reference>& reference() const noexcept { return reference_; }
  const std::vector<double>& singularities() const noexcept { return singularities_; }
  const std::optional<RealFn>& antiderivative() const noexcept { return antiderivative_; }

  Integrand with_reference(Reference r) const {
    Integrand out = *this;
    out.reference_ = r;
    return out;
  }
  Integrand with_singularities(std::vector<double> s) const {
    Integrand out = *this;
    out.singularities_ = std::move(s);
    return out;
  }
  Integrand with_antiderivative(RealFn F) const {
    Integrand out = *this;
    out.antiderivative_ = std::move(F);
    return out;
  }
  Integrand with_name(std::string name) const {
    Integrand out = *this;
    out.name_ = std::move(name);
    return out;
  }
  /// Same function on a different domain; drops the reference value, which
  /// belongs to the old domain, but keeps the antiderivative.
  Integrand with_domain(Interval domain) const {
    Integrand out = *this;
    out.domain_ = domain;
    out.reference_.reset();
    return out;
  }

  double operator()(const Tag& t) const {
    if (!domain_.contains(t.value())) {
      throw Error(ErrorCode::EvalDomain, name_ + " evaluated at " + std::to_string(t.value()));
    }
    return (*eval_)(t);
  }
  double operator()(double x) const { return (*this)(Tag(x)); }

  /// Exact integral over [lo, hi] from the antiderivative.
  double exact_integral(double lo, double hi) const {
    if (!antiderivative_) throw Error(ErrorCode::OracleMissing, name_ + " has no antiderivative");
    return (*antiderivative_)(hi) - (*antiderivative_)(lo);
  }

 private:
  std::string name_;
  std::shared_ptr<const TagFn> eval_;
  Interval domain_;
  std::optional<Reference> reference_;
  std::vector<double> singularities_;
  std::optional<RealFn> antiderivative_;
};

namespace detail {

inline Interval intersect(const Interval& x, const Interval& y) {
  return Interval(std::max(x.a(), y.a()), std::min(x.b(), y.b()));
}

}  // namespace detail

// Pointwise combinators. Results carry no reference value; antiderivatives are
// propagated only where linearity makes that exact.

inline Integrand linear_combination(double alpha, const Integrand& f, double beta, const Integrand& g) {
  Integrand out(std::to_string(alpha) + "*" + f.name() + "+" + std::to_string(beta) + "*" + g.name(),
                [=](const Tag& t) { return alpha * f(t) + beta * g(t); },
                detail::intersect(f.domain(), g.domain()));
  if (f.antiderivative() && g.antiderivative()) {
    auto F = *f.antiderivative();
    auto G = *g.antiderivative();
    out = out.with_antiderivative([=](double x) { return alpha * F(x) + beta * G(x); });
  }
  return out;
}

inline Integrand scaled(double alpha, const Integrand& f) {
  Integrand out(std::to_string(alpha) + "*" + f.name(), [=](const Tag& t) { return alpha * f(t); }, f.domain());
  if (f.antiderivative()) {
    auto F = *f.antiderivative();
    out = out.with_antiderivative([=](double x) { return alpha * F(x); });
  }
  return out;
}

inline Integrand shifted(const Integrand& f, double c) {
  Integrand out(f.name() + "+" + std::to_string(c), [=](const Tag& t) { return f(t) + c; }, f.domain());
  if (f.antiderivative()) {
    auto F = *f.antiderivative();
    out = out.with_antiderivative([=](double x) { return F(x) + c * x; });
  }
  return out;
}

inline Integrand product(const Integrand& f, const Integrand& g) {
  return Integrand(f.name() + "*" + g.name(), [=](const Tag& t) { return f(t) * g(t); },
                   detail::intersect(f.domain(), g.domain()));
}

inline Integrand absolute(const Integrand& f) {
  return Integrand("|" + f.name() + "|", [=](const Tag& t) { return std::abs(f(t)); }, f.domain());
}

inline Integrand pointwise_min(const Integrand& f, const Integrand& g) {
  return Integrand("min(" + f.name() + "," + g.name() + ")", [=](const Tag& t) { return std::min(f(t), g(t)); },
                   detail::intersect(f.domain(), g.domain()));
}

inline Integrand pointwise_max(const Integrand& f, const Integrand& g) {
  return Integrand("max(" + f.name() + "," + g.name() + ")", [=](const Tag& t) { return std::max(f(t), g(t)); },
                   detail::intersect(f.domain(), g.domain()));
}

/// (f o psi) on the domain of psi. The inner value has no exact identity.
inline Integrand compose(const Integrand& f, const Integrand& psi) {
  return Integrand(f.name() + "o" + psi.name(), [=](const Tag& t) { return f(Tag(psi(t))); }, psi.domain());
}

/// Riemann sum over cells, accumulated left to right in cell order.
inline double riemann_sum(const Integrand& f, std::span<const Cell> cells) {
  double sum = 0.0;
  for (const Cell& c : cells) sum += f(c.tag) * (c.right - c.left);
  return sum;
}

inline double riemann_sum(const Integrand& f, const TaggedPartition& p) {
  if (!f.domain().contains(p.interval)) {
    throw Error(ErrorCode::EvalDomain, "partition interval outside the domain of " + f.name());
  }
  return riemann_sum(f, std::span<const Cell>(p.cells));
}

}  // namespace gaugelab
