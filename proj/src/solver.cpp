#include "dmri/solver.hpp"

#include "dmri/error.hpp"
#include "dmri/metrics.hpp"
#include "dmri/transforms.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <limits>

namespace dmri {

std::string_view to_string(EpsilonSign s) { return s == EpsilonSign::Constraint ? "constraint" : "reversed"; }
std::string_view to_string(Coupling c) { return c == Coupling::Normalized ? "normalized" : "additive"; }
std::string_view to_string(Termination t) { return t == Termination::Tolerance ? "tolerance" : "max-iters"; }

EpsilonSign parse_epsilon_sign(std::string_view name)
{
  if (name == "constraint") {
    return EpsilonSign::Constraint;
  }
  if (name == "reversed") {
    return EpsilonSign::Reversed;
  }
  throw LookupError(fmt::format("unknown epsilon sign '{}' (expected constraint or reversed)", name));
}

Coupling parse_coupling(std::string_view name)
{
  if (name == "normalized") {
    return Coupling::Normalized;
  }
  if (name == "additive") {
    return Coupling::Additive;
  }
  throw LookupError(fmt::format("unknown coupling '{}' (expected normalized or additive)", name));
}

double stable_dual_step(double t1, double lambda1, bool decomposition)
{
  double const k_norm_sq = (decomposition ? 16.0 : 8.0) * lambda1 * lambda1;
  return (1.0 + t1) / (t1 * k_norm_sq);
}

void SolverConfig::validate() const
{
  auto require = [](bool ok, std::string const &what) {
    if (!ok) {
      throw ValidationError(what);
    }
  };
  require(lambda1 >= 0.0 && std::isfinite(lambda1), fmt::format("lambda1 must be finite and >= 0, got {}", lambda1));
  require(lambda2 >= 0.0 && std::isfinite(lambda2), fmt::format("lambda2 must be finite and >= 0, got {}", lambda2));
  require(tau >= 0.0 && std::isfinite(tau), fmt::format("tau must be finite and >= 0, got {}", tau));
  require(t1 > 0.0 && std::isfinite(t1), fmt::format("t1 must be finite and > 0, got {}", t1));
  require(t2 > 0.0 && std::isfinite(t2), fmt::format("t2 must be finite and > 0, got {}", t2));
  require(epsilon_threshold >= 0.0, fmt::format("epsilon_threshold must be >= 0, got {}", epsilon_threshold));
  require(max_iters >= 1, "max_iters must be >= 1");
  require(min_iters <= max_iters, fmt::format("min_iters {} exceeds max_iters {}", min_iters, max_iters));
  require(tol_re > 0.0, fmt::format("tol_re must be > 0, got {}", tol_re));
}

double relative_error(DynamicSequence const &x_next, DynamicSequence const &x_prev)
{
  require_same_shape(x_next.shape(), x_prev.shape(), "relative_error");
  double const prev = frobenius_norm(x_prev);
  double const step = frobenius_norm(x_next - x_prev);
  if (prev == 0.0) {
    return step == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return (step * step) / (prev * prev);
}

namespace {

// Bookkeeping shared by both solvers: RE/metric series, observer, stopping rule.
class Tracker
{
public:
  Tracker(SolverConfig const &cfg, DynamicSequence const *reference, IterationObserver const &observer)
    : cfg_{cfg}
    , reference_{reference}
    , observer_{observer}
    , start_{std::chrono::steady_clock::now()}
  {
  }

  // Returns true when the solve should stop.
  bool record(std::size_t n, double re, double dual_max, DynamicSequence const &x, SolveReport &report)
  {
    report.iterations = n;
    report.relative_errors.push_back(re);
    std::optional<double> p, r;
    if (reference_ != nullptr && cfg_.record_metrics) {
      p = psnr(*reference_, x);
      r = rmse(*reference_, x);
      report.psnr.push_back(*p);
      report.rmse.push_back(*r);
    }
    if (observer_) {
      try {
        observer_(IterationInfo{n, re, p, r, dual_max, x});
      } catch (std::exception const &e) {
        throw CallbackError(n, fmt::format("iteration observer failed at iteration {}: {}", n, e.what()));
      } catch (...) {
        throw CallbackError(n, fmt::format("iteration observer failed at iteration {}", n));
      }
    }
    if (n >= cfg_.min_iters && re < cfg_.tol_re) {
      report.termination = Termination::Tolerance;
      return true;
    }
    return false;
  }

  void finish(SolveReport &report) const
  {
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  SolverConfig const &cfg_;
  DynamicSequence const *reference_;
  IterationObserver const &observer_;
  std::chrono::steady_clock::time_point start_;
};

void check_inputs(DynamicSequence const &b, SamplingMask const &mask, SolverConfig const &cfg,
                  DynamicSequence const *reference)
{
  require_same_shape(b.shape(), mask.shape(), "solve (measurement vs mask)");
  if (reference != nullptr) {
    require_same_shape(b.shape(), reference->shape(), "solve (measurement vs reference)");
  }
  if (b.shape().rows < 2 || b.shape().cols < 2) {
    throw DimensionError(fmt::format("solve needs m, n >= 2, got {}", to_string(b.shape())));
  }
  if (!b.all_finite()) {
    throw ValidationError("measurement contains non-finite values");
  }
  cfg.validate();
}

// lambda_max(A^H A) for A = R F with a unitary F: 1 for any nonempty mask.
double lipschitz(SamplingMask const &mask) { return mask.count() > 0 ? 1.0 : 0.0; }

SolveReport empty_report(DynamicSequence const &x0)
{
  return SolveReport{x0, std::nullopt, std::nullopt, 0, {}, {}, {}, 0.0, Termination::MaxIterations};
}

void require_finite(std::size_t n, char const *name, bool finite)
{
  if (!finite) {
    throw DivergenceError(n, fmt::format("non-finite values in {} at iteration {}", name, n));
  }
}

} // namespace

SolveReport rdledm_solve(DynamicSequence const &b,
                         SamplingMask const &mask,
                         SolverConfig const &cfg,
                         DynamicSequence const *reference,
                         IterationObserver const &observer)
{
  check_inputs(b, mask, cfg, reference);
  double const L = lipschitz(mask);
  double const data_step = cfg.t1 / (1.0 + cfg.t1 * L);
  double const tv_step = cfg.t1 * cfg.lambda1 / (1.0 + cfg.t1 * L);
  double const shrink = cfg.t1 * cfg.lambda2 / (1.0 + cfg.t1 * L);
  double const dual_step = cfg.t2 * cfg.lambda1;
  auto const shape = b.shape();

  auto x = zero_fill(b, mask);
  auto x_prime = cfg.decomposition ? x : DynamicSequence::zeros(shape);
  auto eps = DynamicSequence::zeros(shape);
  auto y = DualField::zeros(shape);

  auto report = empty_report(x);
  Tracker tracker(cfg, reference, observer);
  for (std::size_t n = 1; n <= cfg.max_iters; ++n) {
    auto const tv_push = grad_adjoint(y) * tv_step;
    auto x_bar = x - adjoint_op(forward_op(x, mask) - b, mask) * data_step - tv_push;
    if (cfg.decomposition) {
      auto const coupling = (x_prime + eps) * cfg.tau;
      x_bar = cfg.coupling == Coupling::Normalized ? (x_bar + coupling) * (1.0 / (1.0 + cfg.tau)) : x_bar + coupling;
    }
    require_finite(n, "X", x_bar.all_finite());
    auto x_next = svt(x_bar, shrink);

    DynamicSequence extrapolated = x_next * 2.0 - x;
    if (cfg.decomposition) {
      x_prime = svt(x_next - tv_push + eps * cfg.tau, shrink);
      auto const residual = cfg.epsilon_sign == EpsilonSign::Constraint ? x_next - x_prime : x_prime - x_next;
      eps = svt(residual, cfg.epsilon_threshold);
      extrapolated = extrapolated + x_prime;
    }
    y = project_linf_ball(y + grad_forward(extrapolated) * dual_step);

    require_finite(n, "X", x_next.all_finite());
    require_finite(n, "X'", x_prime.all_finite());
    require_finite(n, "eps", eps.all_finite());
    require_finite(n, "Y", y.all_finite());

    double const re = relative_error(x_next, x);
    x = std::move(x_next);
    if (tracker.record(n, re, y.max_magnitude(), x, report)) {
      break;
    }
  }
  tracker.finish(report);
  report.reconstruction = std::move(x);
  if (cfg.decomposition) {
    report.x_prime = std::move(x_prime);
    report.epsilon = std::move(eps);
  }
  return report;
}

SolveReport baseline_tvnn_solve(DynamicSequence const &b,
                                SamplingMask const &mask,
                                SolverConfig const &cfg,
                                DynamicSequence const *reference,
                                IterationObserver const &observer)
{
  check_inputs(b, mask, cfg, reference);
  double const L = lipschitz(mask);
  double const alpha = cfg.lambda1;
  double const beta = cfg.lambda2;
  double const primal = cfg.t1 / (1.0 + cfg.t1 * L);

  auto x = zero_fill(b, mask);
  auto y = DualField::zeros(b.shape());

  auto report = empty_report(x);
  Tracker tracker(cfg, reference, observer);
  for (std::size_t n = 1; n <= cfg.max_iters; ++n) {
    auto const gradient = adjoint_op(forward_op(x, mask) - b, mask) + grad_adjoint(y) * alpha;
    auto x_bar = x - gradient * primal;
    require_finite(n, "X", x_bar.all_finite());
    auto x_next = svt(x_bar, primal * beta);
    y = project_linf_ball(y + grad_forward(x_next * 2.0 - x) * (cfg.t2 * alpha));

    require_finite(n, "X", x_next.all_finite());
    require_finite(n, "Y", y.all_finite());

    double const re = relative_error(x_next, x);
    x = std::move(x_next);
    if (tracker.record(n, re, y.max_magnitude(), x, report)) {
      break;
    }
  }
  tracker.finish(report);
  report.reconstruction = std::move(x);
  return report;
}

} // namespace dmri
