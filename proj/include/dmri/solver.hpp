#pragma once

#include "dmri/sampling.hpp"
#include "dmri/sequence.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace dmri {

/// Which residual the error component thresholds.
enum struct EpsilonSign
{
  Constraint, // eps = S(X^{n+1} - X'), consistent with X = X' + eps
  Reversed    // eps = S(X' - X^{n+1})
};

/// How tau * (X' + eps) enters the X update.
enum struct Coupling
{
  Normalized, // (X - a*grad_data - c*grad^H Y + tau (X' + eps)) / (1 + tau)
  Additive    // X - a*grad_data - c*grad^H Y + tau (X' + eps); grows the null space of A by (1 + tau)
};

std::string_view to_string(EpsilonSign s);
std::string_view to_string(Coupling c);
EpsilonSign parse_epsilon_sign(std::string_view name);
Coupling parse_coupling(std::string_view name);

/// Dual step meeting a * t2 * ||K||^2 = 1 for the primal step a = t1 / (1 + t1), where
/// K = lambda1 [grad grad] (||K||^2 <= 16 lambda1^2) with the decomposition, lambda1 grad otherwise.
double stable_dual_step(double t1, double lambda1, bool decomposition = true);

struct SolverConfig
{
  double lambda1 = 0.025; // TV weight
  double lambda2 = 0.01; // nuclear-norm weight
  double tau = 0.1;      // X = X' + eps coupling weight
  double t1 = 1.0;       // primal step
  double t2 = 200.0;     // dual step, stable_dual_step(1.0, 0.025)
  double epsilon_threshold = 5.0; // SVT threshold of the eps update, 1 / (2 tau)
  std::size_t max_iters = 200;
  std::size_t min_iters = 10; // RE is not tested before this many iterations
  double tol_re = 1e-8;
  bool record_metrics = true;
  EpsilonSign epsilon_sign = EpsilonSign::Constraint;
  Coupling coupling = Coupling::Normalized;
  bool decomposition = true; // false makes the X'/eps branch inert (X' = eps = 0)

  void validate() const;
};

enum struct Termination
{
  Tolerance,
  MaxIterations
};

std::string_view to_string(Termination t);

struct IterationInfo
{
  std::size_t iteration; // 1-based
  double relative_error;
  std::optional<double> psnr;
  std::optional<double> rmse;
  double dual_max; // max |Y| after projection
  DynamicSequence const &x;
};

/// Called once per iteration; throwing aborts the solve with a CallbackError.
using IterationObserver = std::function<void(IterationInfo const &)>;

struct SolveReport
{
  DynamicSequence reconstruction;
  std::optional<DynamicSequence> x_prime; // decomposition components, RDLEDM only
  std::optional<DynamicSequence> epsilon;
  std::size_t iterations = 0;
  std::vector<double> relative_errors;
  std::vector<double> psnr; // empty without a reference
  std::vector<double> rmse;
  double seconds = 0.0;
  Termination termination = Termination::MaxIterations;
};

/// ||x_next - x_prev||_F^2 / ||x_prev||_F^2; 0 if both are zero, +inf if only x_prev is.
double relative_error(DynamicSequence const &x_next, DynamicSequence const &x_prev);

/**
 * Primal-dual reconstruction with double TV, double nuclear norm and a
 * low-rank error decomposition X = X' + eps. Each iteration:
 *
 *   Xbar = X - a A^H(AX - B) - c grad^H Y  (+ tau (X' + eps), see Coupling)
 *   X+   = S_lam(Xbar)
 *   X'   = S_lam(X+ - c grad^H Y + tau eps)
 *   eps  = S_eth(X+ - X')
 *   Y    = P_inf(Y + t2 lambda1 grad(2 X+ + X' - X))
 *
 * with a = t1/(1+t1 L), c = t1 lambda1/(1+t1 L), lam = t1 lambda2/(1+t1 L), L = 1.
 * Starts from the zero-filled image; stops when RE < tol_re (after min_iters) or at max_iters.
 */
SolveReport rdledm_solve(DynamicSequence const &b,
                         SamplingMask const &mask,
                         SolverConfig const &cfg,
                         DynamicSequence const *reference = nullptr,
                         IterationObserver const &observer = {});

/// min 1/2 ||RFX - B||^2 + lambda1 TV(X) + lambda2 ||X||_* by the same primal-dual scheme.
SolveReport baseline_tvnn_solve(DynamicSequence const &b,
                                SamplingMask const &mask,
                                SolverConfig const &cfg,
                                DynamicSequence const *reference = nullptr,
                                IterationObserver const &observer = {});

} // namespace dmri
