#pragma once

#include <optional>
#include <vector>

#include "soqn/gordon_newell.hpp"
#include "soqn/model.hpp"

namespace soqn {

struct StabilityVerdict {
  double lambda_bo_max = 0.0;
  bool stable = false;
  double margin = 0.0;  // lambda_bo_max - lambda_bo
};

struct AdjustmentResult {
  double lambda_lc = 0.0;
  double residual = 0.0;  // |lambda_eff(lambda_lc) - lambda_bo|
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// True when every rate function is non-decreasing, which guarantees the
  /// root is unique. Otherwise the returned value is the root located by the
  /// expanding bracket and other roots may exist.
  bool uniqueness_verified = false;
};

/// Largest arrival rate the backordering system can sustain:
/// eta0 * C(N-1)/C(N) of the saturated inner network.
double lambda_bo_max(const SoqnModel& model);

/// Stability is the strict inequality lambda_bo < lambda_bo_max; the
/// boundary case counts as unstable.
StabilityVerdict is_stable(const SoqnModel& model);

/// Local throughputs TH_j = lambda_bo * eta_j / eta0 for j = 0..J.
/// Requires a stable model.
std::vector<double> throughputs_bo(const SoqnModel& model);

/// P(station `node` idle) = 1 - lambda_bo * (eta_j/eta0) / nu_j for a
/// constant-rate station (1-based node index). Throws NotConstantRate
/// otherwise.
double idle_probability_bo(const SoqnModel& model, int node);

/// Idle probabilities for all stations; entries for non-constant rates stay
/// empty.
std::vector<std::optional<double>> idle_probabilities_bo(const SoqnModel& model);

/// Probability that the lost-customers system has an empty pool,
/// C_stb(N) / C_LC(N); strictly inside (0,1).
double pi_lc_empty(const SoqnModel& model, double lambda_lc);

/// Accepted-customer rate of the lost-customers system,
/// lambda_lc * (1 - pi_lc_empty). Strictly below both lambda_lc and
/// lambda_bo_max.
double lambda_eff(const SoqnModel& model, double lambda_lc);

/// Finds lambda_lc with lambda_eff(lambda_lc) = lambda_bo by bracketed
/// bisection. The bracket starts at [lambda_bo, 2*lambda_bo] and doubles the
/// upper end until it encloses the root; existence is guaranteed for every
/// stable model. Throws UnstableModel when lambda_bo >= lambda_bo_max and
/// NoConvergence when the bracket or the iteration budget runs out.
AdjustmentResult adjust_lambda_lc(const SoqnModel& model,
                                  double rel_tol = 1e-10, int max_iter = 200);

/// Exact adjusted rate for one or two resources; throws
/// UnsupportedResourceCount for N >= 3.
double closed_form_lambda_lc(const SoqnModel& model, double lambda_bo);

/// Local throughputs of the lost-customers system at the given (adjusted)
/// arrival rate: eta_j * C_LC(N-1)/C_LC(N).
std::vector<double> throughputs_lc(const SoqnModel& model, double lambda_lc);

// Low-level entry points over a precomputed stability table C(0..n_max).
// A fleet-sizing sweep runs one convolution pass and reuses it for every
// candidate resource count.
double lambda_eff(const NormConstantTable& stb, double eta0, int population,
                  double lambda_lc);
double pi_lc_empty(const NormConstantTable& stb, double eta0, int population,
                   double lambda_lc);
AdjustmentResult adjust_lambda_lc(const NormConstantTable& stb, double eta0,
                                  int population, double lambda_bo,
                                  double rel_tol, int max_iter,
                                  bool rates_non_decreasing);

}  // namespace soqn
