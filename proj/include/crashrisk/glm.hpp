// Copyright 2026 The crashrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crashrisk/error.hpp"
#include "crashrisk/features.hpp"
#include "crashrisk/numerics.hpp"

namespace crashrisk::glm {

enum class Family { poisson, negbin2 };

std::string_view family_name(Family f);  // "poisson" | "negbin2"
std::optional<Family> parse_family(std::string_view name);

struct FitOptions {
  int max_iterations = 100;          // IRLS iterations (per beta phase for NB)
  double beta_tolerance = 1e-8;      // max |delta beta|
  double loglik_rel_tolerance = 1e-10;
  double nb_loglik_tolerance = 1e-9;  // joint NB log-likelihood change
  int max_outer_iterations = 200;     // NB beta/alpha alternations
  double alpha_min = 1e-8;
  double alpha_max = 1e4;
  double score_tolerance = 1e-6;  // per observation, on X'(score residual)
  /// Inner solve. Unset: min_norm for full_dummy designs, strict otherwise.
  std::optional<numerics::SolveMode> solve_mode;

  friend bool operator==(const FitOptions&, const FitOptions&) = default;
};

struct FitDiagnostics {
  bool identifiable = true;       // false for min-norm (full dummy) fits
  std::size_t rank = 0;           // rank of X'WX at the optimum
  double jitter_applied = 0.0;    // largest jitter used in any inner solve
  bool alpha_at_lower_bound = false;
  double max_abs_score = 0.0;
  std::vector<std::string> warnings;

  friend bool operator==(const FitDiagnostics&, const FitDiagnostics&) = default;
};

/// A fitted log-link count regression.
struct FittedGlm {
  Family family = Family::poisson;
  features::FeatureSchema schema;
  std::vector<std::string> column_names;
  std::vector<double> beta;
  double alpha = 0.0;  // NB2 dispersion, 0 for Poisson
  numerics::DenseMatrix cov_beta;
  double log_likelihood = 0.0;
  std::size_t n_obs = 0;
  bool converged = false;
  int iterations = 0;
  FitDiagnostics diagnostics;
  FitOptions options;
  std::string data_fingerprint;

  friend bool operator==(const FittedGlm&, const FittedGlm&) = default;
};

/// Thrown when IRLS or the NB alternation exhausts its iteration budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::vector<double> last_beta, double last_alpha, int iterations, const std::string& message)
      : Error(ErrorKind::numeric, "no_convergence", message),
        last_beta_(std::move(last_beta)),
        last_alpha_(last_alpha),
        iterations_(iterations) {}
  const std::vector<double>& last_beta() const { return last_beta_; }
  double last_alpha() const { return last_alpha_; }
  int iterations() const { return iterations_; }

 private:
  std::vector<double> last_beta_;
  double last_alpha_;
  int iterations_;
};

FittedGlm fit_poisson(const features::DesignMatrix& design, const FitOptions& options = {});
FittedGlm fit_negbin(const features::DesignMatrix& design, const FitOptions& options = {});

/// Moment initializer max(1e-6, (s^2 - mean) / mean^2), s^2 the unbiased variance.
double moment_alpha(std::span<const double> y);

double poisson_log_likelihood(std::span<const double> beta, const features::DesignMatrix& design);

/// NB2 log-likelihood. Returns -infinity if any mean is not finite.
double nb_log_likelihood(std::span<const double> beta, double alpha, const features::DesignMatrix& design);

/// Analytic d loglik / d alpha and d^2 loglik / d alpha^2 at fixed beta.
double nb_alpha_score(std::span<const double> beta, double alpha, const features::DesignMatrix& design);
double nb_alpha_hessian(std::span<const double> beta, double alpha, const features::DesignMatrix& design);

struct DispersionReport {
  double pearson_ratio = 0.0;  // Pearson chi^2 / (n - rank)
  double ct_coefficient = 0.0;  // Cameron-Trivedi auxiliary slope
  double ct_t = 0.0;
  double ct_p_value = 1.0;  // one-sided, H1: coefficient > 0
  bool overdispersed = false;

  friend bool operator==(const DispersionReport&, const DispersionReport&) = default;
};

inline constexpr double kPearsonRatioThreshold = 1.5;
inline constexpr double kDispersionLevel = 0.05;

/// Overdispersion diagnostics for a Poisson fit on `design`.
DispersionReport dispersion_check(const FittedGlm& model, const features::DesignMatrix& design);

struct WaldRow {
  double std_err = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  bool degenerate = false;  // zero standard error; p reported as 0
};

std::vector<WaldRow> wald_inference(const FittedGlm& model);

/// One row of the coefficient summary table.
struct CoefficientRow {
  std::string name;
  double coefficient = 0.0;
  double exp_coef = 1.0;
  double percent_change = 0.0;
  double std_err = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  long long crash_total = 0;
  double crash_share = 0.0;
  bool reference = false;  // reference level, not a model coefficient

  friend bool operator==(const CoefficientRow&, const CoefficientRow&) = default;
};

/// 100 * (e^coefficient - 1).
double percent_change(double coefficient);

/// exp(x' beta). Throws Error(usage) on a dimension mismatch.
double predict_mean(const FittedGlm& model, std::span<const double> x);
double linear_predictor(const FittedGlm& model, std::span<const double> x);
std::vector<double> predict_means(const FittedGlm& model, const features::DesignMatrix& design);

/// sqrt(mean (y - mu_hat)^2). Throws on an empty design.
double rmse(const FittedGlm& model, const features::DesignMatrix& design);
double rmse(std::span<const double> predicted, std::span<const double> actual);

/// SHA-256 over the design values and response.
std::string design_fingerprint(const features::DesignMatrix& design);

}  // namespace crashrisk::glm
