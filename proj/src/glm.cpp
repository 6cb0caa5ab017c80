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

#include "crashrisk/glm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "crashrisk/hash.hpp"
#include "crashrisk/simd/kernels.hpp"

namespace crashrisk::glm {

namespace {

using features::DesignMatrix;
using numerics::SolveMode;

constexpr double kMaxEta = 700.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Responses above this use log-gamma differences instead of the count tally.
constexpr double kTallyLimit = 1e6;

// Response summaries that make the NB likelihood cost O(max y) in alpha:
// sum_i sum_{k<y_i} f(k) == sum_k exceed[k] f(k), exceed[k] = #{i : y_i > k}.
struct ResponseTally {
  std::vector<double> exceed;
  double ln_factorial_sum = 0.0;  // sum_i ln(y_i!)
  bool use_tally = true;
};

ResponseTally tally_response(std::span<const double> y) {
  ResponseTally t;
  double max_y = 0.0;
  for (double v : y) max_y = std::max(max_y, v);
  t.use_tally = max_y <= kTallyLimit;
  // ln(y!) cached per distinct y.
  std::vector<double> ln_fact;
  if (t.use_tally) {
    const auto m = static_cast<std::size_t>(max_y);
    std::vector<double> counts(m + 1, 0.0);
    for (double v : y) counts[static_cast<std::size_t>(v)] += 1.0;
    t.exceed.assign(m, 0.0);
    double above = 0.0;
    for (std::size_t k = m; k-- > 0;) {
      above += counts[k + 1];
      t.exceed[k] = above;
    }
    for (std::size_t v = 0; v <= m; ++v) {
      if (counts[v] > 0.0) t.ln_factorial_sum += counts[v] * numerics::ln_gamma(static_cast<double>(v) + 1.0);
    }
  } else {
    for (double v : y) t.ln_factorial_sum += numerics::ln_gamma(v + 1.0);
  }
  return t;
}

void linear_predictor_into(const DesignMatrix& d, std::span<const double> beta, std::span<double> eta) {
  simd::gemv_rows(d.x.values, d.rows(), d.cols(), beta, eta);
}

void mean_from_eta(std::span<const double> eta, std::span<double> mu) {
  for (std::size_t i = 0; i < eta.size(); ++i) mu[i] = std::exp(std::min(eta[i], kMaxEta));
}

double poisson_ll_mu(std::span<const double> y, std::span<const double> mu, const ResponseTally& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(mu[i])) return kNegInf;
    if (y[i] > 0.0) {
      if (mu[i] <= 0.0) return kNegInf;
      s += y[i] * std::log(mu[i]);
    }
    s -= mu[i];
  }
  return s - t.ln_factorial_sum;
}

// sum_i [ln Gamma(y_i + 1/a) - ln Gamma(1/a) + y_i ln a]
double gamma_ratio_term(std::span<const double> y, double alpha, const ResponseTally& t) {
  double s = 0.0;
  if (t.use_tally) {
    for (std::size_t k = 1; k < t.exceed.size(); ++k) {
      if (t.exceed[k] > 0.0) s += t.exceed[k] * std::log1p(alpha * static_cast<double>(k));
    }
    return s;
  }
  const double r = 1.0 / alpha;
  const double lg_r = numerics::ln_gamma(r);
  const double ln_a = std::log(alpha);
  for (double v : y) {
    if (v > 0.0) s += numerics::ln_gamma(v + r) - lg_r + v * ln_a;
  }
  return s;
}

double nb_ll_mu(std::span<const double> y, std::span<const double> mu, double alpha, const ResponseTally& t) {
  double s = gamma_ratio_term(y, alpha, t) - t.ln_factorial_sum;
  const double r = 1.0 / alpha;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(mu[i])) return kNegInf;
    if (y[i] > 0.0) {
      if (mu[i] <= 0.0) return kNegInf;
      s += y[i] * std::log(mu[i]);
    }
    s -= (y[i] + r) * std::log1p(alpha * mu[i]);
  }
  return s;
}

// phi(u) = log1p(u)/u^2 - 1/(u(1+u)) and its derivative; series near 0.
double phi(double u) {
  if (u < 1e-2) {
    double s = 0.0, p = 1.0;
    for (int k = 0; k <= 14; ++k) {
      s += (k % 2 ? -1.0 : 1.0) * (k + 1.0) / (k + 2.0) * p;
      p *= u;
    }
    return s;
  }
  return std::log1p(u) / (u * u) - 1.0 / (u * (1.0 + u));
}

double phi_prime(double u) {
  if (u < 1e-2) {
    double s = 0.0, p = 1.0;
    for (int k = 1; k <= 15; ++k) {
      s += (k % 2 ? -1.0 : 1.0) * k * (k + 1.0) / (k + 2.0) * p;
      p *= u;
    }
    return s;
  }
  const double u2 = u * u;
  const double opu = 1.0 + u;
  return 1.0 / (u2 * opu) - 2.0 * std::log1p(u) / (u2 * u) + (1.0 + 2.0 * u) / (u2 * opu * opu);
}

double nb_score_mu(std::span<const double> y, std::span<const double> mu, double alpha, const ResponseTally& t) {
  double s = 0.0;
  if (t.use_tally) {
    for (std::size_t k = 1; k < t.exceed.size(); ++k) {
      const double kk = static_cast<double>(k);
      if (t.exceed[k] > 0.0) s += t.exceed[k] * kk / (1.0 + alpha * kk);
    }
  } else {
    for (double v : y) {
      for (double k = 1.0; k < v; k += 1.0) s += k / (1.0 + alpha * k);
    }
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double u = alpha * mu[i];
    s += mu[i] * mu[i] * phi(u) - y[i] * mu[i] / (1.0 + u);
  }
  return s;
}

double nb_hessian_mu(std::span<const double> y, std::span<const double> mu, double alpha, const ResponseTally& t) {
  double s = 0.0;
  auto term = [alpha](double k) {
    const double d = 1.0 + alpha * k;
    return k * k / (d * d);
  };
  if (t.use_tally) {
    for (std::size_t k = 1; k < t.exceed.size(); ++k) {
      if (t.exceed[k] > 0.0) s -= t.exceed[k] * term(static_cast<double>(k));
    }
  } else {
    for (double v : y) {
      for (double k = 1.0; k < v; k += 1.0) s -= term(k);
    }
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double u = alpha * mu[i];
    const double d = 1.0 + u;
    s += mu[i] * mu[i] * mu[i] * phi_prime(u) + y[i] * mu[i] * mu[i] / (d * d);
  }
  return s;
}

void validate_design(const DesignMatrix& d) {
  if (d.rows() == 0 || d.cols() == 0) throw Error(ErrorKind::usage, "empty_design", "design matrix is empty");
  if (d.response.size() != d.rows()) throw Error(ErrorKind::usage, "shape", "response length does not match rows");
  bool any_positive = false;
  for (double v : d.response) {
    if (!(v >= 0.0) || std::floor(v) != v) {
      throw Error(ErrorKind::data, "bad_response", "response values must be non-negative integers");
    }
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) {
    throw Error(ErrorKind::numeric, "all_zero_response", "all responses are zero; the log-link fit is degenerate");
  }
}

SolveMode mode_for(const DesignMatrix& d, const FitOptions& o) {
  if (o.solve_mode) return *o.solve_mode;
  return d.schema.coding == features::Coding::full_dummy ? SolveMode::min_norm : SolveMode::strict;
}

// X' ((y - mu) / (1 + alpha mu)), the log-link score in beta.
std::vector<double> beta_score(const DesignMatrix& d, std::span<const double> mu, double alpha) {
  std::vector<double> resid(d.rows()), ones(d.rows(), 1.0);
  for (std::size_t i = 0; i < d.rows(); ++i) resid[i] = (d.response[i] - mu[i]) / (1.0 + alpha * mu[i]);
  return numerics::weighted_cross(d.x, ones, resid);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

struct IrlsResult {
  std::vector<double> beta;
  std::vector<double> mu;
  double loglik = kNegInf;
  int iterations = 0;
  double jitter = 0.0;
  bool converged = false;
};

// IRLS for beta at fixed alpha (alpha == 0: Poisson). Working response
// z = eta + (y - mu)/mu, weights mu / (1 + alpha mu).
IrlsResult run_irls(const DesignMatrix& d, double alpha, const std::vector<double>* start, SolveMode mode,
                    const FitOptions& o, const ResponseTally& tally) {
  const std::size_t n = d.rows(), p = d.cols();
  const auto& y = d.response;
  auto loglik = [&](std::span<const double> mu) {
    return alpha > 0.0 ? nb_ll_mu(y, mu, alpha, tally) : poisson_ll_mu(y, mu, tally);
  };

  IrlsResult r;
  std::vector<double> eta(n), mu(n), w(n), z(n);
  bool have_beta = start != nullptr;
  if (have_beta) {
    r.beta = *start;
    linear_predictor_into(d, r.beta, eta);
    mean_from_eta(eta, mu);
  } else {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      mu[i] = 0.5 * (y[i] + mean);
      eta[i] = std::log(mu[i]);
    }
  }
  r.loglik = have_beta ? loglik(mu) : kNegInf;
  const double score_tol = o.score_tolerance * static_cast<double>(n);

  std::vector<double> cand_eta(n), cand_mu(n);
  for (int it = 1; it <= o.max_iterations; ++it) {
    r.iterations = it;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = mu[i] / (1.0 + alpha * mu[i]);
      z[i] = eta[i] + (y[i] - mu[i]) / mu[i];
    }
    const auto solved = numerics::solve_weighted_ls(d.x, w, z, mode, d.column_names);
    r.jitter = std::max(r.jitter, solved.jitter_applied);
    std::vector<double> cand = solved.solution;
    linear_predictor_into(d, cand, cand_eta);
    mean_from_eta(cand_eta, cand_mu);
    double cand_ll = loglik(cand_mu);
    if (have_beta) {
      // Step halving keeps the likelihood from decreasing.
      for (int half = 0; half < 40 && !(cand_ll >= r.loglik - 1e-12 * std::fabs(r.loglik)); ++half) {
        for (std::size_t j = 0; j < p; ++j) cand[j] = 0.5 * (cand[j] + r.beta[j]);
        linear_predictor_into(d, cand, cand_eta);
        mean_from_eta(cand_eta, cand_mu);
        cand_ll = loglik(cand_mu);
      }
    }
    double dbeta = std::numeric_limits<double>::infinity();
    if (have_beta) {
      dbeta = 0.0;
      for (std::size_t j = 0; j < p; ++j) dbeta = std::max(dbeta, std::fabs(cand[j] - r.beta[j]));
    }
    const double dll = std::fabs(cand_ll - r.loglik);
    const bool had_beta = have_beta;
    r.beta = std::move(cand);
    eta.swap(cand_eta);
    mu.swap(cand_mu);
    r.loglik = cand_ll;
    have_beta = true;
    if (had_beta && (dbeta <= o.beta_tolerance || dll <= o.loglik_rel_tolerance * std::fabs(cand_ll))) {
      if (max_abs(beta_score(d, mu, alpha)) <= score_tol) {
        r.converged = true;
        break;
      }
    }
  }
  r.mu = std::move(mu);
  return r;
}

// Safeguarded Newton in log(alpha) on the profile at fixed mu.
double maximize_alpha(std::span<const double> y, std::span<const double> mu, double alpha0, const FitOptions& o,
                      const ResponseTally& t) {
  const double lo = std::log(o.alpha_min), hi = std::log(o.alpha_max);
  auto f = [&](double theta) { return nb_ll_mu(y, mu, std::exp(theta), t); };
  double theta = std::clamp(std::log(alpha0), lo, hi);
  double ftheta = f(theta);
  for (int it = 0; it < 100; ++it) {
    const double a = std::exp(theta);
    const double s = nb_score_mu(y, mu, a, t);
    const double g = a * s;
    const double h = a * a * nb_hessian_mu(y, mu, a, t) + g;
    if ((theta <= lo && g <= 0.0) || (theta >= hi && g >= 0.0) || g == 0.0) break;
    double step = h < 0.0 ? -g / h : (g > 0.0 ? 1.0 : -1.0);
    step = std::clamp(step, -2.0, 2.0);
    bool accepted = false;
    double next = theta, fnext = ftheta;
    for (int half = 0; half < 60; ++half) {
      next = std::clamp(theta + step, lo, hi);
      fnext = f(next);
      if (fnext >= ftheta) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double moved = std::fabs(next - theta);
    theta = next;
    ftheta = fnext;
    if (moved < 1e-12) break;
  }
  return std::exp(theta);
}

FittedGlm finalize(const DesignMatrix& d, Family family, double alpha, IrlsResult&& r, SolveMode mode,
                   const FitOptions& o) {
  FittedGlm m;
  m.family = family;
  m.schema = d.schema;
  m.column_names = d.column_names;
  m.alpha = family == Family::poisson ? 0.0 : alpha;
  m.n_obs = d.rows();
  m.options = o;
  m.data_fingerprint = design_fingerprint(d);

  std::vector<double> w(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) w[i] = r.mu[i] / (1.0 + m.alpha * r.mu[i]);
  const auto gram = numerics::weighted_gram(d.x, w);
  if (mode == SolveMode::min_norm) {
    m.cov_beta = numerics::inverse_symmetric(gram, SolveMode::min_norm);
    const std::vector<double> zero(d.cols(), 0.0);
    m.diagnostics.rank = numerics::solve_symmetric(gram, zero, SolveMode::min_norm).rank;
  } else {
    m.cov_beta = numerics::inverse_symmetric(gram, r.jitter > 0.0 ? SolveMode::min_norm : SolveMode::strict);
    m.diagnostics.rank = d.cols();
  }
  m.diagnostics.identifiable = m.diagnostics.rank == d.cols();
  m.diagnostics.jitter_applied = r.jitter;
  m.diagnostics.max_abs_score = max_abs(beta_score(d, r.mu, m.alpha));
  if (!m.diagnostics.identifiable) {
    m.diagnostics.warnings.push_back(
        "coefficients are not identifiable (rank " + std::to_string(m.diagnostics.rank) + " of " +
        std::to_string(d.cols()) + "); minimum-norm estimates and pseudo-inverse covariance reported");
  }
  if (r.jitter > 0.0) m.diagnostics.warnings.push_back("diagonal jitter applied to ill-conditioned normal equations");
  m.beta = std::move(r.beta);
  m.log_likelihood = r.loglik;
  m.converged = true;
  return m;
}

}  // namespace

std::string_view family_name(Family f) { return f == Family::poisson ? "poisson" : "negbin2"; }

std::optional<Family> parse_family(std::string_view name) {
  if (name == "poisson") return Family::poisson;
  if (name == "negbin2" || name == "negbin") return Family::negbin2;
  return std::nullopt;
}

FittedGlm fit_poisson(const DesignMatrix& design, const FitOptions& options) {
  validate_design(design);
  const auto tally = tally_response(design.response);
  const auto mode = mode_for(design, options);
  auto r = run_irls(design, 0.0, nullptr, mode, options, tally);
  if (!r.converged) {
    throw ConvergenceError(r.beta, 0.0, r.iterations,
                           "Poisson IRLS did not converge within " + std::to_string(options.max_iterations) +
                               " iterations");
  }
  const int iterations = r.iterations;
  auto m = finalize(design, Family::poisson, 0.0, std::move(r), mode, options);
  m.iterations = iterations;
  return m;
}

FittedGlm fit_negbin(const DesignMatrix& design, const FitOptions& options) {
  validate_design(design);
  const auto tally = tally_response(design.response);
  const auto mode = mode_for(design, options);
  const auto& y = design.response;

  auto start = run_irls(design, 0.0, nullptr, mode, options, tally);
  if (!start.converged) {
    throw ConvergenceError(start.beta, 0.0, start.iterations, "initial Poisson fit did not converge");
  }
  int total_iterations = start.iterations;
  std::vector<double> beta = std::move(start.beta);
  double alpha = std::clamp(moment_alpha(y), options.alpha_min, options.alpha_max);
  std::vector<double> eta(design.rows()), mu(design.rows());
  linear_predictor_into(design, beta, eta);
  mean_from_eta(eta, mu);
  double ll = nb_ll_mu(y, mu, alpha, tally);

  IrlsResult last;
  bool converged = false;
  for (int outer = 1; outer <= options.max_outer_iterations; ++outer) {
    last = run_irls(design, alpha, &beta, mode, options, tally);
    total_iterations += last.iterations;
    if (!last.converged) {
      throw ConvergenceError(last.beta, alpha, total_iterations,
                             "NB beta step did not converge at alpha = " + std::to_string(alpha));
    }
    const double next_alpha = maximize_alpha(y, last.mu, alpha, options, tally);
    const double next_ll = nb_ll_mu(y, last.mu, next_alpha, tally);
    const double change = std::fabs(next_ll - ll);
    beta = last.beta;
    alpha = next_alpha;
    ll = next_ll;
    if (outer > 1 && change <= std::max(options.nb_loglik_tolerance, 1e-15 * std::fabs(ll))) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError(beta, alpha, total_iterations,
                           "NB beta/alpha alternation did not converge within " +
                               std::to_string(options.max_outer_iterations) + " rounds");
  }
  // Refresh beta at the final alpha so the score condition holds exactly there.
  last = run_irls(design, alpha, &beta, mode, options, tally);
  total_iterations += last.iterations;
  if (!last.converged) throw ConvergenceError(last.beta, alpha, total_iterations, "final NB beta step did not converge");
  last.loglik = nb_ll_mu(y, last.mu, alpha, tally);

  auto m = finalize(design, Family::negbin2, alpha, std::move(last), mode, options);
  m.iterations = total_iterations;
  if (alpha <= options.alpha_min * (1.0 + 1e-9)) {
    m.diagnostics.alpha_at_lower_bound = true;
    m.diagnostics.warnings.push_back("data consistent with Poisson: alpha at its lower bound");
  }
  return m;
}

double moment_alpha(std::span<const double> y) {
  const auto n = static_cast<double>(y.size());
  if (y.size() < 2) return 1e-6;
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  if (!(mean > 0.0)) return 1e-6;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double var = ss / (n - 1.0);
  return std::max(1e-6, (var - mean) / (mean * mean));
}

double poisson_log_likelihood(std::span<const double> beta, const DesignMatrix& design) {
  std::vector<double> eta(design.rows()), mu(design.rows());
  linear_predictor_into(design, beta, eta);
  mean_from_eta(eta, mu);
  return poisson_ll_mu(design.response, mu, tally_response(design.response));
}

double nb_log_likelihood(std::span<const double> beta, double alpha, const DesignMatrix& design) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::usage, "bad_alpha", "NB log-likelihood requires alpha > 0");
  std::vector<double> eta(design.rows()), mu(design.rows());
  linear_predictor_into(design, beta, eta);
  for (std::size_t i = 0; i < eta.size(); ++i) mu[i] = std::exp(eta[i]);
  return nb_ll_mu(design.response, mu, alpha, tally_response(design.response));
}

double nb_alpha_score(std::span<const double> beta, double alpha, const DesignMatrix& design) {
  std::vector<double> eta(design.rows()), mu(design.rows());
  linear_predictor_into(design, beta, eta);
  mean_from_eta(eta, mu);
  return nb_score_mu(design.response, mu, alpha, tally_response(design.response));
}

double nb_alpha_hessian(std::span<const double> beta, double alpha, const DesignMatrix& design) {
  std::vector<double> eta(design.rows()), mu(design.rows());
  linear_predictor_into(design, beta, eta);
  mean_from_eta(eta, mu);
  return nb_hessian_mu(design.response, mu, alpha, tally_response(design.response));
}

DispersionReport dispersion_check(const FittedGlm& model, const DesignMatrix& design) {
  const std::size_t n = design.rows();
  const std::size_t rank = model.diagnostics.rank ? model.diagnostics.rank : design.cols();
  if (n <= rank) {
    throw Error(ErrorKind::usage, "too_few_rows", "dispersion check needs more observations than parameters");
  }
  const auto mu = predict_means(model, design);
  const auto& y = design.response;
  DispersionReport r;
  double pearson = 0.0;
  for (std::size_t i = 0; i < n; ++i) pearson += (y[i] - mu[i]) * (y[i] - mu[i]) / mu[i];
  r.pearson_ratio = pearson / static_cast<double>(n - rank);

  // Cameron-Trivedi: ((y - mu)^2 - y) / mu = c * mu + e, no intercept.
  std::vector<double> lhs(n);
  for (std::size_t i = 0; i < n; ++i) lhs[i] = ((y[i] - mu[i]) * (y[i] - mu[i]) - y[i]) / mu[i];
  const double smm = simd::dot(mu, mu);
  r.ct_coefficient = simd::dot(lhs, mu) / smm;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = lhs[i] - r.ct_coefficient * mu[i];
    sse += e * e;
  }
  const double dof = static_cast<double>(n) - 1.0;
  const double se = dof > 0.0 ? std::sqrt(sse / dof / smm) : 0.0;
  if (se > 0.0) {
    r.ct_t = r.ct_coefficient / se;
  } else {
    r.ct_t = r.ct_coefficient > 0.0 ? std::numeric_limits<double>::infinity()
                                    : (r.ct_coefficient < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0);
  }
  r.ct_p_value = dof > 0.0 ? numerics::student_t_upper_tail(r.ct_t, dof) : 1.0;
  r.overdispersed = (r.ct_p_value < kDispersionLevel && r.ct_coefficient > 0.0) || r.pearson_ratio > kPearsonRatioThreshold;
  return r;
}

std::vector<WaldRow> wald_inference(const FittedGlm& model) {
  std::vector<WaldRow> rows(model.beta.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    auto& r = rows[j];
    const double var = model.cov_beta.rows > j ? model.cov_beta(j, j) : 0.0;
    r.std_err = var > 0.0 ? std::sqrt(var) : 0.0;
    if (r.std_err > 0.0) {
      r.z = model.beta[j] / r.std_err;
      r.p_value = numerics::normal_two_sided_p(r.z);
    } else {
      r.degenerate = true;
      r.z = 0.0;
      r.p_value = 0.0;
    }
  }
  return rows;
}

double percent_change(double coefficient) { return 100.0 * std::expm1(coefficient); }

double linear_predictor(const FittedGlm& model, std::span<const double> x) {
  if (x.size() != model.beta.size()) {
    throw Error(ErrorKind::usage, "dimension_mismatch",
                "feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                    std::to_string(model.beta.size()));
  }
  return simd::dot(x, model.beta);
}

double predict_mean(const FittedGlm& model, std::span<const double> x) { return std::exp(linear_predictor(model, x)); }

std::vector<double> predict_means(const FittedGlm& model, const DesignMatrix& design) {
  if (design.cols() != model.beta.size()) {
    throw Error(ErrorKind::usage, "dimension_mismatch", "design columns do not match the model");
  }
  std::vector<double> eta(design.rows());
  linear_predictor_into(design, model.beta, eta);
  for (double& v : eta) v = std::exp(v);
  return eta;
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.empty() || predicted.size() != actual.size()) {
    throw Error(ErrorKind::usage, "empty_design", "RMSE needs equally sized, non-empty inputs");
  }
  return std::sqrt(simd::sum_sq_diff(predicted, actual) / static_cast<double>(predicted.size()));
}

double rmse(const FittedGlm& model, const DesignMatrix& design) {
  if (design.rows() == 0) throw Error(ErrorKind::usage, "empty_design", "RMSE of an empty design");
  return rmse(predict_means(model, design), design.response);
}

std::string design_fingerprint(const DesignMatrix& design) {
  std::string bytes;
  auto put = [&bytes](const void* p, std::size_t n) { bytes.append(static_cast<const char*>(p), n); };
  const std::uint64_t dims[2] = {design.rows(), design.cols()};
  put(dims, sizeof dims);
  for (const auto& name : design.column_names) {
    bytes.append(name);
    bytes.push_back('\0');
  }
  put(design.x.values.data(), design.x.values.size() * sizeof(double));
  put(design.response.data(), design.response.size() * sizeof(double));
  return sha256_hex(bytes);
}

}  // namespace crashrisk::glm
