// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_ANALYSIS_HPP
#define SBAR_ANALYSIS_HPP

#include <span>
#include <utility>
#include <vector>

#include "sbar/kernels.hpp"
#include "sbar/plan.hpp"
#include "sbar/rng.hpp"

namespace sbar {

/// Order-independent summation: recursive pairwise reduction keeps the
/// floating-point drift of trial aggregation below 1e-12 relative.
double pairwise_sum(std::span<const double> values);

/// Analytic reconstruction MSE of the weighted-sum estimator built from
/// `kernel` on `schedule`, when the channel truly has covariance `true_cov`:
///
///   Pi = (S Sigma S^H + s2 I)^-1 S Sigma
///   E  = Tr(Pi^H (S Sigma_cov S^H + s2 I) Pi)
///        - 2 Re Tr(Pi^H S Sigma_cov) + Tr(Sigma_cov)
double lemma1_mse(const Kernel &kernel, const Kernel &true_cov,
                  const PortSchedule &schedule, double noise_variance);

/// Floor of the achievable MSE over all kernels and schedules:
///   Tr(Sigma_cov) - Tr(Sigma_cov (Sigma_cov + s2 I)^-1 Sigma_cov),
/// attained by the true covariance with every port observed.
double lemma2_min_mse(const Kernel &true_cov, double noise_variance);

/// Draws channels h ~ CN(0, cov) from an eigenfactorization of cov.
class GaussianSampler {
  public:
    explicit GaussianSampler(const Kernel &cov);
    ChannelVector draw(Rng &rng) const;

  private:
    Eigen::MatrixXcd factor_; // cov = factor * factor^H
};

struct MonteCarloMse {
    double mean = 0.0;
    double standard_error = 0.0;
    long trials = 0;
};

/// Empirical counterpart of lemma1_mse: samples h ~ CN(0, true_cov), runs
/// the full pilot + weighted-sum reconstruction pipeline, and averages the
/// squared error.
MonteCarloMse monte_carlo_mse(const Kernel &kernel, const Kernel &true_cov,
                              const PortSchedule &schedule,
                              double noise_variance, long trials,
                              std::uint64_t master_seed);

struct MseReport {
    double analytic_mse = 0.0;
    double monte_carlo_mse = 0.0;
    double monte_carlo_stderr = 0.0;
    double min_mse = 0.0;
    long trials = 0;
};

/// Bundles the analytic value, its Monte Carlo estimate and the floor.
MseReport make_mse_report(const Kernel &kernel, const Kernel &true_cov,
                          const PortSchedule &schedule, double noise_variance,
                          long trials, std::uint64_t master_seed);

struct NmseResult {
    double nmse_db = 0.0;     // 10 log10 of the mean ratio, floored at -200
    double mean_ratio = 0.0;  // trial average of |h - h_hat|^2 / |h|^2
    double ratio_stderr = 0.0;
    long trials_used = 0;
    long trials_excluded = 0; // ||h|| below threshold, left out
};

/// Streaming NMSE aggregation over (h_hat, h) trials. Ratios are averaged in
/// linear units (pairwise summation); only the reported value is in dB.
class NmseAccumulator {
  public:
    void add(const ChannelVector &estimate, const ChannelVector &truth);
    NmseResult result() const;

  private:
    std::vector<double> ratios_;
    long excluded_ = 0;
};

/// Trial-averaged normalized MSE in dB over (h_hat, h) pairs.
NmseResult nmse(const std::vector<std::pair<ChannelVector, ChannelVector>> &estimates);

} // namespace sbar

#endif
