// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_GP_CORE_HPP
#define SBAR_GP_CORE_HPP

#include <functional>
#include <vector>

#include "sbar/channel_model.hpp"
#include "sbar/kernels.hpp"

namespace sbar {

/// Gaussian posterior over the port channels after conditioning on noisy
/// measurements at the ports in `measured` (0-based, in measurement order).
struct PosteriorState {
    Eigen::VectorXcd mean;       // length N
    Eigen::MatrixXcd covariance; // N x N Hermitian
    std::vector<int> measured;
    PilotBatch observations;

    /// Real posterior variances diag(covariance). Throws if the diagonal
    /// has drifted measurably off the real axis.
    Eigen::VectorXd variances() const;
};

/// Stopping rule for the sequential regression loop.
struct RegressionConfig {
    double tolerance = 0.0;       // epsilon: stop once all variances <= it
    int max_samples = 0;          // hard cap, must be <= N
    double noise_variance = 0.0;  // sigma^2 of each measurement
};

/// Conditions the prior `kernel` on observations `pilots` taken at the ports
/// in `schedule_prefix`:
///
///   mean = Sigma(:,O) (Sigma(O,O) + s2 I)^-1 y
///   cov  = Sigma - Sigma(:,O) (Sigma(O,O) + s2 I)^-1 Sigma(O,:)
///
/// Solves go through a Hermitian positive-definite factorization, never an
/// explicit inverse. A singular system (after any kernel regularization)
/// raises NumericalFailureError carrying the condition-number estimate.
PosteriorState condition(const Kernel &kernel,
                         const std::vector<int> &schedule_prefix,
                         const PilotBatch &pilots);

/// Diagonal of the posterior covariance only; the covariance update does not
/// depend on the observed values, so this needs no pilot data. Same solve
/// path and error contract as condition().
Eigen::VectorXd posterior_variances(const Kernel &kernel,
                                    const std::vector<int> &measured,
                                    double noise_variance);

/// Index (0-based) of the largest posterior variance among unmeasured ports;
/// ties break to the lowest index. Throws ExhaustedScheduleError when every
/// port has been measured.
int max_variance_index(const PosteriorState &state);

using MeasurementFn = std::function<std::complex<double>(int port_index)>;

/// Greedy max-variance sampling loop: select, measure, re-condition, until
/// every posterior variance is <= tolerance or max_samples is reached.
/// The selected ports are recorded in the returned state in order.
PosteriorState sequential_regression(const Kernel &kernel,
                                     const MeasurementFn &measure,
                                     const RegressionConfig &config);

} // namespace sbar

#endif
