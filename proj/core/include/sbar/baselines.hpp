// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_BASELINES_HPP
#define SBAR_BASELINES_HPP

#include <vector>

#include "sbar/channel_model.hpp"

namespace sbar {

/// Greedy sparse-recovery result over the DFT grid.
struct SparseEstimate {
    std::vector<int> support;      // L distinct DFT-grid indices (0-based)
    Eigen::VectorXcd coefficients; // h_bar restricted to the support
    ChannelVector reconstructed;   // F(:,support) * coefficients
    bool rank_deficient = false;   // least squares fell back to minimum norm
};

/// Gridless maximum-likelihood refinement result.
struct MlEstimate {
    Eigen::VectorXcd gains;  // length L
    Eigen::VectorXd angles;  // radians, length L
    ChannelVector reconstructed;
    std::vector<double> objective_history; // accepted residual norms, per iteration
};

/// Unitary N-point DFT matrix, F(n,k) = (1/sqrt(N)) exp(j 2 pi n k / N).
Eigen::MatrixXcd unitary_dft(int n);

/// P*M distinct ports drawn uniformly without replacement.
PortSchedule random_switch_matrix(int num_ports, int pilots, int antennas,
                                  std::uint64_t rng_seed);

/// Orthogonal matching pursuit over the DFT dictionary restricted to the
/// measured rows: L rounds of correlate / pick / least-squares refit.
SparseEstimate fas_omp(const PilotBatch &pilots, const PortSchedule &schedule,
                       const ArrayGeometry &geometry, int sparsity);

/// Model matrix B(theta) = sqrt(N/L) S [a(theta_1) ... a(theta_L)].
Eigen::MatrixXcd ml_model_matrix(const PortSchedule &schedule,
                                 const ArrayGeometry &geometry,
                                 const Eigen::VectorXd &angles);

/// Residual objective ||y - B(theta) g||^2.
double fas_ml_objective(const Eigen::VectorXcd &observations,
                        const PortSchedule &schedule,
                        const ArrayGeometry &geometry,
                        const Eigen::VectorXcd &gains,
                        const Eigen::VectorXd &angles);

/// Analytic angle gradient of the residual objective. Entry l is
/// -2 Re{ e^H d(B g)/d theta_l } with e = y - B g and the steering-vector
/// derivative d a(theta)/d theta having n-th entry
/// -j (2 pi / lambda) n d sin(theta) a_n(theta).
Eigen::VectorXd fas_ml_gradient(const Eigen::VectorXcd &observations,
                                const PortSchedule &schedule,
                                const ArrayGeometry &geometry,
                                const Eigen::VectorXcd &gains,
                                const Eigen::VectorXd &angles);

/// Alternating gain/angle maximum-likelihood refinement initialized from
/// fas_omp. The gain step is an exact least squares; the angle step is a
/// gradient step with step length halved each outer iteration and rejected
/// whenever it would increase the residual.
MlEstimate fas_ml(const PilotBatch &pilots, const PortSchedule &schedule,
                  const ArrayGeometry &geometry, int sparsity, int max_iters);

/// Equally-spaced measurement schedule used by the zero-order-hold baseline:
/// port i of P*M is round(1 + (i-1)(N-1)/(P*M-1)), 1-based.
PortSchedule selmmse_schedule(int num_ports, int pilots, int antennas);

/// Zero-order-hold reconstruction: every unmeasured port copies the value of
/// its nearest measured port (ties go to the lower port index).
ChannelVector selmmse(const PilotBatch &pilots, const ArrayGeometry &geometry,
                      int pilots_per_frame, int antennas);

} // namespace sbar

#endif
