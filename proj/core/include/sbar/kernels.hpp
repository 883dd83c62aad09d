// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_KERNELS_HPP
#define SBAR_KERNELS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sbar/channel_model.hpp"

namespace sbar {

enum class KernelLabel { exponential, bessel, covariance, custom };

std::string to_string(KernelLabel label);
KernelLabel kernel_label_from_string(const std::string &name);

/// Hyperparameters of the closed-form kernels. eta_sq carries length units
/// (meters): the exponential form divides a squared distance by it while the
/// Bessel form divides a plain distance by it, and both use the same default
/// value lambda/(2 pi). Implemented as printed in the formulas.
struct KernelHyper {
    double alpha_sq = 1.0;
    double eta_sq = 1.0;
    int bessel_order = 0;

    KernelHyper(double alpha_sq_, double eta_sq_, int bessel_order_ = 0);
};

/// Default hyperparameters: alpha^2 = 1, eta^2 = lambda/(2 pi), order 0.
KernelHyper default_kernel_hyper(const ArrayGeometry &geometry);

/// N x N Hermitian PSD prior covariance over the port channels.
struct Kernel {
    Eigen::MatrixXcd matrix;
    KernelLabel label = KernelLabel::custom;

    Kernel(Eigen::MatrixXcd matrix_, KernelLabel label_);

    int size() const { return static_cast<int>(matrix.rows()); }

    /// Spectral norm = max |eigenvalue| (matrix is Hermitian).
    double spectral_norm() const;
    double min_eigenvalue() const;

    /// True when the smallest eigenvalue is >= -1e-8 * spectral norm.
    bool is_psd() const;
};

/// Sigma(n,n') = alpha^2 exp(-|x_n - x_n'|^2 / eta^2); real symmetric.
Kernel exponential_kernel(const ArrayGeometry &geometry,
                          const KernelHyper &hyper);

/// Sigma(n,n') = alpha^2 J_nu(|x_n - x_n'| / eta^2); real symmetric.
/// A PSD clamp with floor 1e-10 is applied after construction: sampled
/// Bessel matrices can carry tiny negative eigenvalues at large N, which
/// break the noiseless solves downstream.
Kernel bessel_kernel(const ArrayGeometry &geometry, const KernelHyper &hyper);

/// Empirical second moment Sigma = (1/T) sum_t h_t h_t^H.
Kernel covariance_kernel(const std::vector<ChannelVector> &samples);

/// Clamps negative eigenvalues at zero and adds floor*trace/N to the
/// diagonal, but only when the input fails the PSD tolerance
/// (min eigenvalue < -1e-8 * spectral norm); otherwise returns the input
/// unchanged. Throws InvariantViolationError on non-Hermitian input.
Kernel regularize_psd(const Kernel &kernel, double floor);

/// Binary kernel artifact: header {N, label, hyper}, then the matrix
/// row-major as little-endian complex float64 pairs.
void save_kernel(const Kernel &kernel, const KernelHyper &hyper,
                 const std::string &path);
Kernel load_kernel(const std::string &path, KernelHyper *hyper_out = nullptr);

/// Content hash of the kernel bytes (used to key the plan cache).
std::uint64_t kernel_content_hash(const Kernel &kernel);

} // namespace sbar

#endif
