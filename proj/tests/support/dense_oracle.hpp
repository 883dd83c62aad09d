// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Test-only reference implementations. Everything here conditions by
// assembling the full joint Gaussian and inverting it densely, on purpose:
// these are the independent oracles the library's solver paths are checked
// against, so they must not share code with them.

#ifndef SBAR_TESTS_DENSE_ORACLE_HPP
#define SBAR_TESTS_DENSE_ORACLE_HPP

#include <Eigen/Dense>
#include <vector>

namespace sbar::testing {

struct DensePosterior {
    Eigen::VectorXcd mean;
    Eigen::MatrixXcd covariance;
};

/// Conditions h ~ CN(mu_prior, sigma) on y = h(omega) + z, z ~ CN(0, s2 I),
/// by building the joint (N + k)-dimensional covariance block structure and
/// inverting the observation block with a direct dense inverse.
DensePosterior dense_condition(const Eigen::MatrixXcd &sigma,
                               const Eigen::VectorXcd &mu_prior,
                               const std::vector<int> &omega,
                               const Eigen::VectorXcd &y, double noise_variance);

/// Zero-mean convenience overload.
DensePosterior dense_condition(const Eigen::MatrixXcd &sigma,
                               const std::vector<int> &omega,
                               const Eigen::VectorXcd &y, double noise_variance);

} // namespace sbar::testing

#endif
