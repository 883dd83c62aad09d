// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "support/dense_oracle.hpp"

namespace sbar::testing {

DensePosterior dense_condition(const Eigen::MatrixXcd &sigma,
                               const Eigen::VectorXcd &mu_prior,
                               const std::vector<int> &omega,
                               const Eigen::VectorXcd &y,
                               double noise_variance) {
    const Eigen::Index n = sigma.rows();
    const Eigen::Index k = static_cast<Eigen::Index>(omega.size());

    if (k == 0) {
        return {mu_prior, sigma};
    }

    // Joint covariance of [h; y]:
    //   [ Sigma          Sigma(:,O)            ]
    //   [ Sigma(O,:)     Sigma(O,O) + s2 I     ]
    Eigen::MatrixXcd joint(n + k, n + k);
    joint.topLeftCorner(n, n) = sigma;
    for (Eigen::Index j = 0; j < k; ++j) {
        joint.block(0, n + j, n, 1) = sigma.col(omega[static_cast<std::size_t>(j)]);
        joint.block(n + j, 0, 1, n) = sigma.row(omega[static_cast<std::size_t>(j)]);
        for (Eigen::Index i = 0; i < k; ++i) {
            joint(n + i, n + j) = sigma(omega[static_cast<std::size_t>(i)],
                                        omega[static_cast<std::size_t>(j)]);
        }
    }
    joint.bottomRightCorner(k, k) +=
        noise_variance * Eigen::MatrixXcd::Identity(k, k);

    const Eigen::MatrixXcd cross = joint.topRightCorner(n, k);
    const Eigen::MatrixXcd obs_inv =
        joint.bottomRightCorner(k, k).inverse(); // direct dense inverse

    Eigen::VectorXcd mu_obs(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        mu_obs(j) = mu_prior(omega[static_cast<std::size_t>(j)]);
    }

    DensePosterior out;
    out.mean = mu_prior + cross * obs_inv * (y - mu_obs);
    out.covariance = sigma - cross * obs_inv * cross.adjoint();
    return out;
}

DensePosterior dense_condition(const Eigen::MatrixXcd &sigma,
                               const std::vector<int> &omega,
                               const Eigen::VectorXcd &y,
                               double noise_variance) {
    return dense_condition(sigma, Eigen::VectorXcd::Zero(sigma.rows()), omega,
                           y, noise_variance);
}

} // namespace sbar::testing
