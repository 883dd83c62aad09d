// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sbar/gp_core.hpp"

#include <cmath>
#include <limits>

#include "sbar/errors.hpp"

namespace sbar {

namespace {

// Diagonal entries of a Hermitian matrix are real; measurable imaginary
// parts signal an upstream bug rather than roundoff.
Eigen::VectorXd real_diagonal(const Eigen::VectorXcd &diag) {
    const double scale = std::max(1.0, diag.real().cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (std::abs(diag(i).imag()) > 1e-12 * scale) {
            throw InvariantViolationError(
                "posterior variance drifted off the real axis at port " +
                std::to_string(i + 1));
        }
    }
    return diag.real();
}

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd &m) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out(i, i) = std::complex<double>(m(i, i).real(), 0.0);
        for (Eigen::Index j = 0; j < i; ++j) {
            const std::complex<double> v = 0.5 * (m(i, j) + std::conj(m(j, i)));
            out(i, j) = v;
            out(j, i) = std::conj(v);
        }
    }
    return out;
}

void validate_prefix(const Kernel &kernel, const std::vector<int> &prefix) {
    for (int idx : prefix) {
        if (idx < 0 || idx >= kernel.size()) {
            throw ScheduleMismatchError("port " + std::to_string(idx + 1) +
                                        " outside [1, " +
                                        std::to_string(kernel.size()) + "]");
        }
    }
}

// Factorization of Sigma(O,O) + s2 I with an explicit positive-definiteness
// gate. The eigenvalue scan is cheap at the |O| sizes this library runs at
// and gives an honest condition-number estimate on failure.
Eigen::LDLT<Eigen::MatrixXcd> factor_gram(const Kernel &kernel,
                                          const std::vector<int> &omega,
                                          double noise_variance,
                                          Eigen::MatrixXcd &gram_out) {
    const Eigen::Index k = static_cast<Eigen::Index>(omega.size());
    gram_out = kernel.matrix(omega, omega);
    gram_out += noise_variance * Eigen::MatrixXcd::Identity(k, k);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram_out,
                                                       Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || lo <= hi * 1e-14) {
        const double cond = (lo > 0.0 && hi > 0.0)
                                ? hi / lo
                                : std::numeric_limits<double>::infinity();
        throw NumericalFailureError(
            "measurement Gram matrix is singular (condition estimate " +
                std::to_string(cond) + "); a zero noise variance requires a "
                "strictly positive-definite kernel restriction",
            cond);
    }
    return Eigen::LDLT<Eigen::MatrixXcd>(gram_out);
}

} // namespace

Eigen::VectorXd PosteriorState::variances() const {
    return real_diagonal(covariance.diagonal());
}

PosteriorState condition(const Kernel &kernel,
                         const std::vector<int> &schedule_prefix,
                         const PilotBatch &pilots) {
    validate_prefix(kernel, schedule_prefix);
    if (static_cast<std::size_t>(pilots.observations.size()) !=
        schedule_prefix.size()) {
        throw ScheduleMismatchError(
            "pilot batch holds " + std::to_string(pilots.observations.size()) +
            " observations for " + std::to_string(schedule_prefix.size()) +
            " scheduled ports");
    }

    if (schedule_prefix.empty()) {
        return PosteriorState{Eigen::VectorXcd::Zero(kernel.size()),
                              kernel.matrix, {}, pilots};
    }

    Eigen::MatrixXcd gram;
    const auto ldlt = factor_gram(kernel, schedule_prefix, pilots.noise_variance, gram);

    const Eigen::MatrixXcd cross = kernel.matrix(Eigen::all, schedule_prefix);
    const Eigen::VectorXcd mean = cross * ldlt.solve(pilots.observations);
    Eigen::MatrixXcd cov = kernel.matrix;
    cov.noalias() -= cross * ldlt.solve(cross.adjoint().eval());
    cov = hermitize(cov);

    return PosteriorState{mean, std::move(cov), schedule_prefix, pilots};
}

Eigen::VectorXd posterior_variances(const Kernel &kernel,
                                    const std::vector<int> &measured,
                                    double noise_variance) {
    validate_prefix(kernel, measured);
    if (measured.empty()) {
        return real_diagonal(kernel.matrix.diagonal());
    }

    Eigen::MatrixXcd gram;
    const auto ldlt = factor_gram(kernel, measured, noise_variance, gram);

    const Eigen::MatrixXcd rows = kernel.matrix(measured, Eigen::all); // k x N
    const Eigen::MatrixXcd solved = ldlt.solve(rows);
    // diag(Sigma(:,O) A^-1 Sigma(O,:)) without forming the N x N product.
    const Eigen::VectorXcd correction =
        (rows.conjugate().array() * solved.array()).colwise().sum().matrix().transpose();
    return real_diagonal(kernel.matrix.diagonal() - correction);
}

int max_variance_index(const PosteriorState &state) {
    const Eigen::VectorXd vars = state.variances();
    std::vector<bool> taken(static_cast<std::size_t>(vars.size()), false);
    for (int idx : state.measured) {
        taken[static_cast<std::size_t>(idx)] = true;
    }
    int best = -1;
    double best_var = -std::numeric_limits<double>::infinity();
    for (Eigen::Index n = 0; n < vars.size(); ++n) {
        if (taken[static_cast<std::size_t>(n)]) continue;
        if (vars(n) > best_var) {
            best_var = vars(n);
            best = static_cast<int>(n);
        }
    }
    if (best < 0) {
        throw ExhaustedScheduleError("all ports are already measured");
    }
    return best;
}

PosteriorState sequential_regression(const Kernel &kernel,
                                     const MeasurementFn &measure,
                                     const RegressionConfig &config) {
    if (config.max_samples < 0 || config.max_samples > kernel.size()) {
        throw ShapeError("max_samples must lie in [0, N]");
    }
    if (!(config.tolerance >= 0.0)) {
        throw ShapeError("tolerance must be >= 0");
    }

    std::vector<int> measured;
    std::vector<std::complex<double>> values;
    PosteriorState state = condition(
        kernel, measured,
        PilotBatch(Eigen::VectorXcd::Zero(0), config.noise_variance));

    while (true) {
        if (state.variances().maxCoeff() <= config.tolerance) break;
        if (static_cast<int>(measured.size()) >= config.max_samples) break;

        const int next = max_variance_index(state);
        measured.push_back(next);
        values.push_back(measure(next));

        Eigen::VectorXcd y(static_cast<Eigen::Index>(values.size()));
        for (std::size_t i = 0; i < values.size(); ++i) {
            y(static_cast<Eigen::Index>(i)) = values[i];
        }
        state = condition(kernel, measured,
                          PilotBatch(std::move(y), config.noise_variance));
    }
    return state;
}

} // namespace sbar
