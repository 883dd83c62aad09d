// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sbar/analysis.hpp"

#include <cmath>
#include <limits>

#include "sbar/channel_model.hpp"
#include "sbar/errors.hpp"

namespace sbar {

namespace {

constexpr double kNmseFloorDb = -200.0;
constexpr double kNormThreshold = 1e-12;

// Tr(A B) = sum_ij A(i,j) B(j,i), without forming the product.
std::complex<double> trace_of_product(const Eigen::MatrixXcd &a,
                                      const Eigen::MatrixXcd &b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) {
        throw ShapeError("trace_of_product shape mismatch");
    }
    return (a.transpose().cwiseProduct(b)).sum();
}

Eigen::LDLT<Eigen::MatrixXcd> factor_or_throw(const Eigen::MatrixXcd &m,
                                              const char *what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m,
                                                       Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || lo <= hi * 1e-14) {
        const double cond = (lo > 0.0 && hi > 0.0)
                                ? hi / lo
                                : std::numeric_limits<double>::infinity();
        throw NumericalFailureError(std::string(what) +
                                        " is singular (condition estimate " +
                                        std::to_string(cond) + ")",
                                    cond);
    }
    return Eigen::LDLT<Eigen::MatrixXcd>(m);
}

} // namespace

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double lemma1_mse(const Kernel &kernel, const Kernel &true_cov,
                  const PortSchedule &schedule, double noise_variance) {
    if (kernel.size() != true_cov.size() ||
        kernel.size() != schedule.num_ports) {
        throw ShapeError("kernel, covariance and schedule disagree on N");
    }
    const std::vector<int> &omega = schedule.indices;
    const Eigen::Index k = static_cast<Eigen::Index>(omega.size());
    const Eigen::MatrixXcd ident = Eigen::MatrixXcd::Identity(k, k);

    Eigen::MatrixXcd gram = kernel.matrix(omega, omega);
    gram += noise_variance * ident;
    const auto ldlt = factor_or_throw(gram, "S Sigma S^H + s2 I");
    const Eigen::MatrixXcd pi =
        ldlt.solve(kernel.matrix(omega, Eigen::all)); // (PM) x N

    Eigen::MatrixXcd true_gram = true_cov.matrix(omega, omega);
    true_gram += noise_variance * ident;
    const Eigen::MatrixXcd true_rows = true_cov.matrix(omega, Eigen::all);

    const double quad =
        trace_of_product(pi.adjoint(), true_gram * pi).real();
    const double cross = trace_of_product(pi.adjoint(), true_rows).real();
    const double prior = true_cov.matrix.real().trace();
    return quad - 2.0 * cross + prior;
}

double lemma2_min_mse(const Kernel &true_cov, double noise_variance) {
    const Eigen::Index n = true_cov.matrix.rows();
    Eigen::MatrixXcd shifted = true_cov.matrix;
    shifted += noise_variance * Eigen::MatrixXcd::Identity(n, n);
    const auto ldlt = factor_or_throw(shifted, "Sigma_cov + s2 I");
    const Eigen::MatrixXcd solved = ldlt.solve(true_cov.matrix);
    const double reduction = trace_of_product(true_cov.matrix, solved).real();
    return true_cov.matrix.real().trace() - reduction;
}

GaussianSampler::GaussianSampler(const Kernel &cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.matrix);
    const Eigen::VectorXd scales = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor_ = es.eigenvectors() * scales.asDiagonal();
}

ChannelVector GaussianSampler::draw(Rng &rng) const {
    Eigen::VectorXcd white(factor_.cols());
    for (Eigen::Index i = 0; i < white.size(); ++i) {
        white(i) = complex_gaussian(rng, 1.0);
    }
    return factor_ * white;
}

MonteCarloMse monte_carlo_mse(const Kernel &kernel, const Kernel &true_cov,
                              const PortSchedule &schedule,
                              double noise_variance, long trials,
                              std::uint64_t master_seed) {
    if (trials < 1) {
        throw ShapeError("trials must be >= 1");
    }
    // Weights for the given (not necessarily max-variance) schedule.
    const std::vector<int> &omega = schedule.indices;
    const Eigen::Index k = static_cast<Eigen::Index>(omega.size());
    Eigen::MatrixXcd gram = kernel.matrix(omega, omega);
    gram += noise_variance * Eigen::MatrixXcd::Identity(k, k);
    const auto ldlt = factor_or_throw(gram, "S Sigma S^H + s2 I");
    const SbarPlan weighted{schedule,
                            ldlt.solve(kernel.matrix(omega, Eigen::all)),
                            noise_variance, kernel.label,
                            kernel_content_hash(kernel)};

    const GaussianSampler sampler(true_cov);
    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>(trials));
    for (long t = 0; t < trials; ++t) {
        Rng channel_rng =
            make_rng(split_seed(master_seed, SeedDomain::channel,
                                static_cast<std::uint64_t>(t)));
        const ChannelVector h = sampler.draw(channel_rng);
        const PilotBatch pilots =
            receive_pilots(h, schedule, noise_variance,
                           split_seed(master_seed, SeedDomain::noise,
                                      static_cast<std::uint64_t>(t)));
        const ChannelVector estimate = reconstruct(weighted, pilots);
        errors.push_back((estimate - h).squaredNorm());
    }

    MonteCarloMse out;
    out.trials = trials;
    out.mean = pairwise_sum(errors) / static_cast<double>(trials);
    if (trials > 1) {
        std::vector<double> centered(errors.size());
        for (std::size_t i = 0; i < errors.size(); ++i) {
            const double d = errors[i] - out.mean;
            centered[i] = d * d;
        }
        const double var =
            pairwise_sum(centered) / static_cast<double>(trials - 1);
        out.standard_error = std::sqrt(var / static_cast<double>(trials));
    }
    return out;
}

MseReport make_mse_report(const Kernel &kernel, const Kernel &true_cov,
                          const PortSchedule &schedule, double noise_variance,
                          long trials, std::uint64_t master_seed) {
    MseReport report;
    report.analytic_mse = lemma1_mse(kernel, true_cov, schedule, noise_variance);
    const MonteCarloMse mc = monte_carlo_mse(kernel, true_cov, schedule,
                                             noise_variance, trials,
                                             master_seed);
    report.monte_carlo_mse = mc.mean;
    report.monte_carlo_stderr = mc.standard_error;
    report.min_mse = lemma2_min_mse(true_cov, noise_variance);
    report.trials = trials;
    return report;
}

void NmseAccumulator::add(const ChannelVector &estimate,
                          const ChannelVector &truth) {
    if (estimate.size() != truth.size()) {
        throw ShapeError("estimate and truth lengths differ");
    }
    const double denom = truth.squaredNorm();
    if (denom < kNormThreshold * kNormThreshold) {
        ++excluded_;
        return;
    }
    ratios_.push_back((truth - estimate).squaredNorm() / denom);
}

NmseResult NmseAccumulator::result() const {
    if (ratios_.empty()) {
        throw InsufficientDataError("no usable trials for NMSE");
    }
    NmseResult r;
    r.trials_used = static_cast<long>(ratios_.size());
    r.trials_excluded = excluded_;
    r.mean_ratio = pairwise_sum(ratios_) / static_cast<double>(ratios_.size());
    if (ratios_.size() > 1) {
        std::vector<double> centered(ratios_.size());
        for (std::size_t i = 0; i < ratios_.size(); ++i) {
            const double d = ratios_[i] - r.mean_ratio;
            centered[i] = d * d;
        }
        const double var = pairwise_sum(centered) /
                           static_cast<double>(ratios_.size() - 1);
        r.ratio_stderr = std::sqrt(var / static_cast<double>(ratios_.size()));
    }
    r.nmse_db = (r.mean_ratio <= 1e-20) ? kNmseFloorDb
                                        : std::max(kNmseFloorDb,
                                                   10.0 * std::log10(r.mean_ratio));
    return r;
}

NmseResult nmse(const std::vector<std::pair<ChannelVector, ChannelVector>> &estimates) {
    if (estimates.empty()) {
        throw InsufficientDataError("NMSE of an empty trial set");
    }
    NmseAccumulator acc;
    for (const auto &[estimate, truth] : estimates) {
        acc.add(estimate, truth);
    }
    return acc.result();
}

} // namespace sbar
