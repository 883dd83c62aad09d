// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_PLAN_HPP
#define SBAR_PLAN_HPP

#include <string>

#include "sbar/gp_core.hpp"

namespace sbar {

/// Offline product of the two-stage estimator: a max-variance port schedule
/// plus the precomputed regression weights
///   W = (Sigma(O,O) + s2 I)^-1 Sigma(O,:)
/// so that the online stage reduces to h_hat = W^H y.
struct SbarPlan {
    PortSchedule schedule;
    Eigen::MatrixXcd weights; // (P*M) x N
    double design_noise_variance = 0.0;
    KernelLabel kernel_label = KernelLabel::custom;
    std::uint64_t kernel_hash = 0;
};

/// Stage 1: greedily selects P*M ports by repeated maximum posterior
/// variance (covariance-only updates; no pilot data is read), fills the
/// switch matrices row by row in selection order, and computes the weights.
/// Deterministic: identical inputs give bitwise-identical plans.
SbarPlan design_plan(const Kernel &kernel, int pilots, int antennas,
                     double noise_variance);

/// Stage 2: h_hat = W^H y. Pure linear map, O(N * P * M).
ChannelVector reconstruct(const SbarPlan &plan, const PilotBatch &pilots);

/// Per-timeslot binary M x N switch matrices of the plan's schedule.
std::vector<Eigen::MatrixXd> schedule_to_switch_matrices(const SbarPlan &plan);

/// Cache key: content hash of (kernel bytes, P, M, sigma^2).
std::uint64_t plan_cache_key(const Kernel &kernel, int pilots, int antennas,
                             double noise_variance);

/// Binary plan artifact: header {N, P, M, sigma^2, kernel hash}, then the
/// schedule as 1-based uint32 indices, then W row-major as little-endian
/// complex float64 pairs.
void save_plan(const SbarPlan &plan, const std::string &path);
SbarPlan load_plan(const std::string &path);

/// File name used inside a cache directory for the given key.
std::string plan_cache_file(const std::string &cache_dir, std::uint64_t key);

/// Loads a cached plan when a valid one exists, otherwise designs and (when
/// cache_dir is non-empty) stores it. `cache_hit` reports what happened;
/// `cache_warning` is set when a corrupt cache entry had to be rebuilt.
SbarPlan load_or_design_plan(const std::string &cache_dir, const Kernel &kernel,
                             int pilots, int antennas, double noise_variance,
                             bool *cache_hit = nullptr,
                             std::string *cache_warning = nullptr);

} // namespace sbar

#endif
