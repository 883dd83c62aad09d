// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_EXPERIMENT_HPP
#define SBAR_EXPERIMENT_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sbar/analysis.hpp"
#include "sbar/baselines.hpp"

namespace sbar {

enum class ChannelModelKind { ssc, rich };
enum class EstimatorKind { sbar, fas_omp, fas_ml, selmmse };
enum class SweepAxis { snr, pilots };

std::string to_string(ChannelModelKind kind);
std::string to_string(EstimatorKind kind);
std::string to_string(SweepAxis axis);

struct EstimatorSpec {
    std::string label;
    EstimatorKind kind = EstimatorKind::sbar;

    // Weighted-sum estimator options.
    KernelLabel kernel = KernelLabel::bessel;
    double alpha_sq = 1.0;
    double eta_sq = 0.0;   // 0 selects the default lambda/(2 pi)
    int bessel_order = 0;
    int training_samples = 100; // channels used to train a covariance kernel
    // Design-time SNR; NaN designs at each sweep point's nominal SNR.
    double design_snr_db = std::numeric_limits<double>::quiet_NaN();

    // Sparse estimator options.
    int sparsity = 0; // 0 selects 2 * clusters; clamped to P*M per point
    int max_iters = 50;

    bool operator==(const EstimatorSpec &other) const;
};

struct ExperimentConfig {
    ChannelModelKind channel = ChannelModelKind::ssc;
    int num_ports = 128;
    int antennas = 4;
    double carrier_ghz = 3.5;
    double aperture_wavelengths = 10.0;
    int clusters = 9;
    int rays = 100;
    double angle_spread_deg = 5.0;
    SweepAxis sweep = SweepAxis::pilots;
    std::vector<double> snr_grid_db = {20.0}; // may hold "inf" for noiseless
    std::vector<int> pilot_grid = {10};
    int trials = 500;
    std::uint64_t master_seed = 1;
    std::string output_path = "results.csv";
    std::string plan_cache_dir; // empty disables the on-disk plan cache
    std::vector<EstimatorSpec> estimators;

    ArrayGeometry geometry() const;
    SscParams ssc_params() const;

    bool operator==(const ExperimentConfig &other) const;
};

/// Field-level validation; throws ConfigError naming the offending field.
void validate_config(const ExperimentConfig &config);

struct ExperimentResult {
    std::string estimator;
    std::string channel_model;
    std::string kernel; // kernel label, or "none" for the baselines
    int num_ports = 0;
    int antennas = 0;
    int pilots = 0;
    double snr_db = 0.0;
    long trials = 0;
    double nmse_db = 0.0;
    double nmse_stderr = 0.0; // standard error of the linear NMSE ratio
    std::uint64_t seed = 0;
};

using WarningFn = std::function<void(const std::string &)>;

/// Runs every estimator over the configured sweep. Channels are shared
/// across estimators within a trial; noise and random schedules get
/// independent per-(estimator, grid point, trial) seed streams, so results
/// are reproducible and order-independent. The per-measurement noise power
/// is sigma^2 = (average port power) / SNR, with the port power
/// E(|h|^2)/N estimated once from 10^4 held-out seed channels.
/// Non-fatal events (a corrupt plan cache entry being rebuilt) go to `warn`.
std::vector<ExperimentResult> run_experiment(const ExperimentConfig &config,
                                             const WarningFn &warn = {});

/// CSV schema: estimator,channel_model,kernel,N,M,P,snr_db,trials,nmse_db,
/// nmse_stderr,seed. Header row mandatory, UTF-8, LF line endings.
std::string csv_header();
void write_csv(const std::vector<ExperimentResult> &results,
               const std::string &path);
std::vector<ExperimentResult> read_csv(const std::string &path);

} // namespace sbar

#endif
