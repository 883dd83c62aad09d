// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sbar/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "sbar/errors.hpp"

namespace sbar {

namespace {

constexpr double kSpeedOfLight = 299792458.0; // m/s
constexpr long kPowerEstimateSeeds = 10000;

bool is_sorted_strict(const std::vector<double> &v) {
    return std::is_sorted(v.begin(), v.end(),
                          [](double a, double b) { return a <= b; });
}

bool is_sorted_strict(const std::vector<int> &v) {
    return std::is_sorted(v.begin(), v.end(),
                          [](int a, int b) { return a <= b; });
}

double snr_db_to_linear(double snr_db) {
    return std::pow(10.0, snr_db / 10.0);
}

// One sweep point: the pilot count and nominal SNR it runs at.
struct GridPoint {
    int pilots;
    double snr_db;
};

std::vector<GridPoint> make_grid(const ExperimentConfig &config) {
    std::vector<GridPoint> grid;
    if (config.sweep == SweepAxis::snr) {
        for (double snr : config.snr_grid_db) {
            grid.push_back({config.pilot_grid.front(), snr});
        }
    } else {
        for (int p : config.pilot_grid) {
            grid.push_back({p, config.snr_grid_db.front()});
        }
    }
    return grid;
}

ChannelVector draw_channel(const ExperimentConfig &config,
                           const ArrayGeometry &geometry, std::uint64_t seed) {
    if (config.channel == ChannelModelKind::rich) {
        return generate_rich_channel(geometry, seed);
    }
    return generate_ssc_channel(geometry, config.ssc_params(), seed);
}

double estimate_port_power(const ExperimentConfig &config,
                           const ArrayGeometry &geometry) {
    std::vector<double> norms;
    norms.reserve(kPowerEstimateSeeds);
    for (long i = 0; i < kPowerEstimateSeeds; ++i) {
        const std::uint64_t seed =
            split_seed(config.master_seed, SeedDomain::power_estimate,
                       static_cast<std::uint64_t>(i));
        norms.push_back(draw_channel(config, geometry, seed).squaredNorm());
    }
    const double mean_norm = pairwise_sum(norms) / kPowerEstimateSeeds;
    return mean_norm / config.num_ports;
}

Kernel build_estimator_kernel(const ExperimentConfig &config,
                              const ArrayGeometry &geometry,
                              const EstimatorSpec &spec) {
    const double eta_sq = spec.eta_sq > 0.0
                              ? spec.eta_sq
                              : geometry.wavelength / (2.0 * std::numbers::pi);
    const KernelHyper hyper(spec.alpha_sq, eta_sq, spec.bessel_order);
    switch (spec.kernel) {
    case KernelLabel::exponential:
        return exponential_kernel(geometry, hyper);
    case KernelLabel::bessel:
        return bessel_kernel(geometry, hyper);
    case KernelLabel::covariance: {
        std::vector<ChannelVector> training;
        training.reserve(static_cast<std::size_t>(spec.training_samples));
        for (int t = 0; t < spec.training_samples; ++t) {
            const std::uint64_t seed =
                split_seed(config.master_seed, SeedDomain::covariance_training,
                           static_cast<std::uint64_t>(t));
            training.push_back(draw_channel(config, geometry, seed));
        }
        return covariance_kernel(training);
    }
    case KernelLabel::custom:
        break;
    }
    throw ConfigError("estimator[" + spec.label + "].kernel",
                      "custom kernels cannot be built from a config file");
}

} // namespace

std::string to_string(ChannelModelKind kind) {
    return kind == ChannelModelKind::ssc ? "ssc" : "rich";
}

std::string to_string(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::sbar:
        return "sbar";
    case EstimatorKind::fas_omp:
        return "fas-omp";
    case EstimatorKind::fas_ml:
        return "fas-ml";
    case EstimatorKind::selmmse:
        return "selmmse";
    }
    return "sbar";
}

std::string to_string(SweepAxis axis) {
    return axis == SweepAxis::snr ? "snr" : "pilots";
}

bool EstimatorSpec::operator==(const EstimatorSpec &other) const {
    const bool design_equal =
        (std::isnan(design_snr_db) && std::isnan(other.design_snr_db)) ||
        design_snr_db == other.design_snr_db;
    return label == other.label && kind == other.kind &&
           kernel == other.kernel && alpha_sq == other.alpha_sq &&
           eta_sq == other.eta_sq && bessel_order == other.bessel_order &&
           training_samples == other.training_samples && design_equal &&
           sparsity == other.sparsity && max_iters == other.max_iters;
}

bool ExperimentConfig::operator==(const ExperimentConfig &other) const {
    return channel == other.channel && num_ports == other.num_ports &&
           antennas == other.antennas && carrier_ghz == other.carrier_ghz &&
           aperture_wavelengths == other.aperture_wavelengths &&
           clusters == other.clusters && rays == other.rays &&
           angle_spread_deg == other.angle_spread_deg && sweep == other.sweep &&
           snr_grid_db == other.snr_grid_db && pilot_grid == other.pilot_grid &&
           trials == other.trials && master_seed == other.master_seed &&
           output_path == other.output_path &&
           plan_cache_dir == other.plan_cache_dir &&
           estimators == other.estimators;
}

ArrayGeometry ExperimentConfig::geometry() const {
    const double wavelength = kSpeedOfLight / (carrier_ghz * 1e9);
    return ArrayGeometry(num_ports, wavelength,
                         aperture_wavelengths * wavelength);
}

SscParams ExperimentConfig::ssc_params() const {
    return SscParams(clusters, rays,
                     angle_spread_deg * std::numbers::pi / 180.0);
}

void validate_config(const ExperimentConfig &config) {
    if (config.num_ports < 2) {
        throw ConfigError("num_ports", "must be >= 2");
    }
    if (config.antennas < 1) {
        throw ConfigError("num_antennas", "must be >= 1");
    }
    if (!(config.carrier_ghz > 0.0)) {
        throw ConfigError("carrier_ghz", "must be positive");
    }
    if (!(config.aperture_wavelengths > 0.0)) {
        throw ConfigError("aperture_wavelengths", "must be positive");
    }
    if (config.clusters < 1) {
        throw ConfigError("clusters", "must be >= 1");
    }
    if (config.rays < 1) {
        throw ConfigError("rays", "must be >= 1");
    }
    if (config.angle_spread_deg < 0.0 || config.angle_spread_deg > 180.0) {
        throw ConfigError("angle_spread_deg", "must lie in [0, 180]");
    }
    if (config.snr_grid_db.empty()) {
        throw ConfigError("snr_db", "grid must be non-empty");
    }
    if (config.pilot_grid.empty()) {
        throw ConfigError("pilots", "grid must be non-empty");
    }
    if (!is_sorted_strict(config.snr_grid_db)) {
        throw ConfigError("snr_db", "grid must be strictly ascending");
    }
    if (!is_sorted_strict(config.pilot_grid)) {
        throw ConfigError("pilots", "grid must be strictly ascending");
    }
    if (config.sweep == SweepAxis::snr && config.pilot_grid.size() != 1) {
        throw ConfigError("pilots",
                          "must be a single value when sweeping over SNR");
    }
    if (config.sweep == SweepAxis::pilots && config.snr_grid_db.size() != 1) {
        throw ConfigError("snr_db",
                          "must be a single value when sweeping over pilots");
    }
    for (double snr : config.snr_grid_db) {
        if (std::isnan(snr) || (std::isinf(snr) && snr < 0.0)) {
            throw ConfigError("snr_db", "SNR must be finite or +inf");
        }
    }
    for (int p : config.pilot_grid) {
        if (p < 1) {
            throw ConfigError("pilots", "pilot counts must be >= 1");
        }
        const long samples = static_cast<long>(p) * config.antennas;
        if (samples > config.num_ports) {
            throw ConfigError("pilots",
                              "P*M = " + std::to_string(samples) +
                                  " exceeds num_ports = " +
                                  std::to_string(config.num_ports));
        }
    }
    if (config.trials < 1) {
        throw ConfigError("trials", "must be >= 1");
    }
    if (config.output_path.empty()) {
        throw ConfigError("output", "must not be empty");
    }
    if (config.estimators.empty()) {
        throw ConfigError("estimator", "at least one estimator is required");
    }
    for (std::size_t i = 0; i < config.estimators.size(); ++i) {
        const EstimatorSpec &e = config.estimators[i];
        const std::string path = "estimator[" + e.label + "]";
        if (e.label.empty()) {
            throw ConfigError("estimator", "labels must not be empty");
        }
        if (e.label.find(',') != std::string::npos) {
            throw ConfigError(path, "label must not contain commas");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (config.estimators[j].label == e.label) {
                throw ConfigError(path, "duplicate estimator label");
            }
        }
        if (e.kind == EstimatorKind::sbar) {
            if (e.kernel == KernelLabel::custom) {
                throw ConfigError(path + ".kernel",
                                  "must be exponential, bessel or covariance");
            }
            if (!(e.alpha_sq > 0.0)) {
                throw ConfigError(path + ".alpha_sq", "must be positive");
            }
            if (e.eta_sq < 0.0) {
                throw ConfigError(path + ".eta_sq", "must be positive (or 0 for the default)");
            }
            if (e.bessel_order < 0) {
                throw ConfigError(path + ".bessel_order", "must be >= 0");
            }
            if (e.kernel == KernelLabel::covariance && e.training_samples < 1) {
                throw ConfigError(path + ".training_samples", "must be >= 1");
            }
        }
        if (e.kind == EstimatorKind::fas_omp || e.kind == EstimatorKind::fas_ml) {
            if (e.sparsity < 0) {
                throw ConfigError(path + ".sparsity",
                                  "must be >= 1 (or 0 for the 2C default)");
            }
        }
        if (e.kind == EstimatorKind::fas_ml && e.max_iters < 1) {
            throw ConfigError(path + ".max_iters", "must be >= 1");
        }
    }
}

std::vector<ExperimentResult> run_experiment(const ExperimentConfig &config,
                                             const WarningFn &warn) {
    validate_config(config);
    const ArrayGeometry geometry = config.geometry();
    const double port_power = estimate_port_power(config, geometry);
    const std::vector<GridPoint> grid = make_grid(config);

    // Kernels are per-estimator, independent of the sweep point.
    std::vector<Kernel> kernels;
    kernels.reserve(config.estimators.size());
    for (const EstimatorSpec &spec : config.estimators) {
        if (spec.kind == EstimatorKind::sbar) {
            kernels.push_back(build_estimator_kernel(config, geometry, spec));
        } else {
            kernels.emplace_back(Eigen::MatrixXcd::Zero(0, 0),
                                 KernelLabel::custom);
        }
    }

    std::vector<ExperimentResult> results;
    results.reserve(config.estimators.size() * grid.size());

    for (std::size_t ei = 0; ei < config.estimators.size(); ++ei) {
        const EstimatorSpec &spec = config.estimators[ei];
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            const GridPoint point = grid[gi];
            const double snr_linear = snr_db_to_linear(point.snr_db);
            const double noise_variance =
                std::isinf(snr_linear) ? 0.0 : port_power / snr_linear;
            const int samples = point.pilots * config.antennas;

            // Stream roots for this (estimator, grid point) pair.
            const std::uint64_t pair_tag =
                static_cast<std::uint64_t>(gi) * 1000003ULL + ei;
            const std::uint64_t noise_root =
                split_seed(config.master_seed, SeedDomain::noise, pair_tag);
            const std::uint64_t schedule_root =
                split_seed(config.master_seed, SeedDomain::schedule, pair_tag);

            std::optional<SbarPlan> plan;
            int sparsity = 0;
            if (spec.kind == EstimatorKind::sbar) {
                const double design_snr = std::isnan(spec.design_snr_db)
                                              ? point.snr_db
                                              : spec.design_snr_db;
                const double design_noise =
                    std::isinf(snr_db_to_linear(design_snr))
                        ? 0.0
                        : port_power / snr_db_to_linear(design_snr);
                std::string cache_warning;
                plan = load_or_design_plan(config.plan_cache_dir, kernels[ei],
                                           point.pilots, config.antennas,
                                           design_noise, nullptr,
                                           &cache_warning);
                if (!cache_warning.empty() && warn) {
                    warn(cache_warning);
                }
            } else if (spec.kind != EstimatorKind::selmmse) {
                sparsity = spec.sparsity > 0 ? spec.sparsity
                                             : 2 * config.clusters;
                sparsity = std::min(sparsity, samples);
            }

            NmseAccumulator acc;
            for (int t = 0; t < config.trials; ++t) {
                const std::uint64_t channel_seed =
                    split_seed(config.master_seed, SeedDomain::channel,
                               static_cast<std::uint64_t>(t));
                const ChannelVector h = draw_channel(config, geometry,
                                                     channel_seed);
                const std::uint64_t noise_seed =
                    split_seed(noise_root, SeedDomain::trial,
                               static_cast<std::uint64_t>(t));

                ChannelVector estimate;
                switch (spec.kind) {
                case EstimatorKind::sbar: {
                    const PilotBatch y = receive_pilots(
                        h, plan->schedule, noise_variance, noise_seed);
                    estimate = reconstruct(*plan, y);
                    break;
                }
                case EstimatorKind::fas_omp:
                case EstimatorKind::fas_ml: {
                    const std::uint64_t schedule_seed =
                        split_seed(schedule_root, SeedDomain::trial,
                                   static_cast<std::uint64_t>(t));
                    const PortSchedule schedule = random_switch_matrix(
                        config.num_ports, point.pilots, config.antennas,
                        schedule_seed);
                    const PilotBatch y =
                        receive_pilots(h, schedule, noise_variance, noise_seed);
                    estimate =
                        spec.kind == EstimatorKind::fas_omp
                            ? fas_omp(y, schedule, geometry, sparsity)
                                  .reconstructed
                            : fas_ml(y, schedule, geometry, sparsity,
                                     spec.max_iters)
                                  .reconstructed;
                    break;
                }
                case EstimatorKind::selmmse: {
                    const PortSchedule schedule = selmmse_schedule(
                        config.num_ports, point.pilots, config.antennas);
                    const PilotBatch y =
                        receive_pilots(h, schedule, noise_variance, noise_seed);
                    estimate = selmmse(y, geometry, point.pilots,
                                       config.antennas);
                    break;
                }
                }
                acc.add(estimate, h);
            }

            const NmseResult r = acc.result();
            ExperimentResult row;
            row.estimator = spec.label;
            row.channel_model = to_string(config.channel);
            row.kernel = spec.kind == EstimatorKind::sbar
                             ? to_string(spec.kernel)
                             : "none";
            row.num_ports = config.num_ports;
            row.antennas = config.antennas;
            row.pilots = point.pilots;
            row.snr_db = point.snr_db;
            row.trials = r.trials_used;
            row.nmse_db = r.nmse_db;
            row.nmse_stderr = r.ratio_stderr;
            row.seed = config.master_seed;
            results.push_back(std::move(row));
        }
    }
    return results;
}

std::string csv_header() {
    return "estimator,channel_model,kernel,N,M,P,snr_db,trials,nmse_db,"
           "nmse_stderr,seed";
}

void write_csv(const std::vector<ExperimentResult> &results,
               const std::string &path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw Error("cannot open CSV for writing: " + path);
    }
    os << csv_header() << "\n";
    char buf[256];
    for (const ExperimentResult &r : results) {
        std::snprintf(buf, sizeof(buf), ",%d,%d,%d,%.10g,%ld,%.10g,%.10g,%llu",
                      r.num_ports, r.antennas, r.pilots, r.snr_db, r.trials,
                      r.nmse_db, r.nmse_stderr,
                      static_cast<unsigned long long>(r.seed));
        os << r.estimator << ',' << r.channel_model << ',' << r.kernel << buf
           << "\n";
    }
    if (!os) {
        throw Error("short write to CSV: " + path);
    }
}

std::vector<ExperimentResult> read_csv(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error("cannot open CSV: " + path);
    }
    std::string line;
    if (!std::getline(is, line)) {
        throw Error("CSV is empty (no header row): " + path);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header()) {
        // Name the first offending column for the caller.
        std::istringstream expected(csv_header());
        std::istringstream found(line);
        std::string want;
        std::string got;
        int column = 0;
        while (std::getline(expected, want, ',')) {
            ++column;
            if (!std::getline(found, got, ',')) got.clear();
            if (want != got) {
                throw Error("CSV column " + std::to_string(column) +
                            ": expected '" + want + "', found '" + got + "'");
            }
        }
        throw Error("CSV header has extra columns: " + path);
    }

    std::vector<ExperimentResult> rows;
    long line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != 11) {
            throw Error("CSV line " + std::to_string(line_no) + " has " +
                        std::to_string(fields.size()) + " fields, expected 11");
        }
        try {
            ExperimentResult r;
            r.estimator = fields[0];
            r.channel_model = fields[1];
            r.kernel = fields[2];
            r.num_ports = std::stoi(fields[3]);
            r.antennas = std::stoi(fields[4]);
            r.pilots = std::stoi(fields[5]);
            r.snr_db = std::stod(fields[6]);
            r.trials = std::stol(fields[7]);
            r.nmse_db = std::stod(fields[8]);
            r.nmse_stderr = std::stod(fields[9]);
            r.seed = std::stoull(fields[10]);
            rows.push_back(std::move(r));
        } catch (const std::exception &) {
            throw Error("CSV line " + std::to_string(line_no) +
                        " has a malformed numeric field");
        }
    }
    return rows;
}

} // namespace sbar
