// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sbar/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "sbar/rng.hpp"

namespace sbar {

ArrayGeometry::ArrayGeometry(int num_ports_, double wavelength_, double aperture_)
    : num_ports(num_ports_), wavelength(wavelength_), aperture(aperture_) {
    if (num_ports < 1) {
        throw InvalidGeometryError("num_ports must be >= 1, got " +
                                   std::to_string(num_ports));
    }
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
        throw InvalidGeometryError("wavelength must be positive");
    }
    if (num_ports == 1) {
        port_spacing = 0.0;
        return;
    }
    if (!(aperture > 0.0) || !std::isfinite(aperture)) {
        throw InvalidGeometryError("aperture must be positive");
    }
    port_spacing = aperture / (num_ports - 1);
}

SscParams::SscParams(int clusters, int rays, double max_angle_spread_rad)
    : num_clusters(clusters), rays_per_cluster(rays),
      max_angle_spread(max_angle_spread_rad) {
    if (num_clusters < 1 || rays_per_cluster < 1) {
        throw ShapeError("cluster and ray counts must be >= 1");
    }
    if (!(max_angle_spread >= 0.0) || max_angle_spread > std::numbers::pi) {
        throw ShapeError("max_angle_spread must lie in [0, pi]");
    }
}

PortSchedule::PortSchedule(std::vector<int> indices_0based, int pilots,
                           int antennas_, int num_ports_)
    : indices(std::move(indices_0based)), pilots_per_frame(pilots),
      antennas(antennas_), num_ports(num_ports_) {
    if (pilots_per_frame < 1 || antennas < 1) {
        throw ShapeError("P and M must be >= 1");
    }
    const std::size_t pm = static_cast<std::size_t>(pilots_per_frame) * antennas;
    if (indices.size() != pm) {
        throw ShapeError("schedule holds " + std::to_string(indices.size()) +
                         " indices, expected P*M = " + std::to_string(pm));
    }
    if (pm > static_cast<std::size_t>(num_ports)) {
        throw CapacityError("P*M = " + std::to_string(pm) + " exceeds N = " +
                            std::to_string(num_ports));
    }
    std::unordered_set<int> seen;
    for (int idx : indices) {
        if (idx < 0 || idx >= num_ports) {
            throw ScheduleMismatchError("port " + std::to_string(idx + 1) +
                                        " outside [1, " +
                                        std::to_string(num_ports) + "]");
        }
        if (!seen.insert(idx).second) {
            throw ScheduleMismatchError("port " + std::to_string(idx + 1) +
                                        " scheduled twice");
        }
    }
}

Eigen::MatrixXd PortSchedule::switch_matrix() const {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(samples(), num_ports);
    for (int i = 0; i < samples(); ++i) {
        s(i, indices[static_cast<std::size_t>(i)]) = 1.0;
    }
    return s;
}

std::vector<Eigen::MatrixXd> PortSchedule::timeslot_matrices() const {
    std::vector<Eigen::MatrixXd> slots;
    slots.reserve(static_cast<std::size_t>(pilots_per_frame));
    for (int p = 0; p < pilots_per_frame; ++p) {
        Eigen::MatrixXd sp = Eigen::MatrixXd::Zero(antennas, num_ports);
        for (int m = 0; m < antennas; ++m) {
            sp(m, indices[static_cast<std::size_t>(p * antennas + m)]) = 1.0;
        }
        slots.push_back(std::move(sp));
    }
    return slots;
}

PortSchedule PortSchedule::from_switch_matrix(const Eigen::MatrixXd &stacked,
                                              int pilots, int antennas) {
    const int rows = static_cast<int>(stacked.rows());
    if (rows != pilots * antennas) {
        throw ShapeError("switch matrix has " + std::to_string(rows) +
                         " rows, expected P*M = " +
                         std::to_string(pilots * antennas));
    }
    std::vector<int> indices;
    indices.reserve(static_cast<std::size_t>(rows));
    for (int i = 0; i < rows; ++i) {
        int hit = -1;
        for (int n = 0; n < stacked.cols(); ++n) {
            if (stacked(i, n) != 0.0) {
                if (hit >= 0) {
                    throw InvariantViolationError(
                        "switch matrix row " + std::to_string(i + 1) +
                        " has more than one nonzero entry");
                }
                hit = n;
            }
        }
        if (hit < 0) {
            throw InvariantViolationError("switch matrix row " +
                                          std::to_string(i + 1) + " is empty");
        }
        indices.push_back(hit);
    }
    return PortSchedule(std::move(indices), pilots, antennas,
                        static_cast<int>(stacked.cols()));
}

PilotBatch::PilotBatch(Eigen::VectorXcd obs, double noise_var)
    : observations(std::move(obs)), noise_variance(noise_var) {
    if (!(noise_variance >= 0.0)) {
        throw ShapeError("noise variance must be >= 0");
    }
}

ChannelVector steering_vector(const ArrayGeometry &geometry, double theta) {
    const int n = geometry.num_ports;
    ChannelVector a(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double phase_step =
        2.0 * std::numbers::pi / geometry.wavelength * geometry.port_spacing *
        std::cos(theta);
    for (int i = 0; i < n; ++i) {
        a(i) = std::polar(scale, phase_step * i);
    }
    return a;
}

ChannelVector ssc_channel_from_paths(const ArrayGeometry &geometry,
                                     const std::vector<std::complex<double>> &gains,
                                     const std::vector<double> &angles_rad) {
    if (gains.empty() || gains.size() != angles_rad.size()) {
        throw ShapeError("gains and angles must be non-empty and equal length");
    }
    const double scale =
        std::sqrt(static_cast<double>(geometry.num_ports) /
                  static_cast<double>(gains.size()));
    ChannelVector h = ChannelVector::Zero(geometry.num_ports);
    for (std::size_t l = 0; l < gains.size(); ++l) {
        h += gains[l] * steering_vector(geometry, angles_rad[l]);
    }
    return scale * h;
}

ChannelVector generate_ssc_channel(const ArrayGeometry &geometry,
                                   const SscParams &params,
                                   std::uint64_t rng_seed) {
    Rng rng = make_rng(rng_seed);
    std::uniform_real_distribution<double> center_dist(-std::numbers::pi,
                                                       std::numbers::pi);

    const std::size_t paths = static_cast<std::size_t>(params.num_clusters) *
                              params.rays_per_cluster;
    std::vector<std::complex<double>> gains;
    std::vector<double> angles;
    gains.reserve(paths);
    angles.reserve(paths);

    for (int c = 0; c < params.num_clusters; ++c) {
        const double center = center_dist(rng);
        for (int r = 0; r < params.rays_per_cluster; ++r) {
            double angle = center;
            if (params.max_angle_spread > 0.0) {
                std::uniform_real_distribution<double> offset_dist(
                    -params.max_angle_spread, params.max_angle_spread);
                angle += offset_dist(rng);
            }
            angles.push_back(angle);
            gains.push_back(complex_gaussian(rng, 1.0));
        }
    }
    return ssc_channel_from_paths(geometry, gains, angles);
}

ChannelVector generate_rich_channel(const ArrayGeometry &geometry,
                                    std::uint64_t rng_seed) {
    const SscParams rich(23, 20, 5.0 * std::numbers::pi / 180.0);
    return generate_ssc_channel(geometry, rich, rng_seed);
}

PilotBatch receive_pilots(const ChannelVector &channel,
                          const PortSchedule &schedule, double noise_variance,
                          std::uint64_t rng_seed) {
    if (channel.size() != schedule.num_ports) {
        throw ScheduleMismatchError(
            "channel has " + std::to_string(channel.size()) +
            " ports but schedule expects " + std::to_string(schedule.num_ports));
    }
    if (!(noise_variance >= 0.0)) {
        throw ShapeError("noise variance must be >= 0");
    }
    Rng rng = make_rng(rng_seed);
    Eigen::VectorXcd y(schedule.samples());
    for (int i = 0; i < schedule.samples(); ++i) {
        y(i) = channel(schedule.indices[static_cast<std::size_t>(i)]) +
               complex_gaussian(rng, noise_variance);
    }
    return PilotBatch(std::move(y), noise_variance);
}

} // namespace sbar
