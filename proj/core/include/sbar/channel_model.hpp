// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_CHANNEL_MODEL_HPP
#define SBAR_CHANNEL_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sbar/errors.hpp"

namespace sbar {

/// Complex gains of the N candidate antenna positions ("ports").
using ChannelVector = Eigen::VectorXcd;

/// Uniform linear port layout: N ports spread over an aperture of width W,
/// so the port spacing is d = W/(N-1). Lengths are in meters.
///
/// A single-port layout is allowed (spacing 0) so that degenerate cases can
/// be exercised; every multi-port layout requires a positive aperture.
struct ArrayGeometry {
    int num_ports = 0;
    double wavelength = 0.0;
    double aperture = 0.0;
    double port_spacing = 0.0;

    ArrayGeometry(int num_ports_, double wavelength_, double aperture_);

    /// Position of port n (0-based) on the line, in meters.
    double position(int n) const { return n * port_spacing; }
};

/// Spatially-sparse clustered channel: C clusters of R rays each, unit
/// complex Gaussian ray gains, cluster centers uniform on (-pi, pi), ray
/// offsets uniform within +-max_angle_spread of the center.
struct SscParams {
    int num_clusters = 1;
    int rays_per_cluster = 1;
    double max_angle_spread = 0.0; // radians

    SscParams(int clusters, int rays, double max_angle_spread_rad);
};

/// Ordered port visit sequence of a coherence frame: P timeslots with M
/// antennas each, P*M distinct ports in all. Indices are 0-based internally;
/// all printed and serialized forms are 1-based.
struct PortSchedule {
    std::vector<int> indices; // length P*M, distinct, in [0, N)
    int pilots_per_frame = 0; // P
    int antennas = 0;         // M
    int num_ports = 0;        // N

    PortSchedule(std::vector<int> indices_0based, int pilots, int antennas_,
                 int num_ports_);

    int samples() const { return pilots_per_frame * antennas; }

    /// Stacked binary switch matrix S (P*M x N): row i has a single 1 at
    /// column indices[i]. Satisfies S*S^H = I exactly.
    Eigen::MatrixXd switch_matrix() const;

    /// Per-timeslot M x N switch matrices S_1..S_P; antenna m of timeslot p
    /// sits at indices[(p-1)*M + m].
    std::vector<Eigen::MatrixXd> timeslot_matrices() const;

    /// Recovers the visit sequence from a stacked switch matrix.
    static PortSchedule from_switch_matrix(const Eigen::MatrixXd &stacked,
                                           int pilots, int antennas);
};

/// One frame of received pilots: y(i) = h(indices[i]) + z(i).
struct PilotBatch {
    Eigen::VectorXcd observations;
    double noise_variance = 0.0; // sigma^2, linear power

    PilotBatch(Eigen::VectorXcd obs, double noise_var);
};

/// Steering vector a(theta): n-th entry (1/sqrt(N)) exp(j (2pi/lambda) n d cos theta)
/// for 0-based n. Unit Euclidean norm for every theta.
ChannelVector steering_vector(const ArrayGeometry &geometry, double theta);

/// Deterministic channel for explicit ray gains/angles:
/// h = sqrt(N / num_paths) * sum_l gains[l] * a(angles[l]).
/// This is the injection hook behind the random generators.
ChannelVector ssc_channel_from_paths(const ArrayGeometry &geometry,
                                     const std::vector<std::complex<double>> &gains,
                                     const std::vector<double> &angles_rad);

/// Random spatially-sparse clustered channel, deterministic under a seed.
ChannelVector generate_ssc_channel(const ArrayGeometry &geometry,
                                   const SscParams &params,
                                   std::uint64_t rng_seed);

/// Rich-scattering proxy: clustered channel with 23 clusters of 20 rays and
/// a 5 degree angle spread.
ChannelVector generate_rich_channel(const ArrayGeometry &geometry,
                                    std::uint64_t rng_seed);

/// Noisy pilot reception through the schedule's switch matrix:
/// y(i) = h(indices[i]) + z(i), z i.i.d. CN(0, sigma^2).
PilotBatch receive_pilots(const ChannelVector &channel,
                          const PortSchedule &schedule, double noise_variance,
                          std::uint64_t rng_seed);

} // namespace sbar

#endif
