// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sbar/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "sbar/errors.hpp"
#include "sbar/rng.hpp"

namespace sbar {

namespace {

using Complex = std::complex<double>;

void check_pilot_shape(const PilotBatch &pilots, const PortSchedule &schedule) {
    if (pilots.observations.size() != schedule.samples()) {
        throw ScheduleMismatchError(
            "pilot batch holds " + std::to_string(pilots.observations.size()) +
            " observations for a schedule of " +
            std::to_string(schedule.samples()));
    }
}

// Measured rows of the DFT dictionary: Psi = S F.
Eigen::MatrixXcd sensing_matrix(const Eigen::MatrixXcd &dft,
                                const PortSchedule &schedule) {
    return dft(schedule.indices, Eigen::all);
}

// Derivative of the steering vector w.r.t. the incident angle.
Eigen::VectorXcd steering_derivative(const ArrayGeometry &geometry,
                                     double theta) {
    const Eigen::VectorXcd a = steering_vector(geometry, theta);
    const double factor = 2.0 * std::numbers::pi / geometry.wavelength *
                          geometry.port_spacing * std::sin(theta);
    Eigen::VectorXcd da(a.size());
    for (Eigen::Index n = 0; n < a.size(); ++n) {
        da(n) = Complex(0.0, -factor * static_cast<double>(n)) * a(n);
    }
    return da;
}

// Grid atom k corresponds to spatial frequency 2 pi k'/N with k' wrapped to
// [-N/2, N/2); map it back to an incident angle, clamping frequencies the
// aperture cannot produce onto the endfire directions.
double atom_to_angle(int atom, int num_ports, const ArrayGeometry &geometry) {
    int wrapped = atom;
    if (wrapped >= (num_ports + 1) / 2) {
        wrapped -= num_ports;
    }
    double u = 0.0;
    if (geometry.port_spacing > 0.0) {
        u = geometry.wavelength * wrapped /
            (static_cast<double>(num_ports) * geometry.port_spacing);
    }
    u = std::clamp(u, -1.0, 1.0);
    return std::acos(u);
}

} // namespace

Eigen::MatrixXcd unitary_dft(int n) {
    if (n < 1) {
        throw ShapeError("DFT size must be >= 1");
    }
    Eigen::MatrixXcd f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            const double phase = 2.0 * std::numbers::pi *
                                 (static_cast<double>(row) * col) / n;
            f(row, col) = std::polar(scale, phase);
        }
    }
    return f;
}

PortSchedule random_switch_matrix(int num_ports, int pilots, int antennas,
                                  std::uint64_t rng_seed) {
    const long samples = static_cast<long>(pilots) * antennas;
    if (samples > num_ports) {
        throw CapacityError("P*M = " + std::to_string(samples) +
                            " exceeds N = " + std::to_string(num_ports));
    }
    std::vector<int> pool(static_cast<std::size_t>(num_ports));
    std::iota(pool.begin(), pool.end(), 0);
    Rng rng = make_rng(rng_seed);
    for (long i = 0; i < samples; ++i) {
        std::uniform_int_distribution<long> pick(i, num_ports - 1);
        std::swap(pool[static_cast<std::size_t>(i)],
                  pool[static_cast<std::size_t>(pick(rng))]);
    }
    pool.resize(static_cast<std::size_t>(samples));
    return PortSchedule(std::move(pool), pilots, antennas, num_ports);
}

SparseEstimate fas_omp(const PilotBatch &pilots, const PortSchedule &schedule,
                       const ArrayGeometry &geometry, int sparsity) {
    check_pilot_shape(pilots, schedule);
    const int n = geometry.num_ports;
    if (n != schedule.num_ports) {
        throw ShapeError("geometry and schedule disagree on N");
    }
    if (sparsity < 1 || sparsity > schedule.samples()) {
        throw CapacityError("sparsity L must lie in [1, P*M]");
    }

    const Eigen::MatrixXcd dft = unitary_dft(n);
    const Eigen::MatrixXcd psi = sensing_matrix(dft, schedule);
    const Eigen::VectorXcd &y = pilots.observations;

    SparseEstimate est;
    est.support.reserve(static_cast<std::size_t>(sparsity));
    Eigen::VectorXcd residual = y;
    std::vector<bool> selected(static_cast<std::size_t>(n), false);

    for (int l = 0; l < sparsity; ++l) {
        const Eigen::VectorXcd correlation = psi.adjoint() * residual;
        int best = -1;
        double best_mag = -1.0;
        for (int k = 0; k < n; ++k) {
            if (selected[static_cast<std::size_t>(k)]) continue;
            const double mag = std::abs(correlation(k));
            if (mag > best_mag) {
                best_mag = mag;
                best = k;
            }
        }
        est.support.push_back(best);
        selected[static_cast<std::size_t>(best)] = true;

        const Eigen::MatrixXcd atoms = psi(Eigen::all, est.support);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(atoms);
        est.coefficients = cod.solve(y);
        if (cod.rank() < static_cast<Eigen::Index>(est.support.size())) {
            est.rank_deficient = true;
        }
        residual = y - atoms * est.coefficients;
    }

    est.reconstructed = dft(Eigen::all, est.support) * est.coefficients;
    return est;
}

Eigen::MatrixXcd ml_model_matrix(const PortSchedule &schedule,
                                 const ArrayGeometry &geometry,
                                 const Eigen::VectorXd &angles) {
    const double scale = std::sqrt(static_cast<double>(geometry.num_ports) /
                                   static_cast<double>(angles.size()));
    Eigen::MatrixXcd b(schedule.samples(), angles.size());
    for (Eigen::Index l = 0; l < angles.size(); ++l) {
        const Eigen::VectorXcd a = steering_vector(geometry, angles(l));
        b.col(l) = scale * a(schedule.indices);
    }
    return b;
}

double fas_ml_objective(const Eigen::VectorXcd &observations,
                        const PortSchedule &schedule,
                        const ArrayGeometry &geometry,
                        const Eigen::VectorXcd &gains,
                        const Eigen::VectorXd &angles) {
    const Eigen::MatrixXcd b = ml_model_matrix(schedule, geometry, angles);
    return (observations - b * gains).squaredNorm();
}

Eigen::VectorXd fas_ml_gradient(const Eigen::VectorXcd &observations,
                                const PortSchedule &schedule,
                                const ArrayGeometry &geometry,
                                const Eigen::VectorXcd &gains,
                                const Eigen::VectorXd &angles) {
    const Eigen::MatrixXcd b = ml_model_matrix(schedule, geometry, angles);
    const Eigen::VectorXcd residual = observations - b * gains;
    const double scale = std::sqrt(static_cast<double>(geometry.num_ports) /
                                   static_cast<double>(angles.size()));

    Eigen::VectorXd grad(angles.size());
    for (Eigen::Index l = 0; l < angles.size(); ++l) {
        const Eigen::VectorXcd da = steering_derivative(geometry, angles(l));
        const Eigen::VectorXcd column =
            scale * gains(l) * da(schedule.indices);
        grad(l) = -2.0 * residual.dot(column).real();
        if (!std::isfinite(grad(l))) {
            throw NumericalFailureError("non-finite angle gradient", 0.0);
        }
    }
    return grad;
}

MlEstimate fas_ml(const PilotBatch &pilots, const PortSchedule &schedule,
                  const ArrayGeometry &geometry, int sparsity, int max_iters) {
    check_pilot_shape(pilots, schedule);
    if (max_iters < 1) {
        throw ShapeError("max_iters must be >= 1");
    }
    const SparseEstimate init = fas_omp(pilots, schedule, geometry, sparsity);

    const int n = geometry.num_ports;
    Eigen::VectorXd angles(sparsity);
    for (int l = 0; l < sparsity; ++l) {
        angles(l) = atom_to_angle(init.support[static_cast<std::size_t>(l)], n,
                                  geometry);
    }

    const Eigen::VectorXcd &y = pilots.observations;
    Eigen::VectorXcd gains = Eigen::VectorXcd::Zero(sparsity);
    MlEstimate est;
    est.objective_history.reserve(static_cast<std::size_t>(max_iters));

    double step = 1.0;
    double prev_objective = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
        // Exact least-squares gain update at the current angles.
        const Eigen::MatrixXcd b = ml_model_matrix(schedule, geometry, angles);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(b);
        gains = cod.solve(y);
        double objective = (y - b * gains).squaredNorm();

        // Gradient step on the angles, kept only if it does not increase
        // the residual; the step length halves either way.
        const Eigen::VectorXd grad =
            fas_ml_gradient(y, schedule, geometry, gains, angles);
        const Eigen::VectorXd trial = angles - step * grad;
        const double trial_objective =
            fas_ml_objective(y, schedule, geometry, gains, trial);
        if (std::isfinite(trial_objective) && trial_objective <= objective) {
            angles = trial;
            objective = trial_objective;
        }
        step *= 0.5;

        if (!std::isfinite(objective)) {
            throw NumericalFailureError("non-finite likelihood objective", 0.0);
        }
        est.objective_history.push_back(objective);

        if (objective == 0.0) break;
        if (iter > 0 && std::abs(prev_objective - objective) <=
                            1e-8 * prev_objective) {
            break;
        }
        prev_objective = objective;
    }

    est.gains = gains;
    est.angles = angles;
    const double scale =
        std::sqrt(static_cast<double>(n) / static_cast<double>(sparsity));
    est.reconstructed = ChannelVector::Zero(n);
    for (int l = 0; l < sparsity; ++l) {
        est.reconstructed += gains(l) * steering_vector(geometry, angles(l));
    }
    est.reconstructed *= scale;
    return est;
}

PortSchedule selmmse_schedule(int num_ports, int pilots, int antennas) {
    const long samples = static_cast<long>(pilots) * antennas;
    if (samples > num_ports) {
        throw CapacityError("P*M = " + std::to_string(samples) +
                            " exceeds N = " + std::to_string(num_ports));
    }
    std::vector<int> indices;
    indices.reserve(static_cast<std::size_t>(samples));
    if (samples == 1) {
        indices.push_back(0);
    } else {
        for (long i = 0; i < samples; ++i) {
            const double pos = static_cast<double>(i) * (num_ports - 1) /
                               static_cast<double>(samples - 1);
            indices.push_back(static_cast<int>(std::llround(pos)));
        }
    }
    return PortSchedule(std::move(indices), pilots, antennas, num_ports);
}

ChannelVector selmmse(const PilotBatch &pilots, const ArrayGeometry &geometry,
                      int pilots_per_frame, int antennas) {
    const PortSchedule schedule =
        selmmse_schedule(geometry.num_ports, pilots_per_frame, antennas);
    check_pilot_shape(pilots, schedule);

    const int n = geometry.num_ports;
    ChannelVector out(n);
    // Measured ports ascend by construction; walk them with two fingers.
    for (int port = 0, cursor = 0; port < n; ++port) {
        while (cursor + 1 < schedule.samples()) {
            const int left = schedule.indices[static_cast<std::size_t>(cursor)];
            const int right =
                schedule.indices[static_cast<std::size_t>(cursor + 1)];
            // Advance only when the right neighbor is strictly closer; an
            // exact tie stays with the lower port index.
            if (std::abs(port - right) < std::abs(port - left)) {
                ++cursor;
            } else {
                break;
            }
        }
        out(port) = pilots.observations(cursor);
    }
    return out;
}

} // namespace sbar
