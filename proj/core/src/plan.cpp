// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sbar/plan.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "sbar/errors.hpp"

namespace sbar {

namespace {

constexpr char kPlanMagic[8] = {'S', 'B', 'A', 'R', 'P', 'L', 'A', 'N'};
constexpr std::uint32_t kPlanFormatVersion = 1;

template <typename T> void write_pod(std::ostream &os, const T &value) {
    os.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T> T read_pod(std::istream &is) {
    T value{};
    is.read(reinterpret_cast<char *>(&value), sizeof(T));
    return value;
}

} // namespace

SbarPlan design_plan(const Kernel &kernel, int pilots, int antennas,
                     double noise_variance) {
    const int n = kernel.size();
    if (pilots < 1 || antennas < 1) {
        throw ShapeError("P and M must be >= 1");
    }
    const long samples = static_cast<long>(pilots) * antennas;
    if (samples > n) {
        throw CapacityError("P*M = " + std::to_string(samples) +
                            " exceeds N = " + std::to_string(n));
    }
    if (!(noise_variance >= 0.0)) {
        throw ShapeError("design noise variance must be >= 0");
    }

    std::vector<int> omega;
    omega.reserve(static_cast<std::size_t>(samples));
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (long t = 0; t < samples; ++t) {
        const Eigen::VectorXd vars =
            posterior_variances(kernel, omega, noise_variance);
        int best = -1;
        double best_var = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (taken[static_cast<std::size_t>(i)]) continue;
            if (vars(i) > best_var) {
                best_var = vars(i);
                best = i;
            }
        }
        omega.push_back(best);
        taken[static_cast<std::size_t>(best)] = true;
    }

    PortSchedule schedule(omega, pilots, antennas, n);

    const Eigen::Index k = static_cast<Eigen::Index>(omega.size());
    Eigen::MatrixXcd gram = kernel.matrix(omega, omega);
    gram += noise_variance * Eigen::MatrixXcd::Identity(k, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram,
                                                       Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || lo <= hi * 1e-14) {
        const double cond = (lo > 0.0 && hi > 0.0)
                                ? hi / lo
                                : std::numeric_limits<double>::infinity();
        throw NumericalFailureError(
            "weight system is singular (condition estimate " +
                std::to_string(cond) + ")",
            cond);
    }
    const Eigen::MatrixXcd weights =
        Eigen::LDLT<Eigen::MatrixXcd>(gram).solve(
            kernel.matrix(omega, Eigen::all));

    return SbarPlan{std::move(schedule), weights, noise_variance, kernel.label,
                    kernel_content_hash(kernel)};
}

ChannelVector reconstruct(const SbarPlan &plan, const PilotBatch &pilots) {
    if (pilots.observations.size() != plan.weights.rows()) {
        throw ScheduleMismatchError(
            "pilot batch holds " + std::to_string(pilots.observations.size()) +
            " observations, plan expects " + std::to_string(plan.weights.rows()));
    }
    return plan.weights.adjoint() * pilots.observations;
}

std::vector<Eigen::MatrixXd> schedule_to_switch_matrices(const SbarPlan &plan) {
    return plan.schedule.timeslot_matrices();
}

std::uint64_t plan_cache_key(const Kernel &kernel, int pilots, int antennas,
                             double noise_variance) {
    std::uint64_t h = kernel_content_hash(kernel);
    auto mix = [&h](const void *data, std::size_t len) {
        const auto *bytes = static_cast<const unsigned char *>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    mix(&pilots, sizeof(pilots));
    mix(&antennas, sizeof(antennas));
    mix(&noise_variance, sizeof(noise_variance));
    return h;
}

void save_plan(const SbarPlan &plan, const std::string &path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw Error("cannot open plan file for writing: " + path);
    }
    os.write(kPlanMagic, sizeof(kPlanMagic));
    write_pod(os, kPlanFormatVersion);
    write_pod(os, static_cast<std::uint32_t>(plan.schedule.num_ports));
    write_pod(os, static_cast<std::uint32_t>(plan.schedule.pilots_per_frame));
    write_pod(os, static_cast<std::uint32_t>(plan.schedule.antennas));
    write_pod(os, plan.design_noise_variance);
    write_pod(os, plan.kernel_hash);
    const std::string label = to_string(plan.kernel_label);
    write_pod(os, static_cast<std::uint32_t>(label.size()));
    os.write(label.data(), static_cast<std::streamsize>(label.size()));
    for (int idx : plan.schedule.indices) {
        write_pod(os, static_cast<std::uint32_t>(idx + 1)); // 1-based on disk
    }
    for (Eigen::Index i = 0; i < plan.weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < plan.weights.cols(); ++j) {
            write_pod(os, plan.weights(i, j).real());
            write_pod(os, plan.weights(i, j).imag());
        }
    }
    if (!os) {
        throw Error("short write to plan file: " + path);
    }
}

SbarPlan load_plan(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error("cannot open plan file: " + path);
    }
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kPlanMagic, sizeof(magic)) != 0) {
        throw Error("not a plan file: " + path);
    }
    const auto version = read_pod<std::uint32_t>(is);
    if (version != kPlanFormatVersion) {
        throw Error("unsupported plan file version " + std::to_string(version));
    }
    const auto n = read_pod<std::uint32_t>(is);
    const auto pilots = read_pod<std::uint32_t>(is);
    const auto antennas = read_pod<std::uint32_t>(is);
    const double noise_variance = read_pod<double>(is);
    const auto kernel_hash = read_pod<std::uint64_t>(is);
    const auto label_len = read_pod<std::uint32_t>(is);
    if (label_len > 64) {
        throw Error("corrupt plan file label: " + path);
    }
    std::string label(label_len, '\0');
    is.read(label.data(), label_len);

    const std::size_t samples = static_cast<std::size_t>(pilots) * antennas;
    std::vector<int> indices;
    indices.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        indices.push_back(static_cast<int>(read_pod<std::uint32_t>(is)) - 1);
    }
    Eigen::MatrixXcd weights(static_cast<Eigen::Index>(samples), n);
    for (Eigen::Index i = 0; i < weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < weights.cols(); ++j) {
            const double re = read_pod<double>(is);
            const double im = read_pod<double>(is);
            weights(i, j) = {re, im};
        }
    }
    if (!is) {
        throw Error("truncated plan file: " + path);
    }
    return SbarPlan{PortSchedule(std::move(indices), static_cast<int>(pilots),
                                 static_cast<int>(antennas), static_cast<int>(n)),
                    std::move(weights), noise_variance,
                    kernel_label_from_string(label), kernel_hash};
}

std::string plan_cache_file(const std::string &cache_dir, std::uint64_t key) {
    char name[32];
    std::snprintf(name, sizeof(name), "plan_%016llx.sbarplan",
                  static_cast<unsigned long long>(key));
    return (std::filesystem::path(cache_dir) / name).string();
}

SbarPlan load_or_design_plan(const std::string &cache_dir, const Kernel &kernel,
                             int pilots, int antennas, double noise_variance,
                             bool *cache_hit, std::string *cache_warning) {
    if (cache_hit != nullptr) *cache_hit = false;
    if (cache_warning != nullptr) cache_warning->clear();

    if (cache_dir.empty()) {
        return design_plan(kernel, pilots, antennas, noise_variance);
    }

    const std::uint64_t key =
        plan_cache_key(kernel, pilots, antennas, noise_variance);
    const std::string path = plan_cache_file(cache_dir, key);

    if (std::filesystem::exists(path)) {
        try {
            SbarPlan plan = load_plan(path);
            if (plan.schedule.num_ports == kernel.size() &&
                plan.schedule.pilots_per_frame == pilots &&
                plan.schedule.antennas == antennas &&
                plan.design_noise_variance == noise_variance &&
                plan.kernel_hash == kernel_content_hash(kernel)) {
                if (cache_hit != nullptr) *cache_hit = true;
                return plan;
            }
            if (cache_warning != nullptr) {
                *cache_warning = "cached plan " + path +
                                 " does not match its key; rebuilding";
            }
        } catch (const Error &e) {
            if (cache_warning != nullptr) {
                *cache_warning = "cached plan " + path + " is corrupt (" +
                                 e.what() + "); rebuilding";
            }
        }
    }

    SbarPlan plan = design_plan(kernel, pilots, antennas, noise_variance);
    std::filesystem::create_directories(cache_dir);
    save_plan(plan, path);
    return plan;
}

} // namespace sbar
