// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sbar/kernels.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "sbar/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "kernel and plan artifacts assume a little-endian host");

namespace sbar {

namespace {

constexpr char kKernelMagic[8] = {'S', 'B', 'A', 'R', 'K', 'E', 'R', 'N'};
constexpr std::uint32_t kKernelFormatVersion = 1;
constexpr double kPsdTolerance = 1e-8; // relative to the spectral norm

void require_hermitian(const Eigen::MatrixXcd &m, const char *what) {
    if (m.rows() != m.cols()) {
        throw ShapeError(std::string(what) + " must be square");
    }
    if (m != m.adjoint().eval()) {
        throw InvariantViolationError(std::string(what) +
                                      " is not exactly Hermitian");
    }
}

// Mirrors the strict lower triangle onto the upper one so the result is
// Hermitian bit-for-bit; the diagonal keeps only its real part.
Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd &m) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out(i, i) = std::complex<double>(m(i, i).real(), 0.0);
        for (Eigen::Index j = 0; j < i; ++j) {
            const std::complex<double> v =
                0.5 * (m(i, j) + std::conj(m(j, i)));
            out(i, j) = v;
            out(j, i) = std::conj(v);
        }
    }
    return out;
}

template <typename T> void write_pod(std::ostream &os, const T &value) {
    os.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T> T read_pod(std::istream &is) {
    T value{};
    is.read(reinterpret_cast<char *>(&value), sizeof(T));
    return value;
}

} // namespace

std::string to_string(KernelLabel label) {
    switch (label) {
    case KernelLabel::exponential:
        return "exponential";
    case KernelLabel::bessel:
        return "bessel";
    case KernelLabel::covariance:
        return "covariance";
    case KernelLabel::custom:
        return "custom";
    }
    return "custom";
}

KernelLabel kernel_label_from_string(const std::string &name) {
    if (name == "exponential") return KernelLabel::exponential;
    if (name == "bessel") return KernelLabel::bessel;
    if (name == "covariance") return KernelLabel::covariance;
    if (name == "custom") return KernelLabel::custom;
    throw ShapeError("unknown kernel label '" + name + "'");
}

KernelHyper::KernelHyper(double alpha_sq_, double eta_sq_, int bessel_order_)
    : alpha_sq(alpha_sq_), eta_sq(eta_sq_), bessel_order(bessel_order_) {
    if (!(alpha_sq > 0.0) || !(eta_sq > 0.0)) {
        throw ShapeError("kernel hyperparameters alpha_sq and eta_sq must be positive");
    }
    if (bessel_order < 0) {
        throw ShapeError("bessel_order must be >= 0");
    }
}

KernelHyper default_kernel_hyper(const ArrayGeometry &geometry) {
    return KernelHyper(1.0, geometry.wavelength / (2.0 * std::numbers::pi), 0);
}

Kernel::Kernel(Eigen::MatrixXcd matrix_, KernelLabel label_)
    : matrix(std::move(matrix_)), label(label_) {
    require_hermitian(matrix, "kernel matrix");
    if (!matrix.allFinite()) {
        throw InvariantViolationError("kernel matrix has non-finite entries");
    }
}

double Kernel::spectral_norm() const {
    if (matrix.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix,
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double Kernel::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix,
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool Kernel::is_psd() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix,
                                                       Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
    return lo >= -kPsdTolerance * norm;
}

Kernel exponential_kernel(const ArrayGeometry &geometry,
                          const KernelHyper &hyper) {
    const int n = geometry.num_ports;
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double dist = geometry.position(i) - geometry.position(j);
            const double v = hyper.alpha_sq * std::exp(-dist * dist / hyper.eta_sq);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return Kernel(std::move(m), KernelLabel::exponential);
}

Kernel bessel_kernel(const ArrayGeometry &geometry, const KernelHyper &hyper) {
    const int n = geometry.num_ports;
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double dist =
                std::abs(geometry.position(i) - geometry.position(j));
            const double v =
                hyper.alpha_sq *
                std::cyl_bessel_j(static_cast<double>(hyper.bessel_order),
                                  dist / hyper.eta_sq);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    Kernel raw(std::move(m), KernelLabel::bessel);
    return regularize_psd(raw, 1e-10);
}

Kernel covariance_kernel(const std::vector<ChannelVector> &samples) {
    if (samples.empty()) {
        throw InsufficientDataError("covariance kernel needs at least one sample");
    }
    const Eigen::Index n = samples.front().size();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    for (const ChannelVector &h : samples) {
        if (h.size() != n) {
            throw ShapeError("covariance kernel samples have mixed lengths");
        }
        acc.noalias() += h * h.adjoint();
    }
    acc /= static_cast<double>(samples.size());
    return Kernel(hermitize(acc), KernelLabel::covariance);
}

Kernel regularize_psd(const Kernel &kernel, double floor) {
    if (!(floor >= 0.0)) {
        throw ShapeError("regularization floor must be >= 0");
    }
    require_hermitian(kernel.matrix, "regularize_psd input");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(kernel.matrix);
    const Eigen::VectorXd evals = es.eigenvalues();
    const double norm = evals.cwiseAbs().maxCoeff();
    if (evals.minCoeff() >= -kPsdTolerance * norm) {
        return kernel;
    }

    const Eigen::VectorXd clamped = evals.cwiseMax(0.0);
    Eigen::MatrixXcd fixed = es.eigenvectors() * clamped.asDiagonal() *
                             es.eigenvectors().adjoint();
    fixed = hermitize(fixed);
    const double shift = floor * fixed.real().trace() /
                         static_cast<double>(kernel.size());
    fixed += shift * Eigen::MatrixXcd::Identity(kernel.size(), kernel.size());
    return Kernel(std::move(fixed), kernel.label);
}

void save_kernel(const Kernel &kernel, const KernelHyper &hyper,
                 const std::string &path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw Error("cannot open kernel file for writing: " + path);
    }
    os.write(kKernelMagic, sizeof(kKernelMagic));
    write_pod(os, kKernelFormatVersion);
    write_pod(os, static_cast<std::uint32_t>(kernel.size()));
    const std::string label = to_string(kernel.label);
    write_pod(os, static_cast<std::uint32_t>(label.size()));
    os.write(label.data(), static_cast<std::streamsize>(label.size()));
    write_pod(os, hyper.alpha_sq);
    write_pod(os, hyper.eta_sq);
    write_pod(os, static_cast<std::int32_t>(hyper.bessel_order));
    for (int i = 0; i < kernel.size(); ++i) {
        for (int j = 0; j < kernel.size(); ++j) {
            write_pod(os, kernel.matrix(i, j).real());
            write_pod(os, kernel.matrix(i, j).imag());
        }
    }
    if (!os) {
        throw Error("short write to kernel file: " + path);
    }
}

Kernel load_kernel(const std::string &path, KernelHyper *hyper_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error("cannot open kernel file: " + path);
    }
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kKernelMagic, sizeof(magic)) != 0) {
        throw Error("not a kernel file: " + path);
    }
    const auto version = read_pod<std::uint32_t>(is);
    if (version != kKernelFormatVersion) {
        throw Error("unsupported kernel file version " + std::to_string(version));
    }
    const auto n = read_pod<std::uint32_t>(is);
    const auto label_len = read_pod<std::uint32_t>(is);
    std::string label(label_len, '\0');
    is.read(label.data(), label_len);
    const double alpha_sq = read_pod<double>(is);
    const double eta_sq = read_pod<double>(is);
    const auto order = read_pod<std::int32_t>(is);
    Eigen::MatrixXcd m(n, n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            const double re = read_pod<double>(is);
            const double im = read_pod<double>(is);
            m(i, j) = {re, im};
        }
    }
    if (!is) {
        throw Error("truncated kernel file: " + path);
    }
    if (hyper_out != nullptr) {
        *hyper_out = KernelHyper(alpha_sq, eta_sq, order);
    }
    return Kernel(std::move(m), kernel_label_from_string(label));
}

std::uint64_t kernel_content_hash(const Kernel &kernel) {
    // FNV-1a over the raw matrix bytes plus the label.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void *data, std::size_t len) {
        const auto *bytes = static_cast<const unsigned char *>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::string label = to_string(kernel.label);
    mix(label.data(), label.size());
    for (int i = 0; i < kernel.size(); ++i) {
        for (int j = 0; j < kernel.size(); ++j) {
            const double re = kernel.matrix(i, j).real();
            const double im = kernel.matrix(i, j).imag();
            mix(&re, sizeof(re));
            mix(&im, sizeof(im));
        }
    }
    return h;
}

} // namespace sbar
