// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_RNG_HPP
#define SBAR_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace sbar {

/// Independent seed domains, so that e.g. channel draws and noise draws of
/// the same trial never share a stream.
enum class SeedDomain : std::uint64_t {
    channel = 1,
    noise = 2,
    schedule = 3,
    power_estimate = 4,
    covariance_training = 5,
    trial = 6,
};

namespace detail {
// splitmix64 finalizer (Vigna). Full-period 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace detail

/// Counter-based seed split: derives an independent child seed from a master
/// seed, a domain tag and a counter. Trials seeded this way are reproducible
/// and order-independent.
inline std::uint64_t split_seed(std::uint64_t master, SeedDomain domain,
                                std::uint64_t counter) {
    std::uint64_t s = detail::mix64(master ^ detail::mix64(static_cast<std::uint64_t>(domain)));
    return detail::mix64(s ^ detail::mix64(counter));
}

/// All stochastic operations in the library draw from this engine type.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Circularly-symmetric complex Gaussian CN(0, variance): independent real
/// and imaginary parts, each N(0, variance/2). variance == 0 yields exactly 0.
inline std::complex<double> complex_gaussian(Rng &rng, double variance) {
    if (variance == 0.0) {
        return {0.0, 0.0};
    }
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

} // namespace sbar

#endif
