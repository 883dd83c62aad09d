// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_TESTS_BESSEL_REF_HPP
#define SBAR_TESTS_BESSEL_REF_HPP

namespace sbar::testing {

/// Independent J_0 evaluation via Simpson quadrature of the integral
/// representation J_0(x) = (1/pi) \int_0^pi cos(x sin(t)) dt. Used as the
/// oracle for the Bessel-kernel construction; deliberately does not touch
/// the standard library's Bessel implementation.
double bessel_j0_ref(double x);

} // namespace sbar::testing

#endif
