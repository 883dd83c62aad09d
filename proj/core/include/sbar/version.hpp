// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_VERSION_HPP
#define SBAR_VERSION_HPP

namespace sbar {

inline constexpr char kProjectName[] = "fas-sbar";
inline constexpr char kVersion[] = "0.1.0";

} // namespace sbar

#endif
