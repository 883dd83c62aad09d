// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_CONFIG_HPP
#define SBAR_CONFIG_HPP

#include <string>

#include "sbar/experiment.hpp"

namespace sbar {

/// Experiment configs are flat `key = value` text files with one
/// `[estimator <label>]` section per estimator. Full-line comments start
/// with '#'. Unknown keys are errors; all diagnostics carry the field path.
ExperimentConfig parse_config_text(const std::string &text);
ExperimentConfig parse_config_file(const std::string &path);

/// Serializes a fully-resolved config; parse_config_text(serialize_config(c))
/// reproduces an equivalent config.
std::string serialize_config(const ExperimentConfig &config);

/// Writes the resolved-config sidecar next to a result CSV: the serialized
/// config preceded by version comment lines, still parseable as a config.
void write_sidecar(const ExperimentConfig &config, const std::string &path);

/// Restores the full-size setup: 256 ports, and a pilot sweep extended to
/// P = 2..20 when the sweep axis is the pilot count.
void apply_paper_scale(ExperimentConfig &config);

} // namespace sbar

#endif
