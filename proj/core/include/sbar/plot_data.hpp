// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SBAR_PLOT_DATA_HPP
#define SBAR_PLOT_DATA_HPP

#include <string>
#include <vector>

namespace sbar {

enum class PlotAxis { snr, pilots };

struct PlotSeries {
    std::string label;    // estimator label from the CSV
    std::string filename; // series data file, relative to the output dir
    int points = 0;
};

/// Reshapes a result CSV into per-estimator series files: one
/// whitespace-separated (x, y) pair per line with x = snr_db or P and
/// y = nmse_db, sorted by x, plus a `series.manifest` listing every series.
/// Throws on schema mismatch (naming the offending column) and on a CSV
/// with no data rows.
std::vector<PlotSeries> emit_plot_data(const std::string &csv_path,
                                       PlotAxis axis,
                                       const std::string &out_dir);

} // namespace sbar

#endif
