// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sbar/plot_data.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "sbar/errors.hpp"
#include "sbar/experiment.hpp"

namespace sbar {

namespace {

std::string sanitize(const std::string &label) {
    std::string out = label;
    for (char &c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_';
        if (!ok) c = '_';
    }
    return out;
}

} // namespace

std::vector<PlotSeries> emit_plot_data(const std::string &csv_path,
                                       PlotAxis axis,
                                       const std::string &out_dir) {
    const std::vector<ExperimentResult> rows = read_csv(csv_path);
    if (rows.empty()) {
        throw Error("CSV has a header but no data rows: " + csv_path);
    }

    // Group by estimator, preserving first-appearance order.
    std::vector<std::string> labels;
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    for (const ExperimentResult &r : rows) {
        if (series.count(r.estimator) == 0) {
            labels.push_back(r.estimator);
        }
        const double x = axis == PlotAxis::snr ? r.snr_db
                                               : static_cast<double>(r.pilots);
        series[r.estimator].push_back({x, r.nmse_db});
    }

    std::filesystem::create_directories(out_dir);
    std::vector<PlotSeries> out;
    out.reserve(labels.size());

    for (const std::string &label : labels) {
        auto &points = series[label];
        std::sort(points.begin(), points.end());
        const std::string filename = sanitize(label) + ".dat";
        const auto path = std::filesystem::path(out_dir) / filename;
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw Error("cannot open series file for writing: " + path.string());
        }
        char buf[96];
        for (const auto &[x, y] : points) {
            std::snprintf(buf, sizeof(buf), "%.10g %.10g\n", x, y);
            os << buf;
        }
        if (!os) {
            throw Error("short write to series file: " + path.string());
        }
        out.push_back(PlotSeries{label, filename,
                                 static_cast<int>(points.size())});
    }

    const auto manifest_path =
        std::filesystem::path(out_dir) / "series.manifest";
    std::ofstream manifest(manifest_path, std::ios::binary | std::ios::trunc);
    if (!manifest) {
        throw Error("cannot open manifest for writing: " +
                    manifest_path.string());
    }
    for (const PlotSeries &s : out) {
        manifest << s.label << " " << s.filename << "\n";
    }
    return out;
}

} // namespace sbar
