// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sbar/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "sbar/errors.hpp"
#include "sbar/version.hpp"

namespace sbar {

namespace {

std::string trim(const std::string &s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

struct RawSection {
    std::string label; // empty for the top-level section
    std::map<std::string, std::string> values;
    std::vector<std::string> order; // keys in file order
};

struct RawConfig {
    RawSection top;
    std::vector<RawSection> estimators;
};

RawConfig tokenize(const std::string &text) {
    RawConfig raw;
    RawSection *current = &raw.top;
    std::istringstream is(text);
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no),
                                  "unterminated section header");
            }
            const std::string inner = trim(t.substr(1, t.size() - 2));
            const std::string prefix = "estimator";
            if (inner.rfind(prefix, 0) != 0) {
                throw ConfigError("line " + std::to_string(line_no),
                                  "only [estimator <label>] sections are allowed");
            }
            const std::string label = trim(inner.substr(prefix.size()));
            if (label.empty()) {
                throw ConfigError("line " + std::to_string(line_no),
                                  "estimator section needs a label");
            }
            raw.estimators.push_back(RawSection{label, {}, {}});
            current = &raw.estimators.back();
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no),
                              "expected 'key = value'");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_no), "empty key");
        }
        if (current->values.count(key) != 0) {
            const std::string where =
                current->label.empty() ? key
                                       : "estimator[" + current->label + "]." + key;
            throw ConfigError(where, "duplicate key");
        }
        current->values[key] = value;
        current->order.push_back(key);
    }
    return raw;
}

class SectionReader {
  public:
    SectionReader(const RawSection &section, std::string path_prefix)
        : section_(section), prefix_(std::move(path_prefix)) {}

    bool has(const std::string &key) const {
        return section_.values.count(key) != 0;
    }

    std::string field(const std::string &key) const {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

    std::string str(const std::string &key, const std::string &fallback) {
        consume(key);
        auto it = section_.values.find(key);
        return it == section_.values.end() ? fallback : it->second;
    }

    long integer(const std::string &key, long fallback) {
        consume(key);
        auto it = section_.values.find(key);
        if (it == section_.values.end()) return fallback;
        try {
            std::size_t used = 0;
            const long v = std::stol(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception &) {
            throw ConfigError(field(key), "expected an integer, got '" +
                                              it->second + "'");
        }
    }

    std::uint64_t unsigned64(const std::string &key, std::uint64_t fallback) {
        consume(key);
        auto it = section_.values.find(key);
        if (it == section_.values.end()) return fallback;
        try {
            std::size_t used = 0;
            const std::uint64_t v = std::stoull(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception &) {
            throw ConfigError(field(key), "expected an unsigned integer, got '" +
                                              it->second + "'");
        }
    }

    double real(const std::string &key, double fallback) {
        consume(key);
        auto it = section_.values.find(key);
        if (it == section_.values.end()) return fallback;
        return parse_double(key, it->second);
    }

    std::vector<double> real_list(const std::string &key,
                                  std::vector<double> fallback) {
        consume(key);
        auto it = section_.values.find(key);
        if (it == section_.values.end()) return fallback;
        std::vector<double> out;
        std::istringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            out.push_back(parse_double(key, trim(item)));
        }
        if (out.empty()) {
            throw ConfigError(field(key), "expected at least one value");
        }
        return out;
    }

    std::vector<int> int_list(const std::string &key, std::vector<int> fallback) {
        consume(key);
        auto it = section_.values.find(key);
        if (it == section_.values.end()) return fallback;
        std::vector<int> out;
        std::istringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string v = trim(item);
            try {
                std::size_t used = 0;
                out.push_back(std::stoi(v, &used));
                if (used != v.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception &) {
                throw ConfigError(field(key),
                                  "expected integers, got '" + v + "'");
            }
        }
        if (out.empty()) {
            throw ConfigError(field(key), "expected at least one value");
        }
        return out;
    }

    void finish() const {
        for (const std::string &key : section_.order) {
            if (consumed_.count(key) == 0) {
                throw ConfigError(field(key), "unknown key");
            }
        }
    }

  private:
    double parse_double(const std::string &key, const std::string &value) {
        if (value == "inf" || value == "+inf") {
            return std::numeric_limits<double>::infinity();
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception &) {
            throw ConfigError(field(key),
                              "expected a number, got '" + value + "'");
        }
    }

    void consume(const std::string &key) { consumed_.insert(key); }

    const RawSection &section_;
    std::string prefix_;
    std::set<std::string> consumed_;
};

EstimatorKind estimator_kind_from_string(const std::string &value,
                                         const std::string &field) {
    if (value == "sbar") return EstimatorKind::sbar;
    if (value == "fas-omp") return EstimatorKind::fas_omp;
    if (value == "fas-ml") return EstimatorKind::fas_ml;
    if (value == "selmmse") return EstimatorKind::selmmse;
    throw ConfigError(field, "must be one of sbar, fas-omp, fas-ml, selmmse");
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

ExperimentConfig parse_config_text(const std::string &text) {
    const RawConfig raw = tokenize(text);
    ExperimentConfig cfg;

    SectionReader top(raw.top, "");
    const std::string channel = top.str("channel", "ssc");
    if (channel == "ssc") {
        cfg.channel = ChannelModelKind::ssc;
    } else if (channel == "rich") {
        cfg.channel = ChannelModelKind::rich;
    } else {
        throw ConfigError("channel", "must be 'ssc' or 'rich'");
    }
    cfg.num_ports = static_cast<int>(top.integer("num_ports", cfg.num_ports));
    cfg.antennas = static_cast<int>(top.integer("num_antennas", cfg.antennas));
    cfg.carrier_ghz = top.real("carrier_ghz", cfg.carrier_ghz);
    cfg.aperture_wavelengths =
        top.real("aperture_wavelengths", cfg.aperture_wavelengths);
    cfg.clusters = static_cast<int>(top.integer("clusters", cfg.clusters));
    cfg.rays = static_cast<int>(top.integer("rays", cfg.rays));
    cfg.angle_spread_deg = top.real("angle_spread_deg", cfg.angle_spread_deg);
    const std::string sweep = top.str("sweep", "pilots");
    if (sweep == "snr") {
        cfg.sweep = SweepAxis::snr;
    } else if (sweep == "pilots") {
        cfg.sweep = SweepAxis::pilots;
    } else {
        throw ConfigError("sweep", "must be 'snr' or 'pilots'");
    }
    cfg.snr_grid_db = top.real_list("snr_db", cfg.snr_grid_db);
    cfg.pilot_grid = top.int_list("pilots", cfg.pilot_grid);
    cfg.trials = static_cast<int>(top.integer("trials", cfg.trials));
    cfg.master_seed = top.unsigned64("master_seed", cfg.master_seed);
    cfg.output_path = top.str("output", cfg.output_path);
    cfg.plan_cache_dir = top.str("plan_cache", cfg.plan_cache_dir);
    top.finish();

    for (const RawSection &section : raw.estimators) {
        SectionReader reader(section, "estimator[" + section.label + "]");
        EstimatorSpec spec;
        spec.label = section.label;
        spec.kind = estimator_kind_from_string(reader.str("type", "sbar"),
                                               reader.field("type"));
        const std::string kernel = reader.str("kernel", "bessel");
        try {
            spec.kernel = kernel_label_from_string(kernel);
        } catch (const Error &) {
            throw ConfigError(reader.field("kernel"),
                              "unknown kernel '" + kernel + "'");
        }
        spec.alpha_sq = reader.real("alpha_sq", spec.alpha_sq);
        spec.eta_sq = reader.real("eta_sq", spec.eta_sq);
        spec.bessel_order =
            static_cast<int>(reader.integer("bessel_order", spec.bessel_order));
        spec.training_samples = static_cast<int>(
            reader.integer("training_samples", spec.training_samples));
        spec.design_snr_db = reader.real("design_snr_db", spec.design_snr_db);
        spec.sparsity = static_cast<int>(reader.integer("sparsity", spec.sparsity));
        spec.max_iters = static_cast<int>(reader.integer("max_iters", spec.max_iters));
        reader.finish();
        cfg.estimators.push_back(std::move(spec));
    }

    validate_config(cfg);
    return cfg;
}

ExperimentConfig parse_config_file(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw ConfigError("config", "cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return parse_config_text(buffer.str());
}

std::string serialize_config(const ExperimentConfig &config) {
    std::ostringstream os;
    os << "channel = " << to_string(config.channel) << "\n";
    os << "num_ports = " << config.num_ports << "\n";
    os << "num_antennas = " << config.antennas << "\n";
    os << "carrier_ghz = " << format_double(config.carrier_ghz) << "\n";
    os << "aperture_wavelengths = "
       << format_double(config.aperture_wavelengths) << "\n";
    os << "clusters = " << config.clusters << "\n";
    os << "rays = " << config.rays << "\n";
    os << "angle_spread_deg = " << format_double(config.angle_spread_deg)
       << "\n";
    os << "sweep = " << to_string(config.sweep) << "\n";
    os << "snr_db = ";
    for (std::size_t i = 0; i < config.snr_grid_db.size(); ++i) {
        if (i > 0) os << ",";
        os << format_double(config.snr_grid_db[i]);
    }
    os << "\n";
    os << "pilots = ";
    for (std::size_t i = 0; i < config.pilot_grid.size(); ++i) {
        if (i > 0) os << ",";
        os << config.pilot_grid[i];
    }
    os << "\n";
    os << "trials = " << config.trials << "\n";
    os << "master_seed = " << config.master_seed << "\n";
    os << "output = " << config.output_path << "\n";
    if (!config.plan_cache_dir.empty()) {
        os << "plan_cache = " << config.plan_cache_dir << "\n";
    }
    for (const EstimatorSpec &spec : config.estimators) {
        os << "\n[estimator " << spec.label << "]\n";
        os << "type = " << to_string(spec.kind) << "\n";
        if (spec.kind == EstimatorKind::sbar) {
            os << "kernel = " << to_string(spec.kernel) << "\n";
            os << "alpha_sq = " << format_double(spec.alpha_sq) << "\n";
            os << "eta_sq = " << format_double(spec.eta_sq) << "\n";
            os << "bessel_order = " << spec.bessel_order << "\n";
            os << "training_samples = " << spec.training_samples << "\n";
            if (!std::isnan(spec.design_snr_db)) {
                os << "design_snr_db = " << format_double(spec.design_snr_db)
                   << "\n";
            }
        }
        if (spec.kind == EstimatorKind::fas_omp ||
            spec.kind == EstimatorKind::fas_ml) {
            os << "sparsity = " << spec.sparsity << "\n";
        }
        if (spec.kind == EstimatorKind::fas_ml) {
            os << "max_iters = " << spec.max_iters << "\n";
        }
    }
    return os.str();
}

void write_sidecar(const ExperimentConfig &config, const std::string &path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw Error("cannot open sidecar for writing: " + path);
    }
    os << "# resolved experiment configuration\n";
    os << "# generated by " << kProjectName << " " << kVersion << "\n";
    os << serialize_config(config);
    if (!os) {
        throw Error("short write to sidecar: " + path);
    }
}

void apply_paper_scale(ExperimentConfig &config) {
    config.num_ports = 256;
    if (config.sweep == SweepAxis::pilots) {
        config.pilot_grid.clear();
        for (int p = 2; p <= 20; p += 2) {
            config.pilot_grid.push_back(p);
        }
    }
    validate_config(config);
}

} // namespace sbar
