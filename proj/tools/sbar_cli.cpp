// SPDX-License-Identifier: Apache-2.0
//
// fas-sbar: kernel-based channel reconstruction for flexible antenna systems
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Experiment runner: `run` executes a config-driven sweep and writes the
// result CSV plus a resolved-config sidecar, `design` materializes and
// caches an offline sampling plan, `emit-plot-data` reshapes a result CSV
// into per-estimator series files.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>

#include "sbar/config.hpp"
#include "sbar/plot_data.hpp"
#include "sbar/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int cmd_run(const std::string &config_path, bool paper_scale) {
    if (!std::filesystem::exists(config_path)) {
        std::cerr << "error: config file not found: " << config_path << "\n";
        return kExitUsage;
    }
    sbar::ExperimentConfig config = sbar::parse_config_file(config_path);
    if (paper_scale) {
        sbar::apply_paper_scale(config);
    }
    const auto results = sbar::run_experiment(config, [](const std::string &w) {
        std::cerr << "warning: " << w << "\n";
    });
    sbar::write_csv(results, config.output_path);
    sbar::write_sidecar(config, config.output_path + ".meta");
    std::cout << "wrote " << config.output_path << " (" << results.size()
              << " rows)\n";
    std::cout << "wrote " << config.output_path << ".meta\n";
    return kExitOk;
}

struct DesignOptions {
    std::string kernel = "bessel"; // identity | exponential | bessel
    std::string kernel_file;       // overrides `kernel` when set
    int num_ports = 128;
    int pilots = 10;
    int antennas = 4;
    double snr_db = 20.0;
    double carrier_ghz = 3.5;
    double aperture_wavelengths = 10.0;
    double alpha_sq = 1.0;
    double eta_sq = 0.0; // 0 -> lambda/(2 pi)
    int bessel_order = 0;
    std::string cache_dir = "plans";
};

sbar::Kernel build_design_kernel(const DesignOptions &opt) {
    if (!opt.kernel_file.empty()) {
        return sbar::load_kernel(opt.kernel_file);
    }
    if (opt.kernel == "identity") {
        return sbar::Kernel(
            Eigen::MatrixXcd::Identity(opt.num_ports, opt.num_ports),
            sbar::KernelLabel::custom);
    }
    const double wavelength = 299792458.0 / (opt.carrier_ghz * 1e9);
    const sbar::ArrayGeometry geometry(opt.num_ports, wavelength,
                                       opt.aperture_wavelengths * wavelength);
    const double eta_sq = opt.eta_sq > 0.0
                              ? opt.eta_sq
                              : wavelength / (2.0 * std::numbers::pi);
    const sbar::KernelHyper hyper(opt.alpha_sq, eta_sq, opt.bessel_order);
    if (opt.kernel == "exponential") {
        return sbar::exponential_kernel(geometry, hyper);
    }
    if (opt.kernel == "bessel") {
        return sbar::bessel_kernel(geometry, hyper);
    }
    throw sbar::ConfigError("--kernel",
                            "must be identity, exponential or bessel");
}

int cmd_design(const DesignOptions &opt) {
    const sbar::Kernel kernel = build_design_kernel(opt);
    // The design-time noise level follows the same per-port convention as
    // the experiment engine, with the prior standing in for the channel:
    // sigma^2 = (Tr(Sigma)/N) / SNR.
    const double prior_power =
        kernel.matrix.real().trace() / static_cast<double>(kernel.size());
    const double snr_linear = std::pow(10.0, opt.snr_db / 10.0);
    const double noise_variance =
        std::isinf(snr_linear) ? 0.0 : prior_power / snr_linear;

    bool cache_hit = false;
    std::string warning;
    const sbar::SbarPlan plan =
        sbar::load_or_design_plan(opt.cache_dir, kernel, opt.pilots,
                                  opt.antennas, noise_variance, &cache_hit,
                                  &warning);
    if (!warning.empty()) {
        std::cerr << "warning: " << warning << "\n";
    }

    const std::string path = sbar::plan_cache_file(
        opt.cache_dir,
        sbar::plan_cache_key(kernel, opt.pilots, opt.antennas, noise_variance));
    std::cout << (cache_hit ? "plan cache hit: " : "designed and cached: ")
              << path << "\n";

    std::cout << "ports (1-based):";
    for (int idx : plan.schedule.indices) {
        std::cout << " " << (idx + 1);
    }
    std::cout << "\n";

    const auto &omega = plan.schedule.indices;
    Eigen::MatrixXcd gram = kernel.matrix(omega, omega);
    gram += noise_variance *
            Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram,
                                                       Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    std::cout << "condition number of Sigma(Omega,Omega) + sigma^2 I: "
              << (lo > 0.0 ? hi / lo
                           : std::numeric_limits<double>::infinity())
              << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"FAS channel estimation experiments: S-BAR and baselines"};
    app.set_version_flag("--version",
                         std::string(sbar::kProjectName) + " " + sbar::kVersion);
    app.require_subcommand(1);

    // run
    std::string config_path;
    bool paper_scale = false;
    auto *run = app.add_subcommand("run", "Run a config-driven experiment sweep");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_flag("--paper-scale", paper_scale,
                  "restore the full-size setup (256 ports, pilot sweep to 20)");

    // design
    DesignOptions design;
    auto *des = app.add_subcommand("design",
                                   "Design and cache an offline sampling plan");
    des->add_option("--kernel", design.kernel,
                    "identity, exponential or bessel");
    des->add_option("--kernel-file", design.kernel_file,
                    "load the kernel from a serialized kernel artifact");
    des->add_option("--num-ports,-N", design.num_ports, "number of ports");
    des->add_option("--pilots,-P", design.pilots, "pilot timeslots");
    des->add_option("--antennas,-M", design.antennas, "antennas per timeslot");
    des->add_option("--snr-db", design.snr_db, "design-time SNR in dB");
    des->add_option("--carrier-ghz", design.carrier_ghz, "carrier frequency");
    des->add_option("--aperture-wavelengths", design.aperture_wavelengths,
                    "aperture width in wavelengths");
    des->add_option("--alpha-sq", design.alpha_sq, "kernel variance scale");
    des->add_option("--eta-sq", design.eta_sq,
                    "kernel length scale (0 selects lambda/(2 pi))");
    des->add_option("--bessel-order", design.bessel_order, "Bessel order");
    des->add_option("--cache-dir", design.cache_dir, "plan cache directory");

    // emit-plot-data
    std::string csv_path;
    std::string axis = "snr";
    std::string out_dir = "plot-data";
    auto *emit = app.add_subcommand("emit-plot-data",
                                    "Reshape a result CSV into plot series");
    emit->add_option("csv", csv_path, "result CSV")->required();
    emit->add_option("--axis", axis, "x axis: snr or pilots")
        ->check(CLI::IsMember({"snr", "pilots"}));
    emit->add_option("--out-dir", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) {
            return cmd_run(config_path, paper_scale);
        }
        if (des->parsed()) {
            return cmd_design(design);
        }
        if (emit->parsed()) {
            const auto series = sbar::emit_plot_data(
                csv_path,
                axis == "snr" ? sbar::PlotAxis::snr : sbar::PlotAxis::pilots,
                out_dir);
            for (const auto &s : series) {
                std::cout << s.label << " -> " << out_dir << "/" << s.filename
                          << " (" << s.points << " points)\n";
            }
            return kExitOk;
        }
    } catch (const sbar::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
