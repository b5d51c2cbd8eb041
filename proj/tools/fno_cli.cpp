#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fno/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Rough paths over fractional Brownian motion by Fourier normal ordering"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::uint64_t seed_override = 0;
    bool have_seed = false;
    int threads_override = -1;
    std::string mode_override, c_reg_override;

    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed_override, "seed override");
    app.add_option("--threads", threads_override, "worker thread count (0 = hardware)");
    app.add_option("--mode", mode_override, "regularized | trivial");
    app.add_option("--c-reg", c_reg_override, "regularization constant in (0,1)");

    const char* commands[] = {"sample",      "build",       "verify-chen",
                              "verify-shuffle", "verify-fubini", "holder-scan",
                              "rate-scan",   "divergence-scan", "covariance-check"};
    for (const char* c : commands) app.add_subcommand(c);

    CLI11_PARSE(app, argc, argv);
    have_seed = seed_opt->count() > 0;

    nlohmann::json cfg = nlohmann::json::object();
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "error: cannot open config " << config_path << '\n';
            return fno::cli::kExitInvalid;
        }
        try {
            cfg = nlohmann::json::parse(is);
        } catch (const std::exception& e) {
            std::cerr << "error: bad config JSON: " << e.what() << '\n';
            return fno::cli::kExitInvalid;
        }
    }
    if (have_seed) cfg["seed"] = seed_override;
    if (threads_override >= 0) cfg["threads"] = threads_override;
    if (!mode_override.empty()) cfg["mode"] = mode_override;
    if (!c_reg_override.empty()) cfg["c_reg"] = std::stod(c_reg_override);

    std::string command = app.get_subcommands().front()->get_name();
    return fno::cli::run_command(command, cfg, out_dir);
}
