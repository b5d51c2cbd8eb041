#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fno/rough_path.hpp"
#include "fno/spectral.hpp"
#include "fno/verify.hpp"
#include "fno/version.hpp"

namespace fno::cli {

using nlohmann::json;
using nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitToleranceViolated = 1;
inline constexpr int kExitInvalid = 2;

struct CommonConfig {
    double alpha = 0.3;
    double eta = 1e-3;
    int d = 2;
    int K = 1024;
    double delta_xi = 2.0 * kPi / 8.0;
    double c_reg = 0.5;
    RegMode mode = RegMode::Regularized;
    int N = 2;
    std::uint64_t seed = 12345;
    int samples = 1000;
    unsigned threads = 0;
    double budget = kDefaultTupleBudget;

    RegularizationConfig reg() const { return RegularizationConfig(c_reg, mode); }
    FrequencyGrid grid() const { return FrequencyGrid(K, delta_xi); }
    TensorMeta meta() const { return TensorMeta{alpha, eta, c_reg, mode}; }
};

namespace detail {

inline const std::set<std::string> kCommonKeys = {
    "alpha", "eta", "d", "K", "delta_xi", "c_reg", "mode", "N", "seed", "samples", "threads", "budget"};

inline void reject_unknown_keys(const json& cfg, const std::set<std::string>& extra) {
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        if (!kCommonKeys.count(it.key()) && !extra.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "'");
    }
}

inline CommonConfig parse_common(const json& cfg) {
    CommonConfig c;
    c.alpha = cfg.value("alpha", c.alpha);
    c.eta = cfg.value("eta", c.eta);
    c.d = cfg.value("d", c.d);
    c.K = cfg.value("K", c.K);
    c.delta_xi = cfg.value("delta_xi", c.delta_xi);
    c.c_reg = cfg.value("c_reg", c.c_reg);
    std::string mode = cfg.value("mode", std::string("regularized"));
    if (mode == "regularized") c.mode = RegMode::Regularized;
    else if (mode == "trivial") c.mode = RegMode::Trivial;
    else throw std::invalid_argument("config: mode must be 'regularized' or 'trivial'");
    c.N = cfg.value("N", c.N);
    c.seed = cfg.value("seed", c.seed);
    c.samples = cfg.value("samples", c.samples);
    c.threads = cfg.value("threads", c.threads);
    c.budget = cfg.value("budget", c.budget);
    // revalidate module constraints at load time
    (void)FbmModel(c.alpha, c.eta, std::max(1, c.d));
    (void)FrequencyGrid(c.K, c.delta_xi);
    (void)RegularizationConfig(c.c_reg, c.mode);
    return c;
}

inline ordered_json echo_config(const std::string& command, const CommonConfig& c, const json& raw) {
    ordered_json e;
    e["command"] = command;
    e["alpha"] = c.alpha;
    e["eta"] = c.eta;
    e["d"] = c.d;
    e["K"] = c.K;
    e["delta_xi"] = c.delta_xi;
    e["c_reg"] = c.c_reg;
    e["mode"] = c.mode == RegMode::Regularized ? "regularized" : "trivial";
    e["N"] = c.N;
    e["seed"] = c.seed;
    e["samples"] = c.samples;
    e["threads"] = c.threads;
    e["budget"] = c.budget;
    e["extra"] = raw;
    return e;
}

inline void write_json(const std::filesystem::path& path, const ordered_json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << j.dump(2) << '\n';
}

inline void write_manifest(const std::filesystem::path& dir, const std::string& command,
                           const CommonConfig& c, const json& raw) {
    ordered_json m;
    m["command"] = command;
    m["library_version"] = kVersion;
    auto now = std::chrono::system_clock::now().time_since_epoch();
    m["timestamp_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    m["config"] = echo_config(command, c, raw);
    write_json(dir / "manifest.json", m);
}

inline std::vector<double> get_list(const json& cfg, const std::string& key,
                                    const std::vector<double>& fallback) {
    if (!cfg.contains(key)) return fallback;
    return cfg.at(key).get<std::vector<double>>();
}

inline Word get_word(const json& cfg, const std::string& key, const Word& fallback) {
    if (!cfg.contains(key)) return fallback;
    return cfg.at(key).get<Word>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

inline int cmd_sample(const CommonConfig& c, const json& cfg, const std::filesystem::path& out) {
    bool antisym = cfg.value("antisym", false);
    SpectralPath p = antisym ? sample_antisym_fbm(c.alpha, c.eta, c.grid(), c.seed)
                             : sample_fbm(FbmModel(c.alpha, c.eta, c.d), c.grid(), c.seed);
    save_spectrum_csv((out / "spectrum.csv").string(), p);
    save_spectrum_meta((out / "spectrum.json").string(), p, SpectrumMeta{c.alpha, c.eta, c.seed});
    return kExitOk;
}

inline int cmd_build(const CommonConfig& c, const json& cfg, const std::filesystem::path& out) {
    double s = cfg.value("s", 0.0), t = cfg.value("t", 1.0);
    SpectralPath p;
    if (cfg.contains("spectrum_csv")) {
        p = load_spectrum_csv(cfg.at("spectrum_csv").get<std::string>(),
                              cfg.at("spectrum_json").get<std::string>());
    } else {
        p = sample_fbm(FbmModel(c.alpha, c.eta, c.d), c.grid(), c.seed);
    }
    RoughPathTensor tensor = build_tensor(p, c.N, s, t, c.reg(), c.meta(), c.threads, c.budget);
    detail::write_json(out / "tensor.json", tensor_to_json(tensor));
    return kExitOk;
}

inline int cmd_verify_fubini(const CommonConfig& c, const json& cfg, const std::filesystem::path& out) {
    int n = cfg.value("n", 3);
    int atoms = cfg.value("atoms_per_component", 2);
    double s = cfg.value("s", 0.2), t = cfg.value("t", 1.1);
    double tol = cfg.value("tolerance", 1e-9);
    AtomicPath path = make_generic_atoms(n, atoms, c.delta_xi, c.seed);
    Word w;
    for (int i = 1; i <= n; ++i) w.push_back(i);
    double residual = fubini_residual(path, w, s, t, c.budget);
    ordered_json rep;
    rep["n"] = n;
    rep["atoms_per_component"] = atoms;
    rep["residual"] = residual;
    rep["tolerance"] = tol;
    rep["pass"] = residual <= tol;
    detail::write_json(out / "report.json", rep);
    return residual <= tol ? kExitOk : kExitToleranceViolated;
}

inline int cmd_verify_chen(const CommonConfig& c, const json& cfg, const std::filesystem::path& out) {
    double t = cfg.value("t", 0.9), u = cfg.value("u", 0.55), s = cfg.value("s", 0.2);
    double tol = cfg.value("tolerance", 1e-8);
    SpectralPath p = sample_fbm(FbmModel(c.alpha, c.eta, c.d), c.grid(), c.seed);
    auto T_ts = build_tensor(p, c.N, s, t, c.reg(), c.meta(), c.threads, c.budget);
    auto T_tu = build_tensor(p, c.N, u, t, c.reg(), c.meta(), c.threads, c.budget);
    auto T_us = build_tensor(p, c.N, s, u, c.reg(), c.meta(), c.threads, c.budget);
    double residual = chen_residual(T_tu, T_us, T_ts);
    ordered_json rep;
    rep["t"] = t;
    rep["u"] = u;
    rep["s"] = s;
    rep["levels"] = c.N;
    rep["residual"] = residual;
    rep["tolerance"] = tol;
    rep["pass"] = residual <= tol;
    detail::write_json(out / "report.json", rep);
    return residual <= tol ? kExitOk : kExitToleranceViolated;
}

inline int cmd_verify_shuffle(const CommonConfig& c, const json& cfg, const std::filesystem::path& out) {
    double s = cfg.value("s", 0.2), t = cfg.value("t", 0.9);
    double tol = cfg.value("tolerance", 1e-8);
    SpectralPath p = sample_fbm(FbmModel(c.alpha, c.eta, c.d), c.grid(), c.seed);
    auto tensor = build_tensor(p, c.N, s, t, c.reg(), c.meta(), c.threads, c.budget);
    std::vector<Word> words;
    for (const auto& [w, v] : tensor.values)
        if (static_cast<int>(w.size()) < c.N) words.push_back(w);
    double worst = 0.0;
    for (const auto& w1 : words)
        for (const auto& w2 : words) {
            if (static_cast<int>(w1.size() + w2.size()) > c.N) continue;
            worst = std::max(worst, shuffle_residual(tensor, w1, w2));
        }
    ordered_json rep;
    rep["levels"] = c.N;
    rep["worst_residual"] = worst;
    rep["tolerance"] = tol;
    rep["pass"] = worst <= tol;
    detail::write_json(out / "report.json", rep);
    return worst <= tol ? kExitOk : kExitToleranceViolated;
}

inline int cmd_holder_scan(const CommonConfig& c, const json& cfg, const std::filesystem::path& out) {
    Word w = detail::get_word(cfg, "word", {1, 2});
    std::vector<double> gaps = detail::get_list(cfg, "gaps", {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625});
    double t0 = cfg.value("t0", 0.1);
    double expected = cfg.value("expected_slope", 2.0 * static_cast<double>(w.size()) * c.alpha);
    double band = cfg.value("slope_band", 0.2);
    auto rep = holder_scan(FbmModel(c.alpha, c.eta, c.d), c.grid(), c.reg(), w, gaps, t0, c.samples,
                           c.seed, c.threads);
    ordered_json j = slope_report_to_json(rep);
    j["expected_slope"] = expected;
    j["slope_band"] = band;
    bool pass = std::abs(rep.slope - expected) <= band;
    j["pass"] = pass;
    detail::write_json(out / "slope_report.json", j);
    if (cfg.value("dump_samples", true)) slope_samples_to_csv((out / "samples.csv").string(), gaps, rep);
    return pass ? kExitOk : kExitToleranceViolated;
}

inline int cmd_rate_scan(const CommonConfig& c, const json& cfg, const std::filesystem::path& out) {
    Word w = detail::get_word(cfg, "word", {1, 2});
    std::vector<double> deltas = detail::get_list(cfg, "deltas", {0.125, 0.0625, 0.03125, 0.015625, 0.0078125});
    double s = cfg.value("s", 0.0), t = cfg.value("t", 1.0);
    double expected = cfg.value("expected_slope", 2.0 * c.alpha);
    double band = cfg.value("slope_band", 0.2);
    auto rep = rate_scan(c.alpha, c.eta, deltas, c.grid(), c.reg(), w, s, t, c.samples, c.seed, c.threads);
    ordered_json j = slope_report_to_json(rep);
    j["expected_slope"] = expected;
    j["slope_band"] = band;
    bool pass = std::abs(rep.slope - expected) <= band;
    j["pass"] = pass;
    detail::write_json(out / "slope_report.json", j);
    if (cfg.value("dump_samples", true)) slope_samples_to_csv((out / "samples.csv").string(), deltas, rep);
    return pass ? kExitOk : kExitToleranceViolated;
}

inline int cmd_divergence_scan(const CommonConfig& c, const json& cfg, const std::filesystem::path& out) {
    std::vector<double> etas = detail::get_list(
        cfg, "etas", {0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625});
    double s = cfg.value("s", 0.0), t = cfg.value("t", 1.0);
    double expected = cfg.value("expected_slope", -(1.0 - 4.0 * c.alpha));
    double band = cfg.value("slope_band", 0.15);
    double reg_band = cfg.value("regularized_slope_band", 0.1);
    auto unreg = divergence_scan(c.alpha, etas, c.grid(), s, t, c.samples, c.seed, c.threads);
    auto regd = regularized_in_eta_scan(c.alpha, etas, c.grid(), c.reg(), {1, 2}, s, t, c.samples,
                                        c.seed, c.threads);
    ordered_json j;
    j["unregularized"] = slope_report_to_json(unreg);
    j["regularized"] = slope_report_to_json(regd);
    j["expected_slope"] = expected;
    j["slope_band"] = band;
    j["regularized_slope_band"] = reg_band;
    bool pass = std::abs(unreg.slope - expected) <= band && std::abs(regd.slope) <= reg_band;
    j["pass"] = pass;
    detail::write_json(out / "slope_report.json", j);
    if (cfg.value("dump_samples", true)) {
        slope_samples_to_csv((out / "samples_unregularized.csv").string(), etas, unreg);
        slope_samples_to_csv((out / "samples_regularized.csv").string(), etas, regd);
    }
    return pass ? kExitOk : kExitToleranceViolated;
}

inline int cmd_covariance_check(const CommonConfig& c, const json& cfg, const std::filesystem::path& out) {
    std::vector<double> times = detail::get_list(cfg, "times", {0.2, 0.4, 0.6, 0.8, 1.0});
    double disc_budget = cfg.value("disc_budget", 0.02);
    double se_mult = cfg.value("se_mult", 5.0);
    const FbmModel model(c.alpha, c.eta, 1);
    const FrequencyGrid grid = c.grid();

    // empirical moments
    const int M = c.samples;
    std::vector<std::vector<double>> evals(M);
    parallel_for(M, c.threads, [&](std::size_t i) {
        SpectralPath p = sample_fbm(model, grid, substream(c.seed, {0xC0FULL, i}));
        evals[i] = p.eval_many(1, times);
    });

    std::ofstream csv(out / "covariance.csv");
    csv.precision(17);
    csv << "s,t,grid_exact,continuum_quadrature,continuum_formula,empirical,empirical_se\n";
    bool pass = true;
    double scale = 0.0;
    for (double s : times)
        for (double t : times) scale = std::max(scale, std::abs(fbm_covariance_formula(c.alpha, s, t)));
    for (double s : times)
        for (double t : times) {
            double ge = exact_covariance(model, grid, 1, 1, s, t);
            double quad = covariance_quadrature(c.alpha, c.eta, s, t);
            double formula = fbm_covariance_formula(c.alpha, s, t);
            PairwiseSum<double> acc, acc2;
            std::size_t is = std::find(times.begin(), times.end(), s) - times.begin();
            std::size_t it = std::find(times.begin(), times.end(), t) - times.begin();
            for (int i = 0; i < M; ++i) acc.add(evals[i][is] * evals[i][it]);
            double emp = acc.total() / M;
            for (int i = 0; i < M; ++i) acc2.add((evals[i][is] * evals[i][it] - emp) * (evals[i][is] * evals[i][it] - emp));
            double se = std::sqrt(acc2.total() / (M - 1) / M);
            csv << s << ',' << t << ',' << ge << ',' << quad << ',' << formula << ',' << emp << ',' << se << '\n';
            if (std::abs(ge - quad) > disc_budget * scale) pass = false;
            if (std::abs(emp - ge) > se_mult * se + 1e-12) pass = false;
        }
    ordered_json rep;
    rep["disc_budget"] = disc_budget;
    rep["se_mult"] = se_mult;
    rep["pass"] = pass;
    detail::write_json(out / "report.json", rep);
    return pass ? kExitOk : kExitToleranceViolated;
}

// ---------------------------------------------------------------------------
// dispatcher
// ---------------------------------------------------------------------------

inline int run_command(const std::string& command, const json& cfg, const std::string& out_dir) {
    try {
        static const std::map<std::string, std::set<std::string>> kExtraKeys = {
            {"sample", {"antisym"}},
            {"build", {"s", "t", "spectrum_csv", "spectrum_json"}},
            {"verify-fubini", {"n", "atoms_per_component", "s", "t", "tolerance"}},
            {"verify-chen", {"t", "u", "s", "tolerance"}},
            {"verify-shuffle", {"s", "t", "tolerance"}},
            {"holder-scan", {"word", "gaps", "t0", "expected_slope", "slope_band", "dump_samples"}},
            {"rate-scan", {"word", "deltas", "s", "t", "expected_slope", "slope_band", "dump_samples"}},
            {"divergence-scan",
             {"etas", "s", "t", "expected_slope", "slope_band", "regularized_slope_band", "dump_samples"}},
            {"covariance-check", {"times", "disc_budget", "se_mult"}},
        };
        auto it = kExtraKeys.find(command);
        if (it == kExtraKeys.end()) {
            std::cerr << "error: unknown command '" << command << "'\n";
            return kExitInvalid;
        }
        detail::reject_unknown_keys(cfg, it->second);
        CommonConfig c = detail::parse_common(cfg);
        std::filesystem::path out(out_dir);
        std::filesystem::create_directories(out);
        detail::write_manifest(out, command, c, cfg);

        if (command == "sample") return cmd_sample(c, cfg, out);
        if (command == "build") return cmd_build(c, cfg, out);
        if (command == "verify-fubini") return cmd_verify_fubini(c, cfg, out);
        if (command == "verify-chen") return cmd_verify_chen(c, cfg, out);
        if (command == "verify-shuffle") return cmd_verify_shuffle(c, cfg, out);
        if (command == "holder-scan") return cmd_holder_scan(c, cfg, out);
        if (command == "rate-scan") return cmd_rate_scan(c, cfg, out);
        if (command == "divergence-scan") return cmd_divergence_scan(c, cfg, out);
        if (command == "covariance-check") return cmd_covariance_check(c, cfg, out);
        std::cerr << "error: unknown command '" << command << "'\n";
        return kExitInvalid;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
}

}  // namespace fno::cli
