#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fno/exp_poly.hpp"
#include "fno/util.hpp"

namespace fno {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Symmetric frequency grid xi_k = k * delta_xi, k in {-K,..,-1,1,..,K};
/// zero is excluded.
struct FrequencyGrid {
    int K = 1024;
    double delta_xi = 2.0 * kPi / 8.0;

    FrequencyGrid() = default;
    FrequencyGrid(int K_, double delta_xi_) : K(K_), delta_xi(delta_xi_) {
        if (K < 1 || !(delta_xi > 0.0))
            throw std::invalid_argument("FrequencyGrid: need K >= 1 and delta_xi > 0");
    }

    double xi(int k) const { return k * delta_xi; }
};

/// Normalization making the continuum variance of the harmonizable
/// representation tend to |t|^{2 alpha}. The radicand is positive on both
/// sides of 1/2: for alpha < 1/2, cos(pi alpha) > 0 and Gamma(-2 alpha) < 0;
/// for alpha > 1/2 both signs flip.
inline double c_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("c_alpha: alpha must lie in (0,1)");
    if (alpha == 0.5)
        throw std::domain_error("c_alpha: alpha = 1/2 is a removable singularity; use the Brownian limit");
    double denom = std::cos(kPi * alpha) * std::tgamma(-2.0 * alpha);
    double radicand = -1.0 / denom;
    if (!(radicand > 0.0)) throw std::domain_error("c_alpha: radicand not positive");
    return 0.5 * std::sqrt(radicand);
}

struct FbmModel {
    double alpha;
    double eta;
    int d = 1;

    FbmModel(double alpha_, double eta_, int d_ = 1) : alpha(alpha_), eta(eta_), d(d_) {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("FbmModel: alpha in (0,1)");
        if (!(eta > 0.0)) throw std::invalid_argument("FbmModel: eta > 0");
        if (d < 1) throw std::invalid_argument("FbmModel: d >= 1");
    }
};

/// d-component path stored as complex amplitudes of the path derivative at
/// the positive grid frequencies; negative frequencies are implied by
/// Hermitian symmetry, so evaluations are real. Immutable after
/// construction; safe to share across threads.
struct SpectralPath {
    int d = 0;
    FrequencyGrid grid;
    std::vector<std::vector<cplx>> amp;  // [component][k-1], k = 1..K

    /// B_t(i) = 2 Re sum_{k>0} a_k (e^{i t xi_k} - 1) / (i xi_k)
    double eval(int component, double t) const {
        if (component < 1 || component > d)
            throw std::invalid_argument("SpectralPath::eval: component out of range");
        const auto& a = amp[component - 1];
        PairwiseSum<double> acc;
        for (int k = 1; k <= grid.K; ++k) {
            double xi = grid.xi(k);
            cplx g = (std::exp(cplx{0.0, t * xi}) - 1.0) / cplx{0.0, xi};
            acc.add(2.0 * (a[k - 1] * g).real());
        }
        return acc.total();
    }

    /// Evaluates one component at several times in a single spectrum pass.
    std::vector<double> eval_many(int component, const std::vector<double>& times) const {
        if (component < 1 || component > d)
            throw std::invalid_argument("SpectralPath::eval_many: component out of range");
        const auto& a = amp[component - 1];
        std::vector<PairwiseSum<double>> acc(times.size());
        for (int k = 1; k <= grid.K; ++k) {
            double xi = grid.xi(k);
            cplx ia{0.0, xi};
            for (std::size_t j = 0; j < times.size(); ++j) {
                cplx g = (std::exp(cplx{0.0, times[j] * xi}) - 1.0) / ia;
                acc[j].add(2.0 * (a[k - 1] * g).real());
            }
        }
        std::vector<double> out(times.size());
        for (std::size_t j = 0; j < times.size(); ++j) out[j] = acc[j].total();
        return out;
    }

    /// Full signed-frequency atom tables (Hermitian closure), zero
    /// amplitudes skipped.
    AtomicPath to_atomic() const {
        AtomicPath p;
        p.delta_xi = grid.delta_xi;
        p.atoms.resize(d);
        for (int i = 0; i < d; ++i) {
            auto& tab = p.atoms[i];
            tab.reserve(2 * static_cast<std::size_t>(grid.K));
            for (int k = 1; k <= grid.K; ++k) {
                cplx a = amp[i][k - 1];
                if (a == cplx{}) continue;
                tab.push_back({-k, std::conj(a)});
                tab.push_back({k, a});
            }
        }
        return p;
    }
};

inline double fbm_kernel(double alpha, double eta, double xi) {
    return std::exp(-eta * xi) * std::pow(xi, 0.5 - alpha);
}

/// Independent-component fBm approximation sample. Component i draws from
/// substream (seed, i), so the same seed with two eta values shares the
/// underlying noise, as the convergence-rate experiment requires.
inline SpectralPath sample_fbm(const FbmModel& model, const FrequencyGrid& grid, std::uint64_t seed) {
    const double c = c_alpha(model.alpha);
    SpectralPath p;
    p.d = model.d;
    p.grid = grid;
    p.amp.assign(model.d, std::vector<cplx>(grid.K));
    for (int i = 0; i < model.d; ++i) {
        Rng rng(substream(seed, {0x66626DULL, static_cast<std::uint64_t>(i)}));
        for (int k = 1; k <= grid.K; ++k) {
            cplx dW = rng.next_complex_gaussian(grid.delta_xi);
            p.amp[i][k - 1] = c * fbm_kernel(model.alpha, model.eta, grid.xi(k)) * dW;
        }
    }
    return p;
}

/// Two-dimensional antisymmetric fBm: both components ride the same complex
/// noise; the second carries an extra factor -i, so the marginals are fBms
/// with a skewed cross-covariance.
inline SpectralPath sample_antisym_fbm(double alpha, double eta, const FrequencyGrid& grid,
                                       std::uint64_t seed) {
    FbmModel base(alpha, eta, 1);
    SpectralPath one = sample_fbm(base, grid, seed);
    SpectralPath p;
    p.d = 2;
    p.grid = grid;
    p.amp.resize(2);
    p.amp[0] = one.amp[0];
    p.amp[1].resize(grid.K);
    const cplx minus_i{0.0, -1.0};
    for (int k = 0; k < grid.K; ++k) p.amp[1][k] = minus_i * one.amp[0][k];
    return p;
}

namespace detail {
// Re/Im of f_s(xi) conj(f_t(xi)) for f_t(xi) = (e^{i t xi} - 1)/(i xi)
inline double cov_re(double xi, double s, double t) {
    return (1.0 + std::cos((s - t) * xi) - std::cos(s * xi) - std::cos(t * xi)) / (xi * xi);
}
inline double cov_im(double xi, double s, double t) {
    return (std::sin((s - t) * xi) + std::sin(t * xi) - std::sin(s * xi)) / (xi * xi);
}
}  // namespace detail

/// Exact second moment of the discrete model:
/// Cov(B_s(i), B_t(j)) = delta_ij 2 sum_{k>0} kernel^2 Re[f_s conj(f_t)] dxi.
inline double exact_covariance(const FbmModel& model, const FrequencyGrid& grid, int i, int j,
                               double s, double t) {
    if (i < 1 || i > model.d || j < 1 || j > model.d)
        throw std::invalid_argument("exact_covariance: component out of range");
    if (i != j) return 0.0;
    const double c = c_alpha(model.alpha);
    PairwiseSum<double> acc;
    for (int k = 1; k <= grid.K; ++k) {
        double xi = grid.xi(k);
        double kern = c * fbm_kernel(model.alpha, model.eta, xi);
        acc.add(2.0 * kern * kern * detail::cov_re(xi, s, t) * grid.delta_xi);
    }
    return acc.total();
}

/// Exact cross-covariance Cov(Z_s(1), Z_t(2)) of the discrete antisymmetric
/// model; its continuum limit is
/// -(tan pi alpha)/2 [ -sgn(s)|s|^{2a} + sgn(t)|t|^{2a} - sgn(t-s)|t-s|^{2a} ].
inline double exact_antisym_cross_covariance(double alpha, double eta, const FrequencyGrid& grid,
                                             double s, double t) {
    const double c = c_alpha(alpha);
    PairwiseSum<double> acc;
    for (int k = 1; k <= grid.K; ++k) {
        double xi = grid.xi(k);
        double kern = c * fbm_kernel(alpha, eta, xi);
        acc.add(-2.0 * kern * kern * detail::cov_im(xi, s, t) * grid.delta_xi);
    }
    return acc.total();
}

inline double antisym_cross_covariance_formula(double alpha, double s, double t) {
    auto sgn_pow = [&](double x) {
        return (x > 0 ? 1.0 : x < 0 ? -1.0 : 0.0) * std::pow(std::abs(x), 2.0 * alpha);
    };
    return -0.5 * std::tan(kPi * alpha) * (-sgn_pow(s) + sgn_pow(t) - sgn_pow(t - s));
}

inline double fbm_covariance_formula(double alpha, double s, double t) {
    auto p = [&](double x) { return std::pow(std::abs(x), 2.0 * alpha); };
    return 0.5 * (p(s) + p(t) - p(t - s));
}

// ---------------------------------------------------------------------------
// persistence: CSV spectrum + JSON metadata sidecar
// ---------------------------------------------------------------------------

struct SpectrumMeta {
    double alpha = 0.0;
    double eta = 0.0;
    std::uint64_t seed = 0;
};

inline void save_spectrum_csv(const std::string& csv_path, const SpectralPath& p) {
    std::ofstream os(csv_path);
    if (!os) throw std::runtime_error("save_spectrum_csv: cannot open " + csv_path);
    os.precision(17);
    os << "component,k,xi,re_amp,im_amp\n";
    for (int i = 1; i <= p.d; ++i)
        for (int k = 1; k <= p.grid.K; ++k) {
            const cplx a = p.amp[i - 1][k - 1];
            os << i << ',' << k << ',' << p.grid.xi(k) << ',' << a.real() << ',' << a.imag() << '\n';
        }
}

inline void save_spectrum_meta(const std::string& json_path, const SpectralPath& p,
                               const SpectrumMeta& meta) {
    nlohmann::ordered_json j;
    j["alpha"] = meta.alpha;
    j["eta"] = meta.eta;
    j["K"] = p.grid.K;
    j["delta_xi"] = p.grid.delta_xi;
    j["seed"] = meta.seed;
    j["d"] = p.d;
    j["convention"] = "hermitian";
    std::ofstream os(json_path);
    if (!os) throw std::runtime_error("save_spectrum_meta: cannot open " + json_path);
    os << j.dump(2) << '\n';
}

inline SpectralPath load_spectrum_csv(const std::string& csv_path, const std::string& json_path,
                                      SpectrumMeta* meta_out = nullptr) {
    std::ifstream mj(json_path);
    if (!mj) throw std::runtime_error("load_spectrum_csv: cannot open " + json_path);
    nlohmann::json j = nlohmann::json::parse(mj);
    SpectralPath p;
    p.d = j.at("d").get<int>();
    p.grid = FrequencyGrid(j.at("K").get<int>(), j.at("delta_xi").get<double>());
    p.amp.assign(p.d, std::vector<cplx>(p.grid.K));
    if (meta_out) {
        meta_out->alpha = j.at("alpha").get<double>();
        meta_out->eta = j.at("eta").get<double>();
        meta_out->seed = j.at("seed").get<std::uint64_t>();
    }
    std::ifstream is(csv_path);
    if (!is) throw std::runtime_error("load_spectrum_csv: cannot open " + csv_path);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        int comp, k;
        double xi, re, im;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf", &comp, &k, &xi, &re, &im) != 5)
            throw std::runtime_error("load_spectrum_csv: malformed row: " + line);
        if (comp < 1 || comp > p.d || k < 1 || k > p.grid.K)
            throw std::runtime_error("load_spectrum_csv: row out of range: " + line);
        p.amp[comp - 1][k - 1] = {re, im};
    }
    return p;
}

}  // namespace fno
