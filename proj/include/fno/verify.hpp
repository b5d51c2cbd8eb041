#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fno/exp_poly.hpp"
#include "fno/rough_path.hpp"
#include "fno/spectral.hpp"
#include "fno/util.hpp"

namespace fno {

inline constexpr double kResidualEps = 1e-30;

// ---------------------------------------------------------------------------
// algebraic residuals
// ---------------------------------------------------------------------------

/// Normalized gap between the sector-sum reconstruction (trivial
/// regularization) and the exponential-polynomial oracle.
inline double fubini_residual(const AtomicPath& p, const Word& w, double s, double t,
                              double tuple_budget = kDefaultTupleBudget) {
    RegularizationConfig trivial(0.5, RegMode::Trivial);
    cplx oracle = oracle_iterated_integral(p, w, s, t);
    cplx value = fno_word_value_complex(p, w, s, t, trivial, tuple_budget);
    return std::abs(value - oracle) / (std::abs(oracle) + kResidualEps);
}

/// Maximum over words of the normalized multiplicativity gap
///   T_ts(w) - T_tu(w) - T_us(w) - sum_{w = w1 w2} T_tu(w1) T_us(w2).
inline double chen_residual(const RoughPathTensor& t_tu, const RoughPathTensor& t_us,
                            const RoughPathTensor& t_ts) {
    if (!(t_tu.meta == t_us.meta && t_us.meta == t_ts.meta))
        throw std::invalid_argument("chen_residual: mismatched tensor configurations");
    if (t_tu.s != t_us.t || t_ts.t != t_tu.t || t_ts.s != t_us.s)
        throw std::invalid_argument("chen_residual: windows do not chain as (t,u),(u,s),(t,s)");
    double worst = 0.0;
    for (const auto& [w, v_ts] : t_ts.values) {
        const int n = static_cast<int>(w.size());
        double rhs = 0.0, scale = std::abs(v_ts);
        for (int n1 = 1; n1 < n; ++n1) {
            Word w1(w.begin(), w.begin() + n1), w2(w.begin() + n1, w.end());
            double prod = t_tu.at(w1) * t_us.at(w2);
            rhs += prod;
            scale += std::abs(prod);
        }
        double lhs = v_ts - t_tu.at(w) - t_us.at(w);
        scale += std::abs(t_tu.at(w)) + std::abs(t_us.at(w));
        worst = std::max(worst, std::abs(lhs - rhs) / (scale + kResidualEps));
    }
    return worst;
}

/// Normalized gap of T(w1) T(w2) - sum over shuffles T(w).
inline double shuffle_residual(const RoughPathTensor& tensor, const Word& w1, const Word& w2) {
    if (static_cast<int>(w1.size() + w2.size()) > tensor.levels)
        throw std::invalid_argument("shuffle_residual: combined word exceeds tensor level");
    double prod = tensor.at(w1) * tensor.at(w2);
    double sum = 0.0, scale = std::abs(prod);
    for (const Word& w : shuffles(w1, w2)) {
        double v = tensor.at(w);
        sum += v;
        scale += std::abs(v);
    }
    return std::abs(prod - sum) / (scale + kResidualEps);
}

// ---------------------------------------------------------------------------
// generic (certified non-resonant) test paths
// ---------------------------------------------------------------------------

/// Deterministic path whose atom frequencies are distinct primes with random
/// signs and random complex amplitudes. The construction certifies that no
/// multiset of up to max_depth atoms (one table may contribute several
/// times) has a vanishing sum, so trivially regularized evaluations never
/// meet a resonance.
inline AtomicPath make_generic_atoms(int components, int atoms_per_component, double delta_xi,
                                     std::uint64_t seed, int max_depth = 5) {
    static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};
    const int needed = components * atoms_per_component;
    if (needed > static_cast<int>(sizeof(primes) / sizeof(primes[0])))
        throw std::invalid_argument("make_generic_atoms: too many atoms requested");
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(substream(seed, {0xA70A5ULL, attempt}));
        std::vector<int> ks(needed);
        for (int i = 0; i < needed; ++i) ks[i] = (rng.next_u64() & 1 ? 1 : -1) * primes[i];

        // certify: no multiset of size <= max_depth sums to zero (dedupe the
        // reachable sums per depth; the range is tiny)
        const int bound = 89 * max_depth + 1;
        std::vector<long long> sums{0};
        bool ok = true;
        for (int depth = 1; depth <= max_depth && ok; ++depth) {
            std::vector<char> seen(2 * bound + 1, 0);
            std::vector<long long> next;
            for (long long sum : sums) {
                for (int k : ks) {
                    long long v = sum + k;
                    if (v == 0) { ok = false; break; }
                    if (!seen[v + bound]) {
                        seen[v + bound] = 1;
                        next.push_back(v);
                    }
                }
                if (!ok) break;
            }
            sums = std::move(next);
        }
        if (!ok) continue;

        AtomicPath p;
        p.delta_xi = delta_xi;
        p.atoms.resize(components);
        int idx = 0;
        for (int c = 0; c < components; ++c)
            for (int a = 0; a < atoms_per_component; ++a) {
                cplx amp{rng.next_unit() * 2.0 - 1.0, rng.next_unit() * 2.0 - 1.0};
                p.atoms[c].push_back({ks[idx++], amp});
            }
        return p;
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo scaling-slope experiments
// ---------------------------------------------------------------------------

struct SlopeReport {
    double slope = 0.0;
    double stderr_slope = 0.0;
    struct Point {
        double log_abscissa;
        double log_estimate;
        double mc_stderr;  // standard error of the (linear) estimate
    };
    std::vector<Point> points;
    int samples_per_point = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> raw;  // per point, per sample
};

/// Unweighted least squares of log estimate on log abscissa; the slope
/// standard error comes from the fit residuals.
inline void fit_loglog(SlopeReport& rep) {
    const std::size_t m = rep.points.size();
    if (m < 4) throw std::invalid_argument("fit_loglog: need at least 4 points");
    double sx = 0, sy = 0;
    for (const auto& p : rep.points) { sx += p.log_abscissa; sy += p.log_estimate; }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (const auto& p : rep.points) {
        sxx += (p.log_abscissa - mx) * (p.log_abscissa - mx);
        sxy += (p.log_abscissa - mx) * (p.log_estimate - my);
    }
    if (!(sxx > 0)) throw std::invalid_argument("fit_loglog: degenerate abscissae");
    rep.slope = sxy / sxx;
    double ss_res = 0;
    for (const auto& p : rep.points) {
        double fit = my + rep.slope * (p.log_abscissa - mx);
        ss_res += (p.log_estimate - fit) * (p.log_estimate - fit);
    }
    rep.stderr_slope = m > 2 ? std::sqrt(ss_res / (m - 2) / sxx) : 0.0;
}

/// Runs an M-sample second-moment estimate at every abscissa and regresses
/// log estimate on log abscissa. sample_value(point, sample) must be pure;
/// samples parallelize with per-index substreams and reduce pairwise, so the
/// report is independent of the thread count.
inline SlopeReport scaling_slope(const std::vector<double>& abscissae,
                                 const std::function<double(std::size_t, std::size_t)>& sample_value,
                                 int M, std::uint64_t seed, unsigned threads) {
    if (M < 100) throw std::invalid_argument("scaling_slope: need M >= 100");
    if (abscissae.size() < 4) throw std::invalid_argument("scaling_slope: need >= 4 abscissae");
    SlopeReport rep;
    rep.samples_per_point = M;
    rep.seed = seed;
    rep.raw.assign(abscissae.size(), std::vector<double>(M));

    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    jobs.reserve(abscissae.size() * M);
    for (std::size_t p = 0; p < abscissae.size(); ++p)
        for (int i = 0; i < M; ++i) jobs.emplace_back(p, i);
    parallel_for(jobs.size(), threads, [&](std::size_t j) {
        auto [p, i] = jobs[j];
        rep.raw[p][i] = sample_value(p, i);
    });

    for (std::size_t p = 0; p < abscissae.size(); ++p) {
        PairwiseSum<double> mean_acc;
        for (double v : rep.raw[p]) mean_acc.add(v);
        double mean = mean_acc.total() / M;
        PairwiseSum<double> var_acc;
        for (double v : rep.raw[p]) var_acc.add((v - mean) * (v - mean));
        double se = std::sqrt(var_acc.total() / (M - 1) / M);
        if (!(mean > 0)) throw std::runtime_error("scaling_slope: non-positive estimate");
        rep.points.push_back({std::log(abscissae[p]), std::log(mean), se});
    }
    fit_loglog(rep);
    return rep;
}

/// E |level value over (t0, t0+gap)|^2 against the gap; the expected slope
/// is 2 n alpha for a level-n word.
inline SlopeReport holder_scan(const FbmModel& model, const FrequencyGrid& grid,
                               const RegularizationConfig& cfg, const Word& word,
                               const std::vector<double>& gaps, double t0, int M,
                               std::uint64_t seed, unsigned threads) {
    return scaling_slope(
        gaps,
        [&](std::size_t p, std::size_t i) {
            SpectralPath path = sample_fbm(model, grid, substream(seed, {0x401DE2ULL, p, i}));
            double v = word.size() == 1
                           ? path.eval(word[0], t0 + gaps[p]) - path.eval(word[0], t0)
                           : fno_level(path, word, t0, t0 + gaps[p], cfg);
            return v * v;
        },
        M, seed, threads);
}

/// E |difference of the level value under eta vs eta+delta|^2 against
/// delta, with both approximations riding the same noise; expected slope
/// 2 alpha.
inline SlopeReport rate_scan(double alpha, double base_eta, const std::vector<double>& deltas,
                             const FrequencyGrid& grid, const RegularizationConfig& cfg,
                             const Word& word, double s, double t, int M, std::uint64_t seed,
                             unsigned threads) {
    return scaling_slope(
        deltas,
        [&](std::size_t p, std::size_t i) {
            std::uint64_t sub = substream(seed, {0x7A7EULL, i});
            SpectralPath p1 = sample_fbm(FbmModel(alpha, base_eta, 2), grid, sub);
            SpectralPath p2 = sample_fbm(FbmModel(alpha, base_eta + deltas[p], 2), grid, sub);
            double v1 = word.size() == 1 ? p1.eval(word[0], t) - p1.eval(word[0], s)
                                         : fno_level(p1, word, s, t, cfg);
            double v2 = word.size() == 1 ? p2.eval(word[0], t) - p2.eval(word[0], s)
                                         : fno_level(p2, word, s, t, cfg);
            return (v1 - v2) * (v1 - v2);
        },
        M, seed, threads);
}

/// E |uncorrected area|^2 against eta; diverges like eta^{-(1-4 alpha)} for
/// alpha < 1/4.
inline SlopeReport divergence_scan(double alpha, const std::vector<double>& etas,
                                   const FrequencyGrid& grid, double s, double t, int M,
                                   std::uint64_t seed, unsigned threads) {
    return scaling_slope(
        etas,
        [&](std::size_t p, std::size_t i) {
            SpectralPath path = sample_fbm(FbmModel(alpha, etas[p], 2), grid,
                                           substream(seed, {0xD17ULL, i}));
            double a = unregularized_area(path, s, t);
            return a * a;
        },
        M, seed, threads);
}

/// E |regularized level value|^2 against eta over the same range; stays
/// bounded, so the expected slope is ~0.
inline SlopeReport regularized_in_eta_scan(double alpha, const std::vector<double>& etas,
                                           const FrequencyGrid& grid, const RegularizationConfig& cfg,
                                           const Word& word, double s, double t, int M,
                                           std::uint64_t seed, unsigned threads) {
    return scaling_slope(
        etas,
        [&](std::size_t p, std::size_t i) {
            SpectralPath path = sample_fbm(FbmModel(alpha, etas[p], 2), grid,
                                           substream(seed, {0x2E6ULL, i}));
            double v = fno_level(path, word, s, t, cfg);
            return v * v;
        },
        M, seed, threads);
}

// ---------------------------------------------------------------------------
// discrete two-variable Hoelder norm (diagnostic)
// ---------------------------------------------------------------------------

/// sup over grid pairs of |f_{t_i,t_j}| / |t_i - t_j|^kappa; f must vanish
/// on the diagonal and kappa must lie in (0, level_n].
inline double holder_norm_2var(const std::vector<double>& times,
                               const std::vector<std::vector<double>>& values, double kappa,
                               int level_n = 1) {
    if (!(kappa > 0.0 && kappa <= static_cast<double>(level_n)))
        throw std::invalid_argument("holder_norm_2var: kappa outside (0, n]");
    if (values.size() != times.size())
        throw std::invalid_argument("holder_norm_2var: times/values size mismatch");
    double sup = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (values[i].size() != times.size())
            throw std::invalid_argument("holder_norm_2var: ragged value matrix");
        if (values[i][i] != 0.0)
            throw std::invalid_argument("holder_norm_2var: nonzero on the diagonal");
        for (std::size_t j = 0; j < times.size(); ++j) {
            if (i == j) continue;
            sup = std::max(sup, std::abs(values[i][j]) / std::pow(std::abs(times[i] - times[j]), kappa));
        }
    }
    return sup;
}

// ---------------------------------------------------------------------------
// quadrature oracle for the continuum spectral integrals
// ---------------------------------------------------------------------------

namespace detail {
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                               double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}
}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int depth = 40) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, depth);
}

namespace detail {
/// int_X^inf xi^{-1-2a} e^{-2 eta xi} dxi via the log substitution
/// xi = X e^v; smooth for any eta >= 0.
inline double power_tail(double alpha, double eta, double X) {
    auto g = [&](double v) {
        double arg = 2.0 * eta * X * std::exp(v);
        double damp = arg > 700.0 ? 0.0 : std::exp(-arg);
        return std::exp(-2.0 * alpha * v) * damp;
    };
    return std::pow(X, -2.0 * alpha) * integrate(g, 0.0, 50.0, 1e-14);
}
}  // namespace detail

/// Continuum counterpart of the exact grid covariance (same eta damping),
/// by adaptive quadrature of the spectral integral. Beyond the explicit
/// range the oscillatory terms are negligible and the monotone part is
/// integrated under a log substitution.
inline double covariance_quadrature(double alpha, double eta, double s, double t) {
    const double c2 = c_alpha(alpha) * c_alpha(alpha);
    auto f = [&](double x) {
        if (x <= 0.0) return 0.0;
        return std::exp(-2.0 * eta * x) * std::pow(x, -1.0 - 2.0 * alpha) *
               (1.0 + std::cos((s - t) * x) - std::cos(s * x) - std::cos(t * x));
    };
    // [0,1] under xi = u^2: removes the infrared endpoint singularity that
    // appears for alpha > 1/2
    auto f0 = [&](double u) { return f(u * u) * 2.0 * u; };
    double total = integrate(f0, 0.0, 1.0, 1e-13);
    const double hi = std::max(2000.0, std::min(3e4, 30.0 / eta));
    const double cuts[] = {1.0, 10.0, 100.0, 1000.0, hi};
    for (int i = 0; i + 1 < 5; ++i)
        if (cuts[i + 1] > cuts[i]) total += integrate(f, cuts[i], cuts[i + 1], 1e-13);
    // beyond hi only the non-oscillatory part survives; it is 1, plus 1 more
    // on the diagonal where cos((s-t) xi) is constant
    total += (s == t ? 2.0 : 1.0) * detail::power_tail(alpha, eta, hi);
    return 2.0 * c2 * total;
}

/// Continuum counterpart of the antisymmetric cross-covariance. Every term
/// beyond the explicit range oscillates, so no tail correction is needed.
inline double antisym_cross_covariance_quadrature(double alpha, double eta, double s, double t) {
    const double c2 = c_alpha(alpha) * c_alpha(alpha);
    auto f = [&](double x) {
        if (x <= 0.0) return 0.0;
        return std::exp(-2.0 * eta * x) * std::pow(x, -1.0 - 2.0 * alpha) *
               (std::sin((s - t) * x) + std::sin(t * x) - std::sin(s * x));
    };
    auto f0 = [&](double u) { return f(u * u) * 2.0 * u; };
    double total = integrate(f0, 0.0, 1.0, 1e-13);
    const double hi = std::max(2000.0, std::min(3e4, 30.0 / eta));
    const double cuts[] = {1.0, 10.0, 100.0, 1000.0, hi};
    for (int i = 0; i + 1 < 5; ++i)
        if (cuts[i + 1] > cuts[i]) total += integrate(f, cuts[i], cuts[i + 1], 1e-13);
    return -2.0 * c2 * total;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json slope_report_to_json(const SlopeReport& rep) {
    nlohmann::ordered_json j;
    j["slope"] = rep.slope;
    j["stderr"] = rep.stderr_slope;
    j["samples_per_point"] = rep.samples_per_point;
    j["seed"] = rep.seed;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& p : rep.points)
        pts.push_back({{"log_abscissa", p.log_abscissa},
                       {"log_estimate", p.log_estimate},
                       {"mc_stderr", p.mc_stderr}});
    j["points"] = pts;
    return j;
}

inline void slope_samples_to_csv(const std::string& path, const std::vector<double>& abscissae,
                                 const SlopeReport& rep) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("slope_samples_to_csv: cannot open " + path);
    os.precision(17);
    os << "abscissa,sample_index,value\n";
    for (std::size_t p = 0; p < rep.raw.size(); ++p)
        for (std::size_t i = 0; i < rep.raw[p].size(); ++i)
            os << abscissae[p] << ',' << i << ',' << rep.raw[p][i] << '\n';
}

}  // namespace fno
