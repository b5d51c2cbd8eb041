#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fno/permutation.hpp"
#include "fno/skeleton.hpp"
#include "fno/spectral.hpp"
#include "fno/util.hpp"
#include "fno/words.hpp"

namespace fno {

inline constexpr int kMaxLevel = 5;
inline constexpr double kDefaultTupleBudget = 1e9;

/// Model/configuration stamp carried by tensors so identity checks can
/// refuse mismatched inputs.
struct TensorMeta {
    double alpha = 0.0;
    double eta = 0.0;
    double c_reg = 0.5;
    RegMode mode = RegMode::Regularized;

    bool operator==(const TensorMeta&) const = default;
};

/// Levels 1..N of regularized iterated integrals of one path over a fixed
/// window (s,t), indexed by words over the component alphabet.
struct RoughPathTensor {
    double s = 0.0;
    double t = 0.0;
    int d = 0;
    int levels = 0;
    TensorMeta meta;
    std::map<Word, double> values;

    double at(const Word& w) const {
        auto it = values.find(w);
        if (it == values.end()) throw std::invalid_argument("RoughPathTensor: missing word " + word_to_string(w));
        return it->second;
    }
};

/// One level value of the normal-ordering construction, as a complex number
/// (deterministic test paths need not be Hermitian). Splits the measure into
/// magnitude-ordering sectors, reorders each sector by its permutation,
/// expands into signed forests, and evaluates the regularized integrals.
inline cplx fno_word_value_complex(const AtomicPath& path, const Word& w, double s, double t,
                                   const RegularizationConfig& cfg,
                                   double tuple_budget = kDefaultTupleBudget) {
    const int n = static_cast<int>(w.size());
    if (n < 1 || n > kMaxLevel) throw std::invalid_argument("fno_word_value: word length must be 1..5");
    for (int letter : w)
        if (letter < 1 || letter > path.dims())
            throw std::invalid_argument("fno_word_value: letter exceeds path dimension");

    // budget: every grid tuple is claimed by exactly one sector, so the
    // total work is the full product count
    double total_tuples = 1.0;
    for (int letter : w) total_tuples *= static_cast<double>(path.atoms[letter - 1].size());
    if (total_tuples > tuple_budget)
        throw ResourceError("fno_word_value: tuple count estimate exceeds budget");

    std::vector<int> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 1);
    PairwiseSum<cplx> acc;
    do {
        SignedForestSum graph = permutation_graph(sigma, w);
        TreeMeasure m;
        m.forest = graph.terms.front().forest;
        m.delta_xi = path.delta_xi;
        m.sorted_support = true;
        m.atoms.reserve(n);
        for (int j = 0; j < n; ++j) m.atoms.push_back(path.atoms[w[sigma[j] - 1] - 1]);
        acc.add(evaluate_signed_sum(graph, m, cfg, t, s));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return acc.total();
}

/// Real level value for Hermitian paths; the imaginary part must vanish to
/// rounding and is enforced here.
inline double fno_level(const SpectralPath& p, const Word& w, double s, double t,
                        const RegularizationConfig& cfg, double tuple_budget = kDefaultTupleBudget) {
    cplx v = fno_word_value_complex(p.to_atomic(), w, s, t, cfg, tuple_budget);
    if (!(std::abs(v.imag()) <= 1e-10 * (std::abs(v.real()) + 1.0)))
        throw std::logic_error("fno_level: imaginary part above tolerance");
    return v.real();
}

/// Fills every word of length <= N. Level 1 is taken from path increments;
/// higher levels run the full normal-ordering assembly. Words are evaluated
/// independently, optionally in parallel; results do not depend on the
/// thread count.
inline RoughPathTensor build_tensor(const SpectralPath& p, int N, double s, double t,
                                    const RegularizationConfig& cfg, const TensorMeta& meta,
                                    unsigned threads = 1, double tuple_budget = kDefaultTupleBudget) {
    if (N < 1 || N > kMaxLevel) throw std::invalid_argument("build_tensor: N must be 1..5");
    RoughPathTensor tensor;
    tensor.s = s;
    tensor.t = t;
    tensor.d = p.d;
    tensor.levels = N;
    tensor.meta = meta;

    std::vector<Word> words;
    for (int len = 2; len <= N; ++len) {
        std::vector<Word> level;
        if (len == 2) {
            for (int a = 1; a <= p.d; ++a)
                for (int b = 1; b <= p.d; ++b) level.push_back({a, b});
        } else {
            for (const Word& w : words)
                if (static_cast<int>(w.size()) == len - 1)
                    for (int a = 1; a <= p.d; ++a) {
                        Word ext = w;
                        ext.push_back(a);
                        level.push_back(std::move(ext));
                    }
        }
        words.insert(words.end(), level.begin(), level.end());
    }

    for (int i = 1; i <= p.d; ++i) tensor.values[{i}] = p.eval(i, t) - p.eval(i, s);

    const AtomicPath atomic = p.to_atomic();
    std::vector<double> results(words.size());
    parallel_for(words.size(), threads, [&](std::size_t i) {
        cplx v = fno_word_value_complex(atomic, words[i], s, t, cfg, tuple_budget);
        if (!(std::abs(v.imag()) <= 1e-10 * (std::abs(v.real()) + 1.0)))
            throw std::logic_error("build_tensor: imaginary part above tolerance");
        results[i] = v.real();
    });
    for (std::size_t i = 0; i < words.size(); ++i) tensor.values[words[i]] = results[i];
    return tensor;
}

/// Plain double iterated integral int_s^t dB(1) int_s^{x_1} dB(2) of the
/// smooth approximation, no sector split, no regularization. Only used for
/// the divergence contrast.
inline double unregularized_area(const SpectralPath& p, double s, double t) {
    if (p.d < 2) throw std::invalid_argument("unregularized_area: needs d >= 2");
    const AtomicPath path = p.to_atomic();
    const double dxi = path.delta_xi;
    PairwiseSum<cplx> acc;
    for (const Atom& a : path.atoms[0]) {
        const double w = a.k * dxi;
        const cplx et_w = std::polar(1.0, t * w), es_w = std::polar(1.0, s * w);
        for (const Atom& b : path.atoms[1]) {
            const double v = b.k * dxi;
            const cplx iv{0.0, v};
            cplx inner;
            if (a.k + b.k == 0) {
                inner = (t - s);
            } else {
                const cplx iwv{0.0, w + v};
                inner = (std::polar(1.0, t * (w + v)) - std::polar(1.0, s * (w + v))) / iwv;
            }
            const cplx kernel = (inner - std::polar(1.0, s * v) * (et_w - es_w) / cplx{0.0, w}) / iv;
            acc.add(a.amp * b.amp * kernel);
        }
    }
    cplx total = acc.total();
    if (!(std::abs(total.imag()) <= 1e-9 * (std::abs(total.real()) + 1.0)))
        throw std::logic_error("unregularized_area: imaginary part above tolerance");
    return total.real();
}

inline nlohmann::ordered_json tensor_to_json(const RoughPathTensor& tensor) {
    nlohmann::ordered_json j;
    j["s"] = tensor.s;
    j["t"] = tensor.t;
    j["alpha"] = tensor.meta.alpha;
    j["eta"] = tensor.meta.eta;
    j["c_reg"] = tensor.meta.c_reg;
    j["mode"] = tensor.meta.mode == RegMode::Regularized ? "regularized" : "trivial";
    nlohmann::ordered_json levels = nlohmann::ordered_json::object();
    for (const auto& [w, v] : tensor.values) levels[word_to_string(w)] = v;
    j["levels"] = levels;
    return j;
}

}  // namespace fno
