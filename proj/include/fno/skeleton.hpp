#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fno/exp_poly.hpp"
#include "fno/forest.hpp"
#include "fno/permutation.hpp"
#include "fno/util.hpp"

namespace fno {

enum class RegMode { Regularized, Trivial };

/// Fourier-domain cutoff configuration. Trivial mode admits every
/// non-resonant tuple and exists for oracle checks on deterministic paths.
struct RegularizationConfig {
    double c_reg = 0.5;
    RegMode mode = RegMode::Regularized;

    RegularizationConfig() = default;
    RegularizationConfig(double c, RegMode m) : c_reg(c), mode(m) {
        if (!(c_reg > 0.0 && c_reg < 1.0))
            throw std::invalid_argument("RegularizationConfig: c_reg must lie in (0,1)");
    }
};

/// Product measure with one atom table per vertex (after sector reordering,
/// vertex v's table is the spectrum of component label(v)). When
/// sorted_support is set, the support is restricted to tuples whose
/// magnitudes do not decrease along the vertex order — the discrete
/// counterpart of a magnitude-ordering sector. Grid tuples with equal
/// magnitudes in several slots sit on sector boundaries; they enter with
/// weight 1/prod(m_c!) over the tie classes, so summing the sectors of all
/// permutations counts every tuple with total weight one, and the weights
/// are invariant under negating the tuple, which keeps Hermitian-path
/// evaluations exactly real and the Chen/shuffle recombinations exact.
struct TreeMeasure {
    DecoratedForest forest;
    double delta_xi = 1.0;
    std::vector<std::vector<Atom>> atoms;  // per vertex
    bool sorted_support = false;

    int size() const { return forest.size(); }
};

/// Builds the measure dG(label(1)) x ... x dG(label(n)) for the given path.
inline TreeMeasure measure_from_path(const DecoratedForest& f, const AtomicPath& path,
                                     bool sorted_support = false) {
    TreeMeasure m;
    m.forest = f;
    m.delta_xi = path.delta_xi;
    m.sorted_support = sorted_support;
    m.atoms.reserve(f.size());
    for (int v = 1; v <= f.size(); ++v) {
        int c = f.label(v);
        if (c < 1 || c > path.dims())
            throw std::invalid_argument("measure_from_path: label exceeds path dimension");
        m.atoms.push_back(path.atoms[c - 1]);
    }
    return m;
}

/// Result of a (regularized) tree integral, with provenance.
struct TreeIntegralValue {
    cplx value;
    std::string forest_text;
    RegularizationConfig config;
    double t = 0.0;
    double s = 0.0;
};

// ---------------------------------------------------------------------------
// regularization domains (stand-alone predicates)
// ---------------------------------------------------------------------------

/// True iff magnitudes are nondecreasing along the global vertex order,
/// ties resolved by the vertex id.
inline bool in_plus_domain(const DecoratedForest& f, const std::vector<double>& xi) {
    if (static_cast<int>(xi.size()) != f.size())
        throw std::invalid_argument("in_plus_domain: tuple size mismatch");
    for (double x : xi)
        if (x == 0.0) throw std::invalid_argument("in_plus_domain: zero frequency");
    for (int v = 1; v < f.size(); ++v)
        if (!sector_less(xi[v - 1], v, xi[v], v + 1)) return false;
    return true;
}

/// Regularized mode: in_plus and, for every vertex, the resonance
/// denominator |xi_v + sum_{w above v} xi_w| strictly exceeds c_reg times
/// the largest magnitude above v. Trivial mode: in_plus and no vanishing
/// denominator.
inline bool in_reg_domain(const DecoratedForest& f, const std::vector<double>& xi,
                          const RegularizationConfig& cfg) {
    if (!in_plus_domain(f, xi)) return false;
    const auto masks = f.subtree_masks();
    for (int v = 1; v <= f.size(); ++v) {
        double sum = 0.0, maxabove = 0.0;
        for (int w = 1; w <= f.size(); ++w)
            if ((masks[v] >> (w - 1)) & 1u) {
                sum += xi[w - 1];
                if (w != v) maxabove = std::max(maxabove, std::abs(xi[w - 1]));
            }
        if (cfg.mode == RegMode::Trivial) {
            if (sum == 0.0) return false;
        } else if (!(std::abs(sum) > cfg.c_reg * maxabove)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// evaluation engine
// ---------------------------------------------------------------------------

namespace detail {

/// One connected sub-forest (a tree) arising in the increment/boundary
/// recursion, keyed by its vertex mask and induced parent structure.
struct PlanNode {
    std::uint32_t mask = 0;
    int size = 0;
    int max_member = 0;                       // deepest vertex; the node's value
                                              // is final once that position is set
    std::vector<int> members;                 // ascending vertex ids
    std::vector<std::uint32_t> sub_masks;     // per member: subtree within mask
    std::vector<std::uint32_t> above_masks;   // per member: sub_mask minus the member
    struct CutRef {
        int left;                 // node id of the root part (may be -1 when empty)
        std::vector<int> rights;  // node ids of the components above the cut
    };
    std::vector<CutRef> cuts;
};

/// Shared node registry for a signed sum of forests over a common vertex
/// set. Terms reference their top-level tree components by node id.
class PlanSet {
  public:
    struct Term {
        int sign;
        std::vector<int> components;
    };

    int n = 0;
    std::vector<PlanNode> nodes;
    std::vector<Term> terms;

    static PlanSet build(const std::vector<SignedForestSum::Term>& sum_terms) {
        if (sum_terms.empty()) throw std::invalid_argument("PlanSet: empty sum");
        PlanSet ps;
        ps.n = sum_terms.front().forest.size();
        if (ps.n > 16) throw std::invalid_argument("PlanSet: too many vertices");
        for (const auto& st : sum_terms) {
            if (st.forest.size() != ps.n)
                throw std::invalid_argument("PlanSet: vertex count mismatch across terms");
            const auto tmask = st.forest.subtree_masks();
            Term term;
            term.sign = st.sign;
            const std::uint32_t full = ps.n == 32 ? ~0u : ((1u << ps.n) - 1u);
            for (int v = 1; v <= ps.n; ++v)
                if (st.forest.is_root(v)) term.components.push_back(ps.ensure(st.forest, tmask, tmask[v] & full));
            ps.terms.push_back(std::move(term));
        }
        return ps;
    }

    /// mask -> node id for nodes of the FIRST term's forest (valid when the
    /// sum has a single term, as in the multiplicative-identity check).
    int node_for_mask(std::uint32_t mask) const {
        auto it = by_mask_.find(mask);
        return it == by_mask_.end() ? -1 : it->second;
    }

  private:
    std::unordered_map<std::string, int> registry_;
    std::unordered_map<std::uint32_t, int> by_mask_;

    int ensure(const DecoratedForest& f, const std::vector<std::uint32_t>& tmask, std::uint32_t mask) {
        std::string key = structure_key(f, mask);
        if (auto it = registry_.find(key); it != registry_.end()) return it->second;

        PlanNode node;
        node.mask = mask;
        for (int v = 1; v <= f.size(); ++v)
            if ((mask >> (v - 1)) & 1u) node.members.push_back(v);
        node.size = static_cast<int>(node.members.size());
        node.max_member = node.members.back();
        int root = 0;
        for (int v : node.members) {
            std::uint32_t sm = tmask[v] & mask;
            node.sub_masks.push_back(sm);
            node.above_masks.push_back(sm & ~(1u << (v - 1)));
            int p = f.parent(v);
            if (p == 0 || !((mask >> (p - 1)) & 1u)) root = v;
        }

        // cuts: nonempty antichains of the members other than the root
        std::vector<int> candidates;
        for (int v : node.members)
            if (v != root) candidates.push_back(v);
        std::vector<Cut> antichains;
        std::vector<int> cur;
        antichains_rec(candidates, 0, tmask, 0u, cur, antichains);

        std::vector<PlanNode::CutRef> cut_refs;
        for (const Cut& c : antichains) {
            std::uint32_t right = 0;
            PlanNode::CutRef ref;
            for (int v : c) right |= tmask[v] & mask;
            std::uint32_t left = mask & ~right;
            ref.left = left ? ensure(f, tmask, left) : -1;
            for (int v : c) ref.rights.push_back(ensure(f, tmask, tmask[v] & mask));
            cut_refs.push_back(std::move(ref));
        }
        node.cuts = std::move(cut_refs);

        int id = static_cast<int>(nodes.size());
        nodes.push_back(std::move(node));
        registry_.emplace(std::move(key), id);
        by_mask_.emplace(mask, id);
        return id;
    }

    static std::string structure_key(const DecoratedForest& f, std::uint32_t mask) {
        std::ostringstream os;
        os << mask;
        for (int v = 1; v <= f.size(); ++v)
            if ((mask >> (v - 1)) & 1u) {
                int p = f.parent(v);
                os << ':' << v << '>' << (p != 0 && ((mask >> (p - 1)) & 1u) ? p : 0);
            }
        return os.str();
    }
};

inline int sector_key_of(int k) { return std::abs(k); }

struct TableEntry {
    int key;
    int k;
    cplx amp;
};

/// Per-call evaluation state: enumerates the measure support and, for every
/// tuple, evaluates skeleton kernels and increment/boundary kernels for all
/// plan nodes. Single-threaded by design; callers parallelize across calls.
class Engine {
  public:
    Engine(const PlanSet& plan, const TreeMeasure& measure, const RegularizationConfig& cfg,
           std::vector<double> times, std::vector<std::pair<int, int>> pairs)
        : plan_(plan), cfg_(cfg), times_(std::move(times)), pairs_(std::move(pairs)),
          dxi_(measure.delta_xi), sorted_(measure.sorted_support) {
        n_ = plan_.n;
        if (measure.size() != n_) throw std::invalid_argument("Engine: measure/plan size mismatch");
        tables_.resize(n_);
        kmax_ = 1;
        for (int v = 0; v < n_; ++v) {
            for (const Atom& a : measure.atoms[v]) {
                if (a.k == 0) throw std::invalid_argument("Engine: zero frequency atom");
                if (a.amp == cplx{}) continue;
                tables_[v].push_back({sector_key_of(a.k), a.k, a.amp});
                kmax_ = std::max(kmax_, std::abs(a.k));
            }
            std::sort(tables_[v].begin(), tables_[v].end(), [](const TableEntry& a, const TableEntry& b) {
                return a.key != b.key ? a.key < b.key : a.k < b.k;
            });
        }

        offset_ = n_ * kmax_;
        etab_.resize(times_.size());
        for (std::size_t ti = 0; ti < times_.size(); ++ti) {
            etab_[ti].resize(2 * offset_ + 1);
            for (int m = -offset_; m <= offset_; ++m)
                etab_[ti][m + offset_] = std::polar(1.0, times_[ti] * m * dxi_);
        }
        dxipow_.resize(n_ + 1);
        dxipow_[0] = 1.0;
        for (int i = 1; i <= n_; ++i) dxipow_[i] = dxipow_[i - 1] * dxi_;

        ss_.assign(std::size_t{1} << n_, 0);
        mx_.assign(std::size_t{1} << n_, 0);
        sk_.assign(times_.size() * plan_.nodes.size(), cplx{});
        kv_.assign(pairs_.size() * plan_.nodes.size(), cplx{});
        ks_.resize(n_);

        // a node's value depends only on the positions in its mask, so it is
        // evaluated as soon as its deepest position is set and stays valid
        // for the whole enumeration subtree below
        nodes_by_depth_.assign(n_, {});
        for (std::size_t id = 0; id < plan_.nodes.size(); ++id)
            nodes_by_depth_[plan_.nodes[id].max_member - 1].push_back(static_cast<int>(id));
        masks_by_depth_.assign(n_, {});
        for (std::uint32_t m = 1; m < (1u << n_); ++m) {
            int top = 31 - std::countl_zero(m);
            masks_by_depth_[top].push_back(m);
        }

        sum_k_.assign(pairs_.size() * plan_.terms.size(), PairwiseSum<cplx>{});
        sum_sk_.assign(times_.size() * plan_.terms.size(), PairwiseSum<cplx>{});
    }

    /// Also accumulate, per forest cut of the single-term forest, the joint
    /// sums of K_left(pair_a) * prod K_right(pair_b).
    void enable_cut_products(const std::vector<Cut>& forest_cuts, const DecoratedForest& forest,
                             int pair_a, int pair_b) {
        const auto tmask = forest.subtree_masks();
        cut_pair_a_ = pair_a;
        cut_pair_b_ = pair_b;
        for (const Cut& c : forest_cuts) {
            std::uint32_t right = 0;
            for (int v : c) right |= tmask[v];
            std::uint32_t left = (n_ == 32 ? ~0u : ((1u << n_) - 1u)) & ~right;
            CutProduct cp;
            for (int v = 1; v <= n_; ++v) {
                bool root_of_left = (left >> (v - 1)) & 1u
                                        ? (forest.parent(v) == 0 || !((left >> (forest.parent(v) - 1)) & 1u))
                                        : false;
                if (root_of_left) cp.left_nodes.push_back(plan_.node_for_mask(tmask[v] & left));
            }
            for (int v : c) cp.right_nodes.push_back(plan_.node_for_mask(tmask[v]));
            for (int id : cp.left_nodes)
                if (id < 0) throw std::logic_error("Engine: unresolved left node");
            for (int id : cp.right_nodes)
                if (id < 0) throw std::logic_error("Engine: unresolved right node");
            cut_products_.push_back(std::move(cp));
        }
        sum_cut_products_.assign(cut_products_.size(), PairwiseSum<cplx>{});
    }

    void run() {
        for (auto& t : tables_)
            if (t.empty()) return;  // empty measure
        recurse(0, std::numeric_limits<int>::min(), 1, cplx{1.0, 0.0});
    }

    cplx sum_k(int pair) const {
        cplx v{};
        for (std::size_t t = 0; t < plan_.terms.size(); ++t)
            v += static_cast<double>(plan_.terms[t].sign) * sum_k_[t * pairs_.size() + pair].total();
        return v;
    }

    cplx sum_sk(int time) const {
        cplx v{};
        for (std::size_t t = 0; t < plan_.terms.size(); ++t)
            v += static_cast<double>(plan_.terms[t].sign) * sum_sk_[t * times_.size() + time].total();
        return v;
    }

    cplx sum_cut_products_total() const {
        cplx v{};
        for (const auto& acc : sum_cut_products_) v += acc.total();
        return v;
    }

  private:
    struct CutProduct {
        std::vector<int> left_nodes;
        std::vector<int> right_nodes;
    };

    const PlanSet& plan_;
    RegularizationConfig cfg_;
    std::vector<double> times_;
    std::vector<std::pair<int, int>> pairs_;
    double dxi_;
    bool sorted_;
    int n_ = 0, kmax_ = 1, offset_ = 0;
    std::vector<std::vector<TableEntry>> tables_;
    std::vector<std::vector<cplx>> etab_;
    std::vector<double> dxipow_;

    std::vector<int> ss_, mx_, ks_;
    std::vector<cplx> sk_, kv_;
    std::vector<std::vector<int>> nodes_by_depth_;
    std::vector<std::vector<std::uint32_t>> masks_by_depth_;
    std::vector<PairwiseSum<cplx>> sum_k_, sum_sk_, sum_cut_products_;
    std::vector<CutProduct> cut_products_;
    int cut_pair_a_ = -1, cut_pair_b_ = -1;

    // run_len = length of the equal-magnitude run ending just before pos;
    // extending a run of length r contributes the symmetric boundary
    // weight 1/r, accumulating 1/m! over each tie class.
    void recurse(int pos, int min_key, int run_len, cplx amp) {
        const auto& tab = tables_[pos];
        std::size_t i = 0;
        if (sorted_ && pos > 0) {
            i = std::lower_bound(tab.begin(), tab.end(), min_key,
                                 [](const TableEntry& e, int key) { return e.key < key; }) -
                tab.begin();
        }
        for (; i < tab.size(); ++i) {
            const TableEntry& e = tab[i];
            int run = 1;
            cplx a = amp * e.amp;
            if (sorted_ && pos > 0 && e.key == min_key) {
                run = run_len + 1;
                a *= 1.0 / run;
            }
            ks_[pos] = e.k;
            advance_depth(pos);
            if (pos + 1 == n_) {
                accumulate(a);
            } else {
                recurse(pos + 1, e.key, run, a);
            }
        }
    }

    void advance_depth(int pos) {
        for (std::uint32_t m : masks_by_depth_[pos]) {
            std::uint32_t rest = m & ~(1u << pos);
            ss_[m] = ss_[rest] + ks_[pos];
            mx_[m] = std::max(mx_[rest], std::abs(ks_[pos]));
        }

        static constexpr cplx kIPow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};  // (-i)^m
        const std::size_t nnodes = plan_.nodes.size();
        for (int id : nodes_by_depth_[pos]) {
            const PlanNode& node = plan_.nodes[id];
            bool ind = true;
            double den = 1.0;
            for (int m = 0; m < node.size; ++m) {
                int sub = ss_[node.sub_masks[m]];
                if (cfg_.mode == RegMode::Trivial) {
                    if (sub == 0)
                        throw ResonanceError("resonant tuple in trivially regularized evaluation");
                } else if (ind) {
                    if (!(std::abs(sub) > cfg_.c_reg * mx_[node.above_masks[m]])) ind = false;
                }
                den *= sub;
            }
            if (ind && cfg_.mode == RegMode::Regularized && !sorted_) {
                // general support: the magnitude-ordering part of the domain
                for (int m = 0; m + 1 < node.size; ++m) {
                    int va = node.members[m], vb = node.members[m + 1];
                    if (!sector_less(ks_[va - 1], va, ks_[vb - 1], vb)) { ind = false; break; }
                }
            }
            if (!ind) {
                for (std::size_t ti = 0; ti < times_.size(); ++ti) sk_[ti * nnodes + id] = cplx{};
            } else {
                cplx scale = kIPow[node.size & 3] / (den * dxipow_[node.size]);
                int sum = ss_[node.mask];
                for (std::size_t ti = 0; ti < times_.size(); ++ti)
                    sk_[ti * nnodes + id] = etab_[ti][sum + offset_] * scale;
            }
            for (std::size_t pi = 0; pi < pairs_.size(); ++pi) {
                const auto [ti, si] = pairs_[pi];
                cplx v = sk_[ti * nnodes + id] - sk_[si * nnodes + id];
                for (const auto& cut : node.cuts) {
                    cplx b = cut.left < 0 ? cplx{1.0, 0.0} : kv_[pi * nnodes + cut.left];
                    for (int r : cut.rights) b *= sk_[si * nnodes + r];
                    v -= b;
                }
                kv_[pi * nnodes + id] = v;
            }
        }
    }

    void accumulate(cplx amp) {
        const std::size_t nnodes = plan_.nodes.size();
        for (std::size_t t = 0; t < plan_.terms.size(); ++t) {
            const auto& term = plan_.terms[t];
            for (std::size_t pi = 0; pi < pairs_.size(); ++pi) {
                cplx v = amp;
                for (int comp : term.components) v *= kv_[pi * nnodes + comp];
                sum_k_[t * pairs_.size() + pi].add(v);
            }
            for (std::size_t ti = 0; ti < times_.size(); ++ti) {
                cplx v = amp;
                for (int comp : term.components) v *= sk_[ti * nnodes + comp];
                sum_sk_[t * times_.size() + ti].add(v);
            }
        }

        for (std::size_t ci = 0; ci < cut_products_.size(); ++ci) {
            const CutProduct& cp = cut_products_[ci];
            cplx v = amp;
            for (int id : cp.left_nodes) v *= kv_[cut_pair_a_ * nnodes + id];
            for (int id : cp.right_nodes) v *= kv_[cut_pair_b_ * nnodes + id];
            sum_cut_products_[ci].add(v);
        }
    }
};

/// Global plan cache keyed by the canonical texts of the summed forests.
inline std::shared_ptr<const PlanSet> cached_plan(const std::vector<SignedForestSum::Term>& terms) {
    static std::mutex mu;
    static std::unordered_map<std::string, std::shared_ptr<const PlanSet>> cache;
    std::string key;
    for (const auto& t : terms) {
        key += t.sign > 0 ? '+' : '-';
        key += to_text(t.forest);
        key += '|';
    }
    std::scoped_lock lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto plan = std::make_shared<PlanSet>(PlanSet::build(terms));
    cache.emplace(std::move(key), plan);
    return plan;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

/// Regularized skeleton integral at time t: per tree component, the sum over
/// admitted frequency tuples of prod_v amp_v(xi_v) e^{i t sum xi_v} /
/// prod_v [i (xi_v + sum_{w above v} xi_w)]; components multiply. A single
/// vertex is never restricted, anchoring the normalization at the formal
/// antiderivative sum_k a_k e^{i t xi_k} / (i xi_k).
inline TreeIntegralValue skeleton_integral(const TreeMeasure& m, const RegularizationConfig& cfg,
                                           double t) {
    if (m.size() == 0) throw std::invalid_argument("skeleton_integral: empty forest");
    std::vector<SignedForestSum::Term> terms{{1, m.forest}};
    auto plan = detail::cached_plan(terms);
    detail::Engine eng(*plan, m, cfg, {t}, {});
    eng.run();
    return TreeIntegralValue{eng.sum_sk(0), to_text(m.forest), cfg, t, t};
}

/// Regularized iterated integral over (t, s): per tree component, the
/// skeleton increment minus, for every admissible cut, the regularized
/// integral of the root part on (t,s) times the skeleton value of the top
/// part at s. Each factor carries the domain test of its own vertex tuple.
inline TreeIntegralValue reg_iterated_integral(const TreeMeasure& m, const RegularizationConfig& cfg,
                                               double t, double s) {
    if (m.size() == 0) throw std::invalid_argument("reg_iterated_integral: empty forest");
    std::vector<SignedForestSum::Term> terms{{1, m.forest}};
    auto plan = detail::cached_plan(terms);
    detail::Engine eng(*plan, m, cfg, {t, s}, {{0, 1}});
    eng.run();
    return TreeIntegralValue{eng.sum_k(0), to_text(m.forest), cfg, t, s};
}

struct MultIdentityReport {
    cplx v_ts, v_tu, v_us;  // regularized integrals over the three windows
    cplx cut_sum;           // sum over cuts of [RI_left]_{tu} [RI_right]_{us}
    double residual = 0.0;
};

/// Tree multiplicative property
///   [RI]_{ts} - [RI]_{tu} - [RI]_{us} = sum_cuts [RI_L]_{tu} [RI_R]_{us},
/// evaluated jointly on the measure in one support pass.
inline MultIdentityReport mult_identity_residual(const TreeMeasure& m, const RegularizationConfig& cfg,
                                                 double t, double u, double s) {
    if (m.size() == 0) throw std::invalid_argument("mult_identity_residual: empty forest");
    std::vector<SignedForestSum::Term> terms{{1, m.forest}};
    auto plan = detail::cached_plan(terms);
    detail::Engine eng(*plan, m, cfg, {t, u, s}, {{0, 2}, {0, 1}, {1, 2}});
    eng.enable_cut_products(admissible_cuts(m.forest), m.forest, /*pair_a=*/1, /*pair_b=*/2);
    eng.run();
    MultIdentityReport rep;
    rep.v_ts = eng.sum_k(0);
    rep.v_tu = eng.sum_k(1);
    rep.v_us = eng.sum_k(2);
    rep.cut_sum = eng.sum_cut_products_total();
    cplx lhs = rep.v_ts - rep.v_tu - rep.v_us;
    double scale = std::abs(rep.v_ts) + std::abs(rep.v_tu) + std::abs(rep.v_us) + std::abs(rep.cut_sum);
    rep.residual = relative_residual(std::abs(lhs - rep.cut_sum), scale);
    return rep;
}

/// Upper bound on the number of support tuples of a measure.
inline double tuple_count_estimate(const TreeMeasure& m) {
    double total = 1.0;
    for (const auto& tab : m.atoms) {
        std::size_t nz = 0;
        for (const Atom& a : tab)
            if (a.amp != cplx{}) ++nz;
        total *= static_cast<double>(nz);
    }
    if (!m.sorted_support) return total;
    double fact = 1.0;
    for (int i = 2; i <= m.size(); ++i) fact *= i;
    return total / fact + 1.0;
}

/// Evaluates a signed forest sum against per-vertex tables on a sorted
/// (sector-restricted) support; used by the normal-ordering assembly.
inline cplx evaluate_signed_sum(const SignedForestSum& sum, const TreeMeasure& m,
                                const RegularizationConfig& cfg, double t, double s) {
    auto plan = detail::cached_plan(sum.terms);
    detail::Engine eng(*plan, m, cfg, {t, s}, {{0, 1}});
    eng.run();
    return eng.sum_k(0);
}

}  // namespace fno
