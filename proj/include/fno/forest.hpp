#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fno {

/// Rooted labeled forest. Vertices are 1..n; edges are oriented towards the
/// roots through the parent map, with parent(v) == 0 marking a root. The
/// integer order of the vertex ids is always compatible with the tree
/// partial order: parent(v) < v for every non-root v. Values are immutable
/// after construction.
class DecoratedForest {
  public:
    DecoratedForest() = default;

    DecoratedForest(std::vector<int> parent, std::vector<int> label)
        : parent_(std::move(parent)), label_(std::move(label)) {
        if (parent_.size() != label_.size())
            throw std::invalid_argument("forest: parent/label size mismatch");
        const int n = size();
        for (int v = 1; v <= n; ++v) {
            if (parent_[v - 1] < 0 || parent_[v - 1] >= v)
                throw std::invalid_argument("forest: parent(v) must lie in {0,..,v-1}");
            if (label_[v - 1] < 1)
                throw std::invalid_argument("forest: labels must be >= 1");
        }
    }

    int size() const { return static_cast<int>(parent_.size()); }
    bool empty() const { return parent_.empty(); }

    /// Parent of v, 0 for roots.
    int parent(int v) const { return parent_.at(v - 1); }
    int label(int v) const { return label_.at(v - 1); }

    const std::vector<int>& parents() const { return parent_; }
    const std::vector<int>& labels() const { return label_; }

    bool is_root(int v) const { return parent(v) == 0; }

    /// Bitmask of {v} plus every vertex connecting to v (the subtree above
    /// v). Bit i stands for vertex i+1. Requires n <= 32.
    std::vector<std::uint32_t> subtree_masks() const {
        const int n = size();
        if (n > 32) throw std::invalid_argument("forest: subtree masks need n <= 32");
        std::vector<std::uint32_t> m(static_cast<std::size_t>(n) + 1, 0u);
        for (int v = n; v >= 1; --v) {
            m[v] |= 1u << (v - 1);
            if (parent(v) != 0) m[parent(v)] |= m[v];
        }
        return m;
    }

    /// True iff w connects to v (w is strictly above v).
    bool connects_to(int w, int v) const {
        for (int u = parent(w); u != 0; u = parent(u))
            if (u == v) return true;
        return false;
    }

    std::vector<int> roots() const {
        std::vector<int> r;
        for (int v = 1; v <= size(); ++v)
            if (is_root(v)) r.push_back(v);
        return r;
    }

    /// Children of v in ascending order.
    std::vector<int> children(int v) const {
        std::vector<int> c;
        for (int w = v + 1; w <= size(); ++w)
            if (parent(w) == v) c.push_back(w);
        return c;
    }

    /// Induced sub-forest on the given ascending vertex list, renumbered to
    /// 1..m in the inherited order. Parents falling outside the subset
    /// become roots.
    DecoratedForest induced(const std::vector<int>& vertices) const {
        std::vector<int> newid(static_cast<std::size_t>(size()) + 1, 0);
        for (std::size_t i = 0; i < vertices.size(); ++i) newid[vertices[i]] = static_cast<int>(i) + 1;
        std::vector<int> p, l;
        p.reserve(vertices.size());
        l.reserve(vertices.size());
        for (int v : vertices) {
            int q = parent(v);
            p.push_back(q == 0 ? 0 : newid[q]);
            l.push_back(label(v));
        }
        return DecoratedForest(std::move(p), std::move(l));
    }

    bool operator==(const DecoratedForest& o) const {
        return parent_ == o.parent_ && label_ == o.label_;
    }

  private:
    std::vector<int> parent_;
    std::vector<int> label_;
};

/// Canonical text form: `n; parent(1),...,parent(n); label(1),...,label(n)`
/// with 0 encoding a root.
inline std::string to_text(const DecoratedForest& f) {
    std::ostringstream os;
    os << f.size() << ";";
    for (int v = 1; v <= f.size(); ++v) os << (v == 1 ? " " : ",") << f.parent(v);
    os << ";";
    for (int v = 1; v <= f.size(); ++v) os << (v == 1 ? " " : ",") << f.label(v);
    return os.str();
}

inline DecoratedForest forest_from_text(const std::string& text) {
    auto fail = [&] { throw std::invalid_argument("forest_from_text: malformed: " + text); };
    std::size_t a = text.find(';');
    std::size_t b = text.find(';', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) fail();
    auto parse_ints = [&](const std::string& part) {
        std::vector<int> out;
        std::string tok;
        std::istringstream is(part);
        while (std::getline(is, tok, ',')) {
            if (tok.find_first_not_of(" \t") == std::string::npos) continue;
            out.push_back(std::stoi(tok));
        }
        return out;
    };
    int n = std::stoi(text.substr(0, a));
    auto parents = parse_ints(text.substr(a + 1, b - a - 1));
    auto labels = parse_ints(text.substr(b + 1));
    if (static_cast<int>(parents.size()) != n || static_cast<int>(labels.size()) != n) fail();
    return DecoratedForest(std::move(parents), std::move(labels));
}

/// Chain n -> n-1 -> ... -> 1 with root 1; vertex j carries labels[j-1].
inline DecoratedForest trunk_tree(const std::vector<int>& labels) {
    if (labels.empty()) throw std::invalid_argument("trunk_tree: empty word");
    std::vector<int> parent(labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j) parent[j] = static_cast<int>(j);
    return DecoratedForest(std::move(parent), labels);
}

/// Admissible cut: a set of vertices, stored ascending. For a single tree
/// this is a nonempty antichain avoiding the root; for a forest, per-tree
/// parts may also be empty or the tree's root, excluding the two trivial
/// all-empty / all-root combinations.
using Cut = std::vector<int>;

struct TensorSplit {
    DecoratedForest left;   // root part
    DecoratedForest right;  // part above the cut, roots = cut vertices
};

namespace detail {

inline void antichains_rec(const std::vector<int>& candidates, std::size_t start,
                           const std::vector<std::uint32_t>& masks, std::uint32_t chosen_mask,
                           std::vector<int>& cur, std::vector<Cut>& out) {
    for (std::size_t i = start; i < candidates.size(); ++i) {
        int v = candidates[i];
        // candidates ascend, so v is comparable with a chosen vertex iff it
        // lies in a chosen subtree
        if (chosen_mask & (1u << (v - 1))) continue;
        cur.push_back(v);
        out.push_back(cur);
        antichains_rec(candidates, i + 1, masks, chosen_mask | masks[v], cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

/// Every admissible cut, exactly once, ordered lexicographically on the
/// sorted vertex sets.
inline std::vector<Cut> admissible_cuts(const DecoratedForest& f) {
    if (f.empty()) throw std::invalid_argument("admissible_cuts: empty forest");
    const auto masks = f.subtree_masks();
    const auto roots = f.roots();

    // per-tree options: empty, {root}, or a nonempty antichain of the tree
    // minus its root
    std::vector<std::vector<Cut>> options;
    for (int r : roots) {
        std::vector<int> members;
        for (int v = 1; v <= f.size(); ++v)
            if (v != r && (masks[r] & (1u << (v - 1)))) members.push_back(v);
        std::vector<Cut> opts;
        opts.push_back({});     // empty part
        opts.push_back({r});    // root part
        std::vector<int> cur;
        detail::antichains_rec(members, 0, masks, 0u, cur, opts);
        options.push_back(std::move(opts));
    }

    std::vector<Cut> cuts;
    std::vector<std::size_t> idx(options.size(), 0);
    for (;;) {
        Cut c;
        bool all_empty = true, all_root = true;
        for (std::size_t i = 0; i < options.size(); ++i) {
            const Cut& part = options[i][idx[i]];
            if (part.empty()) all_root = false;
            else {
                all_empty = false;
                if (part.size() != 1 || part[0] != roots[i]) all_root = false;
            }
            c.insert(c.end(), part.begin(), part.end());
        }
        if (!all_empty && !all_root) {
            std::sort(c.begin(), c.end());
            cuts.push_back(std::move(c));
        }
        std::size_t i = 0;
        while (i < options.size() && ++idx[i] == options[i].size()) idx[i++] = 0;
        if (i == options.size()) break;
    }
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

/// Validates that `c` is an admissible cut of `f`.
inline bool is_admissible_cut(const DecoratedForest& f, const Cut& c) {
    if (f.empty() || c.empty()) return false;
    const auto masks = f.subtree_masks();
    std::vector<int> sorted = c;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    for (int v : sorted)
        if (v < 1 || v > f.size()) return false;

    const auto roots = f.roots();
    bool all_root = true;
    for (int r : roots) {
        std::vector<int> part;
        for (int v : sorted)
            if (masks[r] & (1u << (v - 1))) part.push_back(v);
        if (part.empty()) { all_root = false; continue; }
        if (part.size() == 1 && part[0] == r) continue;  // root part
        all_root = false;
        for (int v : part) {
            if (v == r) return false;  // root mixed with others
            for (int u : part)
                if (u != v && (masks[v] & (1u << (u - 1)))) return false;  // comparable pair
        }
    }
    if (all_root && sorted.size() == roots.size()) return false;  // trivial
    return true;
}

/// Splits f at an admissible cut: right keeps the cut vertices and everything
/// above them, left keeps the rest. Both parts renumber vertices in the
/// inherited global order.
inline TensorSplit split_at_cut(const DecoratedForest& f, const Cut& c) {
    if (!is_admissible_cut(f, c))
        throw std::invalid_argument("split_at_cut: cut is not admissible");
    const auto masks = f.subtree_masks();
    std::uint32_t right_mask = 0;
    for (int v : c) right_mask |= masks[v];
    std::vector<int> lv, rv;
    for (int v = 1; v <= f.size(); ++v)
        ((right_mask >> (v - 1)) & 1u ? rv : lv).push_back(v);
    return TensorSplit{f.induced(lv), f.induced(rv)};
}

/// The two trivial splits plus one split per admissible cut.
inline std::vector<TensorSplit> coproduct(const DecoratedForest& f) {
    if (f.empty()) throw std::invalid_argument("coproduct: empty forest");
    std::vector<TensorSplit> out;
    out.push_back(TensorSplit{DecoratedForest{}, f});
    out.push_back(TensorSplit{f, DecoratedForest{}});
    for (const Cut& c : admissible_cuts(f)) out.push_back(split_at_cut(f, c));
    return out;
}

/// 1 + number of vertices strictly above v.
inline int vertex_weight(const DecoratedForest& f, int v) {
    if (v < 1 || v > f.size()) throw std::invalid_argument("vertex_weight: unknown vertex");
    const auto masks = f.subtree_masks();
    std::uint32_t m = masks[v];
    int w = 0;
    while (m) { w += m & 1u; m >>= 1; }
    return w;
}

}  // namespace fno
