#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fno/forest.hpp"
#include "fno/words.hpp"

namespace fno {

/// Magnitude-ordering comparison used everywhere a frequency tuple is split
/// into sectors: position i precedes position j iff (|x_i|, i) < (|x_j|, j)
/// lexicographically. The index tie-break makes the sectors an exact
/// partition of grid tuples and is invariant under negating the whole
/// tuple, which keeps Hermitian-path evaluations exactly real.
template <typename T>
inline bool sector_less(T xi, int i, T xj, int j) {
    T ai = xi < T(0) ? -xi : xi;
    T aj = xj < T(0) ? -xj : xj;
    if (ai != aj) return ai < aj;
    return i < j;
}

/// Permutation sigma of 1..n, stored as sigma[j-1] = original position at
/// sorted rank j.
struct SectorAssignment {
    std::vector<int> sigma;
};

/// The unique sigma with |xi_{sigma(1)}| <= ... <= |xi_{sigma(n)}| under the
/// sector tie-break. Zero frequencies are rejected.
inline SectorAssignment sector_assignment(const std::vector<double>& xi) {
    if (xi.empty()) throw std::invalid_argument("sector_assignment: empty tuple");
    for (double x : xi)
        if (x == 0.0) throw std::invalid_argument("sector_assignment: zero frequency");
    std::vector<int> order(xi.size());
    std::iota(order.begin(), order.end(), 1);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return sector_less(xi[a - 1], a, xi[b - 1], b);
    });
    return SectorAssignment{std::move(order)};
}

/// Membership test for the sector claimed by sigma.
template <typename T>
inline bool in_sector(const std::vector<int>& sigma, const std::vector<T>& xi) {
    for (std::size_t j = 1; j < sigma.size(); ++j) {
        int a = sigma[j - 1], b = sigma[j];
        if (!sector_less(xi[a - 1], a, xi[b - 1], b)) return false;
    }
    return true;
}

/// Integer-signed formal sum of forests, all on the same vertex count with
/// the same label multiset.
struct SignedForestSum {
    struct Term {
        int sign;  // +1 or -1
        DecoratedForest forest;
    };
    std::vector<Term> terms;
};

/// Fubini reordering of the simplex t > x_1 > ... > x_n > s: integrating the
/// variables in the order x_{sigma(1)}, ..., x_{sigma(n)} and expanding each
/// lower bound via int_{s_j}^{u} = int_s^{u} - int_s^{s_j} encodes the
/// iterated integral as a signed sum of forests. Vertex j stands for the
/// j-th integrated variable and carries labels[sigma(j)]; its parent is the
/// step whose variable is the (expanded) upper bound, or a root when the
/// bound is t. Signs fall out of the expansion; the term count is a power
/// of two.
inline SignedForestSum permutation_graph(const std::vector<int>& sigma, const Word& labels) {
    const int n = static_cast<int>(sigma.size());
    if (n < 1) throw std::invalid_argument("permutation_graph: empty permutation");
    if (labels.size() != sigma.size())
        throw std::invalid_argument("permutation_graph: labels/permutation size mismatch");
    std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
    for (int v : sigma) {
        if (v < 1 || v > n || seen[v]) throw std::invalid_argument("permutation_graph: not a bijection");
        seen[v] = 1;
    }

    // step index (1-based) holding original variable m, for already
    // integrated variables
    std::vector<int> step_of(static_cast<std::size_t>(n) + 1, 0);

    struct PartialTerm {
        int sign;
        std::vector<int> parent;  // parent step per vertex, 0 = root
    };
    std::vector<PartialTerm> terms{{1, {}}};

    for (int j = 1; j <= n; ++j) {
        const int m = sigma[j - 1];
        // nearest already-integrated neighbours of m in the simplex order
        int upper = 0, lower = 0;  // original variable indices; 0 = t resp. s
        for (int i = 1; i < j; ++i) {
            int mi = sigma[i - 1];
            if (mi < m && mi > upper) upper = mi;
            if (mi > m && (lower == 0 || mi < lower)) lower = mi;
        }
        const int upper_step = upper == 0 ? 0 : step_of[upper];
        if (lower == 0) {
            for (auto& t : terms) t.parent.push_back(upper_step);
        } else {
            const int lower_step = step_of[lower];
            std::vector<PartialTerm> next;
            next.reserve(terms.size() * 2);
            for (auto& t : terms) {
                PartialTerm plus = t;
                plus.parent.push_back(upper_step);
                next.push_back(std::move(plus));
                PartialTerm minus = std::move(t);
                minus.sign = -minus.sign;
                minus.parent.push_back(lower_step);
                next.push_back(std::move(minus));
            }
            terms = std::move(next);
        }
        step_of[m] = j;
    }

    std::vector<int> relabeled(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) relabeled[j - 1] = labels[sigma[j - 1] - 1];

    SignedForestSum out;
    out.terms.reserve(terms.size());
    for (auto& t : terms)
        out.terms.push_back({t.sign, DecoratedForest(std::move(t.parent), relabeled)});
    return out;
}

}  // namespace fno
