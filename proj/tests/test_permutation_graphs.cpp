#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "fno/exp_poly.hpp"
#include "fno/permutation.hpp"
#include "fno/rough_path.hpp"
#include "fno/verify.hpp"

using namespace fno;

TEST_CASE("sector assignment basics") {
    auto sa = sector_assignment({5.0, -2.0, 3.0});
    CHECK(sa.sigma == std::vector<int>{2, 3, 1});

    std::vector<double> sorted{1, 2, 3, 4};
    CHECK(sector_assignment(sorted).sigma == std::vector<int>{1, 2, 3, 4});

    // tie with opposite signs resolved by the original index
    CHECK(sector_assignment({-3.0, 3.0}).sigma == std::vector<int>{1, 2});

    CHECK_THROWS_AS(sector_assignment({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(sector_assignment({}), std::invalid_argument);
}

TEST_CASE("sectors partition every tuple, including all tie patterns") {
    // tuples over a small signed multiset so all tie patterns occur
    const std::vector<double> values{-2, -1, 1, 2};
    for (int n = 2; n <= 4; ++n) {
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 1);
        std::vector<std::vector<int>> sigmas;
        do { sigmas.push_back(perm); } while (std::next_permutation(perm.begin(), perm.end()));

        std::vector<std::size_t> idx(n, 0);
        for (;;) {
            std::vector<double> xi(n);
            for (int i = 0; i < n; ++i) xi[i] = values[idx[i]];
            int claims = 0;
            for (const auto& s : sigmas) claims += in_sector(s, xi) ? 1 : 0;
            CHECK(claims == 1);
            CHECK(in_sector(sector_assignment(xi).sigma, xi));
            int j = 0;
            while (j < n && ++idx[j] == values.size()) idx[j++] = 0;
            if (j == n) break;
        }
    }
}

TEST_CASE("permutation graph shapes") {
    // identity: single trunk, sign +1
    auto id3 = permutation_graph({1, 2, 3}, {1, 2, 3});
    REQUIRE(id3.terms.size() == 1);
    CHECK(id3.terms[0].sign == 1);
    CHECK(id3.terms[0].forest == trunk_tree({1, 2, 3}));

    // n = 2 swap: singleton forest plus a trunk with flipped sign
    auto g = permutation_graph({2, 1}, {1, 2});
    REQUIRE(g.terms.size() == 2);
    CHECK(g.terms[0].sign == 1);
    CHECK(g.terms[0].forest == DecoratedForest({0, 0}, {2, 1}));
    CHECK(g.terms[1].sign == -1);
    CHECK(g.terms[1].forest == DecoratedForest({0, 1}, {2, 1}));

    // sigma = (2,3,1): one tree with two branches minus, one two-component
    // forest plus
    auto g231 = permutation_graph({2, 3, 1}, {1, 2, 3});
    REQUIRE(g231.terms.size() == 2);
    CHECK(g231.terms[0].sign == 1);
    CHECK(g231.terms[0].forest == DecoratedForest({0, 1, 0}, {2, 3, 1}));
    CHECK(g231.terms[1].sign == -1);
    CHECK(g231.terms[1].forest == DecoratedForest({0, 1, 1}, {2, 3, 1}));

    CHECK_THROWS_AS(permutation_graph({1, 1}, {1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(permutation_graph({}, {}), std::invalid_argument);
}

TEST_CASE("term count is a power of two and orders are compatible") {
    for (int n = 1; n <= 4; ++n) {
        std::vector<int> sigma(n);
        std::iota(sigma.begin(), sigma.end(), 1);
        Word labels(n, 1);
        do {
            auto g = permutation_graph(sigma, labels);
            std::size_t c = g.terms.size();
            CHECK((c & (c - 1)) == 0);  // power of two
            for (const auto& term : g.terms) {
                CHECK(term.forest.size() == n);
                for (int v = 1; v <= n; ++v) CHECK(term.forest.parent(v) < v);
            }
        } while (std::next_permutation(sigma.begin(), sigma.end()));
    }
}

TEST_CASE("Fubini: sector pieces reconstruct the trunk integral") {
    // per-sector check against the oracle restricted to the sector, using
    // single-atom tuples; exercises signs, bounds and renumbering
    const double dxi = 0.5, s = 0.15, t = 1.05;
    for (int n = 2; n <= 4; ++n) {
        AtomicPath path = make_generic_atoms(n, 2, dxi, 99 + n);
        Word w;
        for (int i = 1; i <= n; ++i) w.push_back(i);
        RegularizationConfig trivial(0.5, RegMode::Trivial);

        std::vector<int> sigma(n);
        std::iota(sigma.begin(), sigma.end(), 1);
        do {
            // oracle restricted to this sector: enumerate single-atom tuples
            cplx expected{};
            std::vector<std::size_t> idx(n, 0);
            for (;;) {
                std::vector<double> xi(n);
                std::vector<std::vector<Atom>> slots(n);
                for (int i = 0; i < n; ++i) {
                    const Atom& a = path.atoms[i][idx[i]];
                    xi[i] = a.k * dxi;
                    slots[i] = {a};
                }
                if (in_sector(sigma, xi)) expected += oracle_nested_integral(slots, dxi, s, t);
                int j = 0;
                while (j < n && ++idx[j] == path.atoms[j].size()) idx[j++] = 0;
                if (j == n) break;
            }

            // signed forest sum over the reordered sector measure
            SignedForestSum graph = permutation_graph(sigma, w);
            TreeMeasure m;
            m.forest = graph.terms.front().forest;
            m.delta_xi = dxi;
            m.sorted_support = true;
            for (int j = 0; j < n; ++j) m.atoms.push_back(path.atoms[w[sigma[j] - 1] - 1]);
            cplx got = evaluate_signed_sum(graph, m, trivial, t, s);

            CHECK(std::abs(got - expected) <= 1e-9 * (std::abs(expected) + 1.0));
        } while (std::next_permutation(sigma.begin(), sigma.end()));
    }
}
