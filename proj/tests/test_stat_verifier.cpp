#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fno/exp_poly.hpp"
#include "fno/rough_path.hpp"
#include "fno/verify.hpp"

using namespace fno;

namespace {
const RegularizationConfig kReg{0.5, RegMode::Regularized};

// iterated composite-Simpson evaluation of the nested integral, as a second
// oracle independent of the antiderivative algebra
cplx quadrature_nested(const AtomicPath& p, const Word& w, double s, double t, int grid_points) {
    const int n = grid_points;  // odd
    const double h = (t - s) / (n - 1);
    auto deriv = [&](int comp, double x) {
        cplx v{};
        for (const Atom& a : p.atoms[comp - 1]) v += a.amp * std::exp(cplx{0.0, a.k * p.delta_xi * x});
        return v;
    };
    std::vector<cplx> inner(n, cplx{1.0, 0.0});
    for (std::size_t slot = w.size(); slot-- > 0;) {
        std::vector<cplx> integrand(n);
        for (int i = 0; i < n; ++i) integrand[i] = deriv(w[slot], s + i * h) * inner[i];
        std::vector<cplx> acc(n, cplx{});
        for (int i = 2; i < n; i += 2)
            acc[i] = acc[i - 2] + h / 3.0 * (integrand[i - 2] + 4.0 * integrand[i - 1] + integrand[i]);
        // odd points: half-interval of the parabola through three nodes
        for (int i = 1; i < n; i += 2)
            acc[i] = acc[i - 1] + h / 12.0 * (5.0 * integrand[i - 1] + 8.0 * integrand[i] - integrand[i + 1]);
        inner = std::move(acc);
    }
    return inner[n - 1];
}

}  // namespace

TEST_CASE("oracle ring basics") {
    AtomicPath p;
    p.delta_xi = 0.5;
    p.atoms = {{{3, cplx{0.7, -0.2}}}};
    double s = 0.2, t = 1.3, w = 3 * 0.5;
    cplx got = oracle_iterated_integral(p, {1}, s, t);
    cplx want = cplx{0.7, -0.2} * (std::exp(cplx{0, t * w}) - std::exp(cplx{0, s * w})) / cplx{0, w};
    CHECK(std::abs(got - want) < 1e-14);

    // same letter twice: half the squared level-one value
    AtomicPath q = make_generic_atoms(1, 3, 0.5, 8);
    cplx l1 = oracle_iterated_integral(q, {1}, s, t);
    cplx l2 = oracle_iterated_integral(q, {1, 1}, s, t);
    CHECK(std::abs(l2 - 0.5 * l1 * l1) < 1e-12);

    // resonant pair handled exactly by the zero-frequency branch
    AtomicPath r;
    r.delta_xi = 0.5;
    r.atoms = {{{4, cplx{1.0, 0.0}}}, {{-4, cplx{0.0, 1.0}}}};
    cplx v = oracle_iterated_integral(r, {1, 2}, s, t);
    CHECK(std::isfinite(v.real()));
    CHECK(std::isfinite(v.imag()));
}

TEST_CASE("oracle agrees with quadrature") {
    AtomicPath p = make_generic_atoms(3, 3, 0.5, 3);
    double s = 0.1, t = 0.9;
    for (Word w : std::vector<Word>{{1, 2}, {1, 2, 3}, {2, 1, 3}, {1, 2, 1, 3}}) {
        cplx exact = oracle_iterated_integral(p, w, s, t);
        cplx approx = quadrature_nested(p, w, s, t, 20001);
        CHECK(std::abs(exact - approx) <= 1e-8 * (std::abs(exact) + 1.0));
    }
}

TEST_CASE("fubini residual across orders") {
    double s = 0.2, t = 1.1;
    for (int n = 2; n <= 4; ++n) {
        AtomicPath p = make_generic_atoms(n, 2, 0.5, 40 + n);
        Word w;
        for (int i = 1; i <= n; ++i) w.push_back(i);
        CHECK(fubini_residual(p, w, s, t) <= (n <= 3 ? 1e-9 : 1e-8));
    }
}

TEST_CASE("chen residual") {
    FrequencyGrid grid(16, 2.0 * kPi / 8.0);
    SpectralPath p = sample_fbm(FbmModel(0.3, 1e-2, 2), grid, 91);
    TensorMeta meta{0.3, 1e-2, 0.5, RegMode::Regularized};
    double t = 0.9, u = 0.55, s = 0.2;
    auto t_ts = build_tensor(p, 3, s, t, kReg, meta, 2);
    auto t_tu = build_tensor(p, 3, u, t, kReg, meta, 2);
    auto t_us = build_tensor(p, 3, s, u, kReg, meta, 2);
    CHECK(chen_residual(t_tu, t_us, t_ts) <= 1e-9);

    // degenerate u == s: the identity collapses exactly
    auto t_tu2 = build_tensor(p, 3, s, t, kReg, meta, 2);
    auto t_us2 = build_tensor(p, 3, s, s, kReg, meta, 2);
    CHECK(chen_residual(t_tu2, t_us2, t_ts) == 0.0);

    // mismatched configurations are rejected
    TensorMeta other = meta;
    other.c_reg = 0.7;
    auto t_bad = t_tu;
    t_bad.meta = other;
    CHECK_THROWS_AS(chen_residual(t_bad, t_us, t_ts), std::invalid_argument);
}

TEST_CASE("shuffle residual") {
    FrequencyGrid grid(12, 2.0 * kPi / 8.0);
    SpectralPath p = sample_fbm(FbmModel(0.3, 1e-2, 2), grid, 92);
    TensorMeta meta{0.3, 1e-2, 0.5, RegMode::Regularized};
    auto tensor = build_tensor(p, 3, 0.2, 0.9, kReg, meta, 2);

    CHECK(shuffle_residual(tensor, {1}, {2}) <= 1e-9);
    CHECK(shuffle_residual(tensor, {1}, {1}) <= 1e-9);
    CHECK(shuffle_residual(tensor, {1, 2}, {1}) <= 1e-8);
    CHECK_THROWS_AS(shuffle_residual(tensor, {1, 2}, {1, 1}), std::invalid_argument);
}

TEST_CASE("slope scans are reproducible and validated") {
    // the grid must resolve the smallest gap: K dxi >> 1/min(gaps)
    FrequencyGrid grid(128, 2.0 * kPi / 8.0);
    FbmModel model(0.3, 1e-3, 1);
    std::vector<double> gaps{0.5, 0.25, 0.125, 0.0625};
    auto r1 = holder_scan(model, grid, kReg, {1}, gaps, 0.1, 400, 7, 2);
    auto r2 = holder_scan(model, grid, kReg, {1}, gaps, 0.1, 400, 7, 1);
    CHECK(r1.slope == r2.slope);  // identical across thread counts
    CHECK(r1.points.size() == 4);
    // level-one slope is 2 alpha up to MC and grid error
    CHECK_THAT(r1.slope, Catch::Matchers::WithinAbs(0.6, 0.15));

    CHECK_THROWS_AS(holder_scan(model, grid, kReg, {1}, {0.5, 0.25}, 0.1, 200, 7, 1),
                    std::invalid_argument);  // too few abscissae
    CHECK_THROWS_AS(holder_scan(model, grid, kReg, {1}, gaps, 0.1, 50, 7, 1),
                    std::invalid_argument);  // M too small
}

TEST_CASE("two-variable Hoelder norm") {
    std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<std::vector<double>> zero(5, std::vector<double>(5, 0.0));
    CHECK(holder_norm_2var(times, zero, 0.5) == 0.0);

    auto fill = [&](auto f) {
        std::vector<std::vector<double>> v(5, std::vector<double>(5, 0.0));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) v[i][j] = f(times[i], times[j]);
        return v;
    };
    CHECK_THAT(holder_norm_2var(times, fill([](double a, double b) { return a - b; }), 1.0),
               Catch::Matchers::WithinRel(1.0, 1e-12));

    // |t-s|^{0.6} at kappa = 0.5: the sup sits at the largest gap
    auto v = fill([](double a, double b) { return std::pow(std::abs(a - b), 0.6); });
    CHECK_THAT(holder_norm_2var(times, v, 0.5), Catch::Matchers::WithinRel(std::pow(1.0, 0.1), 1e-12));

    CHECK_THROWS_AS(holder_norm_2var(times, zero, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(holder_norm_2var(times, zero, 0.0), std::invalid_argument);
    auto bad = zero;
    bad[2][2] = 1.0;
    CHECK_THROWS_AS(holder_norm_2var(times, bad, 0.5), std::invalid_argument);
}

TEST_CASE("generic atoms are certified non-resonant") {
    AtomicPath p = make_generic_atoms(4, 3, 0.5, 123);
    // brute-force recheck depth 4 multiset sums
    std::vector<int> ks;
    for (auto& tab : p.atoms)
        for (auto& a : tab) ks.push_back(a.k);
    std::vector<long long> sums{0};
    for (int depth = 1; depth <= 4; ++depth) {
        std::vector<long long> next;
        for (long long s : sums)
            for (int k : ks) {
                CHECK(s + k != 0);
                next.push_back(s + k);
            }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        sums = std::move(next);
    }
}
