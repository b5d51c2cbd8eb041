#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "fno/spectral.hpp"
#include "fno/util.hpp"
#include "fno/verify.hpp"

using namespace fno;

TEST_CASE("normalization constant") {
    // independent route: reflection formula for Gamma(-2a)
    auto gamma_reflected = [](double a) {
        return -kPi / (std::sin(2.0 * kPi * a) * std::tgamma(1.0 + 2.0 * a));
    };
    for (double a : {0.1, 0.2, 0.25, 0.3, 0.4, 0.45, 0.55, 0.6, 0.7, 0.75, 0.8, 0.9}) {
        double c = c_alpha(a);
        CHECK(c > 0.0);
        double oracle = 0.5 * std::sqrt(-1.0 / (std::cos(kPi * a) * gamma_reflected(a)));
        CHECK_THAT(c, Catch::Matchers::WithinRel(oracle, 1e-12));
    }
    CHECK_THAT(c_alpha(0.25), Catch::Matchers::WithinRel(0.3158093, 1e-6));

    // the constant must normalize the continuum variance to |t|^{2a}
    for (double a : {0.25, 0.4, 0.7}) {
        double var1 = covariance_quadrature(a, 1e-7, 1.0, 1.0);
        CHECK_THAT(var1, Catch::Matchers::WithinAbs(1.0, 2e-3));
    }

    CHECK_THROWS_AS(c_alpha(0.5), std::domain_error);
    CHECK_THROWS_AS(c_alpha(0.0), std::invalid_argument);
    CHECK_THROWS_AS(c_alpha(1.2), std::invalid_argument);
}

TEST_CASE("path evaluation basics") {
    FrequencyGrid grid(4, 0.75);
    SpectralPath p;
    p.d = 1;
    p.grid = grid;
    p.amp = {{cplx{1.0, 0.0}, {}, {}, {}}};  // single atom at xi = 0.75

    CHECK(p.eval(1, 0.0) == 0.0);
    double w = 0.75, t = 1.3;
    CHECK_THAT(p.eval(1, t), Catch::Matchers::WithinRel(2.0 * std::sin(w * t) / w, 1e-13));
    // real amplitudes give an odd path
    CHECK_THAT(p.eval(1, -t), Catch::Matchers::WithinRel(-p.eval(1, t), 1e-12));

    CHECK_THROWS_AS(p.eval(2, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyGrid(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyGrid(4, 0.0), std::invalid_argument);
}

TEST_CASE("sampled paths: reproducibility and zero at origin") {
    FrequencyGrid grid(64, 2.0 * kPi / 8.0);
    FbmModel model(0.35, 1e-2, 2);
    SpectralPath a = sample_fbm(model, grid, 7);
    SpectralPath b = sample_fbm(model, grid, 7);
    CHECK(a.amp == b.amp);  // byte-identical spectra
    SpectralPath c = sample_fbm(model, grid, 8);
    CHECK(a.amp != c.amp);
    CHECK(a.eval(1, 0.0) == 0.0);
    CHECK(a.eval(2, 0.0) == 0.0);

    // shared noise across eta values with the same seed
    SpectralPath e1 = sample_fbm(FbmModel(0.35, 1e-2, 1), grid, 7);
    SpectralPath e2 = sample_fbm(FbmModel(0.35, 2e-2, 1), grid, 7);
    for (int k = 1; k <= grid.K; ++k) {
        double ratio = std::abs(e2.amp[0][k - 1]) / std::abs(e1.amp[0][k - 1]);
        CHECK_THAT(ratio, Catch::Matchers::WithinRel(std::exp(-1e-2 * grid.xi(k)), 1e-10));
    }
}

TEST_CASE("exact covariance: symmetry and agreement with sampling") {
    FrequencyGrid grid(256, 2.0 * kPi / 8.0);
    FbmModel model(0.3, 1e-3, 2);

    CHECK(exact_covariance(model, grid, 1, 1, 0.0, 0.0) == 0.0);
    CHECK_THAT(exact_covariance(model, grid, 1, 1, 0.3, 0.8),
               Catch::Matchers::WithinRel(exact_covariance(model, grid, 1, 1, 0.8, 0.3), 1e-12));
    CHECK(exact_covariance(model, grid, 1, 2, 0.3, 0.8) == 0.0);

    // empirical variance within 5 standard errors of the exact grid sum
    const int M = 10000;
    std::vector<double> v1(M), v2(M), cross(M);
    for (int i = 0; i < M; ++i) {
        SpectralPath p = sample_fbm(model, grid, substream(31, {0u, static_cast<std::uint64_t>(i)}));
        double b1 = p.eval(1, 1.0), b2 = p.eval(2, 1.0);
        v1[i] = b1 * b1;
        v2[i] = b2 * b2;
        cross[i] = b1 * b2;
    }
    auto mean_se = [&](const std::vector<double>& xs) {
        PairwiseSum<double> m;
        for (double x : xs) m.add(x);
        double mean = m.total() / xs.size();
        PairwiseSum<double> var;
        for (double x : xs) var.add((x - mean) * (x - mean));
        return std::pair<double, double>{mean, std::sqrt(var.total() / (xs.size() - 1) / xs.size())};
    };
    auto [m1, se1] = mean_se(v1);
    double target = exact_covariance(model, grid, 1, 1, 1.0, 1.0);
    CHECK(std::abs(m1 - target) <= 5.0 * se1);
    auto [mc, sec] = mean_se(cross);
    CHECK(std::abs(mc) <= 5.0 * sec);  // independent components
}

TEST_CASE("self-similarity holds exactly on rescaled grids") {
    // Var of B_{lambda t} under smoothing lambda*eta on grid dxi equals
    // lambda^{2a} times the Var of B_t under eta on grid lambda*dxi: the
    // grid sums map term by term
    double a = 0.3, eta = 1e-2, lambda = 2.5, t = 0.7;
    FrequencyGrid g1(128, 0.1);
    FrequencyGrid g2(128, 0.1 * lambda);
    double lhs = exact_covariance(FbmModel(a, lambda * eta, 1), g1, 1, 1, lambda * t, lambda * t);
    double rhs = std::pow(lambda, 2 * a) * exact_covariance(FbmModel(a, eta, 1), g2, 1, 1, t, t);
    CHECK_THAT(lhs, Catch::Matchers::WithinRel(rhs, 1e-12));
}

TEST_CASE("antisymmetric fBm") {
    FrequencyGrid grid(2048, 0.05);
    double a = 0.3, eta = 1e-3;
    SpectralPath z = sample_antisym_fbm(a, eta, grid, 17);
    REQUIRE(z.d == 2);
    // identical marginal amplitudes
    for (int k = 1; k <= grid.K; ++k)
        CHECK_THAT(std::abs(z.amp[1][k - 1]), Catch::Matchers::WithinRel(std::abs(z.amp[0][k - 1]), 1e-12));

    // cross-covariance at (0.3, 0.7) matches the closed formula within the
    // discretization budget
    double got = exact_antisym_cross_covariance(a, eta, grid, 0.3, 0.7);
    double want = antisym_cross_covariance_formula(a, 0.3, 0.7);
    CHECK_THAT(got, Catch::Matchers::WithinAbs(want, 0.02 * std::abs(want) + 5e-3));

    // the formula vanishes on the diagonal, and so does the grid sum
    CHECK(std::abs(antisym_cross_covariance_formula(a, 0.5, 0.5)) < 1e-15);
    CHECK(std::abs(exact_antisym_cross_covariance(a, eta, grid, 0.5, 0.5)) < 1e-15);

    // empirical cross-covariance against the grid-exact value
    const int M = 4000;
    std::vector<double> prod(M);
    for (int i = 0; i < M; ++i) {
        SpectralPath p = sample_antisym_fbm(a, eta, grid, substream(5, {1u, static_cast<std::uint64_t>(i)}));
        prod[i] = p.eval(1, 0.3) * p.eval(2, 0.7);
    }
    PairwiseSum<double> m;
    for (double x : prod) m.add(x);
    double mean = m.total() / M;
    PairwiseSum<double> var;
    for (double x : prod) var.add((x - mean) * (x - mean));
    double se = std::sqrt(var.total() / (M - 1) / M);
    CHECK(std::abs(mean - got) <= 5.0 * se);
}

TEST_CASE("spectrum persistence round trip") {
    FrequencyGrid grid(16, 0.3);
    SpectralPath p = sample_fbm(FbmModel(0.4, 1e-2, 2), grid, 23);
    auto dir = std::filesystem::temp_directory_path() / "fno_spectral_test";
    std::filesystem::create_directories(dir);
    save_spectrum_csv((dir / "s.csv").string(), p);
    save_spectrum_meta((dir / "s.json").string(), p, SpectrumMeta{0.4, 1e-2, 23});
    SpectrumMeta meta;
    SpectralPath q = load_spectrum_csv((dir / "s.csv").string(), (dir / "s.json").string(), &meta);
    CHECK(q.d == p.d);
    CHECK(q.grid.K == p.grid.K);
    CHECK(q.amp == p.amp);  // full-precision round trip
    CHECK(meta.alpha == 0.4);
    CHECK(meta.seed == 23);
}
