#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lathresh/gmm.hpp"
#include "lathresh/histogram.hpp"
#include "lathresh/rng.hpp"

using namespace lathresh;

namespace {

Mixture reference_mixture() {
    Mixture mix;
    mix.components = {{0.094, 15.0, 6.0},
                      {0.1816, 63.0, 29.0},
                      {0.2733, 93.0, 10.0},
                      {0.4503, 163.0, 30.0}};
    return mix;
}

Mixture random_mixture(std::mt19937_64& rng, int classes) {
    Mixture mix;
    mix.components.resize(classes);
    for (auto& c : mix.components) {
        c.p = 0.05 + 0.4 * uniform53(rng);
        c.mu = 255.0 * uniform53(rng);
        c.sigma = 2.0 + 40.0 * uniform53(rng);
    }
    return mix;
}

NormalizedHistogram random_histogram(std::mt19937_64& rng) {
    NormalizedHistogram hist;
    double total = 0.0;
    for (double& b : hist.bins) {
        b = uniform53(rng);
        total += b;
    }
    for (double& b : hist.bins) b /= total;
    return hist;
}

}  // namespace

TEST_CASE("normal_pdf has the standard normal peak") {
    CHECK(normal_pdf(0.0, 0.0, 1.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
    // Scale: peak of N(mu, sigma) is 1/(sqrt(2*pi)*sigma).
    CHECK(normal_pdf(100.0, 100.0, 4.0) ==
          doctest::Approx(0.3989422804014327 / 4.0).epsilon(1e-15));
    // Symmetry around the mean.
    CHECK(normal_pdf(97.0, 100.0, 4.0) == normal_pdf(103.0, 100.0, 4.0));
}

TEST_CASE("normal_pdf integrates to one") {
    // Midpoint rule over +-10 sigma at fine resolution.
    const double mu = 128.0, sigma = 7.0;
    const int n = 200000;
    const double lo = mu - 10 * sigma, hi = mu + 10 * sigma;
    const double dx = (hi - lo) / n;
    double integral = 0.0;
    for (int i = 0; i < n; ++i) integral += normal_pdf(lo + (i + 0.5) * dx, mu, sigma) * dx;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mixture_pdf matches a hand summation") {
    const Mixture mix = reference_mixture();
    CHECK(mixture_pdf(mix, 163.0) ==
          doctest::Approx(0.0059946641981193172).epsilon(1e-15));

    double by_hand = 0.0;
    for (const auto& c : mix.components) by_hand += c.p * normal_pdf(163.0, c.mu, c.sigma);
    CHECK(mixture_pdf(mix, 163.0) == by_hand);
}

TEST_CASE("mixture_pdf at an isolated mean is dominated by its component") {
    Mixture mix;
    mix.components = {{0.5, 40.0, 3.0}, {0.5, 220.0, 3.0}};
    const double expected = 0.5 * 0.3989422804014327 / 3.0;
    CHECK(mixture_pdf(mix, 40.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(mixture_pdf(mix, 220.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("cost_j equals the brute-force mean squared error plus penalty") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        const Mixture mix = random_mixture(rng, 2 + static_cast<int>(rng() % 3));
        const NormalizedHistogram hist = random_histogram(rng);

        double sse = 0.0;
        for (int g = 0; g < kGrayLevels; ++g) {
            const double d = mixture_pdf(mix, g) - hist.bins[g];
            sse += d * d;
        }
        const double expected = sse / kGrayLevels + 0.01 * std::abs(mix.prior_sum() - 1.0);
        CHECK(cost_j(mix, hist, CostConfig::defaults()) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("cost_j honors a restricted domain and the empty-domain default") {
    std::mt19937_64 rng(32);
    const Mixture mix = random_mixture(rng, 3);
    const NormalizedHistogram hist = random_histogram(rng);

    CostConfig cfg;
    cfg.domain = {0, 50, 100};
    double sse = 0.0;
    for (int g : cfg.domain) {
        const double d = mixture_pdf(mix, g) - hist.bins[g];
        sse += d * d;
    }
    const double expected = sse / 3.0 + 0.01 * std::abs(mix.prior_sum() - 1.0);
    CHECK(cost_j(mix, hist, cfg) == doctest::Approx(expected).epsilon(1e-12));

    CostConfig empty;
    empty.domain.clear();
    CHECK(cost_j(mix, hist, empty) ==
          doctest::Approx(cost_j(mix, hist, CostConfig::defaults())).epsilon(1e-15));
}

TEST_CASE("cost_j penalty scales with the prior-sum excess") {
    Mixture mix;
    mix.components = {{0.55, 60.0, 8.0}, {0.55, 190.0, 8.0}};  // sums to 1.1
    const NormalizedHistogram hist = synth_histogram(mix);

    CostConfig no_penalty;
    no_penalty.omega = 0.0;
    const double mse = cost_j(mix, hist, no_penalty);
    const double j = cost_j(mix, hist, CostConfig::defaults());
    CHECK(j - mse == doctest::Approx(0.01 * 0.1).epsilon(1e-9));
}

TEST_CASE("cost_j of a unit-mass mixture against its own synth is tiny") {
    Mixture mix;
    mix.components = {{0.5, 60.0, 8.0}, {0.5, 190.0, 8.0}};
    const NormalizedHistogram hist = synth_histogram(mix);
    CHECK(cost_j(mix, hist, CostConfig::defaults()) <= 1e-9);
}

TEST_CASE("thresholds: equal symmetric components split at the midpoint") {
    Mixture mix;
    mix.components = {{0.5, 0.0, 10.0}, {0.5, 100.0, 10.0}};
    CHECK(thresholds(mix) == std::vector<int>{50});

    mix.components = {{0.3, 30.0, 7.0}, {0.3, 70.0, 7.0}};
    CHECK(thresholds(mix) == std::vector<int>{50});

    // Order of the components must not matter.
    std::swap(mix.components[0], mix.components[1]);
    CHECK(thresholds(mix) == std::vector<int>{50});
}

TEST_CASE("thresholds: unequal weights shift the crossing toward the lighter class") {
    Mixture mix;
    mix.components = {{0.9, 100.0, 10.0}, {0.1, 140.0, 10.0}};
    const auto t = thresholds(mix);
    REQUIRE(t.size() == 1);
    CHECK(t[0] == 126);

    // The defining inequality holds at T and fails just below it.
    const auto& lo = mix.components[0];
    const auto& hi = mix.components[1];
    CHECK(hi.p * normal_pdf(126, hi.mu, hi.sigma) >=
          lo.p * normal_pdf(126, lo.mu, lo.sigma));
    CHECK(hi.p * normal_pdf(125, hi.mu, hi.sigma) <
          lo.p * normal_pdf(125, lo.mu, lo.sigma));
}

TEST_CASE("thresholds of the reference mixtures") {
    CHECK(thresholds(reference_mixture()) == std::vector<int>{27, 76, 113});

    Mixture oracle;
    oracle.components = {{0.2, 40.0, 8.0},
                         {0.2, 100.0, 10.0},
                         {0.3, 150.0, 12.0},
                         {0.3, 220.0, 6.0}};
    CHECK(thresholds(oracle) == std::vector<int>{67, 123, 196});
}

TEST_CASE("thresholds sit strictly between adjacent means") {
    const Mixture sorted = sorted_by_mu(reference_mixture());
    const auto t = thresholds(sorted);
    REQUIRE(t.size() == 3);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(t[i] > sorted.components[i].mu);
        CHECK(t[i] <= sorted.components[i + 1].mu);
    }
}

TEST_CASE("thresholds fall back to the rounded midpoint without a crossing") {
    // The upper component is so light that its weighted density never
    // reaches the wide lower one inside (100, 140].
    Mixture mix;
    mix.components = {{0.5, 100.0, 30.0}, {0.001, 140.0, 1.0}};
    bool crossed = false;
    for (int x = 101; x <= 140; ++x)
        crossed |= mix.components[1].p * normal_pdf(x, 140.0, 1.0) >=
                   mix.components[0].p * normal_pdf(x, 100.0, 30.0);
    REQUIRE_FALSE(crossed);
    CHECK(thresholds(mix) == std::vector<int>{120});
}

TEST_CASE("thresholds agree with an integer scan oracle on random mixtures") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 100; ++rep) {
        const int k = 2 + static_cast<int>(rng() % 3);
        Mixture mix;
        double mu = 10.0 + 30.0 * uniform53(rng);
        for (int i = 0; i < k; ++i) {
            GaussianComponent c;
            c.mu = mu;
            c.sigma = 2.0 + 13.0 * uniform53(rng);
            c.p = 0.1 + 0.4 * uniform53(rng);
            mix.components.push_back(c);
            mu += 25.0 + 40.0 * uniform53(rng);
        }

        // Independent scan straight from the definition.
        std::vector<int> expected;
        for (int i = 0; i + 1 < k; ++i) {
            const auto& lo = mix.components[i];
            const auto& hi = mix.components[i + 1];
            int t = -1;
            for (int x = static_cast<int>(std::floor(lo.mu)) + 1;
                 x <= static_cast<int>(std::floor(hi.mu)); ++x) {
                if (hi.p * normal_pdf(x, hi.mu, hi.sigma) >=
                    lo.p * normal_pdf(x, lo.mu, lo.sigma)) {
                    t = x;
                    break;
                }
            }
            if (t < 0) t = static_cast<int>(std::lround((lo.mu + hi.mu) / 2.0));
            expected.push_back(t);
        }

        const auto got = thresholds(mix);
        CHECK(got == expected);
        for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i] > got[i - 1]);
    }
}

TEST_CASE("thresholds are invariant to a common prior scale") {
    Mixture mix = reference_mixture();
    const auto base = thresholds(mix);
    for (auto& c : mix.components) c.p *= 3.7;
    CHECK(thresholds(mix) == base);
}

TEST_CASE("thresholds rejects degenerate inputs") {
    Mixture one;
    one.components = {{1.0, 128.0, 10.0}};
    CHECK_THROWS_AS(thresholds(one), std::invalid_argument);

    Mixture dup;
    dup.components = {{0.5, 100.0, 10.0}, {0.5, 100.0, 5.0}};
    CHECK_THROWS_AS(thresholds(dup), std::invalid_argument);
}

TEST_CASE("classify counts thresholds at or below the level") {
    const std::vector<int> t{50, 150};
    CHECK(classify(t, 0) == 0);
    CHECK(classify(t, 49) == 0);
    CHECK(classify(t, 50) == 1);  // boundary pixel joins the higher class
    CHECK(classify(t, 149) == 1);
    CHECK(classify(t, 150) == 2);
    CHECK(classify(t, 255) == 2);

    int prev = 0;
    for (int x = 0; x < kGrayLevels; ++x) {
        const int c = classify(t, x);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("classify(mix, x) matches classify over thresholds(mix)") {
    const Mixture mix = reference_mixture();
    const auto t = thresholds(mix);
    for (int x = 0; x < kGrayLevels; x += 5) CHECK(classify(mix, x) == classify(t, x));
}

TEST_CASE("sorted_by_mu orders components without touching values") {
    Mixture mix;
    mix.components = {{0.3, 200.0, 5.0}, {0.2, 10.0, 6.0}, {0.5, 90.0, 7.0}};
    const Mixture s = sorted_by_mu(mix);
    REQUIRE(s.classes() == 3);
    CHECK(s.components[0].mu == 10.0);
    CHECK(s.components[1].mu == 90.0);
    CHECK(s.components[2].mu == 200.0);
    CHECK(s.components[0].p == 0.2);
    CHECK(s.components[2].sigma == 5.0);
    CHECK(s.prior_sum() == doctest::Approx(mix.prior_sum()).epsilon(1e-15));
}
