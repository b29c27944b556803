#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "lathresh/bench.hpp"
#include "lathresh/histogram.hpp"

using namespace lathresh;

namespace {

NormalizedHistogram two_mode_histogram() {
    Mixture mix;
    mix.components = {{0.5, 60.0, 8.0}, {0.5, 190.0, 8.0}};
    return synth_histogram(mix);
}

CompareConfig quick_config() {
    CompareConfig cfg;
    cfg.classes = 2;
    cfg.la.iterations = 100;  // keep the la cells cheap
    return cfg;
}

}  // namespace

TEST_CASE("random_init is reproducible and respects its ranges") {
    const Mixture a = random_init(4, 99);
    const Mixture b = random_init(4, 99);
    REQUIRE(a.classes() == 4);
    CHECK(a.prior_sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < 4; ++i) {
        CHECK(a.components[i].mu >= 0.0);
        CHECK(a.components[i].mu <= 255.0);
        CHECK(a.components[i].sigma >= 4.0);
        CHECK(a.components[i].sigma <= 64.0);
        CHECK(a.components[i].p == b.components[i].p);
        CHECK(a.components[i].mu == b.components[i].mu);
        CHECK(a.components[i].sigma == b.components[i].sigma);
    }
    CHECK(random_init(4, 100).components[0].mu != a.components[0].mu);
    CHECK_THROWS_AS(random_init(0, 1), std::invalid_argument);
}

TEST_CASE("run_compare emits repeats x methods rows in method-major order") {
    const NormalizedHistogram hist = two_mode_histogram();
    CompareConfig cfg = quick_config();
    cfg.methods = {"la", "em", "lm"};
    cfg.repeats = 3;

    const auto rows = run_compare(hist, cfg);
    REQUIRE(rows.size() == 9);
    const std::string order[] = {"la", "la", "la", "em", "em", "em",
                                 "lm", "lm", "lm"};
    for (int i = 0; i < 9; ++i) {
        CHECK(rows[i].method == order[i]);
        CHECK(rows[i].run == i % 3);
        CHECK(rows[i].params.size() == 6);
        CHECK(rows[i].init.size() == 6);
        CHECK(std::isfinite(rows[i].final_j));
        // Fitted params come back sorted by mu.
        CHECK(rows[i].params[1] <= rows[i].params[4]);
    }
}

TEST_CASE("shared-random mode hands every method the same per-run init") {
    const NormalizedHistogram hist = two_mode_histogram();
    CompareConfig cfg = quick_config();
    cfg.methods = {"la", "em", "lm"};
    cfg.repeats = 2;
    cfg.init_mode = InitMode::kSharedRandom;

    const auto rows = run_compare(hist, cfg);
    REQUIRE(rows.size() == 6);
    for (int run = 0; run < 2; ++run) {
        const auto& la = rows[run];
        const auto& em = rows[2 + run];
        const auto& lm = rows[4 + run];
        CHECK(la.init == em.init);
        CHECK(em.init == lm.init);
        CHECK(la.seed == em.seed);
    }
    CHECK(rows[0].init != rows[1].init);  // distinct runs draw distinct inits
}

TEST_CASE("per-run-random mode differs across methods") {
    const NormalizedHistogram hist = two_mode_histogram();
    CompareConfig cfg = quick_config();
    cfg.methods = {"em", "lm"};
    cfg.repeats = 1;
    cfg.init_mode = InitMode::kPerRunRandom;

    const auto rows = run_compare(hist, cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].init != rows[1].init);
}

TEST_CASE("fixed init mode uses the given mixture everywhere") {
    const NormalizedHistogram hist = two_mode_histogram();
    CompareConfig cfg = quick_config();
    cfg.methods = {"em", "lm"};
    cfg.repeats = 2;
    cfg.init_mode = InitMode::kFixed;
    Mixture fixed;
    fixed.components = {{0.5, 80.0, 20.0}, {0.5, 170.0, 20.0}};
    cfg.fixed_init = fixed;

    const auto rows = run_compare(hist, cfg);
    const std::vector<double> expected{0.5, 80.0, 20.0, 0.5, 170.0, 20.0};
    for (const auto& row : rows) CHECK(row.init == expected);
}

TEST_CASE("run_compare validates its configuration") {
    const NormalizedHistogram hist = two_mode_histogram();
    CompareConfig cfg = quick_config();
    cfg.methods = {"em"};
    cfg.repeats = 0;
    CHECK_THROWS_AS(run_compare(hist, cfg), std::invalid_argument);

    cfg = quick_config();
    cfg.methods = {};
    CHECK_THROWS_AS(run_compare(hist, cfg), std::invalid_argument);

    cfg = quick_config();
    cfg.methods = {"annealing"};
    CHECK_THROWS_AS(run_compare(hist, cfg), std::invalid_argument);

    cfg = quick_config();
    cfg.methods = {"em"};
    cfg.init_mode = InitMode::kFixed;  // no fixed_init supplied
    CHECK_THROWS_AS(run_compare(hist, cfg), std::invalid_argument);

    Mixture wrong;
    wrong.components = {{1.0, 100.0, 10.0}};
    cfg.fixed_init = wrong;
    CHECK_THROWS_AS(run_compare(hist, cfg), std::invalid_argument);
}

TEST_CASE("run_compare repeats the same batch bit-identically") {
    const NormalizedHistogram hist = two_mode_histogram();
    CompareConfig cfg = quick_config();
    cfg.methods = {"la", "em"};
    cfg.repeats = 2;
    cfg.seed = 7;

    const auto a = run_compare(hist, cfg);
    const auto b = run_compare(hist, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].final_j == b[i].final_j);
        CHECK(a[i].params == b[i].params);
        CHECK(a[i].init == b[i].init);
        CHECK(a[i].iters_converge == b[i].iters_converge);
        CHECK(a[i].flags == b[i].flags);
    }
}

TEST_CASE("a failing cell becomes a failure row instead of aborting the batch") {
    const NormalizedHistogram hist = two_mode_histogram();
    CompareConfig cfg = quick_config();
    cfg.methods = {"em", "lm"};
    cfg.repeats = 2;
    cfg.em.max_iter = 0;  // fit_em rejects this, so every em cell fails

    const auto rows = run_compare(hist, cfg);
    REQUIRE(rows.size() == 4);
    for (int run = 0; run < 2; ++run) {
        CHECK(rows[run].flags.rfind("failed:", 0) == 0);
        CHECK(std::isnan(rows[run].final_j));
        for (double v : rows[run].params) CHECK(std::isnan(v));
    }
    // The lm cells are untouched.
    CHECK(rows[2].flags.rfind("failed", 0) != 0);
    CHECK(std::isfinite(rows[2].final_j));
}

TEST_CASE("compare csv round-trips rows through write and read") {
    const NormalizedHistogram hist = two_mode_histogram();
    CompareConfig cfg = quick_config();
    cfg.methods = {"la", "lm"};
    cfg.repeats = 2;
    const auto rows = run_compare(hist, cfg);

    std::stringstream ss;
    write_compare_csv(rows, cfg.classes, ss);

    std::string header;
    std::getline(ss, header);
    CHECK(header ==
          "method,run,seed,final_J,iters_converge,wall_millis,"
          "p1,mu1,sigma1,p2,mu2,sigma2,"
          "init_p1,init_mu1,init_sigma1,init_p2,init_mu2,init_sigma2,flags");
    // The summary block is commented out.
    bool saw_summary = false;
    std::string line;
    while (std::getline(ss, line))
        if (line.rfind("# ", 0) == 0) saw_summary = true;
    CHECK(saw_summary);

    ss.clear();
    ss.seekg(0);
    const auto back = read_compare_csv(ss);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].method == rows[i].method);
        CHECK(back[i].run == rows[i].run);
        CHECK(back[i].seed == rows[i].seed);
        CHECK(back[i].final_j == rows[i].final_j);  // %.17g preserves doubles
        CHECK(back[i].iters_converge == rows[i].iters_converge);
        CHECK(back[i].params == rows[i].params);
        CHECK(back[i].init == rows[i].init);
        CHECK(back[i].flags == rows[i].flags);
    }
}

TEST_CASE("read_compare_csv rejects foreign input") {
    std::stringstream bad("not,a,compare,csv\n");
    CHECK_THROWS_AS(read_compare_csv(bad), std::invalid_argument);
    std::stringstream empty;
    CHECK_THROWS_AS(read_compare_csv(empty), std::invalid_argument);
}
