#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>

#include "helpers.hpp"
#include "lmart/cli.hpp"
#include "lmart/harness.hpp"
#include "lmart/serialize.hpp"

using namespace lmart;
using testutil::code_of;
using testutil::elem;

namespace {

HarnessConfig small_config() {
    HarnessConfig cfg;
    cfg.seed = 42;
    cfg.omega_size = 6;
    cfg.depth = 3;
    cfg.trials = 24;
    return cfg;
}

std::string tmp_file(const std::string& stem) {
    return (std::filesystem::temp_directory_path() / stem).string();
}

}  // namespace

TEST_CASE("sub-seeding is deterministic and spreads") {
    CHECK(trial_seed(42, 0) == trial_seed(42, 0));
    CHECK(trial_seed(42, 0) != trial_seed(42, 1));
    CHECK(trial_seed(42, 0) != trial_seed(43, 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t t = 0; t < 1000; ++t) seen.insert(trial_seed(42, t));
    CHECK(seen.size() == 1000);
}

TEST_CASE("rng primitives stay in range") {
    Rng rng(7);
    bool heads = false, tails = false;
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(rng.index(5) < 5);
        const double r = rng.range(-2.0, 3.0);
        CHECK(r >= -2.0);
        CHECK(r < 3.0);
        (rng.coin() ? heads : tails) = true;
    }
    CHECK(heads);
    CHECK(tails);
}

TEST_CASE("config validation bounds every knob") {
    auto expect_invalid = [](auto&& tweak) {
        HarnessConfig cfg;
        tweak(cfg);
        return code_of([&] { validate(cfg); }) == errc::config_invalid;
    };
    CHECK(expect_invalid([](HarnessConfig& c) { c.trials = 0; }));
    CHECK(expect_invalid([](HarnessConfig& c) { c.trials = 2000000; }));
    CHECK(expect_invalid([](HarnessConfig& c) { c.omega_size = 0; }));
    CHECK(expect_invalid([](HarnessConfig& c) { c.omega_size = 5000; }));
    CHECK(expect_invalid([](HarnessConfig& c) { c.depth = 0; }));
    CHECK(expect_invalid([](HarnessConfig& c) { c.depth = 33; }));
    CHECK(expect_invalid([](HarnessConfig& c) { c.lambda_grid.clear(); }));
    CHECK(expect_invalid([](HarnessConfig& c) { c.lambda_grid = {0.5, -1.0}; }));
    CHECK(expect_invalid([](HarnessConfig& c) { c.tol = 0.0; }));
    CHECK_NOTHROW(validate(HarnessConfig{}));
}

TEST_CASE("generators produce valid structures") {
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        SpacePtr sp = random_space(rng, 1 + static_cast<int>(rng.index(10)));
        for (double w : sp->weights) CHECK(w > 0.0);
        Filtration filt = random_filtration(rng, sp, 1 + static_cast<int>(rng.index(6)));
        StoppingTime tau = random_stopping_time(rng, filt);
        CHECK(tau.horizon() == filt.depth());
        TransformCoefficients v = random_predictable_coefficients(rng, filt, 1.5);
        for (std::size_t k = 1; k <= filt.depth(); ++k) {
            CHECK(in_range_of(predictable_level(filt, k), v.coeffs[k - 1]));
            CHECK(max_abs(v.coeffs[k - 1]) <= 1.5);
        }
    }
    Martingale f = generate_random_martingale(small_config());
    CHECK(is_martingale(f));
    Martingale again = generate_random_martingale(small_config());
    CHECK(f.space()->weights == again.space()->weights);
    for (std::size_t k = 1; k <= f.depth(); ++k) CHECK(f.at(k).values == again.at(k).values);
    HarnessConfig other = small_config();
    other.seed = 43;
    CHECK(generate_random_martingale(other).at(1).values != f.at(1).values);
}

TEST_CASE("the default suite passes clean") {
    SuiteReport report = run_suite(small_config());
    CHECK(report.pass);
    CHECK_FALSE(report.checks.empty());
    for (const auto& c : report.checks) {
        INFO(c.name);
        CHECK(c.failures == 0);
        CHECK(c.trials > 0);
    }
    std::set<std::string> names;
    for (const auto& c : report.checks) names.insert(c.name);
    for (const char* expect :
         {"rademacher_orthonormality", "gundy_reconstruction", "gundy_parts_martingale",
          "bound_w_sup_norm", "bound_u_one_norm", "bound_stop_mass", "weak_type_maximal",
          "weak_type_square", "thm411_ratio", "generator_martingale", "optional_stopping",
          "krickeberg_reconstruction", "lemma_band_join_delta", "abel_band_identity",
          "lemma_threshold_positivity", "transform_martingale", "transform_band_inclusion",
          "maximal_quasi_linearity", "square_quasi_linearity", "norm_monotone_in_p",
          "rademacher_randomized", "holder_step_pair", "power_gap_bounds", "riemann_refinement"})
        CHECK(names.count(expect) == 1);
}

TEST_CASE("suite runs are reproducible byte for byte") {
    SuiteReport a = run_suite(small_config());
    SuiteReport b = run_suite(small_config());
    CHECK(suite_report_to_json(a).dump(2) == suite_report_to_json(b).dump(2));
}

TEST_CASE("a corrupted generator is caught and attributed") {
    HarnessConfig cfg = small_config();
    std::set<std::uint64_t> corrupted;
    SuiteReport report = run_suite(cfg, [&](Martingale& f, long t) {
        if (t % 3 != 0) return;
        corrupted.insert(trial_seed(cfg.seed, static_cast<std::uint64_t>(t)));
        f.values.back() = 1.5 * f.values.back();  // keeps adaptedness, breaks the mean
    });
    CHECK_FALSE(report.pass);
    const CheckRecord* gen = nullptr;
    for (const auto& c : report.checks)
        if (c.name == "generator_martingale") gen = &c;
    REQUIRE(gen != nullptr);
    CHECK(gen->failures == 8);  // trials 0, 3, ..., 21 of 24
    // the worst optional-stopping deviation must come from a corrupted trial
    for (const auto& c : report.checks)
        if (c.name == "optional_stopping") {
            CHECK(c.failures > 0);
            CHECK(corrupted.count(c.worst_seed) == 1);
        }
}

TEST_CASE("martingales survive a JSON round trip") {
    Martingale f = generate_random_martingale(small_config());
    njson doc = martingale_to_json(f);
    CHECK(doc["schema"] == "martingale/1");
    Martingale back = martingale_from_json(doc);
    CHECK(back.filtration == f.filtration);
    CHECK(back.space()->weights == f.space()->weights);
    for (std::size_t k = 1; k <= f.depth(); ++k) CHECK(back.at(k).values == f.at(k).values);

    njson wrong = doc;
    wrong["schema"] = "martingale/2";
    CHECK(code_of([&] { martingale_from_json(wrong); }) == errc::parse_error);
    njson missing = doc;
    missing.erase("values");
    CHECK(code_of([&] { martingale_from_json(missing); }) == errc::parse_error);
    njson short_values = doc;
    short_values["values"].erase(0);
    CHECK(code_of([&] { martingale_from_json(short_values); }) == errc::parse_error);
}

TEST_CASE("step functions survive a JSON round trip") {
    Rng rng(12);
    SpacePtr sp = random_space(rng, 4);
    StepFunction f = random_step_function(rng, sp, 6, -2.0, 2.0);
    njson doc = step_function_to_json(f);
    CHECK(doc["schema"] == "stepfunction/1");
    StepFunction back = step_function_from_json(doc);
    CHECK(back.partition.cuts == f.partition.cuts);
    REQUIRE(back.pieces.size() == f.pieces.size());
    for (std::size_t i = 0; i < f.pieces.size(); ++i)
        CHECK(back.pieces[i].values == f.pieces[i].values);
}

TEST_CASE("decomposition serialization carries the stop bands") {
    SpacePtr sp = make_space({0.5, 0.5});
    Filtration filt = make_filtration({trivial_partition(sp), discrete_partition(sp)});
    Martingale f{filt, {elem(sp, {1.0, 1.0}), elem(sp, {2.0, 0.0})}};
    njson doc = gundy_to_json(gundy_decompose(f, 0.5));
    CHECK(doc["schema"] == "gundy/1");
    CHECK(doc["path"] == "nonnegative");
    CHECK(doc["reconstruction_ok"] == true);
    CHECK(doc["r_masks"].size() == 2);
    CHECK(doc["s_masks"].size() == 3);  // time-0 band first
    CHECK(doc["tau_masks"].size() == 3);
    CHECK(doc["s_masks"][0] == njson::array({true, true}));
    CHECK_FALSE(doc.contains("positive_part"));

    Martingale g{filt, {elem(sp, {0.0, 0.0}), elem(sp, {1.0, -1.0})}};
    njson sdoc = gundy_to_json(gundy_decompose(g, 0.5));
    CHECK(sdoc["path"] == "signed");
    CHECK(sdoc["positive_part"]["schema"] == "gundy/1");
    CHECK(sdoc["negative_part"]["path"] == "nonnegative");
    CHECK_FALSE(sdoc.contains("r_masks"));
}

TEST_CASE("suite reports serialize without the output path") {
    HarnessConfig cfg = small_config();
    cfg.out_path = "/tmp/somewhere.json";
    cfg.trials = 2;
    njson doc = suite_report_to_json(run_suite(cfg));
    CHECK(doc["schema"] == "suite/1");
    CHECK_FALSE(doc["config"].contains("out_path"));
    CHECK(doc["config"]["seed"] == 42);
    CHECK(doc["checks"].is_array());
    CHECK_FALSE(doc["checks"].empty());
}

TEST_CASE("weak-type CSV formatting") {
    std::string csv = weaktype_csv({{0.5, 0.75, 0, 3}, {2.0, 0.125, 1, 4}});
    CHECK(csv == "lambda,ratio,component,trial\n0.5,0.75,0,3\n2.0,0.125,1,4\n");
}

TEST_CASE("text files round trip and report IO failures") {
    const std::string path = tmp_file("lmart_io_test.txt");
    write_text_file(path, "payload\n");
    CHECK(read_text_file(path) == "payload\n");
    std::remove(path.c_str());
    CHECK(code_of([&] { read_text_file("/nonexistent/nope.txt"); }) == errc::io_error);
    CHECK(code_of([&] { write_text_file("/nonexistent/nope.txt", "x"); }) == errc::io_error);
}

TEST_CASE("cli generate, decompose and verify round trip") {
    const std::string mart = tmp_file("lmart_cli_mart.json");
    CHECK(cli_run({"generate", "--seed", "7", "--omega-size", "5", "--depth", "3", "--out",
                   mart}) == 0);
    Martingale f = martingale_from_json(njson::parse(read_text_file(mart)));
    CHECK(is_martingale(f));

    const std::string dec = tmp_file("lmart_cli_dec.json");
    CHECK(cli_run({"decompose", "--in", mart, "--lambda", "0.75", "--out", dec}) == 0);
    njson ddoc = njson::parse(read_text_file(dec));
    CHECK(ddoc["schema"] == "gundy/1");
    CHECK(ddoc["lambda"] == 0.75);
    CHECK(ddoc["reconstruction_ok"] == true);

    const std::string rep1 = tmp_file("lmart_cli_rep1.json");
    const std::string rep2 = tmp_file("lmart_cli_rep2.json");
    const std::vector<std::string> verify_args = {"verify",   "--seed",  "42", "--omega-size",
                                                  "5",        "--depth", "3",  "--trials",
                                                  "10",       "--out",   rep1};
    CHECK(cli_run(verify_args) == 0);
    std::vector<std::string> second = verify_args;
    second.back() = rep2;
    CHECK(cli_run(second) == 0);
    CHECK(read_text_file(rep1) == read_text_file(rep2));
    njson vdoc = njson::parse(read_text_file(rep1));
    CHECK(vdoc["schema"] == "suite/1");
    CHECK(vdoc["pass"] == true);

    for (const std::string& p : {mart, dec, rep1, rep2}) std::remove(p.c_str());
}

TEST_CASE("cli weaktype emits CSV and JSON") {
    const std::string csv_path = tmp_file("lmart_cli_wk.csv");
    CHECK(cli_run({"weaktype", "--seed", "3", "--omega-size", "4", "--depth", "2", "--trials",
                   "6", "--op", "maximal", "--out", csv_path}) == 0);
    std::string csv = read_text_file(csv_path);
    CHECK(csv.rfind("lambda,ratio,component,trial\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 6 * 4 * 4);  // trials * lambdas * points

    const std::string json_path = tmp_file("lmart_cli_wk.json");
    CHECK(cli_run({"weaktype", "--seed", "3", "--omega-size", "4", "--depth", "2", "--trials",
                   "6", "--op", "square", "--format", "json", "--out", json_path}) == 0);
    njson doc = njson::parse(read_text_file(json_path));
    CHECK(doc["schema"] == "weaktype/1");
    CHECK(doc["op"] == "square");
    CHECK(doc["failures"] == 0);
    CHECK(doc["class_a"]["op"] == "square");
    for (const std::string& p : {csv_path, json_path}) std::remove(p.c_str());
}

TEST_CASE("cli holder reports ok lines") {
    const std::string path = tmp_file("lmart_cli_holder.txt");
    CHECK(cli_run({"holder", "--seed", "5", "--trials", "20", "--out", path}) == 0);
    std::string text = read_text_file(path);
    CHECK(text.find("[ok] holder_pairs") != std::string::npos);
    CHECK(text.find("[ok] rademacher_orthonormality") != std::string::npos);
    CHECK(text.find("[ok] refinement_monotonicity") != std::string::npos);
    CHECK(text.find("[ok] power_gap_bounds") != std::string::npos);
    CHECK(text.find("[fail]") == std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("cli rejects bad invocations") {
    CHECK(cli_run({}) == 2);
    CHECK(cli_run({"frobnicate"}) == 2);
    CHECK(cli_run({"verify", "--bogus-flag"}) == 2);
    CHECK(cli_run({"verify", "--trials", "0", "--out", "-"}) == 2);
    CHECK(cli_run({"weaktype", "--op", "bogus"}) == 2);
    CHECK(cli_run({"decompose", "--in", "/nonexistent/mart.json"}) == 2);
    CHECK(cli_run({"--help"}) == 0);
}
