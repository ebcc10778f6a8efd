#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "forge/montecarlo.hpp"

using namespace forge;

TEST_CASE("estimate_rate basics") {
    SUBCASE("zero error, zero loss is exactly zero") {
        RatePoint r = estimate_rate(4, 0.0, 0.0, 200, 1, 1);
        CHECK(r.fails == 0);
        CHECK(r.p_logic == 0.0);
        CHECK(r.stderr_ == 0.0);
    }
    SUBCASE("far above threshold the failure rate is large") {
        RatePoint r = estimate_rate(6, 0.02, 0.0, 300, 2, 0);
        CHECK(r.p_logic > 0.4);
        CHECK(r.p_logic <= 1.0);
    }
    SUBCASE("stderr follows the binomial formula") {
        RatePoint r = estimate_rate(4, 0.008, 0.0, 500, 3, 0);
        CHECK(r.stderr_ == doctest::Approx(std::sqrt(r.p_logic * (1 - r.p_logic) / 500)));
    }
    SUBCASE("bit-identical across worker counts") {
        RatePoint a = estimate_rate(4, 0.006, 0.02, 400, 77, 1);
        RatePoint b = estimate_rate(4, 0.006, 0.02, 400, 77, 3);
        RatePoint c = estimate_rate(4, 0.006, 0.02, 400, 77, 7);
        CHECK(a.fails == b.fails);
        CHECK(b.fails == c.fails);
        CHECK(a.fails_logical == c.fails_logical);
        CHECK(a.fails_percolation == c.fails_percolation);
    }
}

TEST_CASE("run_sweep and checkpoint resume") {
    SweepSpec spec;
    spec.sizes = {4, 6};
    spec.p_grid = {0.004, 0.008};
    spec.samples = 150;
    spec.master_seed = 99;
    spec.workers = 2;

    SUBCASE("single point spec gives one row") {
        SweepSpec one;
        one.sizes = {4};
        one.p_grid = {0.005};
        one.samples = 50;
        auto rows = run_sweep(one);
        CHECK(rows.size() == 1);
        CHECK(rows[0].l == 4);
        CHECK(rows[0].n == 50);
    }

    SUBCASE("interrupted run resumes into an identical table") {
        std::string path = "/tmp/forge_test_sweep.csv";
        std::filesystem::remove(path);
        std::filesystem::remove(path + ".partial");

        auto full = run_sweep(spec, "");  // reference, no files

        int budget = 2;
        auto keep_going = [&]() { return budget-- > 0; };
        auto partial_rows = run_sweep(spec, path, nullptr, keep_going);
        CHECK(partial_rows.size() == 2);
        CHECK(std::filesystem::exists(path + ".partial"));

        auto resumed = run_sweep(spec, path);
        REQUIRE(resumed.size() == full.size());
        for (size_t i = 0; i < full.size(); ++i) {
            CHECK(resumed[i].l == full[i].l);
            CHECK(resumed[i].p == full[i].p);
            CHECK(resumed[i].fails == full[i].fails);
        }
        CHECK(std::filesystem::exists(path));
        CHECK(!std::filesystem::exists(path + ".partial"));

        // the final table parses back to the same numbers
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        auto parsed = parse_rate_table_csv(ss.str());
        REQUIRE(parsed.size() == full.size());
        for (size_t i = 0; i < full.size(); ++i) CHECK(parsed[i].fails == full[i].fails);
        CHECK(ss.str().find("config_hash=") != std::string::npos);
        std::filesystem::remove(path);
    }

    SUBCASE("rerunning the same spec is deterministic") {
        auto a = run_sweep(spec);
        auto b = run_sweep(spec);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].fails == b[i].fails);
    }
}

TEST_CASE("breakeven scan basics") {
    SUBCASE("zero loss-per-qubit reduces to the loss-free rate") {
        auto rows = breakeven_scan(0.004, {0.0}, {4}, 200, 5, 0);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].p_loss == 0.0);
        uint64_t ps = splitmix64(uint64_t(5) ^ 0xb12ea7ULL);
        ps = hash_combine(ps, 4);
        ps = hash_combine(ps, 0);
        RatePoint direct = estimate_rate(4, 0.004, 0.0, 200, ps, 0);
        CHECK(rows[0].fails == direct.fails);
    }
    SUBCASE("failure rate grows with loss per qubit at fixed size") {
        auto rows = breakeven_scan(0.001, {1e-3, 3e-2}, {6}, 400, 6, 0);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].p_logic <= rows[1].p_logic);
        CHECK(rows[1].p_loss > rows[0].p_loss);
    }
}

TEST_CASE("sweep spec JSON and validation") {
    SweepSpec s = SweepSpec::from_json(R"({"sizes":[4,6],"p_grid":[0.005],"samples":100,"seed":7})");
    CHECK(s.sizes.size() == 2);
    CHECK(s.master_seed == 7);
    SweepSpec back = SweepSpec::from_json(s.to_json());
    CHECK(back.config_hash() == s.config_hash());
    CHECK_THROWS_WITH_AS(SweepSpec::from_json(R"({"p_grid":[0.005]})"),
                         doctest::Contains("/sizes"), std::invalid_argument);
    CHECK_THROWS_AS(SweepSpec::from_json(R"({"sizes":[5],"p_grid":[0.005]})"), std::invalid_argument);
}
