#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "holorepair/errors.hpp"
#include "holorepair/repair.hpp"

using namespace holorepair;

namespace {

// One query variable over `candidates` with explicit marginals.
struct OneVar {
    Dataset ds;
    FactorGraph g;
    MarginalTable t;

    OneVar(const std::string& csv, std::vector<std::string> candidates, int initial,
           std::vector<double> probs)
        : ds(Dataset::from_csv_text(csv)) {
        g.cols = static_cast<int>(ds.attribute_count());
        for (int r = 0; r < static_cast<int>(ds.tuple_count()); ++r) {
            for (int c = 0; c < g.cols; ++c) {
                Variable v;
                v.id = r * g.cols + c;
                v.cell = {r, c};
                v.observed = ds.value(r, c);
                if (v.id == 0) {
                    v.is_query = true;
                    v.candidates = std::move(candidates);
                    v.initial_index = initial;
                } else if (v.observed) {
                    v.candidates = {*v.observed};
                    v.initial_index = 0;
                }
                g.variables.push_back(std::move(v));
            }
        }
        g.query_vars = {0};
        t.vars = {0};
        t.probs = {std::move(probs)};
    }
};

}  // namespace

TEST_CASE("map_repairs picks the argmax") {
    OneVar s("Zip\n60609\n", {"60608", "60609"}, 1, {0.7, 0.3});
    auto repairs = map_repairs(s.g, s.t, s.ds);
    REQUIRE(repairs.size() == 1);
    CHECK(repairs[0].old_value == Value("60609"));
    CHECK(repairs[0].new_value == "60608");
    CHECK(repairs[0].marginal == doctest::Approx(0.7));
}

TEST_CASE("exact ties prefer the initial value") {
    OneVar s("Zip\n60608\n", {"60608", "60609"}, 0, {0.5, 0.5});
    CHECK(map_repairs(s.g, s.t, s.ds).empty());
}

TEST_CASE("ties among non-initial candidates break lexicographically") {
    OneVar s("Zip\n60610\n", {"60608", "60609", "60610"}, 2, {0.45, 0.45, 0.1});
    auto repairs = map_repairs(s.g, s.t, s.ds);
    REQUIRE(repairs.size() == 1);
    CHECK(repairs[0].new_value == "60608");
}

TEST_CASE("confirmed initial values are not repairs") {
    OneVar s("Zip\n60608\n", {"60608", "60609"}, 0, {0.9, 0.1});
    CHECK(map_repairs(s.g, s.t, s.ds).empty());
}

TEST_CASE("apply_repairs changes exactly the repaired cells") {
    OneVar s("Zip,City\n60609,Chicago\n", {"60608", "60609"}, 1, {0.8, 0.2});
    auto repairs = map_repairs(s.g, s.t, s.ds);
    Dataset out = apply_repairs(s.ds, repairs);
    CHECK(out.value(0, 0) == Value("60608"));
    CHECK(out.value(0, 1) == Value("Chicago"));
    CHECK(s.ds.value(0, 0) == Value("60609"));
}

TEST_CASE("evaluate arithmetic") {
    Dataset ds = Dataset::from_csv_text("A\nx1\nx2\nx3\nx4\n");
    SUBCASE("all repairs correct, all errors repaired") {
        GroundTruth gt{{{0, 0}, Value("y1")}, {{1, 0}, Value("x2")}};
        std::vector<Repair> repairs{{{0, 0}, Value("x1"), "y1", 0.9}};
        EvalResult r = evaluate(repairs, ds, gt);
        CHECK(r.precision == 1.0);
        CHECK(r.recall == 1.0);
        CHECK(r.f1 == 1.0);
    }
    SUBCASE("table-3 style consistency: P=1, R=0.713 gives F1=0.832") {
        EvalResult r;
        r.precision = 1.0;
        r.recall = 0.713;
        double f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
        CHECK(f1 == doctest::Approx(0.832).epsilon(5e-4));
    }
    SUBCASE("3 repairs, 2 correct, 4 true errors") {
        GroundTruth gt{{{0, 0}, Value("y1")},
                       {{1, 0}, Value("y2")},
                       {{2, 0}, Value("y3")},
                       {{3, 0}, Value("y4")}};
        std::vector<Repair> repairs{{{0, 0}, Value("x1"), "y1", 0.9},
                                    {{1, 0}, Value("x2"), "y2", 0.8},
                                    {{2, 0}, Value("x3"), "zz", 0.6}};
        EvalResult r = evaluate(repairs, ds, gt);
        CHECK(r.precision == doctest::Approx(2.0 / 3.0));
        CHECK(r.recall == doctest::Approx(0.5));
        CHECK(r.f1 == doctest::Approx(4.0 / 7.0));
    }
    SUBCASE("zero repairs flags no-repairs with precision 0") {
        GroundTruth gt{{{0, 0}, Value("y1")}};
        EvalResult r = evaluate({}, ds, gt);
        CHECK(r.no_repairs);
        CHECK(r.precision == 0.0);
    }
    SUBCASE("zero errors reports recall 1") {
        GroundTruth gt{{{0, 0}, Value("x1")}};
        EvalResult r = evaluate({}, ds, gt);
        CHECK(r.recall == 1.0);
    }
    SUBCASE("repair outside the ground truth is a contract error") {
        GroundTruth gt{{{0, 0}, Value("y1")}};
        std::vector<Repair> repairs{{{1, 0}, Value("x2"), "y2", 0.8}};
        CHECK_THROWS_AS(evaluate(repairs, ds, gt), ContractError);
    }
}

TEST_CASE("report records and bucket summary") {
    OneVar s("Zip\n60609\n", {"60608", "60609"}, 1, {0.75, 0.25});
    std::string report = report_to_string(s.g, s.t, s.ds);
    std::istringstream lines(report);
    std::string line1, line2;
    std::getline(lines, line1);
    std::getline(lines, line2);

    auto rec = nlohmann::json::parse(line1);
    CHECK(rec["tid"] == "1");
    CHECK(rec["attribute"] == "Zip");
    CHECK(rec["old"] == "60609");
    CHECK(rec["new"] == "60608");
    CHECK(rec["repaired"] == true);
    CHECK(rec["marginal"] == doctest::Approx(0.75));

    auto summary = nlohmann::json::parse(line2);
    CHECK(summary["summary"]["buckets"]["[0.7,0.8)"] == 1);
    CHECK(summary["summary"]["query_variables"] == 1);
    CHECK(summary["summary"]["repairs"] == 1);

    SUBCASE("bucket counts sum to the number of query variables") {
        std::size_t total = 0;
        for (const auto& [k, v] : summary["summary"]["buckets"].items())
            total += v.get<std::size_t>();
        CHECK(total == summary["summary"]["query_variables"].get<std::size_t>());
    }
}

TEST_CASE("marginal exactly 1.0 lands in the closed top bucket") {
    OneVar s("Zip\n60609\n", {"60608", "60609"}, 1, {1.0, 0.0});
    std::string report = report_to_string(s.g, s.t, s.ds);
    std::istringstream lines(report);
    std::string line1, line2;
    std::getline(lines, line1);
    std::getline(lines, line2);
    auto summary = nlohmann::json::parse(line2);
    CHECK(summary["summary"]["buckets"]["[0.9,1.0]"] == 1);
}

TEST_CASE("empty marginal table writes an empty body with a zeroed summary") {
    Dataset ds = Dataset::from_csv_text("Zip\n60609\n");
    FactorGraph g;
    g.cols = 1;
    Variable v;
    v.id = 0;
    v.cell = {0, 0};
    v.observed = ds.value(0, 0);
    v.candidates = {"60609"};
    v.initial_index = 0;
    g.variables.push_back(v);
    MarginalTable t;
    std::string report = report_to_string(g, t, ds);
    auto summary = nlohmann::json::parse(report);
    CHECK(summary["summary"]["query_variables"] == 0);
    CHECK(summary["summary"]["repairs"] == 0);
}
