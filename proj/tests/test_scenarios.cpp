#include "doctest.h"

#include <sstream>

#include "json.hpp"

#include "redsim/protocol.hpp"
#include "redsim/scenarios.hpp"
#include "redsim/trace.hpp"

using namespace redsim;
using namespace redsim::scenarios;
using nlohmann::json;

namespace {

ScenarioFile make_file(const std::string& name, const std::string& params, std::uint64_t seed,
                       std::size_t trials) {
    ScenarioFile f;
    f.scenario = name;
    f.params_json = params;
    f.seed = seed;
    f.trials = trials;
    return f;
}

} // namespace

TEST_CASE("state digests are phase-canonical and stable") {
    Vec v(2);
    v << Complex(0.6, 0.0), Complex(0.0, 0.8);
    const StateVector a(v, {2});
    const StateVector b = a.scaled(std::polar(1.0, 1.234)); // same ray
    CHECK(trace::state_digest(a) == trace::state_digest(b));

    Vec w(2);
    w << Complex(0.6, 0.0), Complex(0.8, 0.0);
    CHECK(trace::state_digest(a) != trace::state_digest(StateVector(w, {2})));
}

TEST_CASE("unknown scenario names are rejected with the valid list") {
    const auto result = run_scenario(make_file("warp", "{}", 1, 1));
    CHECK(result.exit_code == kConfigError);
    CHECK(result.message.find("tz") != std::string::npos);
    CHECK(result.message.find("relativistic-t2") != std::string::npos);
}

TEST_CASE("stochastic scenarios demand a seed") {
    ScenarioFile f;
    f.scenario = "t2";
    f.trials = 10;
    const auto result = run_scenario(f);
    CHECK(result.exit_code == kConfigError);

    // deterministic replay of a worked case needs none
    ScenarioFile forced;
    forced.scenario = "relativistic-t2";
    forced.params_json = R"({"forced": [0, 0, 0]})";
    CHECK(run_scenario(forced).exit_code == kOk);
}

TEST_CASE("scenario file parsing diagnostics") {
    CHECK_THROWS_AS(parse_scenario_file("{"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario_file(R"({"params": {}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario_file(R"({"scenario": "t2", "trials": 0})"),
                    std::invalid_argument);
    const auto f = parse_scenario_file(
        R"({"scenario": "t2", "seed": 7, "trials": 3, "params": {"alpha": 1}})");
    CHECK(f.scenario == "t2");
    CHECK(f.seed == 7);
    CHECK(f.trials == 3);
    CHECK(json::parse(f.params_json)["alpha"] == 1);
}

TEST_CASE("t2 scenario: anticorrelated input classifies Singlet and exits 0") {
    const auto result = run_scenario(make_file("t2", R"({"beta": 1, "gamma": -1})", 11, 64));
    CHECK(result.exit_code == kOk);
    const json summary = json::parse(result.trace.summary_json);
    CHECK(summary["pass"] == true);
    const auto& table = summary["tables"][0];
    CHECK(table["counts"][0] == 64); // every trial in the Singlet cell
}

TEST_CASE("replays are bit-identical") {
    const auto a = run_scenario(make_file("tz", R"({"alpha": 1, "delta": 1})", 99, 2000));
    const auto b = run_scenario(make_file("tz", R"({"alpha": 1, "delta": 1})", 99, 2000));
    CHECK(a.exit_code == kOk);
    std::ostringstream sa, sb;
    trace::write_jsonl(a.trace, sa);
    trace::write_jsonl(b.trace, sb);
    CHECK(sa.str() == sb.str());

    const auto c = run_scenario(make_file("tz", R"({"alpha": 1, "delta": 1})", 100, 2000));
    std::ostringstream sc;
    trace::write_jsonl(c.trace, sc);
    CHECK(sa.str() != sc.str());
}

TEST_CASE("signaling scenario summary carries both distributions") {
    const auto result = run_scenario(make_file("signaling", R"({"mode": "t2"})", 5, 4000));
    CHECK(result.exit_code == kOk);
    const json summary = json::parse(result.trace.summary_json);
    CHECK(summary["tables"].size() == 2);
    for (const auto& table : summary["tables"]) {
        CHECK(table["expected"][0] == 0.5);
        CHECK(std::abs(table["frequencies"][0].get<double>() - 0.5) < 0.05);
    }
    bool found = false;
    for (const auto& inv : summary["invariants"])
        if (inv["description"].get<std::string>().find("flip") != std::string::npos) {
            CHECK(inv["pass"] == true);
            found = true;
        }
    CHECK(found);
}

TEST_CASE("relativistic scenario replays the worked case digest") {
    ScenarioFile f;
    f.scenario = "relativistic-t2";
    f.params_json = R"({"forced": [0, 0, 0]})";
    const auto result = run_scenario(f);
    REQUIRE(result.exit_code == kOk);

    // the frozen final state: all probes at 0, system anticorrelated
    const StateVector expect = kron(
        protocol::singlet_state(),
        StateVector::basis_state({3, 3, 3, 3, 3, 3}, std::vector<Index>{1, 1, 1, 1, 1, 1}));
    std::string final_digest;
    for (const auto& rec : result.trace.records)
        if (rec.stage == "final") final_digest = rec.state_digest.value_or("");
    CHECK(final_digest == trace::state_digest(expect));
}

TEST_CASE("toy scenarios pass their own invariants") {
    CHECK(run_scenario(make_file("toy-one", R"({"minus_amp": 1})", 3, 2000)).exit_code == kOk);
    CHECK(run_scenario(make_file("toy-two", "{}", 4, 2000)).exit_code == kOk);

    const auto stats = run_scenario(make_file("toy-stats", "{}", 5, 2000));
    CHECK(stats.exit_code == kOk);
    const json summary = json::parse(stats.trace.summary_json);
    REQUIRE(summary["tables"].size() == 1);
    CHECK(summary["tables"][0]["entries"].size() == 8); // all conditional frequencies

    ScenarioFile cf;
    cf.scenario = "counterfactual";
    CHECK(run_scenario(cf).exit_code == kOk);
}

TEST_CASE("grw and csl scenarios run end to end") {
    CHECK(run_scenario(make_file("grw", R"({"mode": "two-lump"})", 6, 500)).exit_code == kOk);
    CHECK(run_scenario(make_file("grw", R"({"mode": "evolve", "duration": 50})", 7, 1))
              .exit_code == kOk);
    CHECK(run_scenario(make_file("csl", R"({"mode": "cooked", "time": 10})", 8, 400))
              .exit_code == kOk);
    CHECK(run_scenario(make_file("csl", R"({"mode": "raw", "time": 1})", 9, 400)).exit_code ==
          kOk);
}

TEST_CASE("empty traces summarize to nothing") {
    trace::RunTrace empty;
    CHECK(emit_summary(empty) == "{}");
}

TEST_CASE("malformed parameters exit with a config error") {
    CHECK(run_scenario(make_file("t2", R"({"alpha": "zebra"})", 1, 1)).exit_code == kConfigError);
    CHECK(run_scenario(make_file("signaling", R"({"mode": "sideways"})", 1, 1)).exit_code ==
          kConfigError);
    CHECK(run_scenario(make_file("t2", R"([1,2,3])", 1, 1)).exit_code == kConfigError);
}
