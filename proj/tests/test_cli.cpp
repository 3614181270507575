#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shadowcorr/cli.hpp"
#include "shadowcorr/errors.hpp"
#include "shadowcorr/scenario.hpp"

using namespace shadowcorr;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("shadowcorr_" + name + ".json");
    std::ofstream(path) << content;
    return path.string();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream cells_in(line);
        std::string cell;
        while (std::getline(cells_in, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("map with epsilons") {
    const Run r = run({"map", "--eps1", "1e-4", "--eps2", "1e-4", "--rho-h", "0.5", "--format", "json"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["rho"].get<double>() == doctest::Approx(0.0232).epsilon(0.01));
    CHECK(doc["rho_h"].get<double>() == 0.5);
    CHECK(doc["scenario"]["links"][0]["epsilon"].get<double>() == 1e-4);
    // Round-trips through the record schema.
    const ResultRecord record = parse_result(doc);
    CHECK(to_json(record) == doc);
}

TEST_CASE("map with betas and budgets") {
    const Run zero = run({"map", "--beta1", "0", "--beta2", "0", "--rho-h", "0", "--format", "json"});
    REQUIRE(zero.code == 0);
    const json doc = json::parse(zero.out);
    CHECK(std::abs(doc["rho"].get<double>()) <= 1e-12);
    CHECK(doc["joint_failure"].get<double>() == doctest::Approx(0.25).epsilon(1e-13));

    const std::string path = write_temp(
        "budget", R"({"links": [{"p_t_dbm": 23, "p_l_db": 100, "p_th_dbm": -100, "sigma_db": 8},
                               {"epsilon": 0.01}], "rho_h": 0.3})");
    const Run budget = run({"map", "--scenario", path, "--format", "json"});
    REQUIRE(budget.code == 0);
    CHECK(json::parse(budget.out)["beta1"].get<double>() == doctest::Approx(2.875).epsilon(1e-15));

    // Flags override file fields.
    const Run overridden = run({"map", "--scenario", path, "--beta1", "1", "--rho-h", "0", "--format", "json"});
    REQUIRE(overridden.code == 0);
    const json o = json::parse(overridden.out);
    CHECK(o["beta1"].get<double>() == 1.0);
    CHECK(o["rho_h"].get<double>() == 0.0);
}

TEST_CASE("map table and csv output") {
    const Run table = run({"map", "--eps1", "0.1", "--eps2", "0.1", "--rho-h", "0.5"});
    REQUIRE(table.code == 0);
    CHECK(table.out.find("rho ") != std::string::npos);
    const Run csv = run({"map", "--eps1", "0.1", "--eps2", "0.1", "--rho-h", "0.5", "--format", "csv"});
    REQUIRE(csv.code == 0);
    const auto rows = parse_csv(csv.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].size() == rows[1].size());
}

TEST_CASE("malformed scenarios exit 2 naming the field") {
    const auto check_bad = [](const std::string& content, const std::string& field) {
        const Run r = run({"map", "--scenario", write_temp("bad", content)});
        CHECK(r.code == cli::kBadInput);
        CHECK(r.err.find(field) != std::string::npos);
        CHECK(r.out.empty());
    };
    check_bad(R"({"links": [{"epsilon": 0.1}], "rho_h": 0})", "$.links");
    check_bad(R"({"links": [{"epsilon": 0.1, "beta": 1}, {"beta": 1}], "rho_h": 0})", "$.links[0]");
    check_bad(R"({"links": [{"beta": 1}, {"beta": 1}], "rho_h": 1.5})", "$.rho_h");
    check_bad(R"({"links": [{"beta": 1}, {"beta": 1}], "rho_h": 0, "colour": 1})", "$.colour");
    check_bad(R"({"links": [{"beta": 1}, {"p_t_dbm": 1, "p_l_db": 2, "p_th_dbm": 3}], "rho_h": 0})",
              "$.links[1].sigma_db");
    check_bad(R"({"links": [{"beta": 1}, {"epsilon": 1.5}], "rho_h": 0})", "$.links[1].epsilon");
    check_bad(R"({"links": [{"beta": "x"}, {"beta": 1}], "rho_h": 0})", "$.links[0].beta");
    check_bad(R"({"links": [{"beta": 1}, {"beta": 1}], "rho_h": 0, "sim": {"threads": 4}})",
              "$.sim.threads");
    check_bad("{not json", "--scenario");

    const Run missing = run({"map", "--eps1", "0.1", "--rho-h", "0"});
    CHECK(missing.code == cli::kBadInput);
    CHECK(missing.err.find("links[1]") != std::string::npos);
    const Run both = run({"map", "--eps1", "0.1", "--beta1", "1", "--eps2", "0.1", "--rho-h", "0"});
    CHECK(both.code == cli::kBadInput);
    const Run no_rho = run({"map", "--eps1", "0.1", "--eps2", "0.1"});
    CHECK(no_rho.code == cli::kBadInput);
    CHECK(run({"frobnicate"}).code == cli::kBadInput);
    CHECK(run({}).code == cli::kBadInput);
}

TEST_CASE("degenerate epsilon exits 3") {
    const Run r = run({"map", "--beta1", "45", "--beta2", "1", "--rho-h", "0.2"});
    CHECK(r.code == cli::kDegenerate);
    CHECK(!r.err.empty());
    CHECK(run({"map", "--eps1", "0", "--eps2", "0.1", "--rho-h", "0.2"}).code == cli::kDegenerate);
    CHECK(run({"map", "--eps1", "0.1", "--eps2", "1", "--rho-h", "0.2"}).code == cli::kDegenerate);
    CHECK(run({"map", "--eps1", "1.5", "--eps2", "0.1", "--rho-h", "0.2"}).code == cli::kBadInput);
    const std::string path = write_temp("degenerate", R"({"links": [{"beta": 1}, {"epsilon": 1.0}], "rho_h": 0})");
    CHECK(run({"map", "--scenario", path}).code == cli::kDegenerate);
}

TEST_CASE("invert") {
    const Run r = run({"invert", "--rho", "0.1", "--eps1", "1e-4", "--eps2", "1e-4", "--format", "json"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["rho_h"].get<double>() == doctest::Approx(0.7).epsilon(0.01));
    CHECK(doc["rho_target"].get<double>() == 0.1);
    CHECK(!doc["scenario"].contains("rho_h"));

    const Run zero = run({"invert", "--rho", "0", "--eps1", "0.2", "--eps2", "0.01", "--format", "json"});
    REQUIRE(zero.code == 0);
    CHECK(json::parse(zero.out)["rho_h"].get<double>() == 0.0);

    const Run out_of_range = run({"invert", "--rho", "0.99", "--eps1", "1e-4", "--eps2", "1e-2"});
    CHECK(out_of_range.code == cli::kUnattainable);
    CHECK(out_of_range.err.find("0.0995") != std::string::npos);
}

TEST_CASE("table") {
    const Run plain = run({"table"});
    REQUIRE(plain.code == 0);
    std::istringstream lines(plain.out);
    std::string title, top, bottom;
    std::getline(lines, title);
    std::getline(lines, top);
    std::getline(lines, bottom);
    CHECK(top.rfind("rho_h", 0) == 0);
    CHECK(bottom.rfind("rho", 0) == 0);

    const Run csv = run({"table", "--format", "csv"});
    REQUIRE(csv.code == 0);
    const auto rows = parse_csv(csv.out);
    REQUIRE(rows.size() == 9);
    CHECK(std::stod(rows[1][0]) == 0.05);
    CHECK(std::stod(rows[1][4]) == doctest::Approx(0.0001).epsilon(0.5));
    CHECK(std::stod(rows[6][4]) == doctest::Approx(0.0232).epsilon(0.01));
    CHECK(std::stod(rows[8][0]) == 1.0);
    CHECK(std::stod(rows[8][4]) == 1.0);

    const Run json_out = run({"table", "--format", "json"});
    REQUIRE(json_out.code == 0);
    CHECK(json::parse(json_out.out).size() == 8);

    // Same grid through sweep gives the same bytes.
    const Run sweep = run({"sweep", "--eps1", "1e-4", "--eps2", "1e-4", "--grid",
                           "0.05,0.1,0.2,0.3,0.4,0.5,0.7,1"});
    REQUIRE(sweep.code == 0);
    CHECK(sweep.out == csv.out);
    const Run full = run({"table", "--format", "csv", "--precision", "17"});
    const Run full_sweep = run({"sweep", "--eps1", "1e-4", "--eps2", "1e-4", "--grid",
                                "0.05,0.1,0.2,0.3,0.4,0.5,0.7,1", "--precision", "17"});
    CHECK(full.out == full_sweep.out);
}

TEST_CASE("sweep") {
    const Run r = run({"sweep", "--eps1", "1e-4", "--eps2", "1e-4", "--grid", "0:1:0.5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("rho_h,eps1,eps2,joint_failure,rho\n", 0) == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(std::abs(std::stod(rows[1][4])) <= 1e-12);
    CHECK(std::stod(rows[2][4]) == doctest::Approx(0.0232).epsilon(0.01));
    CHECK(std::stod(rows[3][4]) == 1.0);

    const Run half = run({"sweep", "--eps1", "0.5", "--eps2", "0.5", "--grid", "0"});
    REQUIRE(half.code == 0);
    CHECK(std::stod(parse_csv(half.out)[1][3]) == doctest::Approx(0.25).epsilon(1e-6));

    const Run single = run({"sweep", "--eps1", "1e-4", "--eps2", "1e-4", "--grid", "0.3"});
    CHECK(std::stod(parse_csv(single.out)[1][4]) == doctest::Approx(0.004).epsilon(0.1));

    CHECK(run({"sweep", "--eps1", "0.1", "--eps2", "0.1", "--grid", ""}).code == cli::kBadInput);
    CHECK(run({"sweep", "--eps1", "0.1", "--eps2", "0.1", "--grid", "0:2:0.5"}).code == cli::kBadInput);
    CHECK(run({"sweep", "--eps1", "0.1", "--eps2", "0.1", "--grid", "1:0:0.5"}).code == cli::kBadInput);
    CHECK(run({"sweep", "--eps1", "0.1", "--eps2", "0.1", "--grid", "a,b"}).code == cli::kBadInput);
}

TEST_CASE("parse_grid") {
    CHECK(cli::parse_grid("0:1:0.25") == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(cli::parse_grid("1:-1:-1") == std::vector<double>{1.0, 0.0, -1.0});
    CHECK(cli::parse_grid("0.5,-0.5") == std::vector<double>{0.5, -0.5});
    CHECK(cli::parse_grid("-1:1:0.1").size() == 21);
    CHECK(cli::parse_grid("-1:1:0.1").back() == 1.0);
    CHECK_THROWS_AS(cli::parse_grid("0:1:0"), ScenarioError);
    CHECK_THROWS_AS(cli::parse_grid("0,"), ScenarioError);
    CHECK_THROWS_AS(cli::parse_grid("0:1"), ScenarioError);
}

TEST_CASE("simulate") {
    const Run r = run({"simulate", "--eps1", "0.1", "--eps2", "0.1", "--rho-h", "0.5", "--samples",
                       "1000000", "--seed", "42", "--format", "json"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(std::abs(doc["mc_z"].get<double>()) <= 3.0);
    CHECK(std::abs(doc["mc_rho_z"].get<double>()) <= 3.0);
    CHECK(doc["scenario"]["sim"]["n_samples"].get<std::uint64_t>() == 1000000);
    CHECK(to_json(parse_result(doc)) == doc);

    const Run one = run({"simulate", "--eps1", "0.1", "--eps2", "0.1", "--rho-h", "1", "--samples",
                         "10000", "--format", "json"});
    REQUIRE(one.code == 0);
    CHECK(json::parse(one.out)["mc_rho"].get<double>() == 1.0);

    const Run rare = run({"simulate", "--eps1", "1e-4", "--eps2", "1e-4", "--rho-h", "0.5",
                          "--samples", "10000", "--method", "plain"});
    CHECK(rare.code == cli::kInsufficientEvents);
    CHECK(rare.err.find("failures") != std::string::npos);

    const std::string path = write_temp(
        "sim", R"({"links": [{"epsilon": 1e-4}, {"epsilon": 1e-4}], "rho_h": 0.5,
                   "sim": {"n_samples": 200000, "seed": 3, "method": "importance", "batch_count": 8}})");
    const Run tilted = run({"simulate", "--scenario", path, "--format", "json"});
    REQUIRE(tilted.code == 0);
    const json t = json::parse(tilted.out);
    CHECK(std::abs(t["mc_z"].get<double>()) <= 4.0);
    CHECK(!t.contains("mc_rho"));
    CHECK(t["scenario"]["sim"]["method"] == "importance");

    CHECK(run({"simulate", "--eps1", "0.1", "--eps2", "0.1", "--rho-h", "0", "--samples", "0"}).code ==
          cli::kBadInput);
    CHECK(run({"simulate", "--eps1", "0.1", "--eps2", "0.1", "--rho-h", "0", "--method", "magic"}).code ==
          cli::kBadInput);
}

TEST_CASE("installed binary honours the exit-code contract") {
    const std::string exe = SHADOWCORR_CLI_PATH;
    const auto status = [&](const std::string& args) {
        const int raw = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("table") == 0);
    CHECK(status("--help") == 0);
    CHECK(status("map --eps1 0.1") == 2);
    CHECK(status("map --beta1 45 --beta2 0 --rho-h 0.1") == 3);
    CHECK(status("invert --rho 0.99 --eps1 1e-4 --eps2 1e-2") == 4);
    CHECK(status("simulate --eps1 1e-4 --eps2 1e-4 --rho-h 0.5 --samples 10000") == 5);
}
