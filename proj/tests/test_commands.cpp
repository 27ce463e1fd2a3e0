#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gamekin/commands.hpp"
#include "gamekin/gamefile.hpp"

using namespace gamekin;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    int status = 0;
    std::string out;
    std::string err;
};

Outcome run(const RunRequest& request) {
    std::ostringstream out;
    std::ostringstream err;
    Outcome result;
    result.status = run_command(request, out, err);
    result.out = out.str();
    result.err = err.str();
    return result;
}

RunRequest base(const std::string& command, const std::string& builtin_name) {
    RunRequest request;
    request.command = command;
    request.builtin_name = builtin_name;
    return request;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) rows.push_back(line);
    return rows;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> cols;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) cols.push_back(field);
    return cols;
}

}  // namespace

TEST_CASE("beta flag parsing") {
    CHECK(parse_beta("2.5") == 2.5);
    CHECK(parse_beta(" 1e3 ") == 1000.0);
    CHECK(parse_beta("inf") == kInf);
    CHECK(parse_beta("0") == 0.0);
    CHECK_THROWS_AS(parse_beta("-1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_beta("nan"), std::invalid_argument);
    CHECK_THROWS_AS(parse_beta("fast"), std::invalid_argument);
    CHECK_THROWS_AS(parse_beta("2x"), std::invalid_argument);
}

TEST_CASE("beta grid parsing") {
    const std::vector<double> range = parse_beta_grid("0:8:0.5");
    REQUIRE(range.size() == 17);
    CHECK(range.front() == 0.0);
    CHECK(range.back() == 8.0);
    CHECK(range[1] == 0.5);

    const std::vector<double> clipped = parse_beta_grid("0:1:0.4");
    CHECK(clipped == std::vector<double>{0.0, 0.4, 0.8});

    const std::vector<double> listed = parse_beta_grid("1,2,4,inf");
    REQUIRE(listed.size() == 4);
    CHECK(listed[3] == kInf);

    CHECK_THROWS_AS(parse_beta_grid(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_beta_grid("0:8"), std::invalid_argument);
    CHECK_THROWS_AS(parse_beta_grid("0:8:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_beta_grid("3:1:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_beta_grid("a:b:c"), std::invalid_argument);
    CHECK_THROWS_AS(parse_beta_grid("1,-2"), std::invalid_argument);
}

TEST_CASE("initial state parsing") {
    const DimensionProfile two_by_two({2, 2});

    const auto shorthand = parse_initial_states("0.6,0.5", two_by_two);
    REQUIRE(shorthand.size() == 2);
    CHECK(shorthand[0].diagonal_probabilities()[0] == 0.6);
    CHECK(shorthand[1].diagonal_probabilities()[0] == 0.5);

    const auto full = parse_initial_states("0.6,0.4;0.5,0.5", two_by_two);
    CHECK(full[0].diagonal_probabilities()[1] == 0.4);

    const auto mixed = parse_initial_states("0.3;0.7,0.3", two_by_two);
    CHECK(mixed[0].diagonal_probabilities()[1] == doctest::Approx(0.7));
    CHECK(mixed[1].diagonal_probabilities()[0] == 0.7);

    const DimensionProfile two_by_three({2, 3});
    const auto tall = parse_initial_states("0.5;0.2,0.3,0.5", two_by_three);
    CHECK(tall[1].dim() == 3);
    CHECK(tall[1].diagonal_probabilities()[2] == doctest::Approx(0.5));

    CHECK_THROWS_WITH_AS(parse_initial_states("0.5,0.5", two_by_three),
                         doctest::Contains("two strategies"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_initial_states("0.6", two_by_two),
                         doctest::Contains("one probability per player"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_initial_states("0.6,0.6;0.5,0.5", two_by_two),
                         doctest::Contains("sum to"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_initial_states("1.2;0.5", two_by_two),
                         doctest::Contains("outside [0, 1]"), std::invalid_argument);
    CHECK_THROWS_AS(parse_initial_states("0.5;0.5;0.5", two_by_two), std::invalid_argument);
    CHECK_THROWS_AS(parse_initial_states("x;0.5", two_by_two), std::invalid_argument);

    const auto renorm = parse_initial_states("0.3,0.3,0.4;0.5,0.5", DimensionProfile({3, 2}));
    double sum = 0.0;
    for (double v : renorm[0].diagonal_probabilities()) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("update sequence parsing") {
    CHECK(parse_update_sequence("2,1") == std::vector<std::size_t>{1, 0});
    CHECK(parse_update_sequence("").empty());
    CHECK_THROWS_AS(parse_update_sequence("0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_update_sequence("first"), std::invalid_argument);
}

TEST_CASE("build emits csv rows and a reparseable structured file") {
    RunRequest request = base("build", "prisoners-dilemma");
    request.format = "csv";
    const Outcome csv = run(request);
    CHECK(csv.status == 0);
    const auto rows = lines(csv.out);
    CHECK(rows[0] == "player,row,col,re,im");
    CHECK(rows[1] == "1,0,0,-2,0");
    CHECK(rows.size() == 1 + 2 * 16);

    request.format = "auto";
    const Outcome structured = run(request);
    const GameFile reparsed = parse_game_file(structured.out);
    CHECK(reparsed.kind == GameKind::raw_hermitian);
    CHECK(std::get<RawGame>(reparsed.game).payoff_matrices[0](1, 1) == cplx(-5.0));
}

TEST_CASE("eval reports the uniform-mixture payoffs") {
    const Outcome result = run(base("eval", "prisoners-dilemma"));
    CHECK(result.status == 0);
    const auto rows = lines(result.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "player,payoff");
    CHECK(rows[1] == "1,-2.75");
    CHECK(rows[2] == "2,-2.75");
}

TEST_CASE("reduce emits the partial-trace payoff for the chosen player") {
    RunRequest request = base("reduce", "prisoners-dilemma");
    request.player = 1;
    request.init = "0.9;0.3";
    const Outcome result = run(request);
    CHECK(result.status == 0);

    const nlohmann::json parsed = nlohmann::json::parse(result.out);
    CHECK(parsed.at("player") == 1);
    CHECK(parsed.at("labels")[0] == "C");
    CHECK(parsed.at("matrix")[0][0][0].get<double>() == doctest::Approx(-4.1));
    CHECK(parsed.at("matrix")[1][1][0].get<double>() == doctest::Approx(-2.8));
    CHECK(parsed.at("matrix")[0][1][0] == 0.0);

    request.format = "csv";
    const Outcome csv = run(request);
    const auto rows = lines(csv.out);
    CHECK(rows[0] == "row,col,re,im");
    CHECK(fields(rows[1])[2] == "-4.0999999999999996");

    request.player = 7;
    const Outcome bad = run(request);
    CHECK(bad.status == 1);
    CHECK(bad.err.find("out of range") != std::string::npos);
}

TEST_CASE("iterate csv carries the fixed point and converged flag") {
    RunRequest request = base("iterate", "prisoners-dilemma");
    request.beta = "1";
    const Outcome result = run(request);
    CHECK(result.status == 0);
    CHECK(result.err.empty());

    const auto rows = lines(result.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "sweep,player,strategy,probability,payoff,residual,converged");
    const auto first = fields(rows[1]);
    CHECK(first[1] == "1");
    CHECK(first[2] == "C");
    CHECK(std::stod(first[3]) == doctest::Approx(0.22675064483434804).epsilon(1e-9));
    CHECK(first[6] == "true");

    SUBCASE("tracing emits one block per sweep") {
        request.trace = true;
        const Outcome traced = run(request);
        const auto traced_rows = lines(traced.out);
        const std::size_t sweeps = std::stoul(fields(traced_rows.back())[0]);
        CHECK(traced_rows.size() == 1 + 4 * sweeps);
        CHECK(fields(traced_rows[1])[0] == "1");
    }

    SUBCASE("structured output is valid JSON") {
        request.format = "structured";
        const Outcome structured = run(request);
        const nlohmann::json parsed = nlohmann::json::parse(structured.out);
        CHECK(parsed.at("converged") == true);
        CHECK(parsed.at("cycle_period") == 0);
        CHECK(parsed.at("players")[0].at("probabilities")[0].get<double>() ==
              doctest::Approx(0.22675064483434804));
        CHECK(parsed.at("players")[1].at("density")[0][1][0] == 0.0);
    }
}

TEST_CASE("iterate flags heuristic quantum runs on stderr") {
    RunRequest request = base("iterate", "penny-quantum");
    request.beta = "2";
    request.max_sweeps = 50;
    const Outcome finite = run(request);
    CHECK(finite.status == 0);
    CHECK(finite.err.find("heuristic") != std::string::npos);

    request.beta = "inf";
    request.max_sweeps = 200;
    const Outcome projected = run(request);
    CHECK(projected.status == 0);
    CHECK(projected.err.empty());
}

TEST_CASE("non-convergence is a status-0 outcome") {
    RunRequest request = base("iterate", "penny-classical");
    request.beta = "8";
    request.init = "0.6,0.5";
    request.sequence = "2,1";
    request.max_sweeps = 60;
    const Outcome result = run(request);
    CHECK(result.status == 0);
    const auto rows = lines(result.out);
    CHECK(fields(rows[1])[6] == "false");
    CHECK(fields(rows[1])[0] == "60");
}

TEST_CASE("sweep emits one block per beta with stability data") {
    RunRequest request = base("sweep", "prisoners-dilemma");
    request.betas = "0,1,2";
    const Outcome result = run(request);
    CHECK(result.status == 0);

    const auto rows = lines(result.out);
    REQUIRE(rows.size() == 1 + 3 * 4);
    CHECK(rows[0] == "beta,player,strategy,probability,converged,spectral_radius");
    const auto zero = fields(rows[1]);
    CHECK(zero[0] == "0");
    CHECK(zero[3] == "0.5");
    CHECK(zero[5] == "0");
    const auto one = fields(rows[5]);
    CHECK(one[0] == "1");
    CHECK(std::stod(one[3]) == doctest::Approx(0.22675064483434804).epsilon(1e-9));
    CHECK(std::stod(one[5]) == doctest::Approx(0.17533478990155538).epsilon(1e-4));
    CHECK(one[4] == "true");

    SUBCASE("an infinite tail prints as inf") {
        request.betas = "1,inf";
        const Outcome tail = run(request);
        const auto tail_rows = lines(tail.out);
        CHECK(fields(tail_rows[5])[0] == "inf");
        CHECK(fields(tail_rows[5])[3] == "0");
        CHECK(fields(tail_rows[5])[5] == "0");
    }

    SUBCASE("quantum sweeps leave the radius column as nan") {
        RunRequest quantum = base("sweep", "penny-quantum");
        quantum.betas = "1";
        quantum.max_sweeps = 50;
        const Outcome qrows = run(quantum);
        CHECK(qrows.status == 0);
        CHECK(qrows.err.find("heuristic") != std::string::npos);
        CHECK(fields(lines(qrows.out)[1])[5] == "nan");
    }

    SUBCASE("structured sweep rows are valid JSON") {
        request.format = "structured";
        const Outcome structured = run(request);
        const nlohmann::json parsed = nlohmann::json::parse(structured.out);
        REQUIRE(parsed.at("rows").size() == 3);
        CHECK(parsed.at("rows")[0].at("beta") == 0.0);
        CHECK(parsed.at("rows")[1].at("classification") == "stable");
    }
}

TEST_CASE("the hawk-dove branch sweep of the figure data") {
    RunRequest request = base("sweep", "hawk-dove");
    request.betas = "0:8:0.5";
    request.init = "0.6,0.5";
    request.sequence = "2,1";
    const Outcome result = run(request);
    CHECK(result.status == 0);

    const auto rows = lines(result.out);
    REQUIRE(rows.size() == 1 + 17 * 4);
    const auto last_h = fields(rows[rows.size() - 4]);
    CHECK(last_h[0] == "8");
    CHECK(last_h[1] == "1");
    CHECK(last_h[2] == "H");
    CHECK(std::stod(last_h[3]) == doctest::Approx(0.99966283650755416).epsilon(1e-9));
    CHECK(last_h[4] == "true");
    CHECK(std::stod(last_h[5]) < 1.0);

    double previous = 0.0;
    for (std::size_t beta_row = 0; beta_row < 17; ++beta_row) {
        const auto cols = fields(rows[1 + beta_row * 4]);
        const double p = std::stod(cols[3]);
        CHECK(p >= previous - 1e-12);
        previous = p;
    }
}

TEST_CASE("stability command emits the jacobian table") {
    RunRequest request = base("stability", "penny-classical");
    request.beta = "2";
    const Outcome result = run(request);
    CHECK(result.status == 0);

    const auto rows = lines(result.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] ==
          "beta,spectral_radius,classification,jacobian_row,jacobian_col,jacobian_value");
    const auto entry = fields(rows[2]);
    CHECK(entry[0] == "2");
    CHECK(std::stod(entry[1]) == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(entry[2] == "unstable");
    CHECK(entry[3] == "0");
    CHECK(entry[4] == "1");
    CHECK(std::stod(entry[5]) == doctest::Approx(2.0).epsilon(1e-4));

    SUBCASE("structured stability output is valid JSON") {
        request.format = "structured";
        const Outcome structured = run(request);
        const nlohmann::json parsed = nlohmann::json::parse(structured.out);
        CHECK(parsed.at("classification") == "unstable");
        CHECK(parsed.at("jacobian")[1][0].get<double>() == doctest::Approx(-2.0).epsilon(1e-4));
    }

    SUBCASE("quantum games are rejected") {
        const RunRequest quantum = base("stability", "penny-quantum");
        const Outcome rejected = run(quantum);
        CHECK(rejected.status == 1);
        CHECK(rejected.err.find("out of scope") != std::string::npos);
    }
}

TEST_CASE("decompose lists basis coefficients per player") {
    const Outcome result = run(base("decompose", "penny-quantum"));
    CHECK(result.status == 0);

    const auto rows = lines(result.out);
    REQUIRE(rows.size() == 9);
    CHECK(rows[0] == "player,index,label,re,im,residual");
    CHECK(rows[3] == "1,3,Nq,1,0,0");
    CHECK(rows[7] == "2,3,Nq,-1,0,0");

    RunRequest one = base("decompose", "penny-quantum");
    one.player = 2;
    const Outcome only = run(one);
    CHECK(lines(only.out).size() == 5);

    const Outcome classical = run(base("decompose", "hawk-dove"));
    CHECK(classical.status == 1);
    CHECK(classical.err.find("requires a quantum game") != std::string::npos);
}

TEST_CASE("request validation failures set the exit status") {
    RunRequest request;
    request.command = "simulate";
    request.builtin_name = "prisoners-dilemma";
    CHECK(run(request).status == 1);
    CHECK(run(request).err.find("unknown command") != std::string::npos);

    RunRequest both = base("eval", "prisoners-dilemma");
    both.game_path = "also.json";
    CHECK(run(both).err.find("exactly one of") != std::string::npos);

    RunRequest neither;
    neither.command = "eval";
    CHECK(run(neither).status == 1);

    RunRequest stray = base("iterate", "prisoners-dilemma");
    stray.player = 1;
    CHECK(run(stray).err.find("--player applies to") != std::string::npos);

    RunRequest grid = base("iterate", "prisoners-dilemma");
    grid.betas = "0:1:0.5";
    CHECK(run(grid).err.find("--betas applies to") != std::string::npos);

    RunRequest missing = base("sweep", "prisoners-dilemma");
    CHECK(run(missing).err.find("sweep requires --betas") != std::string::npos);

    RunRequest order = base("iterate", "prisoners-dilemma");
    order.order = "both";
    CHECK(run(order).err.find("--order") != std::string::npos);

    RunRequest unknown = base("eval", "tic-tac-toe");
    const Outcome miss = run(unknown);
    CHECK(miss.status == 1);
    CHECK(miss.err.find("unknown game") != std::string::npos);

    RunRequest sequence = base("iterate", "prisoners-dilemma");
    sequence.sequence = "1,1";
    CHECK(run(sequence).status == 1);
}

TEST_CASE("output paths are honored and failures surface the path") {
    RunRequest request = base("eval", "prisoners-dilemma");
    request.out_path = "commands_tmp_eval.csv";
    const Outcome written = run(request);
    CHECK(written.status == 0);
    CHECK(written.out.empty());

    std::ifstream in(request.out_path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream content;
    content << in.rdbuf();
    in.close();
    std::remove(request.out_path.c_str());

    request.out_path.clear();
    const Outcome direct = run(request);
    CHECK(content.str() == direct.out);

    request.out_path = "no/such/dir/out.csv";
    const Outcome failed = run(request);
    CHECK(failed.status == 1);
    CHECK(failed.err.find("no/such/dir/out.csv") != std::string::npos);
}

TEST_CASE("identical requests produce identical bytes") {
    RunRequest request = base("sweep", "hawk-dove");
    request.betas = "0:4:1";
    request.init = "0.6,0.5";
    request.sequence = "2,1";
    const Outcome a = run(request);
    const Outcome b = run(request);
    CHECK(a.out == b.out);
    CHECK(a.status == 0);
}
