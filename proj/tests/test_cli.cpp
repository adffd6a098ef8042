#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <regex>
#include <sstream>

#include "acrelax/cli.hpp"
#include "support/fixtures.hpp"

using fixtures::data_path;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = acrelax::cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path tmp_dir(const char* leaf) {
    const char* env = std::getenv("ACRELAX_TEST_TMP");
    const fs::path dir = (env ? fs::path(env) : fs::temp_directory_path() / "acrelax_cli_tmp") / leaf;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(cli({}).code == 1);
    const Run bad_flag = cli({"solve", "--case", data_path("case9.m"), "--frobnicate"});
    CHECK(bad_flag.code == 1);
    CHECK(bad_flag.err.find("frobnicate") != std::string::npos);
    CHECK(cli({"solve"}).code == 1);  // --case is required
    CHECK(cli({"nonsense"}).code == 1);
    CHECK(cli({"solve", "--case", data_path("no_such_case.m")}).code == 1);
    CHECK(cli({"solve", "--case", data_path("case9.m"), "--method", "lp"}).code == 1);
    CHECK(cli({"solve", "--case", data_path("case9.m"), "--lambda", "0.5,1"}).code == 1);
    CHECK(cli({"sweep", "--case", data_path("case9.m"), "--lambdas", "2:1:0.5"}).code == 1);
    CHECK(cli({"sweep", "--case", data_path("case9.m"), "--lambda", "1", "--lambdas", "1:2:1"}).code == 1);
    CHECK(cli({"solve", "--case", data_path("case9.m"), "--tol", "-1"}).code == 1);
    CHECK(cli({"cycles", "--case", data_path("case9.m"), "--cycle-source", "chordless", "--max-cycle-len", "2"})
              .code == 1);
    CHECK(cli({"report", "--out", (fs::temp_directory_path() / "acrelax_no_reports_here").string()}).code != 0);
}

TEST_CASE("help exits with 0") {
    const Run r = cli({"--help"});
    CHECK(r.code == 0);
    for (const char* sub : {"solve", "sweep", "cycles", "cliques", "report"}) CHECK(r.out.find(sub) != std::string::npos);
    CHECK(cli({"sweep", "--help"}).out.find("--lambdas") != std::string::npos);
}

TEST_CASE("cycles lists the fundamental basis") {
    const Run r = cli({"cycles", "--case", data_path("case14.m")});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("case14: 7 basis cycles\n", 0) == 0);
    const std::regex line(R"(cycle \d+ \(len \d+\):( \d+)+)");
    int n = 0;
    std::istringstream in(r.out);
    std::string l;
    std::getline(in, l);
    while (std::getline(in, l)) {
        CHECK(std::regex_match(l, line));
        ++n;
    }
    CHECK(n == 7);

    const Run c = cli({"cycles", "--case", data_path("case30.m"), "--cycle-source", "chordless", "--max-cycle-len", "4"});
    REQUIRE(c.code == 0);
    CHECK(c.out.rfind("case30: 8 chordless cycles\n", 0) == 0);
}

TEST_CASE("cliques lists the chordal extension") {
    const Run r = cli({"cliques", "--case", data_path("case9.m")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("maximal cliques") != std::string::npos);
    CHECK(r.out.find("clique 0 (size ") != std::string::npos);
}

TEST_CASE("solve reports objective and gap") {
    const Run r = cli({"solve", "--case", data_path("case14.m"), "--method", "sdp", "--lambda", "1.25"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header.find("gap_pct") != std::string::npos);
    std::istringstream fields(row);
    std::string name, lambda, method, status, objective, gap;
    fields >> name >> lambda >> method >> status >> objective >> gap;
    CHECK(name == "case14");
    CHECK(method == "sdp");
    CHECK(status == "optimal");
    CHECK(std::stod(objective) == doctest::Approx(10708.000070409364).epsilon(2e-6));
    CHECK(std::abs(std::stod(gap)) <= 0.01);
    CHECK(r.out.find("cliques (sdp)") != std::string::npos);
    CHECK(r.out.find("cycles (sdp)") != std::string::npos);

    const Run nogap = cli({"solve", "--case", data_path("case9.m"), "--method", "socp", "--no-gap"});
    REQUIRE(nogap.code == 0);
    CHECK(nogap.out.find(" - ") != std::string::npos);
}

TEST_CASE("infeasible scenario is a result, not an error") {
    const Run r = cli({"solve", "--case", data_path("case30.m"), "--method", "sdp", "--lambda", "1.5", "--no-gap"});
    CHECK(r.code == 0);
    CHECK(r.out.find("infeasible") != std::string::npos);
    // a requested nl solve that fails is reported through the exit code
    const Run nl = cli({"solve", "--case", data_path("case30.m"), "--method", "nl", "--lambda", "1.5"});
    CHECK(nl.code == 2);
}

TEST_CASE("sweep then report") {
    const fs::path dir = tmp_dir("sweep");
    const Run s = cli({"sweep", "--case", data_path("case9.m"), "--methods", "socp,nl", "--lambdas", "0.5:1:0.5",
                       "--out", dir.string(), "--threads", "1"});
    REQUIRE(s.code == 0);
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(fs::exists(dir / "tr.csv"));
    CHECK(fs::exists(dir / "cycles.csv"));
    CHECK(fs::exists(dir / "case9_objective.svg"));
    CHECK(s.out.find("wrote ") != std::string::npos);

    fs::remove(dir / "case9_objective.svg");
    const Run r = cli({"report", "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "case9_objective.svg"));
    CHECK(r.out.find("regenerated") != std::string::npos);
    CHECK(r.out.find("local_optimal") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("argc/argv entry point") {
    const char* argv[] = {"acrelax", "cycles", "--case", nullptr};
    const std::string path = data_path("case9.m");
    argv[3] = path.c_str();
    std::ostringstream out, err;
    CHECK(acrelax::cli_main(4, argv, out, err) == 0);
    CHECK(out.str().rfind("case9: 1 basis cycles", 0) == 0);
}
