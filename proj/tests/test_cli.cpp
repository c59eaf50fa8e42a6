#include "csv_io.hpp"
#include "manifest.hpp"

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace bjj::io;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("bjj_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

struct RunResult {
    int code;
    std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(BJJ_CLI_PATH) + " " + args + " 2> " + err.string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    std::ifstream in(err);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("CSV round trip is exact") {
    const auto dir = scratch_dir("csv");
    CsvTable t{"demo", {"a", "b"}, {}};
    t.rows.push_back({0.1, -1.0 / 3.0});
    t.rows.push_back({1e-300, 6.02214076e23});
    t.rows.push_back({std::numeric_limits<double>::quiet_NaN(), -std::numeric_limits<double>::infinity()});
    write_csv(dir / "t.csv", t);
    const auto r = read_csv(dir / "t.csv");
    CHECK(r.schema == "demo");
    CHECK(r.columns == t.columns);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0][0] == 0.1);
    CHECK(r.rows[0][1] == -1.0 / 3.0);
    CHECK(r.rows[1][0] == 1e-300);
    CHECK(std::isnan(r.rows[2][0]));
    CHECK(r.values("b")[2] == -std::numeric_limits<double>::infinity());
    CHECK_THROWS(r.column("c"));

    std::ofstream(dir / "bad.csv") << "# bjj-csv v1 x\na,b\n1,2,3\n";
    CHECK_THROWS(read_csv(dir / "bad.csv"));
    std::ofstream(dir / "nohdr.csv") << "a,b\n1,2\n";
    CHECK_THROWS(read_csv(dir / "nohdr.csv"));
    fs::remove_all(dir);
}

TEST_CASE("manifest digests detect modified outputs") {
    const auto dir = scratch_dir("manifest");
    std::ofstream(dir / "out.txt") << "abc";
    CHECK(sha256_file(dir / "out.txt") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    RunManifest m("demo", {{"n", 3}});
    m.add_seed("search", 42);
    m.add_output(dir / "out.txt");
    m.write(dir / "demo.manifest.json");
    CHECK(verify_manifest(dir / "demo.manifest.json").empty());
    std::ofstream(dir / "out.txt") << "abd";
    CHECK(verify_manifest(dir / "demo.manifest.json").size() == 1);
    fs::remove_all(dir);
}

TEST_CASE("spectrum command writes CSV and manifest") {
    const auto dir = scratch_dir("spectrum");
    const auto r = run_cli("spectrum -N 2 -J 1 -U 2 --out-dir " + dir.string(), dir);
    REQUIRE(r.code == 0);
    const auto t = read_csv(dir / "spectrum.csv");
    const auto e = t.values("energy");
    REQUIRE(e.size() == 3);
    CHECK(e[0] == doctest::Approx(1.0 - std::sqrt(5.0)));
    CHECK(e[2] == doctest::Approx(1.0 + std::sqrt(5.0)));
    CHECK(verify_manifest(dir / "spectrum.manifest.json").empty());
    fs::remove_all(dir);
}

TEST_CASE("config file values yield to the command line") {
    const auto dir = scratch_dir("config");
    std::ofstream(dir / "run.cfg") << "# comment\nn-particles = 2\ninteraction = 2\n";
    auto r = run_cli("spectrum --config " + (dir / "run.cfg").string() + " --out-dir " + dir.string(), dir);
    REQUIRE(r.code == 0);
    CHECK(read_csv(dir / "spectrum.csv").rows.size() == 3);
    r = run_cli("spectrum --config " + (dir / "run.cfg").string() + " -N 4 --out-dir " + dir.string(), dir);
    REQUIRE(r.code == 0);
    CHECK(read_csv(dir / "spectrum.csv").rows.size() == 5);

    std::ofstream(dir / "bad.cfg") << "n-particles = 2\nbogus = 1\n";
    r = run_cli("spectrum --config " + (dir / "bad.cfg").string() + " --out-dir " + dir.string(), dir);
    CHECK(r.code == 2);
    fs::remove_all(dir);
}

TEST_CASE("exit codes and structured errors") {
    const auto dir = scratch_dir("errors");
    auto r = run_cli("spectrum -N 10 -U -1 --out-dir " + dir.string(), dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("\"exit_code\":2") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "spectrum.csv"));

    r = run_cli("spectrum --no-such-flag", dir);
    CHECK(r.code == 2);
    r = run_cli("", dir);
    CHECK(r.code == 2);
    r = run_cli("landscape -N 10 --kind quintic --tau 0.1 --out-dir " + dir.string(), dir);
    CHECK(r.code == 2);
    fs::remove_all(dir);
}

TEST_CASE("distribution command normalizes") {
    const auto dir = scratch_dir("dist");
    const auto r = run_cli("distribution -N 40 --ui 0 --uf 0.3 --mode linear --tau 0.5 --exponential --out-dir " +
                               dir.string(), dir);
    REQUIRE(r.code == 0);
    double total = 0.0;
    for (double p : read_csv(dir / "distribution.csv").values("probability")) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fs::exists(dir / "qho_distribution.csv"));
    CHECK(verify_manifest(dir / "distribution.manifest.json").empty());
    fs::remove_all(dir);
}

TEST_CASE("optimize records its seed") {
    const auto dir = scratch_dir("opt");
    const auto r = run_cli("optimize -N 12 --kinds cubic --taus 0.1 --lower -2 --upper 2 --seed 7 --out-dir " +
                               dir.string(), dir);
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "optimize.manifest.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j.at("seeds").dump().find('7') != std::string::npos);
    CHECK(read_csv(dir / "optimize_cubic.csv").rows.size() == 1);
    fs::remove_all(dir);
}

}  // TEST_SUITE
