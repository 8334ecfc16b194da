#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string output;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(KDS_CLI_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p)) r.output += buf;
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("kds_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp_without_timestamp(const fs::path& f) {
    std::ifstream in(f);
    std::ostringstream os;
    std::string line;
    while (std::getline(in, line))
        if (line.find("timestamp") == std::string::npos) os << line << '\n';
    return os.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("metric info writes its table") {
    const auto d = scratch("metric");
    const auto r = run("--out " + d.string() + " --a 0.01 metric info");
    CHECK(r.status == 0);
    const fs::path f = d / "metric_info.csv";
    REQUIRE(fs::exists(f));
    const std::string text = slurp_without_timestamp(f);
    CHECK(text.find("# kds metric info") != std::string::npos);
    CHECK(text.find("params.a=0.01") != std::string::npos);
}

TEST_CASE("usage errors exit with status 2 and name the flag") {
    const auto d = scratch("usage");
    const auto r = run("--out " + d.string() + " qnm scan --box 1,2,3");
    CHECK(r.status == 2);
    CHECK(r.output.find("--box") != std::string::npos);
    CHECK(run("--out " + d.string() + " qnm scan --box 1,0,0,1").status == 2);
    CHECK(run("--out " + d.string() + " qnm scan").status == 2);
    CHECK(run("no-such-command").status == 2);

    const fs::path cfg = d / "bad.ini";
    std::ofstream(cfg) << "[params]\nM0 = 0.1\nmystery = 4\n";
    const auto u = run("--config " + cfg.string() + " --out " + d.string() + " metric info");
    CHECK(u.status == 2);
    CHECK(u.output.find("params.mystery") != std::string::npos);
}

TEST_CASE("domain errors exit with status 1") {
    const auto d = scratch("domain");
    const auto r = run("--out " + d.string() + " --M0 0.2 metric info");
    CHECK(r.status == 1);
    CHECK(r.output.find("NoHorizonRegion") != std::string::npos);
}

TEST_CASE("config file and flags combine, flags win") {
    const auto d = scratch("config");
    const fs::path cfg = d / "run.ini";
    std::ofstream(cfg) << "[params]\na = 0.02\n[radial]\nomega = 1.0, -0.2\nlambda = 4\nk = 1\n";
    const auto r = run("--config " + cfg.string() + " --out " + d.string() + " --a 0.01 radial wronskian");
    CHECK(r.status == 0);
    const std::string text = slurp_without_timestamp(d / "wronskian.csv");
    CHECK(text.find("params.a=0.01") != std::string::npos);
    CHECK(text.find("radial.lambda=4") != std::string::npos);
}

TEST_CASE("outputs are reproducible apart from the timestamp") {
    const auto d = scratch("det");
    const std::string args = "--out " + d.string() + " --a 0.01 angular table --omega 1.5,-0.2 --k-range -1,1 --l-max 3";
    REQUIRE(run(args).status == 0);
    const auto a = slurp_without_timestamp(d / "angular_table.csv");
    REQUIRE(run(args).status == 0);
    const auto b = slurp_without_timestamp(d / "angular_table.csv");
    CHECK(!a.empty());
    CHECK(a == b);
}

TEST_CASE("qnm find with a WKB seed") {
    const auto d = scratch("qnm");
    const auto r = run("--out " + d.string() + " qnm find --wkb --l-max 1 --n-max 0");
    CHECK(r.status == 0);
    CHECK(fs::exists(d / "qnm_find.jsonl"));
    CHECK(fs::exists(d / "qnm_find.csv"));
}

TEST_CASE("verify runs a selected criterion") {
    const auto d = scratch("verify");
    const auto r = run("--out " + d.string() + " verify --only 7");
    CHECK(r.status == 0);
    CHECK(r.output.find("[PASS] 7") != std::string::npos);
    CHECK(fs::exists(d / "acceptance.csv"));
}

}
