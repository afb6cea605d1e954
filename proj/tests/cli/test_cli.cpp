/// @file test_cli.cpp
/// @brief Runs the psim executable end to end and checks exit codes and outputs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

struct Tmp {
    fs::path dir;
    Tmp() {
        static int counter = 0;
        dir = fs::temp_directory_path() / ("psim_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(dir);
    }
    ~Tmp() { fs::remove_all(dir); }
    std::string str(const char* name) const { return (dir / name).string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const std::string& args) {
    Tmp t;
    const std::string cmd = std::string("\"") + PSIM_CLI_PATH + "\" " + args + " >\"" + t.str("out") + "\" 2>\"" +
                            t.str("err") + "\"";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(t.dir / "out");
    r.err = slurp(t.dir / "err");
    return r;
}

std::string deterministic_view(const fs::path& report) {
    auto j = nlohmann::json::parse(slurp(report));
    j.erase("timing");
    j.erase("timestamp");
    return j.dump();
}

}  // namespace

TEST_CASE("help and version") {
    for (const char* sub : {"", "simulate", "simulate ns", "simulate stress", "simulate em", "sweep", "superres",
                            "train", "predict", "benchmark", "validate-ghia", "report"}) {
        CAPTURE(sub);
        const Run r = run(std::string(sub) + " --help");
        CHECK(r.code == 0);
        CHECK(r.out.find("Usage") != std::string::npos);
    }
    const Run v = run("--version");
    CHECK(v.code == 0);
    CHECK(v.out.find("1.0.0") != std::string::npos);
}

TEST_CASE("bad arguments exit 1 with a message naming the option") {
    const Run r = run("simulate ns --re -5 --out /tmp/never");
    CHECK(r.code == 1);
    CHECK(r.err.find("--re") != std::string::npos);
    CHECK(run("frobnicate").code == 1);
    CHECK(run("simulate ns --re 100 --grid 32 --out /tmp/never").code == 1);
    CHECK(run("simulate em --psi0 -1 --out /tmp/never").code == 1);
}

TEST_CASE("simulate stress with zero tension writes zeros") {
    Tmp t;
    const Run r = run("simulate stress --tension 0 --grid 11 --out " + t.dir.string());
    REQUIRE(r.code == 0);
    std::ifstream in(t.dir / "lines.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "line_id,s,x,y,sigma_xx");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.substr(line.rfind(',') + 1) == "0");
        ++rows;
    }
    CHECK(rows > 0);
    CHECK(fs::exists(t.dir / "summary.json"));
}

TEST_CASE("simulate ns and em write their outputs") {
    Tmp t;
    REQUIRE(run("simulate ns --re 100 --grid 33 --out " + t.str("ns")).code == 0);
    for (const char* f : {"u.csv", "v.csv", "centerlines.csv", "summary.json"}) CHECK(fs::exists(t.dir / "ns" / f));
    const auto s = nlohmann::json::parse(slurp(t.dir / "ns" / "summary.json"));
    CHECK(s["converged"] == true);

    REQUIRE(run("simulate em --psi0 0.5 --grid 33 --out " + t.str("em")).code == 0);
    for (const char* f : {"psi.csv", "h_mag.csv", "line.csv", "summary.json"}) CHECK(fs::exists(t.dir / "em" / f));
}

TEST_CASE("train and predict memorise the training rows") {
    Tmp t;
    {
        std::ofstream d(t.dir / "train.csv");
        d << "a,b,y\n";
        for (int k = 0; k < 20; ++k) d << k << ',' << (k * 7) % 5 << ',' << k * k << '\n';
    }
    REQUIRE(run("train --data " + t.str("train.csv") + " --features a,b --target y --trees 50 --out " +
                t.str("m.json"))
                .code == 0);
    REQUIRE(run("predict --model " + t.str("m.json") + " --data " + t.str("train.csv") + " --out " +
                t.str("p.csv"))
                .code == 0);
    std::ifstream in(t.dir / "p.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "a,b,y,prediction");
    int rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string a, b, y, p;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, y, ',');
        std::getline(ss, p, ',');
        CHECK(std::stod(p) == std::stod(y));
        ++rows;
    }
    CHECK(rows == 20);

    std::ofstream(t.dir / "other.csv") << "c\n1\n";
    const Run bad = run("predict --model " + t.str("m.json") + " --data " + t.str("other.csv") + " --out " +
                        t.str("q.csv"));
    CHECK(bad.code == 1);
    CHECK(bad.err.find("'a'") != std::string::npos);

    std::ofstream(t.dir / "junk.json") << "{";
    CHECK(run("predict --model " + t.str("junk.json") + " --data " + t.str("train.csv") + " --out " +
              t.str("q.csv"))
              .code == 3);
    CHECK(run("predict --model " + t.str("absent.json") + " --data " + t.str("train.csv") + " --out " +
              t.str("q.csv"))
              .code == 3);
}

TEST_CASE("two-row training set gives a loadable model") {
    Tmp t;
    std::ofstream(t.dir / "two.csv") << "x,y\n0,0\n1,10\n";
    REQUIRE(run("train --data " + t.str("two.csv") + " --features x --target y --out " + t.str("m.json")).code ==
            0);
    std::ofstream(t.dir / "q.csv") << "x\n0.5\n";
    REQUIRE(run("predict --model " + t.str("m.json") + " --data " + t.str("q.csv") + " --out " + t.str("p.csv"))
                .code == 0);
    const std::string p = slurp(t.dir / "p.csv");
    const double v = std::stod(p.substr(p.rfind(',') + 1));
    CHECK(v >= 0.0);
    CHECK(v <= 10.0);
}

TEST_CASE("validate-ghia exit codes") {
    const Run ok = run("validate-ghia --re 100 --grid 65");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("RMSE") != std::string::npos);
    CHECK(run("validate-ghia --re 100 --grid 33 --tol 1e-12").code == 4);
    CHECK(run("validate-ghia --re 100 --grid 33 --reference /nonexistent/ghia_re100_u_vertical.csv").code == 3);
}

TEST_CASE("benchmark output is identical across job counts") {
    Tmp t;
    std::string views[3];
    const int jobs[3] = {1, 2, 8};
    for (int k = 0; k < 3; ++k) {
        const std::string dir = t.str(("j" + std::to_string(jobs[k])).c_str());
        REQUIRE(run("benchmark --experiment stress --fast --jobs " + std::to_string(jobs[k]) + " --out " + dir)
                    .code == 0);
        views[k] = deterministic_view(fs::path(dir) / "stress" / "report.json");
        if (k == 0) {
            CHECK(slurp(fs::path(dir) / "stress" / "comparison.txt").find("T=6000 rmse") != std::string::npos);
        } else {
            CHECK(views[k] == views[0]);
            CHECK(slurp(fs::path(dir) / "stress" / "lines.csv") == slurp(t.dir / "j1" / "stress" / "lines.csv"));
        }
    }

    const Run rep = run("report " + (t.dir / "j1" / "stress" / "report.json").string() + " --format csv");
    CHECK(rep.code == 0);
    CHECK(rep.out.rfind("experiment,quantity,measured,reference,ratio", 0) == 0);
    CHECK(run("report " + t.str("missing.json")).code == 3);
    CHECK(run("benchmark --experiment heat --out " + t.str("x")).code == 1);
}

TEST_CASE("sweep and superres print and accept configs") {
    Tmp t;
    const Run cfg = run("sweep --problem em --print-config");
    REQUIRE(cfg.code == 0);
    auto j = nlohmann::json::parse(cfg.out);
    CHECK(j["problem"] == "em");
    j["magnet"]["domain"]["nx"] = 33;
    j["magnet"]["domain"]["ny"] = 33;
    j["forest"]["n_trees"] = 20;
    std::ofstream(t.dir / "em.json") << j.dump(2);
    REQUIRE(run("sweep --config " + t.str("em.json") + " --out " + t.str("em")).code == 0);
    CHECK(fs::exists(t.dir / "em" / "report.json"));
    CHECK(fs::exists(t.dir / "em" / "lines.csv"));

    REQUIRE(run("superres --source sin --coarse 17 --fine 33 --trees 20 --out " + t.str("sr")).code == 0);
    CHECK(fs::exists(t.dir / "sr" / "predicted_fine.csv"));
    CHECK(run("superres --source sin --coarse 33 --fine 17 --out " + t.str("bad")).code == 1);
}
