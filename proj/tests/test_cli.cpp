#include <doctest.h>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "volsre/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("volsre_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args)
{
    const std::string cmd = std::string(VOLSRE_CLI_PATH) + " " + args + " 2>" + (scratch() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

std::string out(const std::string& name) { return (scratch() / name).string(); }

}  // namespace

TEST_CASE("cli simulate, manifest and reproducibility")
{
    REQUIRE(run("simulate --theta 0,0.5,-0.1,0.3 --n 500 --seed 9 --out-dir " + out("sim")) == 0);
    const json c = load(scratch() / "sim" / "config.json");
    CHECK(c["model"] == "egarch11");
    CHECK(c["seed"] == 9);
    CHECK(c["burn_in"] == 2000);
    CHECK(c["dist"] == "normal");
    std::ifstream in(scratch() / "sim" / "path.csv");
    const auto x = volsre::read_observations_csv(in);
    CHECK(x.size() == 500);

    const std::string manifest = slurp(scratch() / "sim" / "MANIFEST");
    CHECK(manifest.find("  config.json\n") != std::string::npos);
    CHECK(manifest.find("  path.csv\n") != std::string::npos);
    CHECK(manifest.substr(0, manifest.find(' ')).size() == 64);

    // Rerunning from the echoed config reproduces the outputs byte for byte.
    REQUIRE(run("simulate --config " + out("sim/config.json") + " --out-dir " + out("sim2")) == 0);
    CHECK(slurp(scratch() / "sim" / "MANIFEST") == slurp(scratch() / "sim2" / "MANIFEST"));

    // Nonstationary GARCH is rejected.
    CHECK(run("simulate --model garch11 --theta 0.1,0.5,3 --n 10 --out-dir " + out("bad")) == 2);
    CHECK(slurp(scratch() / "stderr.txt").find("infeasible") != std::string::npos);
}

TEST_CASE("cli usage errors")
{
    CHECK(run("simulate --theta 0,0.5 --n 10 --out-dir " + out("u1")) == 1);
    CHECK(run("simulate --theta 0,0.5,-0.1,0.3 --out-dir " + out("u2")) == 1);
    CHECK(slurp(scratch() / "stderr.txt").find("missing required setting 'n'") != std::string::npos);
    CHECK(run("frobnicate") == 1);
    CHECK(run("simulate --theta 0,0.5,-0.1,0.3 --n abc --out-dir " + out("u3")) == 1);
    CHECK(run("--help >/dev/null") == 0);
}

TEST_CASE("cli fit on a constant series and malformed input")
{
    {
        std::ofstream f(scratch() / "const.csv");
        f << "x\n";
        for (int i = 0; i < 300; ++i)
            f << "0.5\n";
    }
    REQUIRE(run("fit --model garch11 --box 1e-8:10,0:0,0:0 --input " + out("const.csv") + " --out-dir " +
                out("fitc")) == 0);
    const json j = load(scratch() / "fitc" / "fit.json");
    CHECK(j["theta_hat"]["alpha"].get<double>() == doctest::Approx(0.25).epsilon(1e-5));
    CHECK(j["forecast_next"].get<double>() == doctest::Approx(0.25).epsilon(1e-5));
    CHECK(load(scratch() / "fitc" / "config.json")["input_sha256"].get<std::string>().size() == 64);
    CHECK(fs::exists(scratch() / "fitc" / "trajectory.csv"));

    {
        std::ofstream f(scratch() / "bad.csv");
        f << "t,x\n1,0.5\n2,oops\n";
    }
    CHECK(run("fit --input " + out("bad.csv") + " --out-dir " + out("fitb")) == 1);
    CHECK(slurp(scratch() / "stderr.txt").find("line 3") != std::string::npos);
    CHECK(run("fit --input " + out("missing.csv") + " --out-dir " + out("fitm")) == 1);
}

TEST_CASE("cli fit recovers simulated parameters")
{
    REQUIRE(run("simulate --model garch11 --theta 0.1,0.8,0.15 --n 4000 --seed 4 --out-dir " + out("gsim")) == 0);
    REQUIRE(run("fit --model garch11 --seed 4 --input " + out("gsim/path.csv") + " --out-dir " + out("gfit")) == 0);
    const json t = load(scratch() / "gfit" / "fit.json")["theta_hat"];
    CHECK(std::abs(t["alpha"].get<double>() - 0.1) < 0.1);
    CHECK(std::abs(t["beta"].get<double>() - 0.8) < 0.1);
    CHECK(std::abs(t["gamma"].get<double>() - 0.15) < 0.1);
}

TEST_CASE("cli diagnose and asymptotics")
{
    REQUIRE(run("diagnose --theta 0,0.5,-0.1,0.3 --m 20000 --out-dir " + out("diag")) == 0);
    const json d = load(scratch() / "diag" / "diagnose.json");
    CHECK(d["ok"] == true);
    CHECK(d["mm_prime"]["ok"] == true);
    CHECK(d["model_implied_lyapunov"]["value"].get<double>() < 0.0);

    CHECK(run("diagnose --theta 0,0,0,2 --m 2000 --out-dir " + out("diag2")) == 2);
    CHECK(load(scratch() / "diag2" / "diagnose.json")["mm_prime"]["ok"] == false);

    REQUIRE(run("asymptotics --theta 0,0.5,-0.1,0.3 --n 20000 --m 5000 --L 200 --out-dir " + out("asy")) == 0);
    const json a = load(scratch() / "asy" / "asymptotics.json");
    CHECK(a["b_diag_closed_form"].size() == 4);
    CHECK(a["b22_printed"].get<double>() == doctest::Approx(6.9769).epsilon(1e-4));
    CHECK(a["report"]["V"].size() == 4);
    CHECK(run("asymptotics --theta 0,0.5,0,6 --n 100 --m 100 --out-dir " + out("asy2")) == 2);
    CHECK(run("asymptotics --theta 0,0.5,-0.1,0.3 --dist t:4 --n 100 --m 100 --out-dir " + out("asy3")) == 2);
}

TEST_CASE("cli smoke study, scan and profile")
{
    REQUIRE(run("study --theta 0,0.5,-0.1,0.3 --n 1000 --reps 2 --m 2000 --L 100 --starts 2 --seed 5 --out-dir " +
                out("study")) == 0);
    std::ifstream in(scratch() / "study" / "study.csv");
    std::string line;
    int rows = 0;
    std::getline(in, line);
    CHECK(line == "rep,alpha,beta,gamma,delta,qlik,converged");
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == 2);
    const json s = load(scratch() / "study" / "summary.json");
    CHECK(s["reps"] == 2);
    CHECK(s["coordinates"].contains("delta"));
    CHECK(s["V"].size() == 4);

    REQUIRE(run("scan --box -0.5:-0.5,0.5:0.5,0:0,0:2 --grid 1,1,1,5 --m 2000 --out-dir " + out("scan")) == 0);
    const std::string scan = slurp(scratch() / "scan" / "scan.csv");
    CHECK(std::count(scan.begin(), scan.end(), '\n') == 6);

    REQUIRE(run("simulate --theta 0,0.5,-0.1,0.3 --n 800 --seed 6 --out-dir " + out("psim")) == 0);
    REQUIRE(run("profile --theta 0,0.5,-0.1,0.3 --axis delta --grid 0.1:0.9:5 --input " + out("psim/path.csv") +
                " --out-dir " + out("prof")) == 0);
    const std::string prof = slurp(scratch() / "prof" / "profile.csv");
    CHECK(prof.rfind("alpha,beta,gamma,delta,qlik,constraint\n", 0) == 0);
    CHECK(std::count(prof.begin(), prof.end(), '\n') == 6);
    CHECK(run("profile --theta 0,0.5,-0.1,0.3 --axis zeta --grid 0:1:2 --input " + out("psim/path.csv") +
              " --out-dir " + out("prof2")) == 1);
}
