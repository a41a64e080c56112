#include <doctest.h>

#include <cmath>
#include <sstream>

#include "volsre/error.hpp"
#include "volsre/io.hpp"

using namespace volsre;

TEST_CASE("observation CSV")
{
    std::istringstream a("t,x,sigma2\n0,1.5,2\n\n1,-0.25,1\r\n2, 3e-2 ,1\n");
    const auto x = read_observations_csv(a);
    REQUIRE(x.size() == 3);
    CHECK(x[0] == 1.5);
    CHECK(x[1] == -0.25);
    CHECK(x[2] == 0.03);

    std::istringstream b("x\n1\n2\n");
    CHECK(read_observations_csv(b).size() == 2);

    std::istringstream none("t,y\n0,1\n");
    CHECK_THROWS_WITH_AS(read_observations_csv(none), "line 1: header has no column 'x'", InputError);

    std::istringstream bad("t,x\n0,1\n1,abc\n");
    CHECK_THROWS_WITH_AS(read_observations_csv(bad), "line 3: non-numeric value 'abc' in column 'x'", InputError);

    std::istringstream short_row("t,x\n0,1\n5\n");
    CHECK_THROWS_WITH_AS(read_observations_csv(short_row), "line 3: missing column 'x'", InputError);

    std::istringstream nan_row("x\nnan\n");
    CHECK_THROWS_AS(read_observations_csv(nan_row), InputError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_observations_csv(empty), InputError);
}

TEST_CASE("number formatting round-trips")
{
    for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456789.123456789})
        CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("JSON output")
{
    FitResult f;
    f.theta_hat = {0.1, 0.8, 0.15, 0.0};
    f.qlik = 1.25;
    f.constraint_value = std::log(0.8);
    f.converged = true;
    f.n = 100;
    const nlohmann::json j = to_json(f, ModelKind::Garch11);
    CHECK(j["theta_hat"]["alpha"] == 0.1);
    CHECK(j["theta_hat"]["delta"] == 0.0);
    CHECK(j["converged"] == true);
    CHECK(j["n"] == 100);
    for (const char* k : {"qlik", "constraint", "seed", "starts", "feasible_starts", "iterations"})
        CHECK(j.contains(k));

    LyapunovReport r;
    r.value = -HUGE_VAL;
    r.neg_inf_terms = 2;
    const nlohmann::json l = to_json(r);
    CHECK(l["value"] == "-inf");
    CHECK(l["kind"] == "empirical");
    CHECK(l["neg_inf_terms"] == 2);

    Eigen::MatrixXd m(2, 3);
    m << 1, 2, 3, 4, 5, std::nan("");
    const nlohmann::json mj = matrix_json(m);
    CHECK(mj.size() == 2);
    CHECK(mj[0][2] == 3.0);
    CHECK(mj[1][2] == "nan");

    StudySummary s;
    s.reps = 3;
    s.coords.resize(4);
    const nlohmann::json sj = to_json(s, ModelKind::Garch11);
    CHECK(sj["coordinates"].size() == 3);
    CHECK(sj["coordinates"]["beta"].contains("coverage"));
}
