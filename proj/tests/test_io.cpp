#include "qsplit/error.hpp"
#include "qsplit/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <sstream>

using namespace qsplit;
using nlohmann::json;

TEST_CASE("empty document gives the defaults") {
    const RunConfig c = parse_run_config("{}");
    CHECK(c.problem.a == std::sqrt(2.0));
    CHECK(c.problem.n == 99);
    CHECK(c.problem.delta == 0.1);
    CHECK(c.run.tol == 1e-13);
    CHECK(std::isinf(c.run.stop_time));
    CHECK(c.converge_time.t_star == 0.25);
    CHECK(c.converge_time.levels == 4);
    CHECK(c.converge_space.options.n_levels == std::vector<int>{24, 49, 99, 199});
    CHECK(c.critical_a.a_lo == 0.5);
    CHECK(c.critical_a.a_hi == 1.2);
    CHECK(c.critical_a.n == 199);
    CHECK(c.critical_a.tol_a == 0.005);
    CHECK(c.critical_a.options.delta == 0.001);
    CHECK(c.validate.n_list == std::vector<int>{3, 8, 16});
}

TEST_CASE("full document") {
    const RunConfig c = parse_run_config(R"({
        "problem": {"a": 0.9, "N": 31, "grid": {"kind": "graded", "grading": 1.5},
                    "nonlinearity": "kawarada", "initial": {"kind": "cosine", "amplitude": 0.2},
                    "delta": 0.05, "quench_threshold": 0.99, "max_steps": 1000},
        "run": {"tol": 1e-12, "stop_time": "inf", "stop_on_violation": false, "oracle": true,
                "oracle_dt_safety": 0.25, "oracle_stride": 3},
        "converge_time": {"t_star": 0.1, "levels": 5, "dt_safety": 0.1, "tol": 1e-12},
        "converge_space": {"t_star": 0.2, "N_levels": [4, 9], "reference_N": 19, "delta": 1e-4,
                           "oracle": "rk4", "dt_safety": 0.3, "implicit_dt": 1e-3, "tol": 1e-12},
        "critical_a": {"a_lo": 0.6, "a_hi": 0.9, "N": 49, "tol_a": 0.01, "budget_time": 50,
                       "delta": 0.01, "stagnation_tol": 1e-9, "stagnation_window": 20,
                       "max_steps": 1000, "tol": 1e-12},
        "validate": {"N_list": [4], "gradings": [3], "taus": [1], "exp_times": [2],
                     "random_vectors": 5, "half_width": 2}
    })");
    CHECK(c.problem.a == 0.9);
    CHECK(c.problem.n == 31);
    CHECK(c.problem.grid_kind == "graded");
    CHECK(c.problem.grading == 1.5);
    CHECK(c.problem.initial == "cosine");
    CHECK(c.problem.initial_amplitude == 0.2);
    CHECK(c.problem.quench_threshold == 0.99);
    CHECK(c.problem.max_steps == 1000);
    CHECK_FALSE(c.run.stop_on_violation);
    CHECK(c.run.oracle);
    CHECK(c.run.oracle_stride == 3);
    CHECK(c.converge_time.levels == 5);
    CHECK(c.converge_space.options.n_levels == std::vector<int>{4, 9});
    CHECK(c.converge_space.options.oracle == OracleMethod::Rk4);
    CHECK(c.critical_a.options.stagnation_window == 20);
    CHECK(c.validate.gradings == std::vector<double>{3.0});
    CHECK(c.validate.half_width == 2.0);
}

TEST_CASE("strict parsing") {
    auto rejects = [](const std::string& text, const std::string& needle) {
        try {
            parse_run_config(text);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidArgument);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
            return;
        }
        FAIL("accepted: " << text);
    };
    rejects(R"({"problem": {"bogus": 1}})", "bogus");
    rejects(R"({"extra": {}})", "extra");
    rejects(R"({"problem": {"N": 2.5}})", "N");
    rejects(R"({"problem": {"a": "wide"}})", "a");
    rejects(R"({"run": {"stop_on_violation": 1}})", "stop_on_violation");
    rejects(R"({"converge_space": {"oracle": "euler"}})", "oracle");
    rejects("[1, 2]", "object");
    rejects("{not json", "");
}

TEST_CASE("missing config file names the path") {
    try {
        load_run_config("/nonexistent/dir/cfg.json");
        FAIL("expected failure");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dir/cfg.json") != std::string::npos);
    }
}

TEST_CASE("json writer prints 17 significant digits") {
    std::ostringstream os;
    JsonWriter w(os);
    w.begin_object()
        .key("x").value(0.1)
        .key("n").value(3)
        .key("b").value(true)
        .key("s").value("a\"b")
        .key("inf").value(std::numeric_limits<double>::infinity())
        .key("z").null()
        .key("v").begin_array().value(1.0).value(-2.5).end_array()
        .end_object()
        .finish();
    const std::string text = os.str();
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.back() == '\n');
    const json j = json::parse(text);
    CHECK(j["x"].get<double>() == 0.1);
    CHECK(j["n"] == 3);
    CHECK(j["b"] == true);
    CHECK(j["s"] == "a\"b");
    CHECK(j["inf"] == "inf");
    CHECK(j["z"].is_null());
    CHECK(j["v"].size() == 2);
}

TEST_CASE("grid JSON") {
    std::ostringstream os;
    write_grid_json(os, build_uniform(std::sqrt(2.0), 1));
    const json j = json::parse(os.str());
    CHECK(j["a"].get<double>() == std::sqrt(2.0));
    CHECK(j["N"] == 1);
    REQUIRE(j["x"].size() == 3);
    CHECK(j["x"][0].get<double>() == -std::sqrt(2.0));
    CHECK(os.str().find("1.4142135623730951") != std::string::npos);
}

TEST_CASE("summary JSON keys") {
    RunSummary s;
    s.quenched = true;
    s.quench_time = 0.5;
    s.steps = 10;
    s.tau0 = 0.08;
    s.bound_sigma_tau = 4.2;
    s.violations.push_back({3, "sub_unity_bound", "margin -1e-16", false});
    std::ostringstream os;
    write_summary_json(os, s);
    const json j = json::parse(os.str());
    for (const char* k : {"quenched", "quench_time", "steps", "tau0", "bound_Sigma_tau", "violations"})
        CHECK(j.contains(k));
    CHECK(j["violations"][0]["k"] == 3);
    CHECK(j["violations"][0]["hard"] == false);
}

TEST_CASE("order report writers") {
    OrderReport r;
    r.kind = "time";
    r.t_star = 0.25;
    r.levels = {{0.1, 0.04, 9, 4, 0}, {0.05, 0.02, 9, 8, 0}};
    fill_orders(r);
    std::ostringstream js, cs;
    write_order_report_json(js, r);
    write_order_report_csv(cs, r);
    const json j = json::parse(js.str());
    CHECK(j["summary_order"].get<double>() == doctest::Approx(1.0));
    std::istringstream is(cs.str());
    std::string header, row1, row2;
    std::getline(is, header);
    std::getline(is, row1);
    std::getline(is, row2);
    CHECK(header == "resolution,N,error,steps,hard_violations,observed_order");
    CHECK(row1 == "0.10000000000000001,9,0.040000000000000001,4,0,");
    CHECK(row2.rfind("0.050000000000000003,9,0.02,8,0,1", 0) == 0);
}
