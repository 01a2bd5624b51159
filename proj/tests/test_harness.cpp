#include "emden/harness.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

using namespace emden;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("emden_harness_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    return out;
}

SweepConfig single(Variant v = Variant::Absorption) {
    SweepConfig c;
    c.variant = v;
    c.n = {3};
    c.q = {2.0};
    c.d = {0.5};
    c.k = {1.0};
    return c;
}

}  // namespace

TEST_CASE("format_number uses 17 significant digits") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-2.5e-10) == "-2.5000000000000002e-10");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("expand_cases") {
    SweepConfig c = single();
    c.n = {3, 4};
    c.q = {1.5, 2.0};
    c.d = {0.1, 0.3, 0.5};
    c.k = {0.5, 1.0};
    const auto cases = expand_cases(c);
    REQUIRE(cases.size() == 24);
    CHECK(cases[0] == ProblemSpec{3, 1.5, 0.1, 0.5, Variant::Absorption});
    CHECK(cases[1] == ProblemSpec{3, 1.5, 0.1, 1.0, Variant::Absorption});
    CHECK(cases[23] == ProblemSpec{4, 2.0, 0.5, 1.0, Variant::Absorption});

    SweepConfig lap = c;
    lap.variant = Variant::Laplace;
    CHECK(expand_cases(lap).size() == 12);

    SweepConfig capped = c;
    capped.max_cases = 10;
    try {
        expand_cases(capped);
        FAIL("expected CapExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CapExceeded);
    }
    SweepConfig empty = c;
    empty.d.clear();
    try {
        expand_cases(empty);
        FAIL("expected InvalidConfig");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidConfig);
    }
    SweepConfig bad = c;
    bad.q = {2.0, 5.5};
    try {
        expand_cases(bad);
        FAIL("expected ExponentOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ExponentOutOfRange);
    }
}

TEST_CASE("sweep_from_json") {
    const auto j = nlohmann::json::parse(R"({"variant": "source", "n": 4, "q": [1.5, 2],
        "d": [0.2], "k": 0.5, "grid_size": 257, "grading": "uniform", "mode": "calibrate", "jobs": 2})");
    const SweepConfig c = sweep_from_json(j);
    CHECK(c.variant == Variant::Source);
    CHECK(c.n == std::vector<int>{4});
    CHECK(c.q == std::vector<double>{1.5, 2.0});
    CHECK(c.k == std::vector<double>{0.5});
    CHECK(c.grid_size == 257);
    CHECK(c.grading == Grading::Uniform);
    CHECK(c.mode == Mode::Calibrate);
    CHECK(c.jobs == 2);

    CHECK_THROWS_AS(sweep_from_json(nlohmann::json::parse(R"({"dimension": 3})")), Error);
    CHECK_THROWS_AS(sweep_from_json(nlohmann::json::parse(R"({"variant": "sink"})")), Error);
    CHECK_THROWS_AS(sweep_from_json(nlohmann::json::parse(R"({"n": "three"})")), Error);
}

TEST_CASE("run_parallel visits every index once") {
    for (unsigned jobs : {0u, 1u, 3u, 16u}) {
        std::vector<std::atomic<int>> hits(50);
        run_parallel(hits.size(), jobs, [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
    run_parallel(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("certify_cases keeps case order regardless of job count") {
    SweepConfig c = single();
    c.d = {0.2, 0.5};
    c.k = {0.3, 1.0};
    CertifyConfig cc;
    cc.grid_size = 129;
    const auto a = certify_cases(expand_cases(c), cc, 1);
    const auto b = certify_cases(expand_cases(c), cc, 4);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].index == i);
        CHECK(a[i].spec == b[i].spec);
        CHECK(to_json(*a[i].certificate).dump() == to_json(*b[i].certificate).dump());
    }
}

TEST_CASE("single-case run writes certificate and profile") {
    const fs::path dir = fresh_dir("single");
    SweepConfig c = single();
    c.out_dir = dir.string();
    std::ostringstream out, err;
    const RunResult r = run(c, out, err);
    CHECK(r.exit_code == 0);
    CHECK(out.str() == "Certified\n");
    CHECK(fs::exists(dir / "certificate.json"));
    const auto j = nlohmann::json::parse(slurp(dir / "certificate.json"));
    CHECK(j["verdict"] == "Certified");

    std::ifstream csv(dir / "profile.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("r,u,residual,", 0) == 0);
    CHECK(header.find("upper_eq23") != std::string::npos);
    std::size_t rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 1025);
    CHECK(slurp(dir / "profile.csv").find('\r') == std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("Laplace profile is the harmonic 1/x - 1 for d = 0.5") {
    const fs::path dir = fresh_dir("laplace");
    SweepConfig c = single(Variant::Laplace);
    c.mode = Mode::Profile;
    c.out_dir = dir.string();
    std::ostringstream out, err;
    REQUIRE(run(c, out, err).exit_code == 0);
    std::ifstream csv(dir / "profile.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "r,u,residual");
    double worst = 0.0;
    while (std::getline(csv, line)) {
        const auto cells = split(line);
        const double r = std::stod(cells[0]), u = std::stod(cells[1]);
        worst = std::max(worst, std::abs(u - (1.0 / r - 1.0)));
    }
    CHECK(worst <= 1e-8);
    CHECK_FALSE(fs::exists(dir / "certificate.json"));
    fs::remove_all(dir);
}

TEST_CASE("validation errors exit 3 without writing") {
    const fs::path dir = fresh_dir("invalid");
    SweepConfig c = single();
    c.q = {6.0};
    c.out_dir = dir.string();
    std::ostringstream out, err;
    const RunResult r = run(c, out, err);
    CHECK(r.exit_code == 3);
    CHECK(r.files.empty());
    CHECK(err.str().find("ExponentOutOfRange") != std::string::npos);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("sweep writes per-case JSON and a summary") {
    const fs::path dir = fresh_dir("sweep");
    SweepConfig c = single();
    c.d = {0.3, 0.5};
    c.grid_size = 129;
    c.jobs = 2;
    c.out_dir = dir.string();
    std::ostringstream out, err;
    const RunResult r = run(c, out, err);
    CHECK(r.exit_code == 0);
    CHECK(out.str() == "2 of 2 cases certified\n");
    CHECK(fs::exists(dir / "case_0000.json"));
    CHECK(fs::exists(dir / "case_0001.json"));
    CHECK_FALSE(fs::exists(dir / "profile_0000.csv"));
    std::ifstream summary(dir / "summary.csv");
    std::string header;
    std::getline(summary, header);
    CHECK(header.rfind("index,", 0) == 0);
    std::size_t rows = 0;
    for (std::string line; std::getline(summary, line);) ++rows;
    CHECK(rows == 2);
    fs::remove_all(dir);
}

TEST_CASE("calibrate mode") {
    const fs::path dir = fresh_dir("calibrate");
    SweepConfig c = single(Variant::Laplace);
    c.mode = Mode::Calibrate;
    c.d = {0.1, 0.5};
    c.k = {0.5, 2.0};
    c.grid_size = 129;
    c.out_dir = dir.string();
    std::ostringstream out, err;
    REQUIRE(run(c, out, err).exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "calibration.json"));
    CHECK(j["c"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(j["levels"].size() == 2);
    CHECK(fs::exists(dir / "calibration.csv"));
    fs::remove_all(dir);
}

TEST_CASE("principal-term report") {
    const auto rows = principal_term_report({3, 2.0, 0.5, 0.5, Variant::Absorption}, {0.1, 0.01});
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        const ProblemSpec s{3, 2.0, r.d, 0.5, Variant::Absorption};
        const CoefficientSet c = theorem2_coefficients(s);
        CHECK(r.exact_c1 == c.c1);
        CHECK(r.principal == c.principal);
        CHECK(r.ratio == doctest::Approx(c.c1 / c.principal));
    }
    std::ostringstream os;
    write_principal_csv(os, rows);
    CHECK(os.str().rfind("d,", 0) == 0);
}
