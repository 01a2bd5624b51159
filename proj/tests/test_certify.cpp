#include "emden/certify.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace emden;

namespace {

bool has(const std::vector<std::string>& list, const std::string& item) {
    return std::find(list.begin(), list.end(), item) != list.end();
}

}  // namespace

TEST_CASE("bound keys") {
    const ProblemSpec spec{3, 2.0, 0.5, 1.0, Variant::Absorption};
    const RadialGrid grid = make_grid(spec, 9, Grading::Uniform);
    CHECK(bound_key({"Eq23", Profile::constant(grid, 0.0), false}, true) == "upper_eq23");
    CHECK(bound_key({"PicardStep2", Profile::constant(grid, 0.0), false}, false) == "lower_picardstep2");
}

TEST_CASE("check_bracketing margins") {
    const ProblemSpec spec{3, 2.0, 0.5, 1.0, Variant::Absorption};
    const RadialGrid grid = make_grid(spec, 9, Grading::Uniform);
    const Profile u = Profile::constant(grid, 0.5);
    BoundSet set;
    set.uppers.push_back({"Hi", Profile::constant(grid, 0.7), false});
    set.lowers.push_back({"Lo", Profile::constant(grid, 0.5 + 1e-9), true});
    const auto m = check_bracketing(u, set, 1e-8);
    REQUIRE(m.size() == 2);
    CHECK(m[0].key == "upper_hi");
    CHECK(m[0].upper);
    CHECK(m[0].margin == doctest::Approx(0.2));
    CHECK(m[0].satisfied);
    CHECK(m[1].key == "lower_lo");
    CHECK(m[1].conditional);
    CHECK(m[1].margin == doctest::Approx(-1e-9));
    CHECK(m[1].satisfied);
    CHECK_FALSE(check_bracketing(u, set, 1e-10)[1].satisfied);

    const RadialGrid other = make_grid(spec, 10, Grading::Uniform);
    CHECK_THROWS_AS(check_bracketing(Profile::constant(other, 0.5), set, 1e-8), Error);
}

TEST_CASE("canonical absorption case is certified") {
    const ProblemSpec spec{3, 2.0, 0.5, 1.0, Variant::Absorption};
    const CertifyOutcome out = certify_detailed(spec);
    const Certificate& c = out.certificate;
    CHECK(c.verdict == Verdict::Certified);
    CHECK(c.failures.empty());
    CHECK(c.caveats.empty());
    CHECK(c.grid_size == 1025);
    CHECK(c.solver_gap <= 1e-6);
    CHECK(c.boundary_mismatch <= 1e-8);
    CHECK(c.positivity_margin >= -1e-15);
    CHECK(c.ordering_margin >= -c.tolerance);
    CHECK(c.ladder_nested);
    std::vector<std::string> keys;
    for (const auto& m : c.margins) {
        keys.push_back(m.key);
        CHECK(m.satisfied);
    }
    CHECK(has(keys, "upper_eq23"));
    CHECK(has(keys, "lower_eq25"));
    CHECK(has(keys, "lower_picardstep2"));
    CHECK(has(keys, "upper_picardstep3"));
    CHECK(out.solution.size() == 1025);
    CHECK(out.fd_solution.size() == 1025);
}

TEST_CASE("Laplace and source cases") {
    const Certificate lap = certify({4, 2.0, 0.3, 2.0, Variant::Laplace});
    CHECK(lap.verdict == Verdict::Certified);
    CHECK(lap.margins.empty());
    CHECK(std::isinf(lap.ordering_margin));

    const Certificate src = certify({3, 2.0, 0.5, 0.3, Variant::Source});
    CHECK(src.verdict == Verdict::Certified);
    for (const auto& m : src.margins) CHECK(m.satisfied);
}

TEST_CASE("large-k absorption: the quadratic lower bound becomes a caveat") {
    const Certificate c = certify({3, 2.0, 0.1, 5.0, Variant::Absorption});
    CHECK(c.failures.empty());
    for (const auto& m : c.margins)
        if (m.key == "lower_eq25" && !m.satisfied) CHECK(has(c.caveats, "Eq25LowerViolatedLargeK"));
    CHECK(c.verdict != Verdict::Failed);
}

TEST_CASE("a tight gap tolerance fails the certificate") {
    CertifyConfig cfg;
    cfg.grid_size = 65;
    cfg.gap_tolerance = 1e-14;
    const Certificate c = certify({3, 2.0, 0.5, 1.0, Variant::Absorption}, cfg);
    CHECK(c.verdict == Verdict::Failed);
    CHECK(has(c.failures, "SolverDisagreement"));
}

TEST_CASE("certification is deterministic") {
    const ProblemSpec spec{4, 2.0, 0.2, 0.7, Variant::Absorption};
    CHECK(to_json(certify(spec)).dump() == to_json(certify(spec)).dump());
}

TEST_CASE("validation and solver errors") {
    try {
        certify({3, 5.1, 0.5, 1.0, Variant::Absorption});
        FAIL("expected ExponentOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ExponentOutOfRange);
    }
    CertifyConfig cfg;
    cfg.newton.max_iterations = 1;
    try {
        certify({3, 2.0, 0.5, 1.0, Variant::Absorption}, cfg);
        FAIL("expected SolveFailed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SolveFailed);
    }
}

TEST_CASE("certificate JSON") {
    const nlohmann::json j = to_json(certify({3, 2.0, 0.5, 1.0, Variant::Absorption}));
    CHECK(j["verdict"] == "Certified");
    CHECK(j["spec"]["variant"] == "absorption");
    CHECK(j["spec"]["n"] == 3);
    CHECK(j["margins"].contains("upper_eq23"));
    CHECK(j["flags"]["went_negative"] == false);

    Certificate c;
    c.ordering_margin = std::numeric_limits<double>::infinity();
    CHECK(to_json(c)["ordering_margin"].is_null());
}
