#include <doctest.h>

#include <sstream>

#include "homoglab/check.hpp"
#include "support.hpp"

using namespace homoglab;

TEST_SUITE("check") {

TEST_CASE("every invariant suite passes on the defaults") {
    const auto entries = check::run(check::Suite::all);
    std::ostringstream out;
    const bool ok = check::print(entries, out);
    INFO(out.str());
    CHECK(ok);
    for (const char* suite : {"cell", "fibre", "evolution", "norms"}) {
        const bool present = std::any_of(entries.begin(), entries.end(),
                                         [&](const check::Entry& e) { return e.suite == suite; });
        CHECK(present);
    }
}

TEST_CASE("norms subset") {
    const auto entries = check::run(check::Suite::norms);
    CHECK(entries.size() == 4);
    for (const auto& e : entries) CHECK(e.passed);
}

TEST_CASE("corrupted coefficient fails the cell suite with NonElliptic") {
    check::Options opt;
    opt.coefficient = testing::scalar_coefficient(1, {{{0, 0}, testing::scalar(0.5)},
                                                      {{1, 0}, testing::scalar(Complex(0, -0.5))},
                                                      {{-1, 0}, testing::scalar(Complex(0, 0.5))}});
    const auto entries = check::run(check::Suite::cell, opt);
    std::ostringstream out;
    CHECK_FALSE(check::print(entries, out));
    CHECK(out.str().find("NonElliptic") != std::string::npos);
}

TEST_CASE("suite names") {
    CHECK(check::parse_suite("fibre") == check::Suite::fibre);
    CHECK(std::string(check::to_string(check::Suite::all)) == "all");
    CHECK_THROWS_AS(check::parse_suite("everything"), ConfigError);
}

}
