#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hoa/serialize.hpp"
#include "hoa/system.hpp"

using namespace hoa;

TEST_CASE("operator polynomial JSON round-trip") {
    SystemDef sys = builtin_system("six_wave");
    TimeSeriesSolution sol = taylor_solve(sys, "A", 3);
    json j = to_json(sol.series, sys.mode_labels());
    CHECK(operator_poly_from_json(j, sys.mode_labels()) == sol.series);
}

TEST_CASE("coefficients outside int64 survive as strings") {
    OperatorPoly p;
    Rational huge(boost::multiprecision::cpp_int("123456789012345678901234567890"),
                  boost::multiprecision::cpp_int(7));
    p.add_term(NormalMonomial::single(0, 1, 1), SymbolMonomial::of("g", 2),
               GaussianRational(huge, Rational(-3, 4)));
    json j = to_json(p, {"A"});
    CHECK(j[0]["coeff"]["re_num"].is_string());
    CHECK(j[0]["coeff"]["im_num"].is_number());
    CHECK(operator_poly_from_json(j, {"A"}) == p);
}

TEST_CASE("solution JSON carries system, operator and order") {
    SystemDef sys = builtin_system("shg");
    TimeSeriesSolution sol = taylor_solve(sys, "A1", 2);
    json j = to_json(sol, sys.mode_labels());
    CHECK(j["system"] == "shg");
    CHECK(j["operator"] == "A1");
    CHECK(j["order"] == 2);
    CHECK(operator_poly_from_json(j["series"], sys.mode_labels()) == sol.series);
}

TEST_CASE("amplitude polynomial JSON lists matched powers") {
    AmplitudePoly p;
    p.add_term(2, 2, SymbolMonomial::of("g", 2) * SymbolMonomial::of("t", 2),
               GaussianRational(-12));
    json j = to_json(p);
    REQUIRE(j.size() == 1);
    CHECK(j[0]["alpha_star"] == 2);
    CHECK(j[0]["alpha"] == 2);
    CHECK(j[0]["coeff"]["re_num"] == -12);
    CHECK(j[0]["coeff"]["symbols"]["g"] == 2);
}

TEST_CASE("CSV rows match the header layout") {
    NumericPoint pt;
    pt.g = 1e-3;
    pt.t = 1.0;
    pt.alpha = {1.0, 0.0};
    pt.l = 1;
    pt.d = -1.2e-5;
    pt.A = -0.5;
    pt.R = -0.5;
    std::string row = csv_row("six_wave", pt);
    std::string header = csv_header_sweep();
    CHECK(std::count(row.begin(), row.end(), ',') ==
          std::count(header.begin(), header.end(), ','));
    CHECK(row.rfind("six_wave,1,0.001,1,", 0) == 0);
}
