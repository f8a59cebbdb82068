#include <doctest.h>

#include <cmath>

#include "focp/special_functions.hpp"

using focp::FracOrder;

TEST_CASE("gamma hits exact factorials on integer arguments") {
  CHECK(focp::gamma(1.0) == 1.0);
  CHECK(focp::gamma(2.0) == 1.0);
  CHECK(focp::gamma(5.0) == 24.0);
  CHECK(focp::gamma(10.0) == 362880.0);
}

TEST_CASE("gamma matches a high-precision reference table to 1e-12 relative") {
  // Values computed once at 40-digit precision.
  const struct {
    double x, gamma_x;
  } table[] = {
      {0.1, 9.513507698668731836292},  {0.25, 3.625609908221908311931},
      {0.5, 1.772453850905516027298},  {0.75, 1.225416702465177645129},
      {0.9, 1.068628702119319354897},  {1.5, 0.8862269254527580136491},
      {3.3, 2.683437381955768793596},  {4.2, 7.756689535793177638695},
      {6.7, 413.4075167652706955633},  {7.5, 1871.254305797788346476},
      {12.3, 83385367.8999698547129},  {18.1, 473698533642280.9003113},
      {20.0, 121645100408832000.0},
  };
  for (const auto& row : table)
    CHECK(focp::gamma(row.x) == doctest::Approx(row.gamma_x).epsilon(1e-12));
}

TEST_CASE("gamma recurrence x*gamma(x) = gamma(x+1)") {
  for (double x : {0.5, 0.9, 1.5, 3.3, 0.123, 7.77, 14.2})
    CHECK(x * focp::gamma(x) == doctest::Approx(focp::gamma(x + 1.0)).epsilon(1e-10));
}

TEST_CASE("gamma rejects nonpositive arguments") {
  CHECK_THROWS_AS(focp::gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(focp::gamma(-1.5), std::domain_error);
}

TEST_CASE("mittag_leffler reduces to exp at order 1") {
  CHECK(focp::mittag_leffler(FracOrder(1.0), -2.0) ==
        doctest::Approx(0.135335283236612691894).epsilon(1e-14));
  CHECK(focp::mittag_leffler(FracOrder(1.0), 1.0) ==
        doctest::Approx(2.71828182845904523536).epsilon(1e-14));
}

TEST_CASE("mittag_leffler at z = 0 is the leading series term") {
  CHECK(focp::mittag_leffler(FracOrder(0.5), 0.0) == 1.0);
}

TEST_CASE("mittag_leffler matches extended-precision series values") {
  // Reference values from a >=200-term summation at 40-digit precision.
  const struct {
    double alpha, z, value;
  } table[] = {
      {0.9, -1.0, 0.3760660214246418811773},  {0.95, -1.0, 0.3715736200306788103226},
      {0.99, -1.0, 0.368548318060339616291},  {0.5, -0.5, 0.6156903441929258748708},
      {0.7, -3.0, 0.137897109665027071834},   {0.8, 2.0, 13.41574888781901695209},
      {0.6, -8.0, 0.05860974263633203786158}, {0.9, -30.0, 0.003713707698459852958884},
  };
  for (const auto& row : table) {
    const double got = focp::mittag_leffler(FracOrder(row.alpha), row.z);
    CHECK(std::abs(got - row.value) <= 1e-10);
  }
  // Larger results cannot carry 1e-10 absolute accuracy in a double; they
  // are correctly rounded instead.
  CHECK(focp::mittag_leffler(FracOrder(0.5), 4.0) ==
        doctest::Approx(17772220.90401628764846).epsilon(1e-14));
  CHECK(focp::mittag_leffler(FracOrder(0.75), 10.0) ==
        doctest::Approx(3030607625.290221872571).epsilon(1e-14));
}

TEST_CASE("mittag_leffler domain and budget errors") {
  CHECK_THROWS_AS(focp::mittag_leffler(FracOrder(0.9), 50.1), std::domain_error);
  CHECK_THROWS_AS(focp::mittag_leffler(FracOrder(0.9), -70.0), std::domain_error);
  // At alpha = 0.1 and z = 50 the series needs ~50^10 terms; the budget
  // trips instead of spinning.
  CHECK_THROWS_AS(focp::mittag_leffler(FracOrder(0.1), 50.0), focp::no_convergence);
}
