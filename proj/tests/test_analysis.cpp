#include <cmath>
#include <random>

#include "doctest.h"
#include "qtm4f/analysis.hpp"
#include "qtm4f/constants.hpp"
#include "qtm4f/errors.hpp"

using namespace qtm4f;

TEST_CASE("U/A sweep rows") {
  const auto t = sweep_ua(0, 20, 201);
  REQUIRE(t.axis_values.size() == 201);
  REQUIRE(t.eigenvalue_rows.size() == 201);
  CHECK(t.ground_moment_rows.empty());
  CHECK(t.axis_values[100] == 10.0);
  const auto& r10 = t.eigenvalue_rows[100];
  CHECK(r10[0] == doctest::Approx(-0.3851648071345040).epsilon(1e-13));
  CHECK(std::abs(r10[1]) < 1e-13);
  CHECK(r10[2] == doctest::Approx(10.0).epsilon(1e-13));
  CHECK(r10[3] == doctest::Approx(10.385164807134504).epsilon(1e-13));
  const auto& r0 = t.eigenvalue_rows[0];
  CHECK(r0[0] == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(std::abs(r0[1]) < 1e-13);
  CHECK(std::abs(r0[2]) < 1e-13);
  CHECK(r0[3] == doctest::Approx(2.0).epsilon(1e-13));
  for (std::size_t k = 1; k < t.axis_values.size(); ++k) CHECK(t.axis_values[k] > t.axis_values[k - 1]);
}

TEST_CASE("two-point sweep keeps endpoints") {
  const auto t = sweep_ua(0, 10, 2);
  CHECK(t.axis_values == std::vector<double>{0.0, 10.0});
  CHECK(t.eigenvalue_rows.size() == 2);
}

TEST_CASE("sweep range errors") {
  CHECK_THROWS_AS(sweep_ua(5, 5, 10), DomainError);
  CHECK_THROWS_AS(sweep_ua(0, 1, 1), DomainError);
  CHECK_THROWS_AS(sweep_field({.U = 10, .A = 1}, -1, 10), DomainError);
  CHECK_THROWS_AS(sweep_field({.U = 0, .A = 1}, 2, 10), DomainError);
}

TEST_CASE("field sweep: lambda2 pinned, ground state polarizes, curves continuous") {
  const ModelParams p{.U = 10, .A = 1, .mu_y = 10};
  const auto t = sweep_field(p, 5.0, 501);
  REQUIRE(t.ground_moment_rows.size() == 501);
  CHECK(t.axis_values.back() == 5.0);
  for (const auto& row : t.eigenvalue_rows) CHECK(std::abs(row[1]) <= 1e-10);
  CHECK(t.ground_moment_rows.back().my >= 0.99 * 2 * p.mu_y);
  CHECK(t.ground_moment_rows.front().my == doctest::Approx(0.0).epsilon(1e-12));

  const auto& first = t.eigenvalue_rows.front();
  const auto cf = closed_form_zero_field(p);
  for (int i = 0; i < 4; ++i) CHECK(first[i] == doctest::Approx(cf.values[i]).epsilon(1e-12));

  const double dB = (t.axis_values[1] - t.axis_values[0]) * zeeman_threshold(p);
  const double dEz = 2 * p.mu_y * PhysicalConstants::mu_B_over_k_B * dB;
  for (std::size_t k = 1; k < t.eigenvalue_rows.size(); ++k)
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(t.eigenvalue_rows[k][i] - t.eigenvalue_rows[k - 1][i]) <= 2 * dEz);
}

TEST_CASE("Zeeman threshold") {
  CHECK(zeeman_threshold({.U = 10, .mu_y = 10}) == doctest::Approx(0.7443644169989013).epsilon(1e-15));
  CHECK(zeeman_threshold({.U = 0, .mu_y = 10}) == 0.0);
  CHECK(zeeman_threshold({.U = -10, .mu_y = 10}) == zeeman_threshold({.U = 10, .mu_y = 10}));
  CHECK_THROWS_AS(zeeman_threshold({.U = 10, .mu_y = 0}), DomainError);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 100);
  for (int i = 0; i < 100; ++i) {
    const double U = u(rng), mu = u(rng), k = u(rng);
    const double b = zeeman_threshold({.U = U, .mu_y = mu});
    CHECK(zeeman_threshold({.U = k * U, .mu_y = mu}) == doctest::Approx(k * b).epsilon(1e-13));
    CHECK(zeeman_threshold({.U = U, .mu_y = k * mu}) == doctest::Approx(b / k).epsilon(1e-13));
  }
}

TEST_CASE("ground splitting") {
  CHECK(ground_splitting({.U = 10, .A = 1}) == doctest::Approx(0.3851648071345040).epsilon(1e-15));
  CHECK(ground_splitting({.U = 10, .A = 0}) == 0.0);
  CHECK(ground_splitting({.U = 0, .A = 1}) == doctest::Approx(2.0).epsilon(1e-15));
  // U < 0: lambda2 = U, lambda1 = (U - r)/2.
  CHECK(ground_splitting({.U = -6, .A = 1}) == doctest::Approx(-3 + std::sqrt(13.0)).epsilon(1e-14));
}

TEST_CASE("large U/A: splitting follows 4A^2/U") {
  for (double ua : {100.0, 300.0, 1000.0}) {
    const double d = ground_splitting({.U = ua, .A = 1});
    CHECK(std::abs(d / (4.0 / ua) - 1.0) < 0.01);
  }
}

TEST_CASE("extract_A") {
  CHECK(extract_A(0.34, 0, ExtractionMode::paper) == doctest::Approx(0.085).epsilon(1e-15));
  CHECK(extract_A(0.97, 123, ExtractionMode::paper) == doctest::Approx(0.2425).epsilon(1e-15));
  CHECK(extract_A(0.3851648071345040, 10, ExtractionMode::exact) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(extract_A(0.0, 5, ExtractionMode::exact) == 0.0);
  CHECK_THROWS_AS(extract_A(-0.1, 10, ExtractionMode::paper), DomainError);
  CHECK_THROWS_AS(extract_A(0.1, -10, ExtractionMode::exact), DomainError);
  CHECK_THROWS_AS(extract_A(NAN, 10, ExtractionMode::exact), DomainError);
}

TEST_CASE("exact extraction inverts the ground splitting") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uU(0, 1000), uA(1e-6, 10);
  for (int i = 0; i < 2000; ++i) {
    const double U = uU(rng), A = uA(rng);
    const double d = ground_splitting({.U = U, .A = A});
    CHECK(std::abs(extract_A(d, U, ExtractionMode::exact) / A - 1.0) <= 1e-10);
  }
}

// delta ~ 4A^2/U, so the paper rule returns ~A^2/U and the ratio is ~U/A.
TEST_CASE("paper and exact rules diverge by U/A at large U/A") {
  for (double ua : {100.0, 190.0, 400.0}) {
    const double A = 0.25, U = ua * A;
    const double d = ground_splitting({.U = U, .A = A});
    const double ratio = extract_A(d, U, ExtractionMode::exact) / extract_A(d, U, ExtractionMode::paper);
    CHECK(ratio == doctest::Approx(U / A).epsilon(0.01));
  }
}

TEST_CASE("frequency conversion and annotations") {
  CHECK(to_frequency(1.0) == 20.836619);
  CHECK(to_frequency(0.0) == 0.0);
  CHECK(to_frequency(0.97) == doctest::Approx(20.21152043).epsilon(1e-12));
  CHECK(to_frequency(0.34) == doctest::Approx(7.08445046).epsilon(1e-12));
  CHECK_THROWS_AS(to_frequency(INFINITY), DomainError);

  const auto dy = frequency_annotation(0.34);
  REQUIRE(dy.has_value());
  CHECK(dy->find("Dy2S@C82") != std::string::npos);
  CHECK(dy->find("6.3 GHz") != std::string::npos);
  CHECK(frequency_annotation(0.97).has_value());
  CHECK_FALSE(frequency_annotation(5.0).has_value());
}
