#include <cmath>
#include <limits>
#include <vector>

#include "bayesrl/numeric.hpp"
#include "doctest.h"

using bayesrl::boltzmann_weights;
using bayesrl::golden_section_minimize;
using bayesrl::log_mean_exp;
using bayesrl::log_sum_exp;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("log_sum_exp agrees with the naive formula at safe magnitudes") {
  std::vector<double> x{1.0, 2.0, 3.0};
  double naive = std::log(std::exp(1.0) + std::exp(2.0) + std::exp(3.0));
  CHECK(log_sum_exp(x) == doctest::Approx(naive).epsilon(1e-14));

  std::vector<double> one{-4.2};
  CHECK(log_sum_exp(one) == doctest::Approx(-4.2));
  CHECK(log_mean_exp(one) == doctest::Approx(-4.2));

  std::vector<double> same{7.5, 7.5};
  CHECK(log_mean_exp(same) == doctest::Approx(7.5));
}

TEST_CASE("log_sum_exp survives magnitudes that overflow exp directly") {
  std::vector<double> big{1000.0, 1000.0};
  CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
  std::vector<double> small{-1000.0, -1001.0};
  CHECK(log_sum_exp(small) ==
        doctest::Approx(-1000.0 + std::log(1.0 + std::exp(-1.0))));
}

TEST_CASE("log_sum_exp handles infinite entries and rejects empty input") {
  std::vector<double> allneg{-kInf, -kInf};
  CHECK(log_sum_exp(allneg) == -kInf);
  std::vector<double> mixed{0.0, -kInf};
  CHECK(log_sum_exp(mixed) == doctest::Approx(0.0));
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("boltzmann_weights matches the direct softmax and its limits") {
  std::vector<double> x{0.3, -1.2, 2.0};
  std::vector<double> w(3);
  boltzmann_weights(x, 1.7, w);
  double z = std::exp(1.7 * 0.3) + std::exp(1.7 * -1.2) + std::exp(1.7 * 2.0);
  CHECK(w[0] == doctest::Approx(std::exp(1.7 * 0.3) / z).epsilon(1e-13));
  CHECK(w[1] == doctest::Approx(std::exp(1.7 * -1.2) / z).epsilon(1e-13));
  CHECK(w[2] == doctest::Approx(std::exp(1.7 * 2.0) / z).epsilon(1e-13));
  CHECK(w[0] + w[1] + w[2] == doctest::Approx(1.0).epsilon(1e-14));

  // Zero inverse temperature flattens to uniform.
  boltzmann_weights(x, 0.0, w);
  for (double v : w) CHECK(v == doctest::Approx(1.0 / 3.0));

  // A huge inverse temperature concentrates on the argmax without overflow.
  boltzmann_weights(x, 1e6, w);
  CHECK(w[2] == doctest::Approx(1.0));
  CHECK(w[0] + w[1] < 1e-12);

  std::vector<double> wrong(2);
  CHECK_THROWS_AS(boltzmann_weights(x, 1.0, wrong), std::invalid_argument);
}

TEST_CASE("golden_section_minimize finds unimodal minima to tolerance") {
  const double pi = 3.14159265358979323846;
  double x1 = golden_section_minimize(
      [&](double x) { return (x - pi) * (x - pi); }, 0.0, 10.0, 1e-10);
  CHECK(x1 == doctest::Approx(pi).epsilon(1e-8));

  // Unimodal but not differentiable at the minimum.
  double x2 = golden_section_minimize(
      [](double x) { return std::abs(x - 2.0); }, -5.0, 9.0, 1e-10);
  CHECK(x2 == doctest::Approx(2.0).epsilon(1e-8));

  // Monotone functions push the answer to the matching bracket edge.
  double x3 = golden_section_minimize([](double x) { return x; }, 1.0, 4.0, 1e-9);
  CHECK(x3 == doctest::Approx(1.0).epsilon(1e-7));

  CHECK_THROWS_AS(
      golden_section_minimize([](double x) { return x; }, 2.0, 2.0, 1e-9),
      std::invalid_argument);
}
