#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fbx/error.hpp"
#include "fbx/philox.hpp"
#include "fbx/scalar_stats.hpp"
#include "oracles.hpp"

using namespace fbx;

TEST_SUITE("scalar_stats") {

TEST_CASE("gaussian pdf and cdf") {
  const boost::math::normal_distribution<double> nd;
  for (double z = -8.0; z <= 8.0; z += 0.25) {
    CHECK(normal_cdf(z) == doctest::Approx(boost::math::cdf(nd, z)).epsilon(1e-13));
    CHECK(phi_pdf(z, {}) == doctest::Approx(boost::math::pdf(nd, z)).epsilon(1e-14));
  }
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(phi_pdf(1.0, {1.0, 4.0}) == doctest::Approx(1.0 / std::sqrt(8.0 * M_PI)));
  CHECK_THROWS_AS(phi_pdf(0.0, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(phi_pdf(0.0, {0.0, -1.0}), DomainError);
}

TEST_CASE("normal quantile against boost") {
  const boost::math::normal_distribution<double> nd;
  for (double p : {1e-300, 1e-100, 1e-20, 1e-8, 1e-3, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575, 0.999, 1 - 1e-10}) {
    CHECK(normal_quantile(p) == doctest::Approx(boost::math::quantile(nd, p)).epsilon(1e-13));
  }
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
  CHECK_THROWS_AS(normal_quantile(-0.1), DomainError);
  CHECK_THROWS_AS(normal_quantile(std::nan("")), DomainError);
}

TEST_CASE("quantile round trip on [-6, 6]") {
  for (int i = 0; i <= 1200; ++i) {
    const long double a = -6.0L + 0.01L * i;
    CHECK(std::abs(static_cast<double>(normal_quantile(normal_cdf(a)) - a)) < 1e-9);
  }
  // In double precision the upper half loses digits to the rounding of p
  // near 1, so the round trip is exact to 1e-9 only for a <= 0.
  for (int i = 0; i <= 600; ++i) {
    const double a = -6.0 + 0.01 * i;
    CHECK(std::abs(normal_quantile(normal_cdf(a)) - a) < 1e-9);
  }
}

TEST_CASE("quantile derivative") {
  for (double p : {0.01, 0.2, 0.5, 0.8, 0.99}) {
    const double h = 1e-6;
    const double fd = (normal_quantile(p + h) - normal_quantile(p - h)) / (2 * h);
    CHECK(normal_quantile_derivative(p) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("regularized gamma against boost") {
  for (double a : {0.5, 1.0, 2.5, 10.0, 50.0, 500.5}) {
    for (double x : {1e-3, 0.1, 1.0, 5.0, 20.0, 100.0, 600.0}) {
      const double ref = boost::math::gamma_p(a, x);
      CHECK(regularized_gamma_p(a, x) == doctest::Approx(ref).epsilon(1e-12));
      if (ref > 1e-300) {
        CHECK(log_regularized_gamma_p(a, x) == doctest::Approx(std::log(ref)).epsilon(1e-11));
      }
    }
  }
  CHECK(regularized_gamma_p(3.0, 0.0) == 0.0);
}

TEST_CASE("noncentral chi-square cdf against boost") {
  for (std::int64_t dof : {1, 2, 8, 64, 1000}) {
    for (double nc : {0.0, 0.5, 8.0, 100.0, 1000.0}) {
      const boost::math::non_central_chi_squared_distribution<double> d(static_cast<double>(dof), nc);
      const double mean = static_cast<double>(dof) + nc;
      const double sd = std::sqrt(2.0 * (static_cast<double>(dof) + 2.0 * nc));
      for (double k : {-3.0, -1.5, 0.0, 1.0, 3.0}) {
        const double x = mean + k * sd;
        if (x <= 0.0) continue;
        CAPTURE(dof);
        CAPTURE(nc);
        CAPTURE(x);
        const double ref = boost::math::cdf(d, x);
        CHECK(std::abs(noncentral_chisq_cdf(x, dof, nc) - ref) < 1e-11);
        if (ref > 1e-200) {
          CHECK(noncentral_chisq_log_cdf(x, dof, nc) == doctest::Approx(std::log(ref)).epsilon(1e-9));
        }
      }
    }
  }
  CHECK(noncentral_chisq_cdf(0.0, 4, 2.0) == 0.0);
  CHECK_THROWS_AS(noncentral_chisq_cdf(1.0, 0, 2.0), DomainError);
  CHECK_THROWS_AS(noncentral_chisq_cdf(1.0, 2, -1.0), DomainError);
}

TEST_CASE("noncentral chi-square log cdf deep in the lower tail") {
  // Where the linear CDF underflows, compare with a long-double Boost
  // evaluation.
  const boost::math::non_central_chi_squared_distribution<long double> d(400.0L, 800.0L);
  for (long double x : {150.0L, 100.0L, 60.0L}) {
    const long double ref = boost::math::cdf(d, x);
    REQUIRE(ref > 0.0L);
    CHECK(noncentral_chisq_log_cdf(static_cast<double>(x), 400, 800.0) ==
          doctest::Approx(static_cast<double>(std::log(ref))).epsilon(1e-8));
  }
}

TEST_CASE("llr moments: sigma squared equals dispersion formula") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> logp(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double p = std::pow(10.0, logp(rng));
    const auto m = llr_moments(p);
    const double v = p * (p + 2.0) * kLog2E * kLog2E / (2.0 * (p + 1.0) * (p + 1.0));
    CHECK(m.mu == 0.0);
    CHECK(std::abs(m.sigma * m.sigma - v) / v < 1e-12);
  }
  CHECK_THROWS_AS(llr_moments(0.0), DomainError);
  CHECK_THROWS_AS(llr_moments(-1.0), DomainError);
}

TEST_CASE("third absolute moment against exact piecewise moments") {
  for (double p : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0}) {
    CAPTURE(p);
    const auto m = llr_moments(p);
    const double ref = static_cast<double>(oracle::third_abs_moment(p));
    CHECK(std::abs(m.third_abs - ref) < 1e-9);
    CHECK(std::cbrt(m.third_abs) <= third_moment_root_bound(p));
  }
  CHECK(llr_moments(1.0).third_abs == doctest::Approx(1.7343).epsilon(1e-4));
}

TEST_CASE("third absolute moment against Monte Carlo") {
  const double p = 1.0;
  const double c = kLog2E / (2.0 * (1.0 + p));
  CounterStream s(2024, 0);
  const int draws = 2'000'000;
  long double sum = 0.0L;
  long double sum2 = 0.0L;
  for (int i = 0; i < draws; ++i) {
    const double z = s.next_normal();
    const double u = std::abs(c * (-p * z * z + 2.0 * std::sqrt(p) * z + p));
    const long double u3 = static_cast<long double>(u) * u * u;
    sum += u3;
    sum2 += u3 * u3;
  }
  const double mean = static_cast<double>(sum / draws);
  const double se = std::sqrt(static_cast<double>(sum2 / draws - (sum / draws) * (sum / draws)) / draws);
  CHECK(std::abs(mean - llr_moments(p).third_abs) < 3.0 * se);
}

TEST_CASE("closed-form mgf against one-dimensional quadrature") {
  for (double p : {0.5, 1.0, 3.0}) {
    for (double t : {-0.1, -0.02, 0.05, 0.2}) {
      auto f = [&](double z) {
        return std::exp(t * (-p * z * z + 2.0 * std::sqrt(p) * z) - 0.5 * z * z) / std::sqrt(2.0 * M_PI);
      };
      const double one = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          f, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 15, 1e-14);
      for (std::int64_t n : {1, 4, 16}) {
        const double ref = std::pow(one, static_cast<double>(n));
        CHECK(closed_form_mgf(t, n, p) == doctest::Approx(ref).epsilon(1e-10));
        CHECK(sum_statistic_law(n, p).mgf(t) == doctest::Approx(ref).epsilon(1e-10));
      }
    }
  }
  CHECK(closed_form_mgf(0.0, 10, 1.0) == 1.0);
  CHECK_THROWS_AS(closed_form_mgf(-0.5, 4, 1.0), DomainError);
}

TEST_CASE("log mgf slope at zero is the mean") {
  for (double p : {0.3, 1.0, 4.0}) {
    for (std::int64_t n : {1, 16, 256}) {
      const double h = 1e-5;
      const double slope = (std::log(closed_form_mgf(h, n, p)) - std::log(closed_form_mgf(-h, n, p))) / (2 * h);
      CHECK(std::abs(slope + static_cast<double>(n) * p) < 1e-6 * std::max(1.0, static_cast<double>(n) * p));
    }
  }
}

TEST_CASE("central chi-square series at zero noncentrality") {
  // Even dof: F(x) = 1 - exp(-x/2) sum_{j<k} (x/2)^j / j!.
  for (std::int64_t k : {1, 2, 5, 20}) {
    for (double x : {0.1, 1.0, 4.0, 15.0, 60.0}) {
      long double term = 1.0L;
      long double tail = 0.0L;
      for (std::int64_t j = 0; j < k; ++j) {
        tail += term;
        term *= (x / 2.0L) / static_cast<long double>(j + 1);
      }
      const double ref = static_cast<double>(1.0L - std::exp(-x / 2.0L) * tail);
      CHECK(std::abs(noncentral_chisq_cdf(x, 2 * k, 0.0) - ref) < 1e-10);
    }
  }
  CHECK(noncentral_chisq_cdf(2.0 * std::log(2.0), 2, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("sum statistic law") {
  const auto law = sum_statistic_law(16, 1.0);
  CHECK(law.dof == 16);
  CHECK(law.noncentrality == doctest::Approx(16.0));
  CHECK(law.mean() == doctest::Approx(-16.0));
  CHECK(law.variance() == doctest::Approx(16.0 * 6.0));
  CHECK(law.cdf(-1e6) == doctest::Approx(0.0));
  CHECK(law.cdf(1e6) == 1.0);
  CHECK(law.cdf(-std::numeric_limits<double>::infinity()) == 0.0);
  CHECK(law.cdf(std::numeric_limits<double>::infinity()) == 1.0);

  // S = n - P Q, so F_S(s) = 1 - F_Q((n - s)/P).
  const boost::math::non_central_chi_squared_distribution<double> q(16.0, 16.0);
  for (double s : {-60.0, -30.0, -16.0, 0.0, 8.0, 15.0}) {
    CHECK(law.cdf(s) == doctest::Approx(1.0 - boost::math::cdf(q, 16.0 - s)).epsilon(1e-10));
  }

  // Monte Carlo moments of the summed statistic.
  CounterStream st(5, 0);
  const int trials = 200000;
  long double m1 = 0.0L;
  long double m2 = 0.0L;
  for (int i = 0; i < trials; ++i) {
    double s = 0.0;
    for (int k = 0; k < 16; ++k) {
      const double z = st.next_normal();
      s += -z * z + 2.0 * z;
    }
    m1 += s;
    m2 += static_cast<long double>(s) * s;
  }
  const double mean = static_cast<double>(m1 / trials);
  const double var = static_cast<double>(m2 / trials) - mean * mean;
  CHECK(std::abs(mean - law.mean()) < 3.0 * std::sqrt(law.variance() / trials));
  CHECK(var == doctest::Approx(law.variance()).epsilon(0.02));
  CHECK_THROWS_AS(sum_statistic_law(0, 1.0), DomainError);
}

}  // TEST_SUITE
