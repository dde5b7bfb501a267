#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "expsel/error.hpp"
#include "expsel/tau_estimation.hpp"
#include "support.hpp"

using namespace expsel;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::InvalidArgument;
}

double tau_of(const std::vector<double>& e) { return tau_from_residuals(e).tau; }

// Composite trapezoid rule on [0, 6] for 2 * int exp(-t^4) phi(t) dt.
double laplace_normal_pow4_trapezoid() {
  const int m = 200000;
  const double h = 6.0 / m;
  double s = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double t = k * h;
    const double f = std::exp(-t * t * t * t - 0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
    s += (k == 0 || k == m) ? 0.5 * f : f;
  }
  return 2.0 * s * h;
}

}  // namespace

TEST_SUITE("tau_estimation") {
  TEST_CASE("hand-computed residual sets") {
    CHECK(tau_of({-1.0, 1.0}) == doctest::Approx(0.5));
    CHECK(tau_of({-1.0, 3.0}) == doctest::Approx(0.25));
    CHECK(tau_of({-3.0, 1.0}) == doctest::Approx(0.75));
    const TauEstimate t = tau_from_residuals(std::vector<double>{-2.0, 0.0, 0.0, 2.0, 1.0, -1.0});
    CHECK(t.n_used == 4);
    CHECK(t.tau == doctest::Approx(0.5));
    CHECK(t.stage == TauStage::from_errors);
  }

  TEST_CASE("one-signed residuals are clamped") {
    const TauEstimate pos = tau_from_residuals(std::vector<double>{1.0, 2.0});
    CHECK(pos.raw == 0.0);
    CHECK(pos.tau == kTauClampLow);
    const TauEstimate neg = tau_from_residuals(std::vector<double>{-1.0, 0.0});
    CHECK(neg.raw == 1.0);
    CHECK(neg.tau == kTauClampHigh);
  }

  TEST_CASE("degenerate and invalid residuals") {
    CHECK(kind_of([] { tau_from_residuals(std::vector<double>{}); }) ==
          ErrorKind::DegenerateResiduals);
    CHECK(kind_of([] { tau_from_residuals(std::vector<double>{0.0, 0.0}); }) ==
          ErrorKind::DegenerateResiduals);
    CHECK(kind_of([] { tau_from_residuals(std::vector<double>{1.0, NAN}); }) ==
          ErrorKind::NonFinite);
  }

  TEST_CASE("scale invariance and reflection") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Vector e = testing::random_vector(seed, 50) + Vector::Constant(50, 0.3);
      const double t = tau_from_residuals(e).raw;
      CHECK(tau_from_residuals(Vector(e * 7.5)).raw == doctest::Approx(t).epsilon(1e-12));
      CHECK(tau_from_residuals(Vector(-e)).raw == doctest::Approx(1.0 - t).epsilon(1e-12));
    }
  }

  TEST_CASE("two-step estimate is near one half for symmetric errors") {
    const testing::Dataset d =
        testing::gaussian_data(12, 5000, (Vector(3) << 1.0, -2.0, 0.5).finished(), 1.0, 2.0);
    const TauEstimate t = tau_two_step(d, ModelSubset::full(3));
    CHECK(t.stage == TauStage::step1);
    REQUIRE(t.tau0);
    CHECK(t.iterations == 1);
    CHECK(std::abs(t.tau - 0.5) <= 0.03);
    const TauEstimate t3 = tau_two_step(d, ModelSubset::full(3), {}, 3);
    CHECK(t3.iterations == 3);
    CHECK(std::abs(t3.tau - 0.5) <= 0.03);
    CHECK(kind_of([&] { tau_two_step(d, ModelSubset::full(3), {}, 0); }) ==
          ErrorKind::InvalidArgument);
  }

  TEST_CASE("two-step estimate tracks skewed errors through the origin") {
    Engine rng = make_engine(4);
    Matrix x(20000, 2);
    Vector y(20000);
    std::normal_distribution<double> z;
    for (Index i = 0; i < x.rows(); ++i) {
      x(i, 0) = z(rng);
      x(i, 1) = z(rng);
      y(i) = x(i, 0) - x(i, 1) + sample_error(ErrorDistribution::centered_exponential, rng);
    }
    SolverOptions opts;
    opts.intercept = false;
    const TauEstimate t = tau_two_step(Dataset(x, y), ModelSubset::full(2), opts);
    CHECK(std::abs(t.tau - true_tau_of(ErrorDistribution::centered_exponential)) < 0.03);
  }

  TEST_CASE("with an intercept the refit reproduces the initial index") {
    // The intercept's first-order condition forces the residuals of a
    // tau-expectile fit to have index exactly tau.
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const testing::Dataset d =
          testing::gaussian_data(seed, 200, testing::random_vector(seed, 3), 1.0, 1.0);
      const Dataset skewed = d.with_response(d.y().array().cube().matrix());
      const TauEstimate t = tau_two_step(skewed, ModelSubset::full(3));
      REQUIRE(t.tau0);
      CHECK(t.tau == doctest::Approx(*t.tau0).epsilon(1e-8));
    }
  }

  TEST_CASE("median of the fourth power of a standard normal") {
    const boost::math::chi_squared_distribution<double> chi1(1.0);
    const double m = boost::math::median(chi1);
    CHECK(kMedianNormalPow4 == doctest::Approx(m * m).epsilon(1e-14));
  }

  TEST_CASE("closed-form indices of the error laws") {
    CHECK(true_tau_of(ErrorDistribution::std_normal) == 0.5);
    const double c = kExponentialShift;
    const double exp_tau = (std::exp(-c) + c - 1.0) / (2.0 * std::exp(-c) + c - 1.0);
    CHECK(true_tau_of(ErrorDistribution::centered_exponential) ==
          doctest::Approx(exp_tau).epsilon(1e-14));
    const double laplace = laplace_normal_pow4_trapezoid();
    CHECK(true_tau_of(ErrorDistribution::exp_minus_normal_pow4) ==
          doctest::Approx((laplace + 2.0) / (2.0 * laplace + 2.0)).epsilon(1e-9));
  }

  TEST_CASE("indices agree with the published values") {
    CHECK(std::abs(true_tau_of(ErrorDistribution::std_normal) - 0.50) <= 0.02);
    CHECK(std::abs(true_tau_of(ErrorDistribution::centered_exponential) - 0.678) <= 0.02);
    CHECK(std::abs(true_tau_of(ErrorDistribution::normal_pow4_centered) - 0.231) <= 0.02);
    CHECK(std::abs(true_tau_of(ErrorDistribution::exp_minus_normal_pow4) - 0.806) <= 0.02);
  }

  TEST_CASE("Monte Carlo draws reproduce the indices") {
    for (auto law : {ErrorDistribution::std_normal, ErrorDistribution::centered_exponential,
                     ErrorDistribution::normal_pow4_centered,
                     ErrorDistribution::exp_minus_normal_pow4}) {
      Engine rng = make_engine(99);
      std::vector<double> e(1000000);
      for (auto& v : e) v = sample_error(law, rng);
      CHECK(std::abs(tau_of(e) - true_tau_of(law)) < 0.01);
    }
  }

  TEST_CASE("stage names") {
    CHECK(to_string(TauStage::step1) == "step1");
    CHECK(to_string(TauStage::from_errors) == "from_errors");
  }
}
