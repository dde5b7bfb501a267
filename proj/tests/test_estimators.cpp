#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "expsel/error.hpp"
#include "expsel/estimators.hpp"
#include "support.hpp"

using namespace expsel;
using testing::gaussian_data;
using testing::random_vector;

namespace {

// Normal-equation least squares with an intercept column.
Vector ols_normal_equations(const Dataset& d) {
  Matrix z(d.n(), d.p() + 1);
  z.col(0).setOnes();
  z.rightCols(d.p()) = d.x();
  const Matrix gram = z.transpose() * z;
  return gram.ldlt().solve(z.transpose() * d.y());
}

Vector coefficients_with_intercept(const FitResult& f) {
  Vector out(f.beta.size() + 1);
  out(0) = f.intercept.value_or(0.0);
  out.tail(f.beta.size()) = f.beta;
  return out;
}

double max_rel_diff(const Vector& a, const Vector& b) {
  return ((a - b).cwiseAbs().array() / (1.0 + b.cwiseAbs().array())).maxCoeff();
}

Dataset one_column(const std::vector<double>& xs, const std::vector<double>& ys) {
  Matrix x(static_cast<Index>(xs.size()), 1);
  Vector y(static_cast<Index>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x(static_cast<Index>(i), 0) = xs[i];
    y(static_cast<Index>(i)) = ys[i];
  }
  return Dataset(x, y);
}

SolverOptions no_intercept() {
  SolverOptions o;
  o.intercept = false;
  return o;
}

}  // namespace

TEST_SUITE("estimators") {
  TEST_CASE("intercept-only expectile of a symmetric pair is its mean") {
    Matrix x(2, 1);
    x << 0.3, -0.1;
    Vector y(2);
    y << -1.0, 1.0;
    const Dataset d(x, y);
    const FitResult f = fit_expectile(d, ModelSubset({}, 1), ExpectileIndex(0.5));
    REQUIRE(f.intercept);
    CHECK(*f.intercept == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.beta.size() == 0);
  }

  TEST_CASE("tau = 0.5 reproduces closed-form least squares") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const Dataset d = gaussian_data(seed, 50, random_vector(seed + 100, 5), 1.0, 0.7);
      const FitResult f = fit_expectile(d, ModelSubset::full(5), ExpectileIndex(0.5));
      CHECK(f.converged);
      CHECK(max_rel_diff(coefficients_with_intercept(f), ols_normal_equations(d)) < 1e-8);
      const FitResult ls = fit_least_squares(d, ModelSubset::full(5));
      CHECK(max_rel_diff(coefficients_with_intercept(ls), coefficients_with_intercept(f)) < 1e-8);
      CHECK(ls.method == FitMethod::least_squares);
    }
  }

  TEST_CASE("one-dimensional fit matches a scalar minimization oracle") {
    const Dataset d = one_column({0.5, -1.2, 2.0, 0.3, -0.7, 1.1, 1.9, -2.2},
                                 {1.1, -2.0, 3.7, 0.2, -1.9, 2.9, 3.1, -4.4});
    for (double tau : {0.7, 0.2, 0.5}) {
      const FitResult f = fit_expectile(d, ModelSubset::full(1), ExpectileIndex(tau), no_intercept());
      const double oracle = testing::minimize_scalar(
          [&](double b) { return testing::sum_expectile_loss(d.y() - d.x().col(0) * b, tau); },
          -10.0, 10.0);
      CHECK(f.beta(0) == doctest::Approx(oracle).epsilon(1e-6));
      CHECK_FALSE(f.intercept.has_value());
    }
  }

  TEST_CASE("first-order condition holds at convergence") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Dataset d = gaussian_data(seed, 50, random_vector(seed, 5));
      for (double tau : {0.2, 0.5, 0.8}) {
        const FitResult f = fit_expectile(d, ModelSubset::full(5), ExpectileIndex(tau));
        REQUIRE(f.converged);
        CHECK(f.gradient_norm <= 1e-8);
        CHECK(expectile_kkt_violation(d, f, ExpectileIndex(tau)) <= 1e-8);
      }
    }
  }

  TEST_CASE("negating the response reflects the index") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Dataset d = gaussian_data(seed, 40, random_vector(seed, 3), 1.5, 0.4);
      const Dataset neg = d.with_response(-d.y());
      for (double tau : {0.15, 0.6}) {
        const FitResult a = fit_expectile(d, ModelSubset::full(3), ExpectileIndex(tau));
        const FitResult b = fit_expectile(neg, ModelSubset::full(3), ExpectileIndex(1.0 - tau));
        CHECK((a.beta + b.beta).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::abs(*a.intercept + *b.intercept) < 1e-10);
      }
    }
  }

  TEST_CASE("intercept-only expectiles increase with the index") {
    const Dataset d = gaussian_data(3, 60, random_vector(1, 2));
    double previous = -1e300;
    for (double tau = 0.05; tau < 0.96; tau += 0.05) {
      const FitResult f = fit_expectile(d, ModelSubset({}, 2), ExpectileIndex(tau));
      CHECK(*f.intercept >= previous);
      previous = *f.intercept;
    }
  }

  TEST_CASE("singular designs get ridge jitter unless strict") {
    Matrix x(30, 2);
    const Dataset base = gaussian_data(8, 30, random_vector(2, 1));
    x.col(0) = base.x().col(0);
    x.col(1) = base.x().col(0);
    const Dataset d(x, base.y());
    const FitResult f = fit_expectile(d, ModelSubset::full(2), ExpectileIndex(0.4));
    CHECK(f.regularized);
    CHECK(f.beta.allFinite());
    SolverOptions strict;
    strict.strict_rank = true;
    try {
      fit_expectile(d, ModelSubset::full(2), ExpectileIndex(0.4), strict);
      FAIL("expected RankDeficient");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::RankDeficient);
    }
    const FitResult q = fit_quantile(d, ModelSubset::full(2), 0.5);
    CHECK(q.regularized);
  }

  TEST_CASE("a model without parameters is rejected") {
    const Dataset d = gaussian_data(1, 10, random_vector(1, 2));
    CHECK_THROWS_AS(fit_expectile(d, ModelSubset({}, 2), ExpectileIndex(0.5), no_intercept()),
                    Error);
  }

  TEST_CASE("LASSO matches a two-dimensional grid oracle") {
    const Dataset d = gaussian_data(21, 10, (Vector(2) << 1.5, -0.4).finished(), 0.8);
    const double tau = 0.6, nu = 0.1;
    PenaltyConfig pc;
    pc.nu = nu;
    pc.standardize = false;
    const FitResult f = fit_lasso_expectile(d, ModelSubset::full(2), ExpectileIndex(tau), pc,
                                            no_intercept());
    const auto [b0, b1] = testing::minimize_grid_2d(
        [&](double a, double b) {
          const Vector r = d.y() - d.x().col(0) * a - d.x().col(1) * b;
          return testing::sum_expectile_loss(r, tau) / 10.0 + nu * (std::abs(a) + std::abs(b));
        },
        -5.0, 5.0, 1e-2);
    CHECK(std::abs(f.beta(0) - b0) < 1e-4);
    CHECK(std::abs(f.beta(1) - b1) < 1e-4);
  }

  TEST_CASE("adaptive LASSO with fixed weights matches a grid oracle") {
    const Dataset d = gaussian_data(4, 10, (Vector(2) << 1.0, 0.1).finished(), 0.5);
    const double lambda = 0.05;
    PenaltyConfig pc;
    pc.lambda = lambda;
    pc.fixed_weights = (Vector(2) << 1.0, 3.0).finished();
    pc.standardize = false;
    const FitResult f = fit_adaptive_lasso_expectile(d, ModelSubset::full(2), ExpectileIndex(0.5),
                                                     pc, no_intercept());
    const auto [b0, b1] = testing::minimize_grid_2d(
        [&](double a, double b) {
          const Vector r = d.y() - d.x().col(0) * a - d.x().col(1) * b;
          return testing::sum_expectile_loss(r, 0.5) / 10.0 +
                 lambda * (std::abs(a) + 3.0 * std::abs(b));
        },
        -5.0, 5.0, 1e-2);
    CHECK(std::abs(f.beta(0) - b0) < 1e-4);
    CHECK(std::abs(f.beta(1) - b1) < 1e-4);
    CHECK(f.penalty(1) == doctest::Approx(3.0 * lambda));
  }

  TEST_CASE("penalized fits satisfy the KKT conditions on the original scale") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      Vector beta = random_vector(seed, 6);
      beta(1) = 0.0;
      beta(4) = 0.0;
      Dataset d = gaussian_data(seed, 80, beta, 1.0, 1.3);
      // uneven column scales exercise the standardization round trip
      Matrix x = d.x();
      x.col(2) *= 25.0;
      x.col(3).array() += 4.0;
      d = Dataset(x, d.y());
      for (double tau : {0.2, 0.5, 0.8}) {
        PenaltyConfig pc;
        pc.lambda = 0.08;
        const FitResult a =
            fit_adaptive_lasso_expectile(d, ModelSubset::full(6), ExpectileIndex(tau), pc);
        CHECK(a.converged);
        CHECK(expectile_kkt_violation(d, a, ExpectileIndex(tau)) <= 1e-6);
        pc.nu = 0.05;
        const FitResult l = fit_lasso_expectile(d, ModelSubset::full(6), ExpectileIndex(tau), pc);
        CHECK(expectile_kkt_violation(d, l, ExpectileIndex(tau)) <= 1e-6);
      }
      PenaltyConfig pc;
      const FitResult ls = fit_adaptive_lasso_least_squares(d, ModelSubset::full(6), pc);
      CHECK(expectile_kkt_violation(d, ls, ExpectileIndex(0.5)) <= 1e-6);
      CHECK(ls.method == FitMethod::adaptive_lasso_least_squares);
    }
  }

  TEST_CASE("penalized objective is no worse than nearby perturbations") {
    const Dataset d = gaussian_data(9, 60, random_vector(3, 4));
    PenaltyConfig pc;
    pc.lambda = 0.1;
    const ExpectileIndex tau(0.3);
    const FitResult f = fit_adaptive_lasso_expectile(d, ModelSubset::full(4), tau, pc);
    auto objective = [&](const FitResult& g) {
      return mean_expectile_loss(residuals(g, d), tau) + g.penalty.dot(g.beta.cwiseAbs());
    };
    CHECK(f.objective == doctest::Approx(objective(f)));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(0.0, 1e-3);
    for (int k = 0; k < 200; ++k) {
      FitResult g = f;
      for (Index j = 0; j < g.beta.size(); ++j) g.beta(j) += z(rng);
      *g.intercept += z(rng);
      CHECK(objective(g) >= objective(f) - 1e-12);
    }
  }

  TEST_CASE("large penalties give exact zeros") {
    const Dataset d = gaussian_data(2, 50, random_vector(4, 3));
    PenaltyConfig pc;
    pc.lambda = 1e6;
    const FitResult f = fit_adaptive_lasso_expectile(d, ModelSubset::full(3), ExpectileIndex(0.5), pc);
    CHECK(f.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(f.active_subset().empty());
    CHECK(*f.intercept == doctest::Approx(d.y().mean()).epsilon(1e-8));
  }

  TEST_CASE("irrelevant columns are zeroed at the default penalty") {
    Vector beta(5);
    beta << 2.0, 0.0, -1.5, 0.0, 0.0;
    int exact = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Dataset d = gaussian_data(seed, 200, beta);
      const FitResult f =
          fit_adaptive_lasso_expectile(d, ModelSubset::full(5), ExpectileIndex(0.5), {});
      exact += f.active_subset() == ModelSubset({0, 2}, 5);
    }
    CHECK(exact >= 16);
  }

  TEST_CASE("adaptive weights") {
    const Vector pilot = (Vector(4) << 2.0, -0.5, 0.0, 1e-12).finished();
    const Vector w = compute_adaptive_weights(pilot, 1.0, std::nullopt, 1e-10);
    CHECK(w(0) == doctest::Approx(0.5));
    CHECK(w(1) == doctest::Approx(2.0));
    CHECK(w(2) == doctest::Approx(1e10));
    CHECK(w(3) == doctest::Approx(1e10));
    const Vector capped = compute_adaptive_weights(pilot, 0.5, 10.0, 1e-10);
    CHECK(capped(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(capped(2) == 10.0);
    CHECK(capped(3) == 10.0);
  }

  TEST_CASE("lambda grid picks a value from the grid") {
    const Dataset d = gaussian_data(5, 80, random_vector(6, 4));
    PenaltyConfig pc;
    pc.lambda = 0.1;
    pc.lambda_grid = true;
    const FitResult f = fit_adaptive_lasso_expectile(d, ModelSubset::full(4), ExpectileIndex(0.5), pc);
    const double k = std::log2(f.lambda / 0.1);
    CHECK(std::abs(k - std::round(k)) < 1e-12);
    CHECK(std::abs(k) <= 4.0);
  }

  TEST_CASE("penalty configuration is validated") {
    PenaltyConfig pc;
    pc.gamma = 0.0;
    CHECK_THROWS_AS(pc.validate(), Error);
    pc.gamma = 1.0;
    pc.lambda = -1.0;
    CHECK_THROWS_AS(pc.validate(), Error);
    CHECK(default_lambda(7, 100) == doctest::Approx(std::sqrt(std::log(7.0) / 100.0)));
    CHECK(default_lambda(1, 100) == doctest::Approx(std::sqrt(std::log(2.0) / 100.0)));
  }

  TEST_CASE("median regression through the origin matches the breakpoint oracle") {
    // The check-loss minimum of a one-column fit sits at some ratio y_i / x_i.
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Dataset d = gaussian_data(seed, 15, (Vector(1) << 1.3).finished());
      const double level = seed % 2 ? 0.5 : 0.3;
      const FitResult f = fit_quantile(d, ModelSubset::full(1), level, no_intercept());
      double best = 1e300;
      for (Index i = 0; i < d.n(); ++i) {
        const double b = d.y()(i) / d.x()(i, 0);
        best = std::min(best, testing::sum_check_loss(d.y() - d.x().col(0) * b, level));
      }
      CHECK(testing::sum_check_loss(residuals(f, d), level) == doctest::Approx(best).epsilon(1e-12));
      CHECK(f.converged);
    }
  }

  TEST_CASE("quantile regression with intercept matches the basic-solution oracle") {
    // Some optimal solution interpolates two observations; enumerate all pairs.
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Dataset d = gaussian_data(seed, 20, (Vector(1) << -0.8).finished(), 1.0, 0.5);
      const double level = 0.25 + 0.05 * static_cast<double>(seed % 5);
      const FitResult f = fit_quantile(d, ModelSubset::full(1), level);
      double best = 1e300;
      for (Index i = 0; i < d.n(); ++i) {
        for (Index j = i + 1; j < d.n(); ++j) {
          const double dx = d.x()(j, 0) - d.x()(i, 0);
          if (dx == 0.0) continue;
          const double slope = (d.y()(j) - d.y()(i)) / dx;
          const double icpt = d.y()(i) - slope * d.x()(i, 0);
          const Vector r = d.y() - d.x().col(0) * slope - Vector::Constant(d.n(), icpt);
          best = std::min(best, testing::sum_check_loss(r, level));
        }
      }
      CHECK(testing::sum_check_loss(residuals(f, d), level) == doctest::Approx(best).epsilon(1e-12));
      CHECK(f.objective == doctest::Approx(best / 20.0).epsilon(1e-12));
    }
  }

  TEST_CASE("penalized quantile fit matches the breakpoint oracle") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Dataset d = gaussian_data(seed, 15, (Vector(1) << 0.4).finished());
      const double lambda = 0.02 * static_cast<double>(seed);
      PenaltyConfig pc;
      pc.lambda = lambda;
      pc.fixed_weights = Vector::Ones(1);
      pc.standardize = false;
      const FitResult f =
          fit_adaptive_lasso_quantile(d, ModelSubset::full(1), 0.5, pc, no_intercept());
      auto objective = [&](double b) {
        return testing::sum_check_loss(d.y() - d.x().col(0) * b, 0.5) / 15.0 + lambda * std::abs(b);
      };
      double best = objective(0.0);
      for (Index i = 0; i < d.n(); ++i) best = std::min(best, objective(d.y()(i) / d.x()(i, 0)));
      CHECK(objective(f.beta(0)) == doctest::Approx(best).epsilon(1e-12));
      CHECK(f.method == FitMethod::adaptive_lasso_quantile);
    }
  }

  TEST_CASE("method names round-trip") {
    for (auto m : {FitMethod::expectile, FitMethod::lasso_expectile,
                   FitMethod::adaptive_lasso_expectile, FitMethod::least_squares,
                   FitMethod::adaptive_lasso_least_squares, FitMethod::quantile,
                   FitMethod::adaptive_lasso_quantile}) {
      CHECK(fit_method_from_string(to_string(m)) == m);
    }
    CHECK_THROWS_AS(fit_method_from_string("ridge"), Error);
  }
}
