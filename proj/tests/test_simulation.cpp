#include <doctest.h>

#include <cmath>
#include <functional>

#include "expsel/error.hpp"
#include "expsel/simulation.hpp"
#include "expsel/tau_estimation.hpp"

using namespace expsel;

namespace {

Vector table_beta() {
  Vector b(7);
  b << 2.0, 0.0, -1.5, -2.0, 0.0, 0.0, 0.0;
  return b;
}

SimConfig small_config() {
  SimConfig c;
  c.n = 120;
  c.beta_star = table_beta();
  c.replications = 6;
  c.master_seed = 17;
  return c;
}

}  // namespace

TEST_SUITE("simulation") {
  TEST_CASE("error draws have the stated moments") {
    const std::size_t m = 400000;
    for (auto law : {ErrorDistribution::std_normal, ErrorDistribution::centered_exponential,
                     ErrorDistribution::normal_pow4_centered,
                     ErrorDistribution::exp_minus_normal_pow4}) {
      Engine rng = make_engine(3);
      double sum = 0.0;
      double below = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double e = sample_error(law, rng);
        sum += e;
        below += e < 0.0;
      }
      const double mean = sum / static_cast<double>(m);
      const double frac = below / static_cast<double>(m);
      switch (law) {
        case ErrorDistribution::std_normal:
          CHECK(std::abs(mean) < 0.01);
          CHECK(std::abs(frac - 0.5) < 0.01);
          break;
        case ErrorDistribution::centered_exponential:
          CHECK(std::abs(mean + 0.3) < 0.01);
          CHECK(std::abs(frac - (1.0 - std::exp(-1.3))) < 0.01);
          break;
        case ErrorDistribution::normal_pow4_centered:
          CHECK(std::abs(mean - (3.0 - 6.0 * kMedianNormalPow4)) < 0.1);
          break;
        case ErrorDistribution::exp_minus_normal_pow4:
          CHECK(std::abs(mean + 2.0) < 0.1);
          break;
      }
    }
  }

  TEST_CASE("error law names round-trip") {
    for (auto law : {ErrorDistribution::std_normal, ErrorDistribution::centered_exponential,
                     ErrorDistribution::normal_pow4_centered,
                     ErrorDistribution::exp_minus_normal_pow4}) {
      CHECK(error_distribution_from_string(to_string(law)) == law);
    }
    CHECK_THROWS_AS(error_distribution_from_string("cauchy"), Error);
    CHECK(covariate_law_from_string(to_string(CovariateLaw::uniform)) == CovariateLaw::uniform);
  }

  TEST_CASE("instances are deterministic and carry the true support") {
    const SimConfig c = small_config();
    const Instance a = generate_instance(c, 3);
    const Instance b = generate_instance(c, 3);
    const Instance other = generate_instance(c, 4);
    CHECK(a.data.x() == b.data.x());
    CHECK(a.data.y() == b.data.y());
    CHECK(a.data.x() != other.data.x());
    CHECK(a.true_support.label() == "1+3+4");
    CHECK(a.seed == derive_seed(c.master_seed, 3));
    CHECK(a.data.n() == 120);
  }

  TEST_CASE("noiseless responses are exactly linear") {
    SimConfig c = small_config();
    c.noise = false;
    c.covariates = CovariateLaw::uniform;
    const Instance inst = generate_instance(c, 0);
    CHECK((inst.data.y() - inst.data.x() * c.beta_star).cwiseAbs().maxCoeff() == 0.0);
    CHECK(inst.data.x().cwiseAbs().maxCoeff() <= std::sqrt(3.0));
  }

  TEST_CASE("zero-noise designs recover the support") {
    for (bool penalized : {false, true}) {
      SimConfig c = small_config();
      c.noise = false;
      c.penalized = penalized;
      c.replications = 10;
      const ReplicationSummary r = run_experiment(c);
      for (const auto& rec : r.records) CHECK(rec.selected.label() == "1+3+4");
      CHECK(r.summary(SelectionMethod::expectile).mean.tpr == 1.0);
      CHECK(r.summary(SelectionMethod::expectile).mean.tnr == 1.0);
    }
  }

  TEST_CASE("metrics on a worked example") {
    const ModelSubset truth({0, 2}, 5);
    const ModelSubset chosen({0, 1}, 5);
    const Vector yhat = (Vector(4) << 1.0, 2.0, 3.0, 4.0).finished();
    const Vector yval = (Vector(4) << 1.0, 1.0, 3.0, 6.0).finished();
    const Metrics m = compute_metrics(chosen, truth, 5, yhat, yval);
    CHECK(m.mse == doctest::Approx(5.0 / 4.0));
    CHECK(m.tpr == doctest::Approx(0.5));
    CHECK(m.tnr == doctest::Approx(2.0 / 3.0));
    const Vector bh = (Vector(2) << 1.0, 0.0).finished();
    const Vector bs = (Vector(2) << 2.0, 2.0).finished();
    CHECK(coefficient_mse(bh, bs) == doctest::Approx(2.5));
    CHECK_THROWS_AS(compute_metrics(ModelSubset({0}, 4), truth, 5, yhat, yval), Error);
  }

  TEST_CASE("summaries are the means of the records") {
    SimConfig c = small_config();
    c.methods = {SelectionMethod::expectile, SelectionMethod::least_squares};
    const ReplicationSummary r = run_experiment(c, "demo");
    CHECK(r.label == "demo");
    CHECK(r.records.size() == 12);
    CHECK(r.tau == 0.5);
    for (const auto& ms : r.methods) {
      Metrics sum;
      std::size_t k = 0;
      for (const auto& rec : r.records) {
        if (rec.method != ms.method) continue;
        sum.mse += rec.metrics.mse;
        sum.tpr += rec.metrics.tpr;
        sum.tnr += rec.metrics.tnr;
        sum.coef_mse += rec.metrics.coef_mse;
        ++k;
      }
      CHECK(k == ms.used);
      CHECK(std::abs(sum.mse / k - ms.mean.mse) < 1e-12);
      CHECK(std::abs(sum.tpr / k - ms.mean.tpr) < 1e-12);
      CHECK(std::abs(sum.tnr / k - ms.mean.tnr) < 1e-12);
      CHECK(std::abs(sum.coef_mse / k - ms.mean.coef_mse) < 1e-12);
    }
  }

  TEST_CASE("experiments are reproducible across thread counts") {
    SimConfig c = small_config();
    c.error = ErrorDistribution::centered_exponential;
    const ReplicationSummary a = run_experiment(c);
    c.threads = 3;
    const ReplicationSummary b = run_experiment(c);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(a.records[i].selected == b.records[i].selected);
      CHECK(a.records[i].metrics.mse == b.records[i].metrics.mse);
    }
    CHECK(a.tau == doctest::Approx(true_tau_of(ErrorDistribution::centered_exponential)));
  }

  TEST_CASE("invalid configurations are reported together") {
    SimConfig c;
    c.n = 2;
    c.s = 1.5;
    try {
      c.validate();
      FAIL("expected InvalidArgument");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("n must") != std::string::npos);
      CHECK(msg.find("beta*") != std::string::npos);
      CHECK(msg.find("s must") != std::string::npos);
    }
  }

  TEST_CASE("presets") {
    CHECK(presets().size() == 16);
    const Preset& p7 = find_preset("table1-p7");
    CHECK(p7.config.beta_star == table_beta());
    CHECK(p7.config.s == 0.9);
    CHECK(p7.config.n == 500);
    CHECK_FALSE(p7.config.penalized);
    const Preset& t5 = find_preset("table5");
    CHECK(t5.config.penalized);
    CHECK(t5.config.s == 0.8);
    CHECK(find_preset("table3-n1000-s0.8").config.p() == 50);
    CHECK(find_preset("table2-n100-s0.9").config.p() == 4);
    CHECK_THROWS_AS(find_preset("table9"), Error);
  }
}
