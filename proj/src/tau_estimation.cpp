#include "expsel/tau_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "expsel/error.hpp"
#include "linalg.hpp"

namespace expsel {

std::string_view to_string(TauStage s) {
  switch (s) {
    case TauStage::from_errors: return "from_errors";
    case TauStage::step0: return "step0";
    case TauStage::step1: return "step1";
  }
  return "unknown";
}

TauEstimate tau_from_residuals(std::span<const double> e) {
  if (e.empty()) throw Error(ErrorKind::DegenerateResiduals, "no residuals");
  double neg = 0.0;
  double pos = 0.0;
  std::size_t used = 0;
  for (double v : e) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "non-finite residual");
    if (v < 0.0) {
      neg += v;
      ++used;
    } else if (v > 0.0) {
      pos += v;
      ++used;
    }
  }
  if (used == 0) throw Error(ErrorKind::DegenerateResiduals, "all residuals are zero");
  TauEstimate out;
  out.raw = neg / (neg - pos);
  out.tau = std::clamp(out.raw, kTauClampLow, kTauClampHigh);
  out.n_used = used;
  out.stage = TauStage::from_errors;
  return out;
}

TauEstimate tau_from_residuals(const Vector& e) {
  return tau_from_residuals(std::span<const double>(e.data(), static_cast<std::size_t>(e.size())));
}

TauEstimate tau_two_step(const Dataset& data, const ModelSubset& subset, const SolverOptions& opts,
                         int iterations) {
  if (iterations < 1) throw Error(ErrorKind::InvalidArgument, "iterations must be at least 1");
  const Vector centered = data.y().array() - detail::median(data.y());
  const TauEstimate step0 = tau_from_residuals(centered);

  TauEstimate current = step0;
  for (int k = 0; k < iterations; ++k) {
    const FitResult fit = fit_expectile(data, subset, ExpectileIndex(current.tau), opts);
    current = tau_from_residuals(residuals(fit, data));
  }
  current.stage = TauStage::step1;
  current.tau0 = step0.tau;
  current.iterations = iterations;
  return current;
}

namespace {

// E[eps^-] / (E[eps^+] + E[eps^-]) from E[eps^+] and the mean.
double tau_from_moments(double positive_part, double mean) {
  const double negative_part = positive_part - mean;
  return negative_part / (positive_part + negative_part);
}

}  // namespace

double true_tau_of(ErrorDistribution d) {
  const boost::math::normal_distribution<double> z;
  switch (d) {
    case ErrorDistribution::std_normal:
      return 0.5;
    case ErrorDistribution::centered_exponential: {
      // E[(E - c)^+] = exp(-c), mean 1 - c
      const double c = kExponentialShift;
      return tau_from_moments(std::exp(-c), 1.0 - c);
    }
    case ErrorDistribution::normal_pow4_centered: {
      // E[(Z^4 - c)^+] = 2 int_a^inf (z^4 - c) phi(z) dz with a = c^{1/4}
      const double c = 6.0 * kMedianNormalPow4;
      const double a = std::pow(c, 0.25);
      const double tail = cdf(complement(z, a));
      const double upper4 = (a * a * a + 3.0 * a) * pdf(z, a) + 3.0 * tail;
      return tau_from_moments(2.0 * upper4 - 2.0 * c * tail, 3.0 - c);
    }
    case ErrorDistribution::exp_minus_normal_pow4: {
      // E[(E - W)^+] = E[exp(-W)] for W = Z^4 independent of E; mean 1 - 3
      boost::math::quadrature::exp_sinh<double> integrator;
      const double laplace = 2.0 * integrator.integrate([&](double t) {
        return std::exp(-t * t * t * t) * pdf(z, t);
      });
      return tau_from_moments(laplace, -2.0);
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown error distribution");
}

}  // namespace expsel
