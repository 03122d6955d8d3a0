#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "qds/errors.hpp"
#include "qds/models.hpp"

namespace qds::models {
namespace {

void check_coupling(const SpinBosonCoupling& c) {
  if (!std::isfinite(c.lambda)) throw ValidationError("lambda must be finite");
  if (!std::isfinite(c.s)) throw ValidationError("declared exponent s must be finite");
  if (!(c.omega_c > 0.0) || !std::isfinite(c.omega_c)) throw ValidationError("omega_c must be > 0");
  if (c.lambda != 0.0 && !c.f) throw ValidationError("coupling function f is not set");
}

SpinBosonOverlap divergent() {
  SpinBosonOverlap out;
  out.norm_g_sq = std::nullopt;
  out.overlap = 0.0;
  out.error_estimate = std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace

SpinBosonOverlap spin_boson_overlap(const SpinBosonCoupling& c, double quad_tol) {
  check_coupling(c);
  if (!(quad_tol > 0.0)) throw ValidationError("quad_tol must be > 0");
  if (c.lambda == 0.0) return {0.0, 1.0, 0.0};
  if (c.s <= 1.0) return divergent();

  auto integrand = [&](double w) {
    if (w <= 0.0) return 0.0;
    return std::norm(c.f(w) / w);
  };

  // The infrared piece is split at omega_c so each map sees one endpoint.
  boost::math::quadrature::tanh_sinh<double> inner;
  boost::math::quadrature::exp_sinh<double> outer;
  double err_lo = 0.0;
  double err_hi = 0.0;
  double l1_lo = 0.0;
  double l1_hi = 0.0;
  const double tol = std::min(quad_tol * 1e-2, 1e-10);
  double lo = 0.0;
  double hi = 0.0;
  try {
    lo = inner.integrate(integrand, 0.0, c.omega_c, tol, &err_lo, &l1_lo);
    hi = outer.integrate(integrand, c.omega_c, std::numeric_limits<double>::infinity(), tol,
                         &err_hi, &l1_hi);
  } catch (const std::exception& e) {
    throw ContractViolation(std::string("quadrature of |g|^2 failed: ") + e.what());
  }
  const double integral = lo + hi;
  if (!std::isfinite(integral)) {
    throw ContractViolation("quadrature of |g|^2 did not converge");
  }
  const double scale = std::max(std::abs(integral), std::numeric_limits<double>::min());
  const double rel = (err_lo + err_hi) / scale;
  if (rel > quad_tol) {
    throw ContractViolation("quadrature of |g|^2 did not reach tolerance (relative error " +
                            std::to_string(rel) + ")");
  }
  SpinBosonOverlap out;
  out.norm_g_sq = c.lambda * c.lambda * integral;
  out.overlap = std::exp(-2.0 * *out.norm_g_sq);
  out.error_estimate = c.lambda * c.lambda * (err_lo + err_hi);
  return out;
}

DephasingFeasibility dephasing_feasibility(const SpinBosonCoupling& c, double quad_tol) {
  check_coupling(c);
  DephasingFeasibility r;
  if (c.lambda == 0.0) {
    r.overlap = {0.0, 1.0, 0.0};
    r.verdict = "uncoupled: no dephasing, trivially consistent";
    return r;
  }
  r.markov_dephasing_rate = c.lambda * c.lambda * std::norm(c.f(0.0));
  r.markovian_dephasing = r.markov_dephasing_rate > 0.0;
  if (r.markovian_dephasing) {
    // |f(0)| > 0 means |f|^2 / omega^2 is not integrable at the origin.
    r.overlap = divergent();
    r.cloud_norm_finite = false;
    r.incompatible = true;
    r.verdict =
        "R(0) > 0 forces a divergent cloud norm: the model is either nonphysical or cannot "
        "describe exponential (Markovian) dephasing";
    return r;
  }
  r.overlap = spin_boson_overlap(c, quad_tol);
  r.cloud_norm_finite = r.overlap.norm_g_sq.has_value();
  if (r.cloud_norm_finite) {
    r.verdict = "finite cloud norm, R(0) = 0: no Markovian dephasing";
  } else {
    r.verdict = "divergent cloud norm (declared infrared exponent s <= 1), R(0) = 0";
  }
  return r;
}

}  // namespace qds::models
