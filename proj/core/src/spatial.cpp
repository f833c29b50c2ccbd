#include "fwus/spatial.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fwus/config.hpp"
#include "fwus/error.hpp"

namespace fwus {
namespace {

constexpr double kTruncation = 1e-12;
constexpr double kIntegralTolerance = 1e-10;
constexpr double kMaxSupport = 1e8;  // m; integrands still above kTruncation here diverge for our purposes

void check_density(double lambda, const char* name) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    fail(ErrorCode::kInvalidParameter, std::string(name) + " must be finite and >= 0");
  }
}

Point2D uniform_on_disk(double radius, Rng& rng) {
  const double r = radius * std::sqrt(uniform01(rng));
  const double theta = 2.0 * std::numbers::pi * uniform01(rng);
  return {r * std::cos(theta), r * std::sin(theta)};
}

std::vector<Point2D> sample_ppp(double lambda, double radius, Rng& rng) {
  const double mean = lambda * std::numbers::pi * radius * radius;
  std::vector<Point2D> points;
  if (mean <= 0.0) return points;
  std::poisson_distribution<long long> count(mean);
  const long long n = count(rng);
  points.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) points.push_back(uniform_on_disk(radius, rng));
  return points;
}

}  // namespace

double distance(const Point2D& a, const Point2D& b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

InfluenceFunction InfluenceFunction::exponential() {
  return InfluenceFunction([](double d) { return std::exp(-d); }, true);
}

InfluenceFunction InfluenceFunction::custom(Fn fn) { return InfluenceFunction(std::move(fn), false); }

double influence_integral(const InfluenceFunction& p, IntegralForm form) {
  auto integrand = [&](double d) { return form == IntegralForm::kRadialJacobian ? d * p(d) : p(d); };

  // Grow the support until the integrand has decayed below the truncation level
  // (checked at two consecutive doublings to step over oscillating tails).
  double upper = 1.0;
  while (!(integrand(upper) < kTruncation && integrand(2.0 * upper) < kTruncation)) {
    upper *= 2.0;
    if (upper > kMaxSupport) {
      fail(ErrorCode::kNonIntegrableInfluence, "influence function does not decay; integral diverges");
    }
  }

  // Dyadic pieces [0,1], [1,2], [2,4], ... keep each adaptive call well scaled.
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
  double total = 0.0;
  double a = 0.0;
  double b = 1.0;
  while (a < upper) {
    double error = 0.0;
    total += Quadrature::integrate(integrand, a, b, 20, 1e-13, &error);
    if (error > kIntegralTolerance) {
      fail(ErrorCode::kNonIntegrableInfluence, "adaptive quadrature did not converge");
    }
    a = b;
    b *= 2.0;
  }
  if (!std::isfinite(total)) fail(ErrorCode::kNonIntegrableInfluence, "influence integral is not finite");
  return total;
}

Deployment sample_deployment(const ScenarioConfig& cfg, Rng& rng) {
  check_density(cfg.lambda_M, "lambda_M");
  check_density(cfg.lambda_E, "lambda_E");
  if (!(cfg.region_radius > 0.0) || !std::isfinite(cfg.region_radius)) {
    fail(ErrorCode::kInvalidParameter, "region_radius must be > 0");
  }
  if (cfg.guard_margin < 0.0) fail(ErrorCode::kInvalidParameter, "guard radius must be >= region radius");

  Deployment dep;
  dep.region_radius = cfg.region_radius;
  dep.guard_radius = cfg.guard_radius();
  dep.lambda_M = cfg.lambda_M;
  dep.lambda_E = cfg.lambda_E;
  if (cfg.device_count_override) {
    const int n = *cfg.device_count_override;
    dep.devices.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dep.devices.push_back(uniform_on_disk(dep.region_radius, rng));
  } else {
    dep.devices = sample_ppp(cfg.lambda_M, dep.region_radius, rng);
  }
  dep.events = sample_ppp(cfg.lambda_E, dep.guard_radius, rng);
  return dep;
}

void resample_events(Deployment& dep, double lambda_E, Rng& rng) {
  check_density(lambda_E, "lambda_E");
  dep.lambda_E = lambda_E;
  dep.events = sample_ppp(lambda_E, dep.guard_radius, rng);
}

double activation_probability_analytic(double lambda_E, const InfluenceFunction& p, IntegralForm form) {
  check_density(lambda_E, "lambda_E");
  if (lambda_E == 0.0) return 0.0;
  const double integral = p.is_default_exponential() ? 1.0 : influence_integral(p, form);
  return -std::expm1(-2.0 * std::numbers::pi * lambda_E * integral);
}

std::vector<double> per_device_activation(const Deployment& dep, const InfluenceFunction& p) {
  std::vector<double> out;
  out.reserve(dep.devices.size());
  for (const auto& u : dep.devices) {
    double idle = 1.0;  // probability no event reaches the device
    for (const auto& e : dep.events) idle *= 1.0 - p(distance(u, e));
    out.push_back(1.0 - idle);
  }
  return out;
}

}  // namespace fwus
