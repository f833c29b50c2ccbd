#pragma once

#include <functional>
#include <vector>

#include "fwus/rng.hpp"

namespace fwus {

struct ScenarioConfig;

struct Point2D {
  double x = 0.0;  // m
  double y = 0.0;  // m
};

double distance(const Point2D& a, const Point2D& b) noexcept;

// One realization of the device PPP (region disk) and the event-epicenter PPP
// (guard disk, concentric and at least as large).
struct Deployment {
  std::vector<Point2D> devices;
  std::vector<Point2D> events;
  double region_radius = 0.0;
  double guard_radius = 0.0;
  double lambda_M = 0.0;  // devices / m^2
  double lambda_E = 0.0;  // events / m^2
};

// How the event-influence integral in the homogeneous activation probability
// is formed. kAsPrinted integrates p(d) dd; kRadialJacobian integrates
// d p(d) dd, the usual PGFL over the plane. Both equal 1 for p(d) = exp(-d).
enum class IntegralForm { kAsPrinted, kRadialJacobian };

// Distance -> sensing probability. Must be non-increasing with value <= 1 at
// zero and integrable on [0, inf).
class InfluenceFunction {
 public:
  using Fn = std::function<double(double)>;

  static InfluenceFunction exponential();
  static InfluenceFunction custom(Fn fn);

  double operator()(double d) const { return fn_(d); }
  bool is_default_exponential() const noexcept { return exponential_; }

 private:
  InfluenceFunction(Fn fn, bool exponential) : fn_(std::move(fn)), exponential_(exponential) {}

  Fn fn_;
  bool exponential_ = false;
};

// Integral of p (or d * p) over [0, inf), truncated where the integrand drops
// below 1e-12. Throws kNonIntegrableInfluence if no such point exists.
double influence_integral(const InfluenceFunction& p, IntegralForm form = IntegralForm::kAsPrinted);

Deployment sample_deployment(const ScenarioConfig& cfg, Rng& rng);

// Fresh event realization on an existing device layout (dynamic density runs).
void resample_events(Deployment& dep, double lambda_E, Rng& rng);

// 1 - exp(-2 pi lambda_E * integral).
double activation_probability_analytic(double lambda_E, const InfluenceFunction& p,
                                       IntegralForm form = IntegralForm::kAsPrinted);

// 1 - prod_e (1 - p(|u_i - e|)) for every device i.
std::vector<double> per_device_activation(const Deployment& dep, const InfluenceFunction& p);

}  // namespace fwus
