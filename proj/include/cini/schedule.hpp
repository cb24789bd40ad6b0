#ifndef CINI_SCHEDULE_HPP
#define CINI_SCHEDULE_HPP

#include <cmath>
#include <complex>
#include <utility>
#include <variant>
#include <vector>

#include "cini/types.hpp"

namespace cini {

/// Declarative time-dependent real parameter: constant, linear, cosine, or a
/// sum of schedules. Evaluation is deterministic and finite for finite t.
struct Schedule {
  struct Constant {
    double value = 0.0;
  };
  struct Linear {
    double offset = 0.0;
    double slope = 0.0;  // per unit time
  };
  struct Cosine {
    double amplitude = 0.0;
    double omega = 0.0;  // rad/time
    double delta = 0.0;  // rad
  };
  struct Sum {
    std::vector<Schedule> parts;
  };

  std::variant<Constant, Linear, Cosine, Sum> node = Constant{};

  static Schedule constant(double a) { return {Constant{a}}; }
  static Schedule linear(double a, double b) { return {Linear{a, b}}; }
  static Schedule cosine(double amplitude, double omega, double delta) {
    return {Cosine{amplitude, omega, delta}};
  }
  static Schedule sum(std::vector<Schedule> parts) { return {Sum{std::move(parts)}}; }

  double operator()(double t) const {
    return std::visit(
        [t](const auto& n) -> double {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Constant>) return n.value;
          if constexpr (std::is_same_v<T, Linear>) return n.offset + n.slope * t;
          if constexpr (std::is_same_v<T, Cosine>) return n.amplitude * std::cos(n.omega * t + n.delta);
          if constexpr (std::is_same_v<T, Sum>) {
            double acc = 0.0;
            for (const auto& p : n.parts) acc += p(t);
            return acc;
          }
        },
        node);
  }
};

inline double eval_schedule(const Schedule& s, double t) { return s(t); }

/// g(t) = r(t) exp(i chi(t)) with real amplitude and phase schedules.
struct ComplexSchedule {
  Schedule amplitude;  // r(t)
  Schedule phase;      // chi(t), radians

  Complex operator()(double t) const {
    const double chi = phase(t);
    return amplitude(t) * Complex(std::cos(chi), std::sin(chi));
  }
};

}  // namespace cini

#endif  // CINI_SCHEDULE_HPP
