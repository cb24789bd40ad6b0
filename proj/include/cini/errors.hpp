#ifndef CINI_ERRORS_HPP
#define CINI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cini {

/// Auxiliary integration hit the cot(lambda) pole: |sin lambda| fell below
/// the configured floor. Carries the first offending time.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(double t, double sin_lambda)
      : std::runtime_error("auxiliary integration singular at t=" + std::to_string(t) +
                           " (|sin lambda|=" + std::to_string(sin_lambda) + ")"),
        time(t) {}
  double time;
};

/// NaN or infinity appeared in an integration state.
class NonFiniteError : public std::runtime_error {
 public:
  explicit NonFiniteError(double t)
      : std::runtime_error("non-finite state at t=" + std::to_string(t)), time(t) {}
  double time;
};

/// A Hamiltonian sample failed the Hermiticity gate.
class NonHermitianError : public std::runtime_error {
 public:
  NonHermitianError(double t, double deviation)
      : std::runtime_error("non-Hermitian Hamiltonian sample at t=" + std::to_string(t) +
                           " (max |H - H^dag| = " + std::to_string(deviation) + ")"),
        time(t) {}
  double time;
};

/// Configuration parsing or validation failure; message names the offending path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cini

#endif  // CINI_ERRORS_HPP
