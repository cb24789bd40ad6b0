#ifndef CINI_TYPES_HPP
#define CINI_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace cini {

using Real = double;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using MatrixSeq = std::vector<Matrix>;
using StateSeq = std::vector<Vector>;

/// Uniform time grid with nodes t_i = t0 + i*dt, i = 0..steps.
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  int steps = 2;

  TimeGrid() = default;
  TimeGrid(double t0_, double t1_, int steps_) : t0(t0_), t1(t1_), steps(steps_) {
    if (steps < 2) throw std::invalid_argument("TimeGrid: steps must be >= 2");
    if (!(t1 > t0)) throw std::invalid_argument("TimeGrid: t1 must exceed t0");
  }

  double dt() const { return (t1 - t0) / steps; }
  int num_nodes() const { return steps + 1; }
  double node(int i) const { return t0 + dt() * i; }

  bool operator==(const TimeGrid&) const = default;
};

}  // namespace cini

#endif  // CINI_TYPES_HPP
