#ifndef CINI_MODEL_HPP
#define CINI_MODEL_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

#include "cini/schedule.hpp"
#include "cini/su2.hpp"
#include "cini/types.hpp"

namespace cini {

/// Two detector mode frequencies omega1(t), omega2(t), rad/time.
struct DetectorParams {
  Schedule omega1;
  Schedule omega2;
};

/// One system level: energy E_k(t) and complex mode-exchange coupling g_k(t).
struct LevelParams {
  Schedule E;
  ComplexSchedule g;
};

/// Fixed-total-occupation subspace (n1, n2 bosons in the two modes), which
/// selects the spin sector two_j = n1 + n2 and the stretched weight
/// two_m = n1 - n2.
struct SubspaceLabel {
  int n1 = 0;
  int n2 = 0;

  SubspaceLabel() = default;
  SubspaceLabel(int n1_, int n2_) : n1(n1_), n2(n2_) {
    if (n1 < 0 || n2 < 0) throw std::invalid_argument("SubspaceLabel: occupations must be >= 0");
  }

  int two_j() const { return n1 + n2; }
  int two_m() const { return n1 - n2; }
  double n() const { return 0.5 * (n1 + n2); }
};

/// Spherical reparameterization of the subspace Hamiltonian at one instant:
///   c cos(theta) = omega1 - omega2,
///   (c/2) sin(theta) e^{-i phi} = g,
///   f = E + n (omega1 + omega2).
/// When |g| = 0 the azimuth is undefined; phi is set to 0 and the sample is
/// flagged degenerate (theta additionally set to 0 when c = 0).
struct SphericalParams {
  double c = 0.0;      // drive magnitude, rad/time, >= 0
  double theta = 0.0;  // polar angle in [0, pi]
  double phi = 0.0;    // azimuth in (-pi, pi]
  double f = 0.0;      // scalar shift E + n(omega1+omega2)
  bool degenerate = false;
};

inline SphericalParams spherical_from_physical(const DetectorParams& det, const LevelParams& lvl,
                                               double n, double t) {
  const double delta = det.omega1(t) - det.omega2(t);
  const Complex g = lvl.g(t);
  const double ag = std::abs(g);
  SphericalParams sp;
  sp.f = lvl.E(t) + n * (det.omega1(t) + det.omega2(t));
  sp.c = std::hypot(delta, 2.0 * ag);
  if (ag == 0.0) {
    sp.degenerate = true;
    sp.phi = 0.0;
    sp.theta = (sp.c == 0.0) ? 0.0 : (delta > 0.0 ? 0.0 : M_PI);
  } else {
    sp.theta = std::atan2(2.0 * ag, delta);
    sp.phi = -std::arg(g);
  }
  return sp;
}

/// Subspace Hamiltonian assembled from the physical parameters:
///   f 1 + g J_+ + g* J_- + (omega1 - omega2) J3.
inline Matrix hamiltonian_matrix(const DetectorParams& det, const LevelParams& lvl,
                                 const SubspaceLabel& label, double t, const SU2Rep& rep) {
  if (rep.two_j != label.two_j())
    throw std::invalid_argument("hamiltonian_matrix: representation/label dimension mismatch");
  const double delta = det.omega1(t) - det.omega2(t);
  const Complex g = lvl.g(t);
  const double f = lvl.E(t) + label.n() * (det.omega1(t) + det.omega2(t));
  Matrix h = g * rep.J_plus + std::conj(g) * rep.J_minus + delta * rep.J3;
  h += f * Matrix::Identity(rep.dim, rep.dim);
  return h;
}

/// Same Hamiltonian rebuilt from the spherical form:
///   c [ (1/2) sin(theta) e^{-i phi} J_+ + h.c. + cos(theta) J3 ] + f 1.
inline Matrix hamiltonian_from_spherical(const SphericalParams& sp, const SU2Rep& rep) {
  const Complex phase(std::cos(sp.phi), -std::sin(sp.phi));
  const double st = std::sin(sp.theta);
  const double ct = std::cos(sp.theta);
  Matrix h = sp.c * (0.5 * st * phase * rep.J_plus + 0.5 * st * std::conj(phase) * rep.J_minus +
                     ct * rep.J3);
  h += sp.f * Matrix::Identity(rep.dim, rep.dim);
  return h;
}

using SphericalSource = std::function<SphericalParams(double)>;
using HamiltonianSource = std::function<Matrix(double)>;

inline SphericalSource make_spherical_source(DetectorParams det, LevelParams lvl, double n) {
  return [det = std::move(det), lvl = std::move(lvl), n](double t) {
    return spherical_from_physical(det, lvl, n, t);
  };
}

inline HamiltonianSource make_hamiltonian_source(DetectorParams det, LevelParams lvl,
                                                 SubspaceLabel label, SU2Rep rep) {
  return [det = std::move(det), lvl = std::move(lvl), label, rep = std::move(rep)](double t) {
    return hamiltonian_matrix(det, lvl, label, t, rep);
  };
}

}  // namespace cini

#endif  // CINI_MODEL_HPP
