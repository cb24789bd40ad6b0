#ifndef CINI_SU2_HPP
#define CINI_SU2_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "cini/types.hpp"

namespace cini {

/// Dense spin-j angular momentum matrices in the |j,m> basis ordered
/// m = j, j-1, ..., -j (row/column 0 is m = j). Spins are carried as the
/// integer 2j so half-integer values never touch floating point keys.
template <class RealT>
struct SU2RepT {
  using Scalar = std::complex<RealT>;
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  int two_j = 0;
  int dim = 1;
  MatrixType J_plus;   // raising operator
  MatrixType J_minus;  // lowering operator, adjoint of J_plus
  MatrixType J3;       // real diagonal j, j-1, ..., -j
  MatrixType J2;       // (J_plus - J_minus)/(2i), Hermitian
};

using SU2Rep = SU2RepT<double>;

/// Row/column index of |j,m> under the fixed basis ordering.
inline int basis_index(int two_j, int two_m) {
  if (two_j < 0) throw std::invalid_argument("basis_index: two_j must be >= 0");
  if (std::abs(two_m) > two_j || (two_j - two_m) % 2 != 0)
    throw std::invalid_argument("basis_index: two_m out of range or parity mismatch");
  return (two_j - two_m) / 2;
}

inline int two_m_at(int two_j, int index) { return two_j - 2 * index; }

/// Build the spin-j representation. <j,m+1|J_+|j,m> = sqrt((j-m)(j+m+1)).
template <class RealT = double>
SU2RepT<RealT> build_rep(int two_j) {
  if (two_j < 0) throw std::invalid_argument("build_rep: two_j must be >= 0");
  using Rep = SU2RepT<RealT>;
  Rep rep;
  rep.two_j = two_j;
  rep.dim = two_j + 1;
  const RealT j = RealT(two_j) / 2;
  rep.J_plus = Rep::MatrixType::Zero(rep.dim, rep.dim);
  rep.J3 = Rep::MatrixType::Zero(rep.dim, rep.dim);
  for (int col = 0; col < rep.dim; ++col) {
    const RealT m = j - col;
    rep.J3(col, col) = m;
    if (col > 0) rep.J_plus(col - 1, col) = std::sqrt((j - m) * (j + m + 1));
  }
  rep.J_minus = rep.J_plus.adjoint();
  rep.J2 = (rep.J_plus - rep.J_minus) / std::complex<RealT>(0, 2);
  return rep;
}

/// AB - BA for square matrices of equal dimension.
template <class DerivedA, class DerivedB>
auto commutator(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("commutator: shape mismatch");
  return (a * b - b * a).eval();
}

/// exp(zeta J_+ - zeta* J_-), evaluated through the eigendecomposition of the
/// Hermitian generator -i(zeta J_+ - zeta* J_-) so the result is unitary to
/// rounding regardless of |zeta|.
template <class RealT>
typename SU2RepT<RealT>::MatrixType su2_displacement(const SU2RepT<RealT>& rep,
                                                     std::complex<RealT> zeta) {
  using MatrixType = typename SU2RepT<RealT>::MatrixType;
  if (zeta == std::complex<RealT>(0, 0)) return MatrixType::Identity(rep.dim, rep.dim);
  const std::complex<RealT> i01(0, 1);
  MatrixType herm = -i01 * (zeta * rep.J_plus - std::conj(zeta) * rep.J_minus);
  Eigen::SelfAdjointEigenSolver<MatrixType> es(herm);
  Eigen::Vector<std::complex<RealT>, Eigen::Dynamic> phases(rep.dim);
  for (int k = 0; k < rep.dim; ++k) phases(k) = std::exp(i01 * es.eigenvalues()(k));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
  return r;
}

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// x^e for integer e >= 0 with an exact zero when x == 0, e > 0.
inline double int_pow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace detail

/// Diagonal Wigner d-matrix element
///   d^j_{mm}(theta) = sum_k (-1)^k C(j+m,k) C(j-m,k) cos(theta/2)^{2j-2k} sin(theta/2)^{2k}.
/// Binomials are evaluated as direct products up to 2j = 30 and through
/// log-gamma above that, so classical-limit scans at large j stay finite.
inline double wigner_d_diag(int two_j, int two_m, double theta) {
  if (two_j < 0) throw std::invalid_argument("wigner_d_diag: two_j must be >= 0");
  if (std::abs(two_m) > two_j || (two_j - two_m) % 2 != 0)
    throw std::invalid_argument("wigner_d_diag: two_m out of range or parity mismatch");
  const int jm = (two_j + two_m) / 2;   // j + m
  const int jmm = (two_j - two_m) / 2;  // j - m
  const int kmax = std::min(jm, jmm);
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  double total = 0.0;
  if (two_j <= 30) {
    for (int k = 0; k <= kmax; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      total += sign * detail::binomial(jm, k) * detail::binomial(jmm, k) *
               detail::int_pow(c, two_j - 2 * k) * detail::int_pow(s, 2 * k);
    }
    return total;
  }
  for (int k = 0; k <= kmax; ++k) {
    const int ec = two_j - 2 * k;
    const int es = 2 * k;
    if (c == 0.0 && ec > 0) continue;
    if (s == 0.0 && es > 0) continue;
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    if (c < 0.0 && ec % 2 != 0) sign = -sign;
    // es is even, so the sign of s never contributes
    double lg = detail::log_binomial(jm, k) + detail::log_binomial(jmm, k);
    if (ec > 0) lg += ec * std::log(std::abs(c));
    if (es > 0) lg += es * std::log(std::abs(s));
    total += sign * std::exp(lg);
  }
  return total;
}

}  // namespace cini

#endif  // CINI_SU2_HPP
