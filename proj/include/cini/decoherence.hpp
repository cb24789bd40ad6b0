#ifndef CINI_DECOHERENCE_HPP
#define CINI_DECOHERENCE_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cini/invariant.hpp"
#include "cini/phases.hpp"
#include "cini/su2.hpp"
#include "cini/types.hpp"

namespace cini {

enum class DecoherenceMethod { direct, closed_form, special_case };

inline std::string to_string(DecoherenceMethod m) {
  switch (m) {
    case DecoherenceMethod::direct: return "direct";
    case DecoherenceMethod::closed_form: return "closed_form";
    case DecoherenceMethod::special_case: return "special_case";
  }
  return "unknown";
}

/// Sampled decoherence factor F_{k,l}(t_i) for one branch pair and detector
/// weight m, tagged with the method that produced it.
struct DecoherenceTrace {
  TimeGrid grid;
  Vector values;
  int two_j = 0;
  int two_m = 0;
  int branch_k = 0;
  int branch_l = 0;
  DecoherenceMethod method = DecoherenceMethod::direct;
};

/// F(t_i) = <j,m| V_k^dag(t_i) V_l(t_i) |j,m>, the matrix-element sandwich.
/// This is the authoritative definition the closed form is measured against.
inline DecoherenceTrace decoherence_direct(const MatrixSeq& v_k, const MatrixSeq& v_l, int two_j,
                                           int two_m, const TimeGrid& grid, int branch_k = 0,
                                           int branch_l = 1) {
  if (v_k.size() != v_l.size() || v_k.size() != static_cast<size_t>(grid.num_nodes()))
    throw std::invalid_argument("decoherence_direct: sample counts do not match grid");
  const int idx = basis_index(two_j, two_m);
  DecoherenceTrace tr;
  tr.grid = grid;
  tr.two_j = two_j;
  tr.two_m = two_m;
  tr.branch_k = branch_k;
  tr.branch_l = branch_l;
  tr.method = DecoherenceMethod::direct;
  tr.values.resize(v_k.size());
  for (size_t i = 0; i < v_k.size(); ++i) {
    if (v_k[i].rows() != two_j + 1 || v_l[i].rows() != two_j + 1)
      throw std::invalid_argument("decoherence_direct: dimension mismatch");
    tr.values(i) = v_k[i].col(idx).dot(v_l[i].col(idx));
  }
  return tr;
}

/// Closed-form factor
///   F = exp[-m (beta_l beta_k* - beta_k beta_l*)] d^j_{mm}(2 |beta_l - beta_k|).
/// The exponential argument is purely imaginary, so the prefactor is a pure
/// phase; the displacement matrix element reduces to the diagonal Wigner d,
/// independent of the phase of beta_l - beta_k. Exact for collinear beta
/// (equal gamma); for general beta the deviation from the direct sandwich is
/// reported empirically rather than asserted away.
inline Complex decoherence_closed(Complex beta_k, Complex beta_l, int two_j, int two_m) {
  const double m = two_m / 2.0;
  const Complex arg = -m * (beta_l * std::conj(beta_k) - beta_k * std::conj(beta_l));
  const Complex prefactor = std::exp(arg);
  return prefactor * wigner_d_diag(two_j, two_m, 2 * std::abs(beta_l - beta_k));
}

inline DecoherenceTrace decoherence_closed_trace(const DisplacementParams& beta_k,
                                                 const DisplacementParams& beta_l, int two_j,
                                                 int two_m, const TimeGrid& grid, int branch_k = 0,
                                                 int branch_l = 1) {
  if (beta_k.beta.size() != beta_l.beta.size() ||
      beta_k.beta.size() != static_cast<Eigen::Index>(grid.num_nodes()))
    throw std::invalid_argument("decoherence_closed_trace: sample counts do not match grid");
  DecoherenceTrace tr;
  tr.grid = grid;
  tr.two_j = two_j;
  tr.two_m = two_m;
  tr.branch_k = branch_k;
  tr.branch_l = branch_l;
  tr.method = DecoherenceMethod::closed_form;
  tr.values.resize(beta_k.beta.size());
  for (Eigen::Index i = 0; i < beta_k.beta.size(); ++i)
    tr.values(i) = decoherence_closed(beta_k.beta(i), beta_l.beta(i), two_j, two_m);
  return tr;
}

/// cos(alpha)^{2j}, the stretched-state (m = j) factor for same-axis branch
/// pairs, with alpha the accumulated half difference of the drive rates.
inline double special_case_factor(int two_j, double alpha) {
  double r = 1.0;
  const double c = std::cos(alpha);
  for (int i = 0; i < two_j; ++i) r *= c;
  return r;
}

/// |F|(j) = |cos alpha|^{2j} for each requested 2j, evaluated in log space so
/// very large j underflows gracefully to zero instead of overflowing.
inline std::vector<double> classical_limit_scan(double alpha, const std::vector<int>& two_j_list) {
  std::vector<double> out;
  out.reserve(two_j_list.size());
  const double ac = std::abs(std::cos(alpha));
  for (int two_j : two_j_list) {
    if (two_j < 0) throw std::invalid_argument("classical_limit_scan: two_j must be >= 0");
    if (two_j == 0) {
      out.push_back(1.0);
    } else if (ac == 0.0) {
      out.push_back(0.0);
    } else {
      out.push_back(std::exp(two_j * std::log(ac)));
    }
  }
  return out;
}

/// Direct same-axis sandwich <j,j| V^dag(lambda_k) V(lambda_l) |j,j> with
/// lambda_l - lambda_k = 2 alpha, evaluated in extended precision. The
/// classical-limit values sit near 1e-15 where double-precision
/// eigendecomposition noise would swamp them.
inline double classical_limit_direct(int two_j, double alpha, double lambda_offset = 0.1) {
  using LD = long double;
  const SU2RepT<LD> rep = build_rep<LD>(two_j);
  const LD lam_k = static_cast<LD>(lambda_offset);
  const LD lam_l = lam_k + 2 * static_cast<LD>(alpha);
  const auto v_k = su2_displacement<LD>(rep, std::complex<LD>(-lam_k / 2, 0));
  const auto v_l = su2_displacement<LD>(rep, std::complex<LD>(-lam_l / 2, 0));
  const std::complex<LD> f = v_k.col(0).dot(v_l.col(0));
  return static_cast<double>(std::abs(f));
}

/// Full detector-branch overlap including the branch phase difference:
///   exp(i [phi^(l)_m - phi^(k)_m](t_i)) F(t_i).
inline Vector branch_overlap(const DecoherenceTrace& f_kl, const PhaseTrace& phase_k,
                             const PhaseTrace& phase_l) {
  if (phase_k.grid != f_kl.grid || phase_l.grid != f_kl.grid ||
      phase_k.two_m != f_kl.two_m || phase_l.two_m != f_kl.two_m)
    throw std::invalid_argument("branch_overlap: grid or weight mismatch");
  Vector out(f_kl.values.size());
  const RealVector tk = phase_k.total();
  const RealVector tl = phase_l.total();
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double d = tl(i) - tk(i);
    out(i) = Complex(std::cos(d), std::sin(d)) * f_kl.values(i);
  }
  return out;
}

struct PairOverlap {
  int k = 0;
  int l = 1;
  Vector values;
};

/// Reduced coherence matrix rho_{kl}(t) = c_k c_l* overlap_{kl}(t) per node.
/// Diagonal entries are the constant populations |c_k|^2; the output is
/// Hermitian by construction. Overlaps must be supplied for every pair k < l.
inline std::vector<Matrix> reduced_coherence(const Vector& amplitudes,
                                             const std::vector<PairOverlap>& overlaps,
                                             int num_nodes) {
  const Eigen::Index nlev = amplitudes.size();
  if (std::abs(amplitudes.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("reduced_coherence: amplitudes must be normalized");
  std::vector<std::vector<const Vector*>> table(nlev, std::vector<const Vector*>(nlev, nullptr));
  for (const auto& po : overlaps) {
    if (po.k < 0 || po.l < 0 || po.k >= nlev || po.l >= nlev || po.k >= po.l)
      throw std::invalid_argument("reduced_coherence: bad overlap pair indices");
    if (po.values.size() != num_nodes)
      throw std::invalid_argument("reduced_coherence: overlap length mismatch");
    table[po.k][po.l] = &po.values;
  }
  for (Eigen::Index k = 0; k < nlev; ++k)
    for (Eigen::Index l = k + 1; l < nlev; ++l)
      if (!table[k][l]) throw std::invalid_argument("reduced_coherence: missing overlap pair");
  std::vector<Matrix> rho(num_nodes, Matrix::Zero(nlev, nlev));
  for (int i = 0; i < num_nodes; ++i) {
    for (Eigen::Index k = 0; k < nlev; ++k) {
      rho[i](k, k) = std::norm(amplitudes(k));
      for (Eigen::Index l = k + 1; l < nlev; ++l) {
        const Complex v = amplitudes(k) * std::conj(amplitudes(l)) * (*table[k][l])(i);
        rho[i](k, l) = v;
        rho[i](l, k) = std::conj(v);
      }
    }
  }
  return rho;
}

}  // namespace cini

#endif  // CINI_DECOHERENCE_HPP
