#pragma once

// Symbols on the unit circle and finite sections of their multiplication
// operators.
//
// With K = span{e_-1, e_-2, ...} and H = span{e_0, e_1, ...} the
// multiplication operator M_f on L^2 splits as
//
//   M_f = [[Ttilde_f, Htilde_f], [H_f, T_f]]   (rows and columns K, H)
//
// where T_f is the Toeplitz and H_f the Hankel operator of f. Swapping the
// two column blocks gives [[Htilde_f, Ttilde_f], [T_f, H_f]], whose inverse
// is [[H_g, T_g], [Ttilde_g, Htilde_g]] for g = 1/f. That identity couples
// H_f and H_{1/f}; this module checks it on finite sections.

#include "eaekit/numkernel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eaekit {

// Fourier coefficients f^(j) for j = offset .. offset + size - 1, zero
// elsewhere.
struct SymbolFC {
  long offset = 0;
  std::vector<Complex> coeffs;

  long j_min() const { return offset; }
  long j_max() const { return offset + static_cast<long>(coeffs.size()) - 1; }
  Complex at(long j) const;
  double wiener_norm() const;
  bool empty() const { return coeffs.empty(); }

  static SymbolFC constant(Complex c) { return {0, {c}}; }
};

// Restriction to modes lo .. hi.
SymbolFC truncate(const SymbolFC& f, long lo, long hi);
// Non-negative modes only (Riesz projection).
SymbolFC riesz_projection(const SymbolFC& f);
// Coefficients of the product symbol.
SymbolFC convolve(const SymbolFC& a, const SymbolFC& b);
// f(e^{it}).
Complex evaluate(const SymbolFC& f, double t);

// f (nearly) vanishes somewhere on the evaluation grid.
class SymbolInversionError : public Error {
public:
  SymbolInversionError(const std::string& what, double min_modulus)
      : Error(what), min_modulus_(min_modulus) {}
  double min_modulus() const noexcept { return min_modulus_; }

private:
  double min_modulus_;
};

struct SymbolInverse {
  SymbolFC symbol;
  Index grid = 0;
  double min_modulus = 0.0;
  long winding = 0;
  // || f * g - delta_0 ||_1, computed by exact convolution.
  double convolution_residual = 0.0;
};

// Coefficients of 1/f from grid evaluation and a discrete transform.
// The grid is enlarged to at least 4x the coefficient support; coefficients
// below tail * max|g^| are dropped from both ends.
SymbolInverse invert_symbol(const SymbolFC& f, Index grid = 1024, double tol = 1e-10,
                            double tail = 1e-16);

struct SectionBlocks {
  Index N = 0;
  Matrix Ttilde;  // N x N        rows/cols e_-1 .. e_-N
  Matrix Htilde;  // N x (N+1)    rows e_-1 .. e_-N, cols e_0 .. e_N
  Matrix H;       // (N+1) x N    H[i,j] = f^(i+j+1)
  Matrix T;       // (N+1) x (N+1) T[i,j] = f^(i-j)

  // [[Htilde, Ttilde], [T, H]]: rows (K, H), columns (H, K).
  Matrix reordered() const;
  // [[H, T], [Ttilde, Htilde]]: rows (H, K), columns (K, H). This is the
  // layout of the inverse of reordered() when the blocks belong to 1/f.
  Matrix inverse_layout() const;
  // [[Ttilde, Htilde], [H, T]]: the plain section on K (+) H.
  Matrix plain() const;
};

SectionBlocks build_sections(const SymbolFC& f, Index N);

// (2N+1) x (2N+1) section of M_f on modes -N .. N, ordered by mode.
Matrix toeplitz_section(const SymbolFC& f, Index N);

struct HankelCouplingReport {
  Index N = 0;
  // || R_f R_g - I || over the interior rows, g = 1/f truncated to |j| <= N.
  double interior_residual = 0.0;
  // Same with all rows.
  double full_residual = 0.0;
  // Interior residual with the untruncated inverse.
  double untruncated_interior_residual = 0.0;
  Index interior_rows = 0;
  SymbolInverse inverse;
  SectionBlocks f_sections;
  SectionBlocks g_sections;  // sections of the untruncated inverse
};

HankelCouplingReport mc_residual_hankel(const SymbolFC& f, Index N, Index grid = 1024);

RealVector singular_values(const Matrix& a);

// Number of entries above rel_zero * max.
Index numerical_rank(const RealVector& sv, double rel_zero = 1e-12);

enum class Orientation { AlphaOverBeta, BetaOverAlpha };
std::string to_string(Orientation o);

struct ShiftCandidate {
  Orientation orientation = Orientation::AlphaOverBeta;
  Index k = 0;
  // min over compared n of min(r, 1/r); nullopt when nothing is compared.
  std::optional<double> c;
  Index compared = 0;
};

struct ShiftComparabilityReport {
  RealVector alpha, beta;
  Index k_max = 0;
  Index rank_alpha = 0, rank_beta = 0;
  std::vector<ShiftCandidate> candidates;
  // nullopt: incomparable at this truncation.
  std::optional<ShiftCandidate> verdict;

  bool rank_mismatch() const { return rank_alpha != rank_beta; }
};

// c < alpha_n / beta_{n+k} < 1/c (or with alpha and beta swapped). Entries
// below rel_zero times the sequence maximum count as zero and are skipped.
ShiftComparabilityReport shift_comparability(const RealVector& alpha, const RealVector& beta,
                                             Index k_max, double rel_zero = 1e-12);

struct BesovQuadrature {
  Index t_points = 256;  // midpoint grid on (-pi, pi), never hits t = 0
  Index s_points = 256;
};

struct BesovEstimate {
  double alpha = 0.0;
  int order = 0;  // n = floor(alpha) + 1
  double seminorm_p = 0.0;  // integral of |t|^(-1-alpha p) ||D_t^n g||_p^p
  double t_step = 0.0;
  Index t_points = 0, s_points = 0;
};

struct SummabilityReport {
  double p = 1.0;
  std::vector<double> partial_sums;  // sum_{i<=n} sigma_i^p
  double total = 0.0;
  // Share of the total carried by the second half of the sequence.
  double tail_fraction = 0.0;
  // Least-squares slope of log sigma_n against log(n + 1) over the nonzero
  // entries; nullopt with fewer than two.
  std::optional<double> log_log_slope;
  std::optional<BesovEstimate> besov;
};

SummabilityReport spectral_summability(const RealVector& sv, double p,
                                       const std::optional<SymbolFC>& besov_symbol = std::nullopt,
                                       const BesovQuadrature& quad = {});

}  // namespace eaekit
