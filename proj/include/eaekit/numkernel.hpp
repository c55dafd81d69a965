#pragma once

// Dense complex linear algebra with explicit rank tolerances.
//
// Every operator in the toolkit is carried as a dense complex matrix. Rank
// decisions go through a single cutoff rule so that kernels, ranges,
// pseudoinverses and inverses agree with each other.

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace eaekit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Base of all toolkit errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical routine failed to converge.
class ComputationError : public Error {
public:
  ComputationError(const std::string& what, int iterations)
      : Error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

private:
  int iterations_;
};

class SingularMatrixError : public Error {
public:
  SingularMatrixError(const std::string& what, double sigma_min)
      : Error(what), sigma_min_(sigma_min) {}
  double sigma_min() const noexcept { return sigma_min_; }

private:
  double sigma_min_;
};

// Shape or dimension mismatch between operands.
class ShapeError : public Error {
public:
  using Error::Error;
};

// A documented precondition does not hold (non-orthonormal basis, ...).
class PreconditionError : public Error {
public:
  using Error::Error;
};

// Rank cutoff. With no override the cutoff is
//   tau = max(rows, cols) * eps * sigma_max.
// `relative` replaces the max(rows, cols) * eps factor, `absolute` replaces
// tau altogether.
struct RankTolerance {
  std::optional<double> relative;
  std::optional<double> absolute;

  static RankTolerance standard() { return {}; }
  static RankTolerance rel(double r) { return {r, std::nullopt}; }
  static RankTolerance abs(double a) { return {std::nullopt, a}; }

  double threshold(Index rows, Index cols, double sigma_max) const;
};

struct SvdResult {
  Matrix left;           // rows x rows, unitary
  RealVector singulars;  // min(rows, cols), non-increasing
  Matrix right;          // cols x cols, unitary
  double rank_tol = 0.0; // tau used for this factorization

  Index rank() const;
  double sigma_max() const { return singulars.size() ? singulars(0) : 0.0; }
};

// Orthonormal basis of a subspace of C^ambient_dim (columns of `basis`).
struct SubspaceBasis {
  Index ambient_dim = 0;
  Matrix basis;

  Index dim() const { return basis.cols(); }
  static SubspaceBasis from_columns(const Matrix& columns);
};

struct Subspaces {
  SubspaceBasis kernel;
  SubspaceBasis kernel_complement;
  SubspaceBasis range;
  SubspaceBasis range_complement;
  // a restricted to kernel_complement -> range, in the two bases.
  Matrix restricted;
};

struct InverseResult {
  Matrix inv;
  double condition = 1.0;
};

bool all_finite(const Matrix& a);
void require_finite(const Matrix& a, const char* what);

// Spectral norm (largest singular value); 0 for empty matrices.
double norm2(const Matrix& a);

// Full SVD: left and right factors are square unitary matrices.
SvdResult svd(const Matrix& a, const RankTolerance& tol = {});

Index rank_of(const Matrix& a, const RankTolerance& tol = {});
Matrix pinv(const Matrix& a, const RankTolerance& tol = {});
Subspaces subspaces(const Matrix& a, const RankTolerance& tol = {});

// Throws SingularMatrixError when sigma_min <= tau.
InverseResult inverse(const Matrix& a, const RankTolerance& tol = {});

Matrix identity(Index n);
Matrix zeros(Index rows, Index cols);
Matrix diagonal(std::initializer_list<Complex> entries);
Matrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

// Block-diagonal sum a (+) b.
Matrix direct_sum(const Matrix& a, const Matrix& b);

// Residual ||lhs - rhs|| / max(1, ||rhs||) in the spectral norm.
double relative_residual(const Matrix& lhs, const Matrix& rhs);

}  // namespace eaekit
