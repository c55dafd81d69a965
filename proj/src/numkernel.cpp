#include "eaekit/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace eaekit {

double RankTolerance::threshold(Index rows, Index cols, double sigma_max) const
{
  if (absolute) return *absolute;
  const double factor =
      relative ? *relative
               : static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
  return factor * sigma_max;
}

Index SvdResult::rank() const
{
  Index r = 0;
  while (r < singulars.size() && singulars(r) > rank_tol) ++r;
  return r;
}

SubspaceBasis SubspaceBasis::from_columns(const Matrix& columns)
{
  return SubspaceBasis{columns.rows(), columns};
}

bool all_finite(const Matrix& a)
{
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

void require_finite(const Matrix& a, const char* what)
{
  if (!all_finite(a)) throw PreconditionError(std::string(what) + ": matrix has non-finite entries");
}

double norm2(const Matrix& a)
{
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> s(a);
  return s.singularValues()(0);
}

SvdResult svd(const Matrix& a, const RankTolerance& tol)
{
  require_finite(a, "svd");
  const Index rows = a.rows();
  const Index cols = a.cols();
  SvdResult out;
  if (rows == 0 || cols == 0) {
    out.left = Matrix::Identity(rows, rows);
    out.right = Matrix::Identity(cols, cols);
    out.singulars = RealVector(0);
    out.rank_tol = tol.threshold(rows, cols, 0.0);
    return out;
  }

  Eigen::JacobiSVD<Matrix> s(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.left = s.matrixU();
  out.right = s.matrixV();
  out.singulars = s.singularValues();
  if (!out.singulars.allFinite() || !all_finite(out.left) || !all_finite(out.right)) {
    std::ostringstream msg;
    msg << "svd: Jacobi sweeps did not converge for " << rows << "x" << cols
        << " matrix (non-finite factors)";
    throw ComputationError(msg.str(), static_cast<int>(std::min(rows, cols)));
  }
  out.rank_tol = tol.threshold(rows, cols, out.sigma_max());
  return out;
}

Index rank_of(const Matrix& a, const RankTolerance& tol)
{
  return svd(a, tol).rank();
}

Matrix pinv(const Matrix& a, const RankTolerance& tol)
{
  const SvdResult s = svd(a, tol);
  const Index r = s.rank();
  Matrix out = Matrix::Zero(a.cols(), a.rows());
  for (Index k = 0; k < r; ++k)
    out.noalias() += (s.right.col(k) / s.singulars(k)) * s.left.col(k).adjoint();
  return out;
}

Subspaces subspaces(const Matrix& a, const RankTolerance& tol)
{
  const SvdResult s = svd(a, tol);
  const Index r = s.rank();
  const Index n = a.cols();
  const Index m = a.rows();
  Subspaces out;
  out.kernel_complement = SubspaceBasis{n, s.right.leftCols(r)};
  out.kernel = SubspaceBasis{n, s.right.rightCols(n - r)};
  out.range = SubspaceBasis{m, s.left.leftCols(r)};
  out.range_complement = SubspaceBasis{m, s.left.rightCols(m - r)};
  out.restricted = out.range.basis.adjoint() * a * out.kernel_complement.basis;
  return out;
}

InverseResult inverse(const Matrix& a, const RankTolerance& tol)
{
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << "inverse: matrix is " << a.rows() << "x" << a.cols() << ", not square";
    throw ShapeError(msg.str());
  }
  const Index n = a.rows();
  if (n == 0) return {Matrix(0, 0), 1.0};

  const SvdResult s = svd(a, tol);
  const double smin = s.singulars(n - 1);
  if (smin <= s.rank_tol) {
    std::ostringstream msg;
    msg << "inverse: matrix is numerically singular (sigma_min = " << smin
        << ", tau = " << s.rank_tol << ")";
    throw SingularMatrixError(msg.str(), smin);
  }
  InverseResult out;
  out.inv = s.right * s.singulars.cwiseInverse().cast<Complex>().asDiagonal() * s.left.adjoint();
  out.condition = s.singulars(0) / smin;
  return out;
}

Matrix identity(Index n) { return Matrix::Identity(n, n); }

Matrix zeros(Index rows, Index cols) { return Matrix::Zero(rows, cols); }

Matrix diagonal(std::initializer_list<Complex> entries)
{
  const auto n = static_cast<Index>(entries.size());
  Matrix out = Matrix::Zero(n, n);
  Index i = 0;
  for (const auto& e : entries) {
    out(i, i) = e;
    ++i;
  }
  return out;
}

Matrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows)
{
  const auto m = static_cast<Index>(rows.size());
  const auto n = m ? static_cast<Index>(rows.begin()->size()) : 0;
  Matrix out(m, n);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != n) throw ShapeError("from_rows: ragged rows");
    Index j = 0;
    for (const auto& e : row) out(i, j++) = e;
    ++i;
  }
  return out;
}

Matrix direct_sum(const Matrix& a, const Matrix& b)
{
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

double relative_residual(const Matrix& lhs, const Matrix& rhs)
{
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) {
    std::ostringstream msg;
    msg << "relative_residual: shapes " << lhs.rows() << "x" << lhs.cols() << " and "
        << rhs.rows() << "x" << rhs.cols() << " differ";
    throw ShapeError(msg.str());
  }
  return norm2(lhs - rhs) / std::max(1.0, norm2(rhs));
}

}  // namespace eaekit
