#include "eaekit/blockops.hpp"

#include <sstream>

namespace eaekit {

namespace {

std::string dims(const Matrix& a)
{
  std::ostringstream s;
  s << a.rows() << "x" << a.cols();
  return s.str();
}

Matrix checked_inverse(const Matrix& a, const char* block, const RankTolerance& tol)
{
  try {
    return inverse(a, tol).inv;
  } catch (const SingularMatrixError& e) {
    throw PreconditionError(std::string("block ") + block + " is singular: " + e.what());
  } catch (const ShapeError& e) {
    throw PreconditionError(std::string("block ") + block + " is not square (" + dims(a) + ")");
  }
}

}  // namespace

void Block2x2::check_shapes() const
{
  if (a11.rows() != a12.rows() || a21.rows() != a22.rows() || a11.cols() != a21.cols() ||
      a12.cols() != a22.cols()) {
    throw ShapeError("Block2x2: inconsistent block shapes " + dims(a11) + ", " + dims(a12) +
                     ", " + dims(a21) + ", " + dims(a22));
  }
}

Matrix Block2x2::assemble() const
{
  check_shapes();
  const Index r = row_split();
  const Index c = col_split();
  Matrix out(rows(), cols());
  out.topLeftCorner(r, c) = a11;
  out.topRightCorner(r, cols() - c) = a12;
  out.bottomLeftCorner(rows() - r, c) = a21;
  out.bottomRightCorner(rows() - r, cols() - c) = a22;
  return out;
}

Block2x2 Block2x2::extract(const Matrix& m, Index row_split, Index col_split)
{
  if (row_split < 0 || col_split < 0 || row_split > m.rows() || col_split > m.cols())
    throw ShapeError("Block2x2::extract: split outside " + dims(m));
  const Index r2 = m.rows() - row_split;
  const Index c2 = m.cols() - col_split;
  return Block2x2{m.topLeftCorner(row_split, col_split), m.topRightCorner(row_split, c2),
                  m.bottomLeftCorner(r2, col_split), m.bottomRightCorner(r2, c2)};
}

Matrix assemble3x3(const std::array<std::array<Matrix, 3>, 3>& blocks,
                   const std::array<Index, 3>& row_dims,
                   const std::array<Index, 3>& col_dims)
{
  auto at = [&](int i, int j) -> Matrix {
    const Matrix& b = blocks[i][j];
    if (b.size() == 0) return Matrix::Zero(row_dims[i], col_dims[j]);
    if (b.rows() != row_dims[i] || b.cols() != col_dims[j]) {
      std::ostringstream msg;
      msg << "assemble3x3: block (" << i << "," << j << ") is " << dims(b) << ", expected "
          << row_dims[i] << "x" << col_dims[j];
      throw ShapeError(msg.str());
    }
    return b;
  };
  // [[X00 X01 | X02], [X10 X11 | X12], [X20 X21 | X22]] as nested 2x2 blocks.
  const Block2x2 top_left{at(0, 0), at(0, 1), at(1, 0), at(1, 1)};
  const Block2x2 right_column{at(0, 2), Matrix(row_dims[0], 0), at(1, 2), Matrix(row_dims[1], 0)};
  const Block2x2 bottom_row{at(2, 0), at(2, 1), Matrix(0, col_dims[0]), Matrix(0, col_dims[1])};
  const Block2x2 outer{top_left.assemble(), right_column.assemble(), bottom_row.assemble(), at(2, 2)};
  return outer.assemble();
}

SchurPair schur_pair(const Block2x2& m, const RankTolerance& tol)
{
  m.check_shapes();
  const Matrix a_inv = checked_inverse(m.a11, "A (1,1)", tol);
  const Matrix d_inv = checked_inverse(m.a22, "D (2,2)", tol);
  return SchurPair{m.a11 - m.a12 * d_inv * m.a21, m.a22 - m.a21 * a_inv * m.a12};
}

BlockInverse block_inverse(const Block2x2& m, Pivot pivot, const RankTolerance& tol)
{
  m.check_shapes();
  if (m.rows() != m.cols()) throw ShapeError("block_inverse: matrix is " + dims(m.a11) + " blocks, not square");
  const Matrix& A = m.a11;
  const Matrix& B = m.a12;
  const Matrix& C = m.a21;
  const Matrix& D = m.a22;

  switch (pivot) {
    case Pivot::TopLeft: {
      const Matrix Ai = checked_inverse(A, "(1,1) pivot", tol);
      const Matrix S = D - C * Ai * B;
      const Matrix Si = checked_inverse(S, "Schur complement D - C A^-1 B", tol);
      const Matrix AiB = Ai * B;
      const Matrix CAi = C * Ai;
      return {{Ai + AiB * Si * CAi, -AiB * Si, -Si * CAi, Si}, S};
    }
    case Pivot::BottomRight: {
      const Matrix Di = checked_inverse(D, "(2,2) pivot", tol);
      const Matrix S = A - B * Di * C;
      const Matrix Si = checked_inverse(S, "Schur complement A - B D^-1 C", tol);
      const Matrix BDi = B * Di;
      const Matrix DiC = Di * C;
      return {{Si, -Si * BDi, -DiC * Si, Di + DiC * Si * BDi}, S};
    }
    case Pivot::TopRight: {
      // m = diag(B, I) [[B^-1 A, I], [C, D]]; with F11 = B^-1 A the inverse of
      // the normalised factor is [[-Delta^-1 D, Delta^-1], [I + F11 Delta^-1 D, -F11 Delta^-1]].
      const Matrix Bi = checked_inverse(B, "(1,2) pivot", tol);
      const Matrix F11 = Bi * A;
      const Matrix Delta = C - D * F11;
      const Matrix Di = checked_inverse(Delta, "Delta = a21 - a22 a12^-1 a11", tol);
      const Index k = B.rows();
      Block2x2 inv{-Di * D * Bi, Di,
                   (Matrix::Identity(k, k) + F11 * Di * D) * Bi, -F11 * Di};
      return {inv, Delta};
    }
    case Pivot::BottomLeft: {
      // Swapping the row blocks moves C to the (1,1) corner:
      // m^-1 = (swap m)^-1 swap.
      const BlockInverse swapped = block_inverse(Block2x2{C, D, A, B}, Pivot::TopLeft, tol);
      const Block2x2& s = swapped.inverse;
      return {{s.a12, s.a11, s.a22, s.a21}, swapped.schur};
    }
  }
  throw PreconditionError("block_inverse: unknown pivot");
}

SubspaceMaps subspace_maps(const SubspaceBasis& basis, double gram_tol)
{
  const Matrix& J = basis.basis;
  if (J.rows() != basis.ambient_dim) throw ShapeError("subspace_maps: basis rows differ from ambient dimension");
  const Index d = J.cols();
  const double gram = d ? norm2(J.adjoint() * J - Matrix::Identity(d, d)) : 0.0;
  if (gram > gram_tol) {
    std::ostringstream msg;
    msg << "subspace_maps: basis is not orthonormal (Gram residual " << gram << ")";
    throw PreconditionError(msg.str());
  }
  SubspaceMaps out;
  out.J = J;
  out.Pi = J.adjoint();
  out.P = J * out.Pi;
  return out;
}

std::string to_string(Pivot p)
{
  switch (p) {
    case Pivot::TopLeft: return "top-left";
    case Pivot::TopRight: return "top-right";
    case Pivot::BottomLeft: return "bottom-left";
    case Pivot::BottomRight: return "bottom-right";
  }
  return "?";
}

}  // namespace eaekit
