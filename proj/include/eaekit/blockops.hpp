#pragma once

// 2x2 block operators, Schur complements, block inversion and the
// embedding / projection maps attached to a subspace.

#include "eaekit/numkernel.hpp"

#include <array>
#include <string>

namespace eaekit {

// [[a11, a12], [a21, a22]] with a11 of size row_split x col_split.
struct Block2x2 {
  Matrix a11, a12, a21, a22;

  Index row_split() const { return a11.rows(); }
  Index col_split() const { return a11.cols(); }
  Index rows() const { return a11.rows() + a21.rows(); }
  Index cols() const { return a11.cols() + a12.cols(); }

  // Throws ShapeError when the four blocks do not tile a rectangle.
  void check_shapes() const;
  Matrix assemble() const;

  static Block2x2 extract(const Matrix& m, Index row_split, Index col_split);
};

// Nested 2x2 assembly of a 3x3 block matrix. blocks[i][j] must have
// row_dims[i] rows and col_dims[j] columns; empty slots may be left as 0x0
// and are filled with zeros of the right shape.
Matrix assemble3x3(const std::array<std::array<Matrix, 3>, 3>& blocks,
                   const std::array<Index, 3>& row_dims,
                   const std::array<Index, 3>& col_dims);

struct SchurPair {
  Matrix u;  // A - B D^-1 C
  Matrix v;  // D - C A^-1 B
};

// Both Schur complements; throws PreconditionError naming the singular
// corner.
SchurPair schur_pair(const Block2x2& m, const RankTolerance& tol = {});

enum class Pivot { TopLeft, TopRight, BottomLeft, BottomRight };

struct BlockInverse {
  Block2x2 inverse;
  // Schur complement with respect to the pivot block. For the TopRight pivot
  // this is a21 - a22 a12^-1 a11.
  Matrix schur;
};

BlockInverse block_inverse(const Block2x2& m, Pivot pivot, const RankTolerance& tol = {});

// J embeds the subspace, Pi projects onto it, P = J Pi.
struct SubspaceMaps {
  Matrix J;
  Matrix Pi;
  Matrix P;
};

SubspaceMaps subspace_maps(const SubspaceBasis& basis, double gram_tol = 1e-10);

std::string to_string(Pivot p);

}  // namespace eaekit
