#include "eaekit/instances.hpp"

#include <cmath>
#include <sstream>

namespace eaekit {

void InstanceSpec::validate() const
{
  if (n < 0 || m < 0 || k < 0) throw PreconditionError("InstanceSpec: negative dimension");
  if (k > std::min(n, m)) throw PreconditionError("InstanceSpec: nullity exceeds min(n, m)");
  if (!(cond_bound >= 1.0)) throw PreconditionError("InstanceSpec: cond_bound must be >= 1");
}

RankFactorization canonical_rank_factorization(const Matrix& a, const RankTolerance& tol)
{
  const SvdResult s = svd(a, tol);
  const Index r = s.rank();
  RankFactorization out;
  out.rank = r;

  Eigen::VectorXcd scale = Eigen::VectorXcd::Ones(a.rows());
  for (Index i = 0; i < r; ++i) scale(i) = s.singulars(i);
  out.p1 = s.left * scale.asDiagonal();
  out.core = Matrix::Zero(a.rows(), a.cols());
  out.core.topLeftCorner(r, r).setIdentity();
  out.p2 = s.right.adjoint();
  return out;
}

MCWitness synth_mc(const Matrix& u, const Matrix& v, const RankTolerance& tol, double verify_tol)
{
  if (u.rows() != u.cols() || v.rows() != v.cols())
    throw StructuralError("synth_mc: U and V must be square");
  const Index n = u.rows();
  const Index m = v.rows();
  const RankFactorization fu = canonical_rank_factorization(u, tol);
  const RankFactorization fv = canonical_rank_factorization(v, tol);
  const Index ku = n - fu.rank;
  const Index kv = m - fv.rank;
  if (ku != kv) {
    std::ostringstream msg;
    msg << "synth_mc: nullity(U) = " << ku << " differs from nullity(V) = " << kv
        << "; no coupling exists";
    throw FeasibilityError(msg.str(), ku, kv);
  }
  const Index k = ku;

  // Permutation coupling: identity on the two ranges, swap on null coordinates.
  Matrix hat0 = Matrix::Zero(n + m, n + m);
  for (Index i = 0; i < n - k; ++i) hat0(i, i) = 1.0;
  for (Index i = 0; i < m - k; ++i) hat0(n + i, n + i) = 1.0;
  for (Index i = 0; i < k; ++i) {
    const Index x = n - k + i;
    const Index y = n + m - k + i;
    hat0(x, y) = 1.0;
    hat0(y, x) = 1.0;
  }

  // U = P1 core P2, V = Q1 core Q2.
  const Matrix& P1 = fu.p1;
  const Matrix& P2 = fu.p2;
  const Matrix& Q1 = fv.p1;
  const Matrix& Q2 = fv.p2;
  const Matrix P1i = inverse(P1).inv;
  const Matrix P2i = inverse(P2).inv;
  const Matrix Q1i = inverse(Q1).inv;
  const Matrix Q2i = inverse(Q2).inv;

  MCWitness out;
  out.dim_x = n;
  out.dim_y = m;
  out.u = u;
  out.v = v;
  out.uhat = direct_sum(P1, Q2i) * hat0 * direct_sum(P2, Q1i);
  out.uhat_inv = direct_sum(P2i, Q1) * hat0 * direct_sum(P1i, Q2);

  const ResidualReport post = verify_mc(out, verify_tol);
  if (!post.passed()) throw ConversionError("synth_mc: coupling failed verification", post);
  return out;
}

Matrix random_unitary(Index n, std::mt19937_64& rng)
{
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = Complex(gauss(rng), gauss(rng));
  if (n == 0) return g;
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  // Fix column phases by the diagonal of R so the distribution is Haar.
  const Matrix rr = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(rr(j, j));
    if (mag > 0.0) q.col(j) *= rr(j, j) / mag;
  }
  return q;
}

Matrix random_with_rank(Index n, Index rank, double cond_bound, std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Matrix left = random_unitary(n, rng);
  const Matrix right = random_unitary(n, rng);
  Eigen::VectorXcd sigma = Eigen::VectorXcd::Zero(n);
  const double log_min = -std::log(cond_bound);
  for (Index i = 0; i < rank; ++i) sigma(i) = std::exp(log_min * unit(rng));
  return left * sigma.asDiagonal() * right.adjoint();
}

InstancePair random_instance(const InstanceSpec& spec)
{
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  InstancePair out;
  out.u = random_with_rank(spec.n, spec.n - spec.k, spec.cond_bound, rng);
  out.v = random_with_rank(spec.m, spec.m - spec.k, spec.cond_bound, rng);
  return out;
}

}  // namespace eaekit
