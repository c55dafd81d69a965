#include "eaekit/relations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace eaekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string shape(const Matrix& a)
{
  std::ostringstream s;
  s << a.rows() << "x" << a.cols();
  return s.str();
}

void require_shape(const Matrix& a, Index rows, Index cols, const char* what)
{
  if (a.rows() != rows || a.cols() != cols) {
    std::ostringstream msg;
    msg << what << " is " << shape(a) << ", expected " << rows << "x" << cols;
    throw ShapeError(msg.str());
  }
}

// sigma_min or +inf style margin; nullopt when numerically singular.
std::optional<InverseResult> try_inverse(const Matrix& a)
{
  try {
    return inverse(a);
  } catch (const SingularMatrixError&) {
    return std::nullopt;
  }
}

}  // namespace

bool ResidualReport::passed() const
{
  return std::all_of(entries.begin(), entries.end(),
                     [&](const ResidualEntry& e) { return e.residual <= tol; });
}

double ResidualReport::max_residual() const
{
  double r = 0.0;
  for (const auto& e : entries) r = std::max(r, e.residual);
  return r;
}

std::optional<std::string> ResidualReport::first_failure() const
{
  for (const auto& e : entries)
    if (!(e.residual <= tol)) return e.label;
  return std::nullopt;
}

double ResidualReport::residual(const std::string& label) const
{
  for (const auto& e : entries)
    if (e.label == label) return e.residual;
  throw std::out_of_range("no residual labelled '" + label + "'");
}

std::string to_string(ExtendedSide side)
{
  return side == ExtendedSide::U ? "U" : "V";
}

Matrix EAESpecialWitness::f_inv() const
{
  const Matrix f11 = F11();
  const Matrix f22 = F22();
  return Block2x2{-f22, Matrix::Identity(n(), n()), Matrix::Identity(m(), m()) + f11 * f22, -f11}
      .assemble();
}

EAEWitness EAESpecialWitness::as_eae() const
{
  return EAEWitness{u, v, e, f, m(), n()};
}

const std::vector<std::string>& special_identity_labels()
{
  static const std::vector<std::string> labels = {
      "(i) I = F21 - F22 F11",
      "(ii) U = E11 V F11 + U F21",
      "(iii) E21 V F11 = F11 F21",
      "(iv) E11 V = -U F22",
      "(v) F11 F22 = E21 V - I",
      "(vi) Ehat11 U = V F11",
      "(vii) Ehat21 U = F21",
      "(viii) E11 Ehat11 = I - U Ehat21",
      "(ix) E21 Ehat11 = F11 Ehat21",
      "(x) Ehat11 E11 = I - V E21",
      "(xi) Ehat21 E11 = -F22 E21",
  };
  return labels;
}

ResidualReport verify_sc(const SCWitness& w, double tol)
{
  w.m.check_shapes();
  const Index n = w.m.a11.rows();
  const Index m = w.m.a22.rows();
  require_shape(w.m.a11, n, n, "SC block A");
  require_shape(w.m.a22, m, m, "SC block D");
  require_shape(w.u, n, n, "SC complement U");
  require_shape(w.v, m, m, "SC complement V");

  ResidualReport r;
  r.tol = tol;
  const auto a_inv = try_inverse(w.m.a11);
  const auto d_inv = try_inverse(w.m.a22);
  r.note("sigma_min(A)", n ? svd(w.m.a11).singulars(n - 1) : kInf);
  r.note("sigma_min(D)", m ? svd(w.m.a22).singulars(m - 1) : kInf);
  if (!a_inv) r.add("A invertible", kInf);
  if (!d_inv) r.add("D invertible", kInf);
  if (d_inv) {
    r.add("U = A - B D^-1 C", relative_residual(w.m.a11 - w.m.a12 * d_inv->inv * w.m.a21, w.u));
    r.note("cond(D)", d_inv->condition);
  }
  if (a_inv) {
    r.add("V = D - C A^-1 B", relative_residual(w.m.a22 - w.m.a21 * a_inv->inv * w.m.a12, w.v));
    r.note("cond(A)", a_inv->condition);
  }
  return r;
}

ResidualReport verify_mc(const MCWitness& w, double tol)
{
  const Index n = w.dim_x;
  const Index m = w.dim_y;
  require_shape(w.uhat, n + m, n + m, "MC coupling Uhat");
  require_shape(w.uhat_inv, n + m, n + m, "MC coupling inverse");
  require_shape(w.u, n, n, "MC operator U");
  require_shape(w.v, m, m, "MC operator V");

  ResidualReport r;
  r.tol = tol;
  const Matrix id = Matrix::Identity(n + m, n + m);
  r.add("Uhat Uhat^-1 = I", relative_residual(w.uhat * w.uhat_inv, id));
  r.add("Uhat^-1 Uhat = I", relative_residual(w.uhat_inv * w.uhat, id));
  r.add("Uhat(1,1) = U", relative_residual(w.uhat.topLeftCorner(n, n), w.u));
  r.add("Uhat^-1(2,2) = V", relative_residual(w.uhat_inv.bottomRightCorner(m, m), w.v));
  return r;
}

ResidualReport verify_eae(const EAEWitness& w, double tol)
{
  if (w.u.rows() != w.u.cols() || w.v.rows() != w.v.cols())
    throw StructuralError("EAE requires square U and V, got " + shape(w.u) + " and " + shape(w.v));
  const Index n = w.u.rows();
  const Index m = w.v.rows();
  if (n + w.x0_dim != m + w.y0_dim)
    throw ShapeError("EAE: dim X + dim X0 differs from dim Y + dim Y0");
  require_shape(w.e, n + w.x0_dim, m + w.y0_dim, "EAE factor E");
  require_shape(w.f, m + w.y0_dim, n + w.x0_dim, "EAE factor F");

  const auto e_inv = try_inverse(w.e);
  const auto f_inv = try_inverse(w.f);
  if (!e_inv) throw StructuralError("EAE factor E is singular");
  if (!f_inv) throw StructuralError("EAE factor F is singular");

  ResidualReport r;
  r.tol = tol;
  r.note("cond(E)", e_inv->condition);
  r.note("cond(F)", f_inv->condition);
  const Matrix lhs = direct_sum(w.u, Matrix::Identity(w.x0_dim, w.x0_dim));
  const Matrix mid = direct_sum(w.v, Matrix::Identity(w.y0_dim, w.y0_dim));
  r.add("U (+) I_X0 = E (V (+) I_Y0) F", relative_residual(w.e * mid * w.f, lhs));
  return r;
}

ResidualReport verify_eae_special(const EAESpecialWitness& w, double tol)
{
  if (w.u.rows() != w.u.cols() || w.v.rows() != w.v.cols())
    throw StructuralError("EAE requires square U and V, got " + shape(w.u) + " and " + shape(w.v));
  const Index n = w.n();
  const Index m = w.m();
  require_shape(w.e, n + m, m + n, "special-form E");
  require_shape(w.f, m + n, n + m, "special-form F");
  require_shape(w.e_inv, m + n, n + m, "special-form E^-1");

  const auto e_chk = try_inverse(w.e);
  const auto f_chk = try_inverse(w.f);
  if (!e_chk) throw StructuralError("special-form E is singular");
  if (!f_chk) throw StructuralError("special-form F is singular");

  const Matrix U = w.u, V = w.v;
  const Matrix E11 = w.E11(), E21 = w.E21();
  const Matrix F11 = w.F11(), F21 = w.F21(), F22 = w.F22();
  const Matrix Eh11 = w.Ehat11(), Eh21 = w.Ehat21();
  const Matrix In = Matrix::Identity(n, n);
  const Matrix Im = Matrix::Identity(m, m);
  const Matrix Inm = Matrix::Identity(n + m, n + m);

  ResidualReport r;
  r.tol = tol;
  r.note("cond(E)", e_chk->condition);
  r.note("cond(F)", f_chk->condition);

  // Block form of E, F and their inverses.
  r.add("F(1,2) = I_Y", relative_residual(w.F12(), Im));
  r.add("E(1,2) = U", relative_residual(w.E12(), U));
  r.add("E(2,2) = -F11", relative_residual(w.E22(), -F11));
  r.add("E^-1(1,2) = V", relative_residual(w.Ehat12(), V));
  r.add("E^-1(2,2) = F22", relative_residual(w.Ehat22(), F22));
  r.add("E E^-1 = I", relative_residual(w.e * w.e_inv, Inm));
  r.add("E^-1 E = I", relative_residual(w.e_inv * w.e, Inm));
  r.add("F F^-1 = I", relative_residual(w.f * w.f_inv(), Inm));

  const auto& L = special_identity_labels();
  r.add(L[0], relative_residual(F21 - F22 * F11, In));
  r.add(L[1], relative_residual(E11 * V * F11 + U * F21, U));
  r.add(L[2], relative_residual(F11 * F21, E21 * V * F11));
  r.add(L[3], relative_residual(-U * F22, E11 * V));
  r.add(L[4], relative_residual(E21 * V - Im, F11 * F22));
  r.add(L[5], relative_residual(V * F11, Eh11 * U));
  r.add(L[6], relative_residual(F21, Eh21 * U));
  r.add(L[7], relative_residual(In - U * Eh21, E11 * Eh11));
  r.add(L[8], relative_residual(F11 * Eh21, E21 * Eh11));
  r.add(L[9], relative_residual(Im - V * E21, Eh11 * E11));
  r.add(L[10], relative_residual(-F22 * E21, Eh21 * E11));

  r.add("U (+) I_Y = E (V (+) I_X) F",
        relative_residual(w.e * direct_sum(V, In) * w.f, direct_sum(U, Im)));
  return r;
}

ResidualReport verify_eaoe(const EAOEWitness& w, double tol)
{
  if (w.u.rows() != w.u.cols() || w.v.rows() != w.v.cols())
    throw StructuralError("EAOE requires square U and V, got " + shape(w.u) + " and " + shape(w.v));
  const Index k = w.ext_dim;
  const Matrix lhs = w.extended_side == ExtendedSide::U ? direct_sum(w.u, Matrix::Identity(k, k)) : w.u;
  const Matrix mid = w.extended_side == ExtendedSide::V ? direct_sum(w.v, Matrix::Identity(k, k)) : w.v;
  require_shape(w.e, lhs.rows(), mid.rows(), "EAOE factor E");
  require_shape(w.f, mid.rows(), lhs.rows(), "EAOE factor F");

  const auto e_inv = try_inverse(w.e);
  const auto f_inv = try_inverse(w.f);
  if (!e_inv) throw StructuralError("EAOE factor E is singular");
  if (!f_inv) throw StructuralError("EAOE factor F is singular");

  ResidualReport r;
  r.tol = tol;
  r.note("cond(E)", e_inv->condition);
  r.note("cond(F)", f_inv->condition);
  r.add(w.extended_side == ExtendedSide::U ? "U (+) I = E V F" : "U = E (V (+) I) F",
        relative_residual(w.e * mid * w.f, lhs));
  return r;
}

MCWitness sc_to_mc(const SCWitness& w, double tol)
{
  const ResidualReport pre = verify_sc(w, tol);
  if (!pre.passed()) throw ConversionError("sc_to_mc: input is not a valid SC witness", pre);

  const Matrix& A = w.m.a11;
  const Matrix& B = w.m.a12;
  const Matrix& C = w.m.a21;
  const Index n = A.rows();
  const Index m = w.m.a22.rows();
  const Matrix Ai = inverse(A).inv;
  const Matrix Di = inverse(w.m.a22).inv;

  // Uhat = [[I, B], [0, I]] [[A, 0], [-D^-1 C, D^-1]]
  MCWitness out;
  out.dim_x = n;
  out.dim_y = m;
  out.u = w.u;
  out.v = w.v;
  out.uhat = Block2x2{w.u, B * Di, -Di * C, Di}.assemble();
  out.uhat_inv = Block2x2{Ai, -Ai * B, C * Ai, w.v}.assemble();

  const ResidualReport post = verify_mc(out, tol);
  if (!post.passed()) throw ConversionError("sc_to_mc: coupling failed verification", post);
  return out;
}

EAESpecialWitness mc_to_eae_special(const MCWitness& w, double tol)
{
  const ResidualReport pre = verify_mc(w, tol);
  if (!pre.passed()) throw ConversionError("mc_to_eae_special: input is not a valid MC witness", pre);

  const Index n = w.dim_x;
  const Index m = w.dim_y;
  // Uhat = [[U, R], [Q, S]], Uhat^-1 = [[A, B], [C, V]]
  const Block2x2 hat = Block2x2::extract(w.uhat, n, n);
  const Block2x2 inv = Block2x2::extract(w.uhat_inv, n, n);
  const Matrix& R = hat.a12;
  const Matrix& Q = hat.a21;
  const Matrix& S = hat.a22;
  const Matrix& A = inv.a11;
  const Matrix& B = inv.a12;
  const Matrix& C = inv.a21;

  EAESpecialWitness out;
  out.u = w.u;
  out.v = w.v;
  out.e = Block2x2{R, w.u, S, Q}.assemble();
  out.f = Block2x2{-Q, Matrix::Identity(m, m), A * w.u, B}.assemble();
  out.e_inv = Block2x2{C, w.v, A, B}.assemble();

  const ResidualReport post = verify_eae_special(out, tol);
  if (!post.passed()) throw ConversionError("mc_to_eae_special: witness failed verification", post);
  return out;
}

SCWitness sc_from_eaoe(const EAOEWitness& w, double tol)
{
  const ResidualReport pre = verify_eaoe(w, tol);
  if (!pre.passed()) throw ConversionError("sc_from_eaoe: input is not a valid EAOE witness", pre);

  // Orient as T = E (S (+) I_Z) F. Without extension no flip is needed.
  const bool flip = w.extended_side == ExtendedSide::U && w.ext_dim > 0;
  const Matrix& T = flip ? w.v : w.u;
  const Matrix& S = flip ? w.u : w.v;
  const Matrix E = flip ? inverse(w.e).inv : w.e;
  const Matrix F = flip ? inverse(w.f).inv : w.f;
  const Index s = S.rows();
  const Index t = T.rows();

  const Matrix J_S = Matrix::Identity(t, s);   // first s coordinates of S (+) Z
  const Matrix Pi_S = Matrix::Identity(s, t);
  const Matrix Is = Matrix::Identity(s, s);

  // [[E F, E J_S], [(I - S) Pi_S F, I]] has Schur complements (T, S).
  Block2x2 m{E * F, E * J_S, (Is - S) * Pi_S * F, Is};
  SCWitness out;
  if (flip) {
    out.m = Block2x2{m.a22, m.a21, m.a12, m.a11};
    out.u = S;
    out.v = T;
  } else {
    out.m = std::move(m);
    out.u = T;
    out.v = S;
  }

  const ResidualReport post = verify_sc(out, tol);
  if (!post.passed()) throw ConversionError("sc_from_eaoe: Schur coupling failed verification", post);
  return out;
}

}  // namespace eaekit
