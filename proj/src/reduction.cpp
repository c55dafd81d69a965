#include "eaekit/reduction.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace eaekit {

namespace {

// ||block|| / max(1, ||scale||) for blocks that must vanish.
double zero_block_residual(const Matrix& block, double scale)
{
  return norm2(block) / std::max(1.0, scale);
}

Matrix hcat(const Matrix& a, const Matrix& b)
{
  Matrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

CornerIndex corner_index(const Matrix& a, const RankTolerance& tol)
{
  CornerIndex c;
  c.rank = rank_of(a, tol);
  c.kernel_dim = a.cols() - c.rank;
  c.cokernel_dim = a.rows() - c.rank;
  return c;
}

void require_passed(const std::string& stage, const ResidualReport& r)
{
  if (!r.passed()) {
    std::ostringstream msg;
    msg << "check '" << r.first_failure().value_or("?") << "' failed (max residual "
        << r.max_residual() << ", tol " << r.tol << ")";
    throw ReductionError(stage, msg.str(), r);
  }
}

Matrix coordinate_isometry(Index rows, Index cols)
{
  return Matrix::Identity(rows, cols);
}

}  // namespace

FredholmReport fredholm_report(const EAESpecialWitness& w, const ReductionOptions& opts)
{
  const RankTolerance tol = opts.rank_tolerance();
  FredholmReport r;
  r.F11 = corner_index(w.F11(), tol);
  r.F22 = corner_index(w.F22(), tol);
  r.E11 = corner_index(w.E11(), tol);
  r.Ehat11 = corner_index(w.Ehat11(), tol);

  if (r.F11.index() != -r.F22.index() || r.E11.index() != -r.Ehat11.index()) {
    std::ostringstream msg;
    msg << "index identities violated: Ind(F11) = " << r.F11.index() << ", Ind(F22) = "
        << r.F22.index() << ", Ind(E11) = " << r.E11.index() << ", Ind(Ehat11) = "
        << r.Ehat11.index();
    throw ReductionError("fredholm_report", msg.str());
  }

  // H2 and G1 are the cokernels of F22 and E11, both maps Y -> X.
  r.extension_dims_match =
      r.F22.cokernel_dim == r.E11.cokernel_dim && r.F22.kernel_dim == r.E11.kernel_dim;
  if (r.F22.index() > 0) r.extension_side = ExtendedSide::U;
  if (r.F22.index() < 0) r.extension_side = ExtendedSide::V;
  return r;
}

Matrix CornerDecomposition::F22_pinv() const
{
  return K2.basis * inverse(F22_prime).inv * im_F22.basis.adjoint();
}

CornerDecomposition decompose_corners(const EAESpecialWitness& w, const ReductionOptions& opts)
{
  const RankTolerance tol = opts.rank_tolerance();
  const Matrix F22 = w.F22();
  const Matrix E11 = w.E11();
  const Subspaces sf = subspaces(F22, tol);
  const Subspaces se = subspaces(E11, tol);

  CornerDecomposition d;
  d.K2 = sf.kernel_complement;
  d.ker_F22 = sf.kernel;
  d.im_F22 = sf.range;
  d.H2 = sf.range_complement;
  d.F22_prime = sf.restricted;

  d.F1 = se.kernel_complement;
  d.ker_E11 = se.kernel;
  d.im_E11 = se.range;
  d.G1 = se.range_complement;
  d.E11_prime = se.restricted;

  try {
    d.F22_prime_condition = inverse(d.F22_prime).condition;
    d.E11_prime_condition = inverse(d.E11_prime).condition;
  } catch (const SingularMatrixError& e) {
    throw ReductionError("decompose_corners", std::string("restricted corner not invertible: ") + e.what());
  }

  const double f_scale = norm2(F22);
  const double e_scale = norm2(E11);
  ResidualReport& r = d.check;
  r.tol = opts.tol;
  r.add("F22 (1,2) block = 0", zero_block_residual(d.im_F22.basis.adjoint() * F22 * d.ker_F22.basis, f_scale));
  r.add("F22 (2,1) block = 0", zero_block_residual(d.H2.basis.adjoint() * F22 * d.K2.basis, f_scale));
  r.add("F22 (2,2) block = 0", zero_block_residual(d.H2.basis.adjoint() * F22 * d.ker_F22.basis, f_scale));
  r.add("E11 (1,2) block = 0", zero_block_residual(d.im_E11.basis.adjoint() * E11 * d.ker_E11.basis, e_scale));
  r.add("E11 (2,1) block = 0", zero_block_residual(d.G1.basis.adjoint() * E11 * d.F1.basis, e_scale));
  r.add("E11 (2,2) block = 0", zero_block_residual(d.G1.basis.adjoint() * E11 * d.ker_E11.basis, e_scale));
  r.note("cond(F22')", d.F22_prime_condition);
  r.note("cond(E11')", d.E11_prime_condition);
  require_passed("decompose_corners", r);
  return d;
}

ReducedBlocks derive_uv_blocks(const EAESpecialWitness& w, const CornerDecomposition& d,
                               const ReductionOptions& opts)
{
  const Matrix& U = w.u;
  const Matrix& V = w.v;
  ReducedBlocks b;

  const Matrix Pi_imE = d.im_E11.basis.adjoint();
  const Matrix Pi_G1 = d.G1.basis.adjoint();
  b.U11 = Pi_imE * U * d.im_F22.basis;
  b.U12 = Pi_imE * U * d.H2.basis;
  b.U21 = Pi_G1 * U * d.im_F22.basis;
  b.U22 = Pi_G1 * U * d.H2.basis;

  const Matrix Pi_F1 = d.F1.basis.adjoint();
  const Matrix Pi_kerE = d.ker_E11.basis.adjoint();
  b.V11 = Pi_F1 * V * d.K2.basis;
  b.V12 = Pi_F1 * V * d.ker_F22.basis;
  b.V21 = Pi_kerE * V * d.K2.basis;
  b.V22 = Pi_kerE * V * d.ker_F22.basis;

  b.left_inv_V22 = d.ker_F22.basis.adjoint() * w.E21() * d.ker_E11.basis;
  b.right_inv_U22 = d.H2.basis.adjoint() * w.Ehat21() * d.G1.basis;

  ResidualReport& r = b.check;
  r.tol = opts.tol;
  r.add("U (2,1) block = 0", zero_block_residual(b.U21, norm2(U)));
  r.add("V (1,2) block = 0", zero_block_residual(b.V12, norm2(V)));
  r.add("E11' V11 = -U11 F22'", relative_residual(-b.U11 * d.F22_prime, d.E11_prime * b.V11));
  const Index kf = d.ker_F22.dim();
  const Index g1 = d.G1.dim();
  r.add("left_inv(V22) V22 = I", relative_residual(b.left_inv_V22 * b.V22, Matrix::Identity(kf, kf)));
  r.add("U22 right_inv(U22) = I", relative_residual(b.U22 * b.right_inv_U22, Matrix::Identity(g1, g1)));
  require_passed("derive_uv_blocks", r);
  return b;
}

Normalization normalize_adjoint(const EAESpecialWitness& w, const ReductionOptions& opts)
{
  const CornerDecomposition d = decompose_corners(w, opts);
  const Index n = w.n();
  const Index m = w.m();

  Normalization out;
  out.transform = d.F22_pinv() * w.Ehat21();
  const Matrix& X = out.transform;

  const Matrix In = Matrix::Identity(n, n);
  const Matrix Im = Matrix::Identity(m, m);
  const Matrix left = Block2x2{In, Matrix::Zero(n, m), X, Im}.assemble();
  const Matrix left_inv = Block2x2{In, Matrix::Zero(n, m), -X, Im}.assemble();
  const Matrix right = Block2x2{In, Matrix::Zero(n, m), -X * w.u, Im}.assemble();

  EAESpecialWitness& nw = out.witness;
  nw.u = w.u;
  nw.v = w.v;
  nw.e = left * w.e;
  nw.f = w.f * right;
  nw.e_inv = w.e_inv * left_inv;

  ResidualReport& r = out.check;
  r = verify_eae_special(nw, opts.tol);
  const Matrix P_kerF22 = d.ker_F22.basis * d.ker_F22.basis.adjoint();
  const Matrix P_H2 = d.H2.basis * d.H2.basis.adjoint();
  r.add("E21 = P_KerF22 E21", relative_residual(P_kerF22 * nw.E21(), nw.E21()));
  r.add("F21 = P_H2", relative_residual(nw.F21(), P_H2));
  r.add("E11 unchanged", relative_residual(nw.E11(), w.E11()));
  r.add("F22 unchanged", relative_residual(nw.F22(), w.F22()));
  require_passed("normalize_adjoint", r);
  return out;
}

TwoSidedInverses check_two_sided(const EAESpecialWitness& normalized, const ReducedBlocks& rb,
                                 const ReductionOptions& opts)
{
  (void)normalized;
  TwoSidedInverses out;
  out.U22 = rb.U22;
  out.V22 = rb.V22;
  out.V22_inv = rb.left_inv_V22;
  out.U22_inv = rb.right_inv_U22;

  if (rb.V22.rows() != rb.V22.cols() || rb.U22.rows() != rb.U22.cols()) {
    std::ostringstream msg;
    msg << "U22 is " << rb.U22.rows() << "x" << rb.U22.cols() << " and V22 is " << rb.V22.rows()
        << "x" << rb.V22.cols() << "; both must be square";
    throw ReductionError("check_two_sided", msg.str());
  }
  const Index ke = rb.V22.rows();
  const Index h = rb.U22.cols();
  ResidualReport& r = out.check;
  r.tol = opts.tol;
  r.add("V22 Pi_KerF22 E21 J_KerE11 = I", relative_residual(rb.V22 * rb.left_inv_V22, Matrix::Identity(ke, ke)));
  r.add("Pi_H2 Ehat21 J_G1 U22 = I", relative_residual(rb.right_inv_U22 * rb.U22, Matrix::Identity(h, h)));
  r.add("left_inv(V22) V22 = I", relative_residual(rb.left_inv_V22 * rb.V22, Matrix::Identity(ke, ke)));
  r.add("U22 right_inv(U22) = I", relative_residual(rb.U22 * rb.right_inv_U22, Matrix::Identity(h, h)));
  require_passed("check_two_sided", r);
  return out;
}

SmallEquivalence build_small_eae(const EAESpecialWitness& w, const CornerDecomposition& d,
                                 const ReducedBlocks& rb, const TwoSidedInverses& two,
                                 const ReductionOptions& opts)
{
  const Index n = w.n();
  const Index m = w.m();
  const Index r = d.im_F22.dim();
  const Index h = d.H2.dim();
  const Index ke = d.ker_E11.dim();
  if (d.im_E11.dim() != r || d.G1.dim() != h || d.ker_F22.dim() != ke) {
    std::ostringstream msg;
    msg << "corner dimensions disagree: rank(F22) = " << r << ", rank(E11) = " << d.im_E11.dim();
    throw ReductionError("build_small_eae", msg.str());
  }

  SmallEquivalence out;
  out.rank = r;
  out.E11_prime = d.E11_prime;
  out.neg_F22_prime_inv = -inverse(d.F22_prime).inv;

  const Matrix Win = hcat(d.im_F22.basis, d.H2.basis);
  const Matrix Wout = hcat(d.im_E11.basis, d.G1.basis);
  const Matrix Vin = hcat(d.K2.basis, d.ker_F22.basis);
  const Matrix Vout = hcat(d.F1.basis, d.ker_E11.basis);

  // U = Wout [[I, U12], [0, U22]] (U11 (+) I_H2) Win^*
  const Matrix upper = Block2x2{Matrix::Identity(r, r), rb.U12, Matrix::Zero(h, r), two.U22}.assemble();
  out.pu = Wout * upper;
  out.qu = Win.adjoint();

  // V = Vout (V11 (+) I_KerE11) [[I, 0], [V21, V22]] Vin^*
  const Matrix lower_inv = Block2x2{Matrix::Identity(r, r), Matrix::Zero(r, ke),
                                    -two.V22_inv * rb.V21, two.V22_inv}.assemble();
  out.pv_inv = Vout.adjoint();
  out.qv_inv = Vin * lower_inv;

  // U11 (+) I_H2 (+) I_KerE11 =
  //   [[E11', 0, 0], [0, 0, I], [0, I, 0]] (V11 (+) I_KerE11 (+) I_H2)
  //   [[-(F22')^-1, 0, 0], [0, 0, I], [0, I, 0]]
  const Matrix left3 = assemble3x3({{{d.E11_prime, Matrix(), Matrix()},
                                     {Matrix(), Matrix(), Matrix::Identity(h, h)},
                                     {Matrix(), Matrix::Identity(ke, ke), Matrix()}}},
                                   {r, h, ke}, {r, ke, h});
  const Matrix right3 = assemble3x3({{{out.neg_F22_prime_inv, Matrix(), Matrix()},
                                      {Matrix(), Matrix(), Matrix::Identity(ke, ke)},
                                      {Matrix(), Matrix::Identity(h, h), Matrix()}}},
                                    {r, ke, h}, {r, h, ke});

  const Matrix Ike = Matrix::Identity(ke, ke);
  const Matrix Ih = Matrix::Identity(h, h);
  EAEWitness& eae = out.witness;
  eae.u = w.u;
  eae.v = w.v;
  eae.x0_dim = ke;
  eae.y0_dim = h;
  eae.e = direct_sum(out.pu, Ike) * left3 * direct_sum(out.pv_inv, Ih);
  eae.f = direct_sum(out.qv_inv, Ih) * right3 * direct_sum(out.qu, Ike);

  out.check = verify_eae(eae, opts.tol);
  out.check.add("U11 = E11' V11 (-(F22')^-1)",
                relative_residual(d.E11_prime * rb.V11 * out.neg_F22_prime_inv, rb.U11));
  out.check.add("U = pu (U11 (+) I) qu",
                relative_residual(out.pu * direct_sum(rb.U11, Ih) * out.qu, w.u));
  (void)n;
  (void)m;
  require_passed("build_small_eae", out.check);
  return out;
}

EAOEWitness build_eaoe(const SmallEquivalence& small, const ReductionOptions& opts)
{
  const EAEWitness& s = small.witness;
  const Index r = small.rank;
  const Index ke = s.x0_dim;  // Ker E11
  const Index h = s.y0_dim;   // H2

  EAOEWitness out;
  out.u = s.u;
  out.v = s.v;

  if (h <= ke) {
    // T : H2 -> Ker E11, Z = Im T, Z' its complement; extend U by Z'.
    const Index d = ke - h;
    const Matrix T = coordinate_isometry(ke, h);
    const SubspaceMaps Z = subspace_maps(SubspaceBasis{ke, T});
    const SubspaceMaps Zc = subspace_maps(SubspaceBasis{ke, Matrix::Identity(ke, ke).rightCols(d)});
    const Matrix T_plus = T.adjoint();
    const Matrix basis_ke = hcat(Z.J, Zc.J);

    // U11 (+) I_H2 (+) I_Z' = diag(E11', T^+ J_Z, I) (V11 (+) I_Z (+) I_Z') diag(-(F22')^-1, Pi_Z T, I)
    const Matrix left3 = assemble3x3({{{small.E11_prime, Matrix(), Matrix()},
                                       {Matrix(), T_plus * Z.J, Matrix()},
                                       {Matrix(), Matrix(), Matrix::Identity(d, d)}}},
                                     {r, h, d}, {r, h, d});
    const Matrix right3 = assemble3x3({{{small.neg_F22_prime_inv, Matrix(), Matrix()},
                                        {Matrix(), Z.Pi * T, Matrix()},
                                        {Matrix(), Matrix(), Matrix::Identity(d, d)}}},
                                      {r, h, d}, {r, h, d});
    const Matrix Id = Matrix::Identity(d, d);
    const Matrix Ir = Matrix::Identity(r, r);
    out.extended_side = ExtendedSide::U;
    out.ext_dim = d;
    out.e = direct_sum(small.pu, Id) * left3 * direct_sum(Ir, basis_ke.adjoint()) * small.pv_inv;
    out.f = small.qv_inv * direct_sum(Ir, basis_ke) * right3 * direct_sum(small.qu, Id);
  } else {
    // T : Ker E11 -> H2, Z = Im T, Z' its complement; extend V by Z'.
    const Index d = h - ke;
    const Matrix T = coordinate_isometry(h, ke);
    const SubspaceMaps Z = subspace_maps(SubspaceBasis{h, T});
    const SubspaceMaps Zc = subspace_maps(SubspaceBasis{h, Matrix::Identity(h, h).rightCols(d)});
    const Matrix T_plus = T.adjoint();
    const Matrix basis_h = hcat(Z.J, Zc.J);

    // U11 (+) I_Z (+) I_Z' = diag(E11', Pi_Z T, I) (V11 (+) I_KerE11 (+) I_Z') diag(-(F22')^-1, T^+ J_Z, I)
    const Matrix left3 = assemble3x3({{{small.E11_prime, Matrix(), Matrix()},
                                       {Matrix(), Z.Pi * T, Matrix()},
                                       {Matrix(), Matrix(), Matrix::Identity(d, d)}}},
                                     {r, ke, d}, {r, ke, d});
    const Matrix right3 = assemble3x3({{{small.neg_F22_prime_inv, Matrix(), Matrix()},
                                        {Matrix(), T_plus * Z.J, Matrix()},
                                        {Matrix(), Matrix(), Matrix::Identity(d, d)}}},
                                      {r, ke, d}, {r, ke, d});
    const Matrix Id = Matrix::Identity(d, d);
    const Matrix Ir = Matrix::Identity(r, r);
    out.extended_side = ExtendedSide::V;
    out.ext_dim = d;
    out.e = small.pu * direct_sum(Ir, basis_h) * left3 * direct_sum(small.pv_inv, Id);
    out.f = direct_sum(small.qv_inv, Id) * right3 * direct_sum(Ir, basis_h.adjoint()) * small.qu;
  }

  const ResidualReport check = verify_eaoe(out, opts.tol);
  require_passed("build_eaoe", check);
  return out;
}

bool PipelineReport::passed() const
{
  return std::all_of(stages.begin(), stages.end(),
                     [](const StageRecord& s) { return s.report.passed(); });
}

double PipelineReport::max_residual() const
{
  double r = 0.0;
  for (const auto& s : stages) r = std::max(r, s.report.max_residual());
  return r;
}

const StageRecord& PipelineReport::stage(const std::string& name) const
{
  for (const auto& s : stages)
    if (s.name == name) return s;
  throw std::out_of_range("no pipeline stage named '" + name + "'");
}

PipelineReport run_pipeline(const Matrix& u, const Matrix& v,
                            const std::optional<EAESpecialWitness>& witness,
                            const ReductionOptions& opts)
{
  if (u.rows() != u.cols() || v.rows() != v.cols())
    throw StructuralError("run_pipeline: U and V must be square");
  require_finite(u, "run_pipeline U");
  require_finite(v, "run_pipeline V");

  PipelineReport rep;
  auto record = [&](const std::string& name, const ResidualReport& r) {
    rep.stages.push_back({name, r});
    require_passed(name, r);
  };

  if (witness) {
    if (relative_residual(witness->u, u) > opts.tol || relative_residual(witness->v, v) > opts.tol)
      throw StructuralError("run_pipeline: supplied witness is for a different pair (U, V)");
    rep.special = *witness;
  } else {
    const RankTolerance tol = opts.rank_tolerance();
    const Index ku = u.rows() - rank_of(u, tol);
    const Index kv = v.rows() - rank_of(v, tol);
    if (ku != kv) {
      std::ostringstream msg;
      msg << "U and V are not equivalent after extension: nullity(U) = " << ku
          << " but nullity(V) = " << kv << " (rank oracle)";
      throw FeasibilityError(msg.str(), ku, kv);
    }
    rep.synthesized_mc = synth_mc(u, v, tol, opts.tol);
    rep.stages.push_back({"synth_mc", verify_mc(*rep.synthesized_mc, opts.tol)});
    try {
      rep.special = mc_to_eae_special(*rep.synthesized_mc, opts.tol);
    } catch (const ConversionError& e) {
      throw ReductionError("mc_to_eae_special", e.what(), e.report());
    }
  }

  record("verify_eae_special", verify_eae_special(rep.special, opts.tol));

  rep.fredholm = fredholm_report(rep.special, opts);
  {
    ResidualReport r;
    r.tol = opts.tol;
    r.note("Ind(F11)", static_cast<double>(rep.fredholm.F11.index()));
    r.note("Ind(F22)", static_cast<double>(rep.fredholm.F22.index()));
    r.note("Ind(E11)", static_cast<double>(rep.fredholm.E11.index()));
    r.note("Ind(Ehat11)", static_cast<double>(rep.fredholm.Ehat11.index()));
    rep.stages.push_back({"fredholm_report", r});
  }

  const CornerDecomposition d = decompose_corners(rep.special, opts);
  rep.stages.push_back({"decompose_corners", d.check});
  rep.dim_ker_E11 = d.ker_E11.dim();
  rep.dim_H2 = d.H2.dim();
  rep.dim_G1 = d.G1.dim();
  rep.dim_ker_F22 = d.ker_F22.dim();
  rep.E11_prime_condition = d.E11_prime_condition;
  rep.F22_prime_condition = d.F22_prime_condition;

  const ReducedBlocks rb0 = derive_uv_blocks(rep.special, d, opts);
  rep.stages.push_back({"derive_uv_blocks", rb0.check});

  const Normalization norm = normalize_adjoint(rep.special, opts);
  rep.stages.push_back({"normalize_adjoint", norm.check});
  rep.normalized = norm.witness;

  // E11 and F22 are untouched by the normalisation, so the splitting carries over.
  const ReducedBlocks rb = derive_uv_blocks(rep.normalized, d, opts);
  rep.stages.push_back({"rederive_uv_blocks", rb.check});

  const TwoSidedInverses two = check_two_sided(rep.normalized, rb, opts);
  rep.stages.push_back({"check_two_sided", two.check});

  const SmallEquivalence small = build_small_eae(rep.normalized, d, rb, two, opts);
  rep.stages.push_back({"build_small_eae", small.check});
  rep.small_eae = small.witness;
  rep.x0_dim = small.witness.x0_dim;
  rep.y0_dim = small.witness.y0_dim;

  rep.eaoe = build_eaoe(small, opts);
  rep.stages.push_back({"build_eaoe", verify_eaoe(rep.eaoe, opts.tol)});
  rep.eaoe_side = rep.eaoe.extended_side;
  rep.eaoe_ext_dim = rep.eaoe.ext_dim;

  try {
    rep.sc = sc_from_eaoe(rep.eaoe, opts.tol);
  } catch (const ConversionError& e) {
    throw ReductionError("sc_from_eaoe", e.what(), e.report());
  }
  record("sc_from_eaoe", verify_sc(rep.sc, opts.tol));

  // Extension dimensions after success: dim H2 = dim G1, dim Ker F22 = dim Ker E11,
  // and the one-sided extension has size |Ind(F22)| on the side its sign selects.
  ResidualReport dims;
  dims.tol = 0.0;
  auto mismatch = [](Index a, Index b) { return a == b ? 0.0 : 1.0; };
  dims.add("dim H2 = dim G1", mismatch(rep.dim_H2, rep.dim_G1));
  dims.add("dim Ker F22 = dim Ker E11", mismatch(rep.dim_ker_F22, rep.dim_ker_E11));
  dims.add("x0_dim = dim Ker E11", mismatch(rep.x0_dim, rep.dim_ker_E11));
  dims.add("y0_dim = dim H2", mismatch(rep.y0_dim, rep.dim_H2));
  const Index ind = rep.fredholm.F22.index();
  dims.add("ext_dim = |Ind(F22)|", mismatch(rep.eaoe_ext_dim, ind < 0 ? -ind : ind));
  const bool side_ok = ind == 0 || (ind > 0) == (rep.eaoe_side == ExtendedSide::U);
  dims.add("extension side follows sign of Ind(F22)", side_ok ? 0.0 : 1.0);
  dims.add("Fredholm extension dims match", rep.fredholm.extension_dims_match ? 0.0 : 1.0);
  record("extension_dims", dims);
  return rep;
}

}  // namespace eaekit
