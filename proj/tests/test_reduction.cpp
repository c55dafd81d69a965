#include "eaekit/reduction.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace eaekit;

namespace {

Matrix scalar(Complex x)
{
  return Matrix::Constant(1, 1, x);
}

EAESpecialWitness worked_special()
{
  SCWitness sc;
  sc.m = Block2x2::extract(from_rows({{2.0, 1.0}, {1.0, 1.0}}), 1, 1);
  sc.u = scalar(1.0);
  sc.v = scalar(0.5);
  return mc_to_eae_special(sc_to_mc(sc));
}

EAESpecialWitness swap_special(Index n)
{
  const Matrix swap = Block2x2{zeros(n, n), identity(n), identity(n), zeros(n, n)}.assemble();
  return EAESpecialWitness{identity(n), identity(n), swap, swap, swap};
}

EAESpecialWitness synthesized(Index n, Index m, Index k, std::uint64_t seed)
{
  const InstancePair p = random_instance(InstanceSpec{n, m, k, seed, 10.0});
  return mc_to_eae_special(synth_mc(p.u, p.v, RankTolerance::rel(1e-9)));
}

}  // namespace

TEST(Fredholm, WorkedInstance)
{
  const FredholmReport f = fredholm_report(worked_special());
  for (const CornerIndex& c : {f.F11, f.F22, f.E11, f.Ehat11}) {
    EXPECT_EQ(c.index(), 0);
    EXPECT_EQ(c.kernel_dim, 0);
  }
  EXPECT_TRUE(f.extension_dims_match);
  EXPECT_FALSE(f.extension_side.has_value());
}

TEST(Fredholm, SynthesizedOneTwo)
{
  const FredholmReport f = fredholm_report(synthesized(1, 2, 1, 3));
  EXPECT_EQ(f.F22.index(), 1);
  EXPECT_EQ(f.F11.index(), -1);
  EXPECT_EQ(f.E11.index(), -f.Ehat11.index());
  ASSERT_TRUE(f.extension_side.has_value());
  EXPECT_EQ(*f.extension_side, ExtendedSide::U);
}

TEST(Fredholm, SwapWitness)
{
  const FredholmReport f = fredholm_report(swap_special(2));
  EXPECT_EQ(f.F22.index(), 0);
  EXPECT_EQ(f.E11.index(), 0);
  EXPECT_EQ(f.E11.rank, 0);
}

TEST(DecomposeCorners, WorkedInstance)
{
  const CornerDecomposition d = decompose_corners(worked_special());
  EXPECT_EQ(d.ker_F22.dim(), 0);
  EXPECT_EQ(d.H2.dim(), 0);
  EXPECT_EQ(d.ker_E11.dim(), 0);
  EXPECT_EQ(d.G1.dim(), 0);
  EXPECT_NEAR(std::abs(d.F22_prime(0, 0)), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(d.E11_prime(0, 0)), 1.0, 1e-15);
  EXPECT_LE(norm2(d.F22_pinv() - scalar(-2.0)), 1e-14);
}

TEST(DecomposeCorners, SwapWitness)
{
  const CornerDecomposition d = decompose_corners(swap_special(1));
  EXPECT_EQ(d.ker_E11.dim(), 1);
  EXPECT_EQ(d.im_E11.dim(), 0);
}

TEST(DecomposeCorners, SynthesizedDimsAgreeWithOracle)
{
  const EAESpecialWitness w = synthesized(2, 2, 1, 5);
  const CornerDecomposition d = decompose_corners(w);
  EXPECT_EQ(d.ker_E11.dim(), oracle::nullity(w.E11()));
  EXPECT_EQ(d.ker_F22.dim(), oracle::nullity(w.F22()));
  EXPECT_EQ(d.H2.dim(), w.n() - oracle::gauss_rank(w.F22()));
  EXPECT_TRUE(d.check.passed());
}

TEST(DeriveUvBlocks, WorkedInstance)
{
  const EAESpecialWitness w = worked_special();
  const ReducedBlocks b = derive_uv_blocks(w, decompose_corners(w));
  EXPECT_NEAR(std::abs(b.U11(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(b.V11(0, 0)), 0.5, 1e-15);
  EXPECT_EQ(b.U22.size(), 0);
}

TEST(DeriveUvBlocks, SwapWitness)
{
  const EAESpecialWitness w = swap_special(1);
  const ReducedBlocks b = derive_uv_blocks(w, decompose_corners(w));
  EXPECT_EQ(b.U11.size(), 0);
  EXPECT_NEAR(std::abs(b.U22(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(b.V22(0, 0)), 1.0, 1e-15);
  EXPECT_LE(norm2(b.left_inv_V22 * b.V22 - identity(1)), 1e-15);
}

TEST(DeriveUvBlocks, OffDiagonalBlocksVanish)
{
  const EAESpecialWitness w = synthesized(3, 3, 1, 7);
  const ReducedBlocks b = derive_uv_blocks(w, decompose_corners(w));
  EXPECT_LE(norm2(b.U21), 1e-10);
  EXPECT_LE(norm2(b.V12), 1e-10);
}

TEST(NormalizeAdjoint, WorkedInstance)
{
  const Normalization n = normalize_adjoint(worked_special());
  EXPECT_LE(norm2(n.transform - scalar(-1.0)), 1e-14);
  EXPECT_LE(norm2(n.witness.E21()), 1e-14);
  EXPECT_TRUE(n.check.passed());
}

TEST(NormalizeAdjoint, FixedPointOnNormalizedInput)
{
  const EAESpecialWitness w = synthesized(2, 3, 1, 11);
  const Normalization once = normalize_adjoint(w);
  const Normalization twice = normalize_adjoint(once.witness);
  EXPECT_LE(norm2(twice.transform), 1e-10);
  EXPECT_LE(oracle::rel_residual(twice.witness.e, once.witness.e), 1e-10);
  EXPECT_LE(oracle::rel_residual(twice.witness.f, once.witness.f), 1e-10);
}

TEST(NormalizeAdjoint, ConditionsHold)
{
  const EAESpecialWitness w = synthesized(2, 3, 1, 13);
  const Normalization n = normalize_adjoint(w);
  const Subspaces s = subspaces(w.F22(), RankTolerance::rel(1e-9));
  const Matrix P_ker = s.kernel.basis * s.kernel.basis.adjoint();
  const Matrix P_h2 = s.range_complement.basis * s.range_complement.basis.adjoint();
  EXPECT_LE(norm2(P_ker * n.witness.E21() - n.witness.E21()), 1e-10);
  EXPECT_LE(norm2(n.witness.F21() - P_h2), 1e-10);
}

TEST(CheckTwoSided, SynthesizedThreeFour)
{
  const EAESpecialWitness w = synthesized(3, 4, 2, 17);
  const Normalization n = normalize_adjoint(w);
  const CornerDecomposition d = decompose_corners(n.witness);
  const ReducedBlocks b = derive_uv_blocks(n.witness, d);
  const TwoSidedInverses t = check_two_sided(n.witness, b);
  EXPECT_LE(t.check.max_residual(), 1e-10);
  EXPECT_LE(norm2(t.V22 * t.V22_inv - identity(t.V22.rows())), 1e-10);
  EXPECT_LE(norm2(t.U22_inv * t.U22 - identity(t.U22.rows())), 1e-10);
}

TEST(CheckTwoSided, SwapWitness)
{
  const EAESpecialWitness w = swap_special(1);
  const Normalization n = normalize_adjoint(w);
  const CornerDecomposition d = decompose_corners(n.witness);
  const TwoSidedInverses t = check_two_sided(n.witness, derive_uv_blocks(n.witness, d));
  EXPECT_LE(norm2(t.V22 * t.V22_inv - identity(1)), 1e-15);
}

namespace {

SmallEquivalence small_for(const EAESpecialWitness& w)
{
  const Normalization n = normalize_adjoint(w);
  const CornerDecomposition d = decompose_corners(n.witness);
  const ReducedBlocks b = derive_uv_blocks(n.witness, d);
  return build_small_eae(n.witness, d, b, check_two_sided(n.witness, b));
}

}  // namespace

TEST(BuildSmallEae, WorkedInstance)
{
  const SmallEquivalence s = small_for(worked_special());
  EXPECT_EQ(s.witness.x0_dim, 0);
  EXPECT_EQ(s.witness.y0_dim, 0);
  EXPECT_LE(verify_eae(s.witness, 1e-12).max_residual(), 1e-12);
}

TEST(BuildSmallEae, SwapWitnessUsesFullExtensions)
{
  const SmallEquivalence s = small_for(swap_special(3));
  EXPECT_EQ(s.witness.x0_dim, 3);
  EXPECT_EQ(s.witness.y0_dim, 3);
  EXPECT_TRUE(verify_eae(s.witness, 1e-12).passed());
}

TEST(BuildSmallEae, SynthesizedFourSix)
{
  const EAESpecialWitness w = synthesized(4, 6, 2, 19);
  const SmallEquivalence s = small_for(w);
  EXPECT_EQ(s.witness.x0_dim, 6 - oracle::gauss_rank(w.E11()));
  EXPECT_EQ(s.witness.y0_dim, 4 - oracle::gauss_rank(w.F22()));
  const Matrix lhs = direct_sum(w.u, identity(s.witness.x0_dim));
  const Matrix rhs = s.witness.e * direct_sum(w.v, identity(s.witness.y0_dim)) * s.witness.f;
  EXPECT_LE(oracle::rel_residual(rhs, lhs), 1e-9);
}

TEST(BuildEaoe, WorkedInstanceHasNoExtension)
{
  const EAOEWitness e = build_eaoe(small_for(worked_special()));
  EXPECT_EQ(e.ext_dim, 0);
  EXPECT_LE(oracle::rel_residual(e.e * e.v * e.f, e.u), 1e-12);
}

TEST(BuildEaoe, SideFollowsIndexSign)
{
  const EAOEWitness up = build_eaoe(small_for(synthesized(1, 2, 1, 23)));
  EXPECT_EQ(up.extended_side, ExtendedSide::U);
  EXPECT_EQ(up.ext_dim, 1);

  const EAOEWitness vp = build_eaoe(small_for(synthesized(4, 2, 1, 29)));
  EXPECT_EQ(vp.extended_side, ExtendedSide::V);
  EXPECT_EQ(vp.ext_dim, 2);
  EXPECT_TRUE(verify_eaoe(vp, 1e-10).passed());
}

TEST(RunPipeline, WorkedInstanceWithSuppliedWitness)
{
  const EAESpecialWitness w = worked_special();
  const PipelineReport r = run_pipeline(w.u, w.v, w);
  EXPECT_TRUE(r.passed());
  EXPECT_LE(r.max_residual(), 1e-12);
  EXPECT_EQ(r.x0_dim, 0);
  EXPECT_EQ(r.y0_dim, 0);
  EXPECT_LE(verify_sc(r.sc, 1e-12).max_residual(), 1e-12);
  EXPECT_FALSE(r.synthesized_mc.has_value());
}

TEST(RunPipeline, WorkedPairWithoutWitness)
{
  const PipelineReport r = run_pipeline(scalar(1.0), scalar(0.5));
  EXPECT_TRUE(r.passed());
  EXPECT_LE(r.stage("sc_from_eaoe").report.max_residual(), 1e-12);
}

TEST(RunPipeline, ZeroPair)
{
  const PipelineReport r = run_pipeline(zeros(2, 2), zeros(2, 2));
  EXPECT_TRUE(r.passed());
  EXPECT_LE(oracle::rel_residual(r.sc.u, zeros(2, 2)), 1e-12);
}

TEST(RunPipeline, UnequalNullities)
{
  try {
    run_pipeline(diagonal({1.0, 0.0}), diagonal({5.0, 0.0, 0.0}));
    FAIL() << "expected FeasibilityError";
  } catch (const FeasibilityError& e) {
    EXPECT_EQ(e.nullity_u(), 1);
    EXPECT_EQ(e.nullity_v(), 2);
  }
}

TEST(RunPipeline, WitnessForOtherPairIsRejected)
{
  const EAESpecialWitness w = worked_special();
  EXPECT_THROW(run_pipeline(scalar(2.0), w.v, w), StructuralError);
}

TEST(RunPipeline, StagesAreRecordedInOrder)
{
  const InstancePair p = random_instance(InstanceSpec{5, 3, 2, 31, 100.0});
  const PipelineReport r = run_pipeline(p.u, p.v);
  const std::vector<std::string> expected = {"synth_mc", "verify_eae_special", "fredholm_report",
                                             "decompose_corners", "derive_uv_blocks", "normalize_adjoint",
                                             "rederive_uv_blocks", "check_two_sided", "build_small_eae",
                                             "build_eaoe", "sc_from_eaoe", "extension_dims"};
  ASSERT_EQ(r.stages.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(r.stages[i].name, expected[i]);
  EXPECT_EQ(r.dim_H2, r.dim_G1);
  EXPECT_EQ(r.dim_ker_F22, r.dim_ker_E11);
  EXPECT_THROW(r.stage("missing"), std::out_of_range);
}

TEST(RunPipeline, CorruptedWitnessFailsWithStage)
{
  EAESpecialWitness w = worked_special();
  w.e_inv(0, 0) += 0.25;
  try {
    run_pipeline(w.u, w.v, w);
    FAIL() << "expected ReductionError";
  } catch (const ReductionError& e) {
    EXPECT_EQ(e.stage(), "verify_eae_special");
    EXPECT_FALSE(e.report().passed());
  }
}
