#include "eaekit/instances.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace eaekit;

TEST(RankFactorization, Examples)
{
  const RankFactorization i3 = canonical_rank_factorization(identity(3));
  EXPECT_EQ(i3.rank, 3);
  EXPECT_EQ(i3.core, identity(3));

  EXPECT_EQ(canonical_rank_factorization(zeros(2, 2)).rank, 0);

  const Matrix d = diagonal({2.0, 0.0});
  const RankFactorization f = canonical_rank_factorization(d);
  EXPECT_EQ(f.rank, 1);
  EXPECT_EQ(f.core, diagonal({1.0, 0.0}));
  EXPECT_LE(norm2(f.p1 * f.core * f.p2 - d), 1e-15);
  EXPECT_NO_THROW(inverse(f.p1));
  EXPECT_NO_THROW(inverse(f.p2));
}

TEST(RankFactorization, RandomReconstruction)
{
  std::mt19937_64 rng(17);
  const Matrix a = random_with_rank(7, 3, 100.0, rng);
  const RankFactorization f = canonical_rank_factorization(a);
  EXPECT_EQ(f.rank, 3);
  EXPECT_LE(oracle::rel_residual(f.p1 * f.core * f.p2, a), 1e-13);
}

TEST(SynthMc, NullPairing)
{
  const MCWitness w = synth_mc(zeros(1, 1), zeros(1, 1));
  EXPECT_LE(norm2(w.uhat - from_rows({{0.0, 1.0}, {1.0, 0.0}})), 1e-15);
  EXPECT_LE(norm2(w.uhat * w.uhat - identity(2)), 1e-15);
}

TEST(SynthMc, IdentityDecouples)
{
  const MCWitness w = synth_mc(identity(1), identity(1));
  EXPECT_LE(norm2(w.uhat - identity(2)), 1e-15);
}

TEST(SynthMc, WorkedPair)
{
  const MCWitness w = synth_mc(Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.5));
  EXPECT_LE(verify_mc(w, 1e-12).max_residual(), 1e-12);
  EXPECT_NO_THROW(mc_to_eae_special(w, 1e-12));
}

TEST(SynthMc, UnequalNullitiesAreInfeasible)
{
  try {
    synth_mc(diagonal({1.0, 0.0}), diagonal({5.0, 0.0, 0.0}));
    FAIL() << "expected FeasibilityError";
  } catch (const FeasibilityError& e) {
    EXPECT_EQ(e.nullity_u(), 1);
    EXPECT_EQ(e.nullity_v(), 2);
  }
}

TEST(SynthMc, RandomPairsVerify)
{
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const InstancePair p = random_instance(InstanceSpec{3 + static_cast<Index>(seed % 4), 5, 2, seed, 100.0});
    const MCWitness w = synth_mc(p.u, p.v, RankTolerance::rel(1e-9));
    EXPECT_LE(verify_mc(w, 1e-10).max_residual(), 1e-10) << "seed " << seed;
  }
}

TEST(RandomInstance, Examples)
{
  const InstancePair a = random_instance(InstanceSpec{1, 1, 0, 5, 10.0});
  EXPECT_GT(std::abs(a.u(0, 0)), 0.0);
  EXPECT_GT(std::abs(a.v(0, 0)), 0.0);

  const InstancePair z = random_instance(InstanceSpec{3, 3, 3, 5, 10.0});
  EXPECT_EQ(z.u, zeros(3, 3));
  EXPECT_EQ(z.v, zeros(3, 3));

  const InstancePair r = random_instance(InstanceSpec{4, 6, 2, 5, 10.0});
  EXPECT_EQ(oracle::gauss_rank(r.u), 2);
  EXPECT_EQ(oracle::gauss_rank(r.v), 4);
  EXPECT_EQ(rank_of(r.u, RankTolerance::rel(1e-9)), 2);
}

TEST(RandomInstance, SeedIsDeterministic)
{
  const InstanceSpec s{5, 4, 1, 99, 1e3};
  EXPECT_EQ(random_instance(s).u, random_instance(s).u);
  InstanceSpec t = s;
  t.seed = 100;
  EXPECT_NE(random_instance(s).u, random_instance(t).u);
}

TEST(RandomInstance, ConditionBound)
{
  std::mt19937_64 rng(3);
  const Matrix a = random_with_rank(8, 8, 1e3, rng);
  const InverseResult inv = inverse(a);
  EXPECT_LE(inv.condition, 1e3 * (1 + 1e-10));
}

TEST(InstanceSpec, Validation)
{
  EXPECT_THROW(random_instance(InstanceSpec{2, 3, 3, 1, 10.0}), PreconditionError);
  EXPECT_THROW(random_instance(InstanceSpec{2, 3, 1, 1, 0.5}), PreconditionError);
}

TEST(RandomUnitary, IsUnitary)
{
  std::mt19937_64 rng(8);
  const Matrix q = random_unitary(6, rng);
  EXPECT_LE(norm2(q.adjoint() * q - identity(6)), 1e-13);
}
