#pragma once

// Reduction of an equivalence-after-extension witness to a one-sided one and
// from there to a Schur coupling.
//
// Starting from a special-form witness (E, F) for U on X (dim n) and V on Y
// (dim m) the pipeline
//
//   1. splits the corners E11, F22 : Y -> X along kernels and ranges,
//   2. writes U and V as block triangular operators in those splittings,
//   3. normalises (E, F) with the Moore-Penrose inverse of F22 so that the
//      one-sided inverses of U22 and V22 become two-sided,
//   4. assembles an EAE with extensions Ker E11 and H2 (the complement of
//      Im F22), both finite dimensional,
//   5. embeds the smaller extension space into the larger one to get an
//      EAOE, and
//   6. turns the EAOE into a Schur coupling.
//
// All complements are orthogonal complements computed from SVDs.

#include "eaekit/blockops.hpp"
#include "eaekit/instances.hpp"
#include "eaekit/numkernel.hpp"
#include "eaekit/relations.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eaekit {

struct ReductionOptions {
  // Residual threshold of every stage verifier.
  double tol = 1e-8;
  // Relative rank cutoff for E11, F22 and the corner indices.
  double rank_rtol = 1e-9;

  RankTolerance rank_tolerance() const { return RankTolerance::rel(rank_rtol); }
};

// A stage of the reduction failed its check.
class ReductionError : public Error {
public:
  ReductionError(std::string stage, const std::string& what, ResidualReport report = {})
      : Error(stage + ": " + what), stage_(std::move(stage)), report_(std::move(report)) {}
  const std::string& stage() const noexcept { return stage_; }
  const ResidualReport& report() const noexcept { return report_; }

private:
  std::string stage_;
  ResidualReport report_;
};

struct CornerIndex {
  Index rank = 0;
  Index kernel_dim = 0;
  Index cokernel_dim = 0;
  Index index() const { return kernel_dim - cokernel_dim; }
};

struct FredholmReport {
  CornerIndex F11, F22, E11, Ehat11;
  // dim H2 = dim G1 and dim Ker F22 = dim Ker E11.
  bool extension_dims_match = false;
  // Which operator the one-sided extension lands on; nullopt when
  // index(F22) = 0 and no extension is needed.
  std::optional<ExtendedSide> extension_side;
};

FredholmReport fredholm_report(const EAESpecialWitness& w, const ReductionOptions& opts = {});

// Orthonormal splittings
//   F22 : K2 (+) Ker F22 -> Im F22 (+) H2
//   E11 : F1 (+) Ker E11 -> Im E11 (+) G1
// with invertible restrictions F22', E11'.
struct CornerDecomposition {
  SubspaceBasis K2, ker_F22, im_F22, H2;
  Matrix F22_prime;
  double F22_prime_condition = 1.0;

  SubspaceBasis F1, ker_E11, im_E11, G1;
  Matrix E11_prime;
  double E11_prime_condition = 1.0;

  ResidualReport check;

  // Moore-Penrose inverse J_K2 (F22')^-1 Pi_ImF22.
  Matrix F22_pinv() const;
};

CornerDecomposition decompose_corners(const EAESpecialWitness& w, const ReductionOptions& opts = {});

// U : Im F22 (+) H2 -> Im E11 (+) G1 and V : K2 (+) Ker F22 -> F1 (+) Ker E11.
struct ReducedBlocks {
  Matrix U11, U12, U21, U22;
  Matrix V11, V12, V21, V22;
  Matrix left_inv_V22;   // Pi_KerF22 E21 J_KerE11
  Matrix right_inv_U22;  // Pi_H2 Ehat21 J_G1
  ResidualReport check;
};

ReducedBlocks derive_uv_blocks(const EAESpecialWitness& w, const CornerDecomposition& d,
                               const ReductionOptions& opts = {});

struct Normalization {
  EAESpecialWitness witness;
  Matrix transform;  // X = F22^+ Ehat21
  ResidualReport check;
};

// E -> [[I, 0], [X, I]] E and F -> F [[I, 0], [-X U, I]]; afterwards
// E21 = P_KerF22 E21 and F21 = P_H2.
Normalization normalize_adjoint(const EAESpecialWitness& w, const ReductionOptions& opts = {});

struct TwoSidedInverses {
  Matrix U22, U22_inv;
  Matrix V22, V22_inv;
  ResidualReport check;
};

TwoSidedInverses check_two_sided(const EAESpecialWitness& normalized, const ReducedBlocks& rb,
                                 const ReductionOptions& opts = {});

// EAE with X0 = Ker E11 and Y0 = H2, together with the factorizations it
// was assembled from:
//   U = pu (U11 (+) I_H2) qu,  V = pv (V11 (+) I_KerE11) qv,
//   U11 = E11' V11 (-(F22')^-1).
struct SmallEquivalence {
  EAEWitness witness;
  Index rank = 0;  // dim Im F22 = dim Im E11
  Matrix pu, qu;
  Matrix pv_inv, qv_inv;
  Matrix E11_prime;
  Matrix neg_F22_prime_inv;
  ResidualReport check;
};

SmallEquivalence build_small_eae(const EAESpecialWitness& w, const CornerDecomposition& d,
                                 const ReducedBlocks& rb, const TwoSidedInverses& two,
                                 const ReductionOptions& opts = {});

// Embeds the smaller of H2, Ker E11 into the larger by the coordinate
// isometry and returns the resulting one-sided equivalence.
EAOEWitness build_eaoe(const SmallEquivalence& small, const ReductionOptions& opts = {});

struct StageRecord {
  std::string name;
  ResidualReport report;
};

struct PipelineReport {
  std::vector<StageRecord> stages;
  FredholmReport fredholm;

  Index dim_ker_E11 = 0, dim_H2 = 0, dim_G1 = 0, dim_ker_F22 = 0;
  Index x0_dim = 0, y0_dim = 0;
  double E11_prime_condition = 1.0;
  double F22_prime_condition = 1.0;

  ExtendedSide eaoe_side = ExtendedSide::U;
  Index eaoe_ext_dim = 0;

  std::optional<MCWitness> synthesized_mc;
  EAESpecialWitness special;
  EAESpecialWitness normalized;
  EAEWitness small_eae;
  EAOEWitness eaoe;
  SCWitness sc;

  bool passed() const;
  double max_residual() const;
  const StageRecord& stage(const std::string& name) const;
};

// Full reduction EAE -> EAOE -> SC. Without a witness one is synthesised
// from the canonical coupling, which requires nullity(U) = nullity(V).
PipelineReport run_pipeline(const Matrix& u, const Matrix& v,
                            const std::optional<EAESpecialWitness>& witness = std::nullopt,
                            const ReductionOptions& opts = {});

}  // namespace eaekit
