#pragma once

// Test-instance factory: rank normal forms, matricial couplings of pairs
// with equal nullity, and seeded random pairs with prescribed nullity.

#include "eaekit/blockops.hpp"
#include "eaekit/numkernel.hpp"
#include "eaekit/relations.hpp"

#include <cstdint>
#include <random>

namespace eaekit {

struct InstanceSpec {
  Index n = 1;
  Index m = 1;
  Index k = 0;  // common nullity
  std::uint64_t seed = 1;
  double cond_bound = 10.0;

  void validate() const;
};

// a = p1 * core * p2 with core = I_r (+) 0 and p1, p2 invertible.
struct RankFactorization {
  Matrix p1;
  Matrix core;
  Matrix p2;
  Index rank = 0;
};

class FeasibilityError : public Error {
public:
  FeasibilityError(const std::string& what, Index nullity_u, Index nullity_v)
      : Error(what), nullity_u_(nullity_u), nullity_v_(nullity_v) {}
  Index nullity_u() const noexcept { return nullity_u_; }
  Index nullity_v() const noexcept { return nullity_v_; }

private:
  Index nullity_u_, nullity_v_;
};

RankFactorization canonical_rank_factorization(const Matrix& a, const RankTolerance& tol = {});

// Index-order pairing of the null coordinates of U and V; throws
// FeasibilityError when the nullities differ.
MCWitness synth_mc(const Matrix& u, const Matrix& v, const RankTolerance& tol = {},
                   double verify_tol = 1e-8);

// Random unitary from QR of a complex Gaussian matrix.
Matrix random_unitary(Index n, std::mt19937_64& rng);

// Random n x n matrix with prescribed rank; nonzero singular values are
// log-uniform in [1 / cond_bound, 1].
Matrix random_with_rank(Index n, Index rank, double cond_bound, std::mt19937_64& rng);

struct InstancePair {
  Matrix u;
  Matrix v;
};

InstancePair random_instance(const InstanceSpec& spec);

}  // namespace eaekit
