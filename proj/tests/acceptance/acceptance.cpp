// Acceptance suite. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include "eaekit/hankel.hpp"
#include "eaekit/instances.hpp"
#include "eaekit/reduction.hpp"
#include "eaekit/relations.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace eaekit;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what)
  {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

Matrix scalar(Complex x)
{
  return Matrix::Constant(1, 1, x);
}

// ---------------------------------------------------------------------------
// 1. Worked instance U = [1], V = [0.5] from M = [[2, 1], [1, 1]].
Outcome worked_instance()
{
  Outcome o;
  const auto t0 = Clock::now();
  const double tol = 1e-12;

  SCWitness sc;
  sc.m = Block2x2::extract(from_rows({{2.0, 1.0}, {1.0, 1.0}}), 1, 1);
  sc.u = scalar(1.0);
  sc.v = scalar(0.5);

  double worst = 0.0;
  auto track = [&](const ResidualReport& r, const char* what) {
    worst = std::max(worst, r.max_residual());
    o.require(r.max_residual() <= tol, what);
  };
  try {
    track(verify_sc(sc, tol), "input verify_sc");
    const MCWitness mc = sc_to_mc(sc, tol);
    track(verify_mc(mc, tol), "verify_mc");
    const EAESpecialWitness special = mc_to_eae_special(mc, tol);
    const ResidualReport r = verify_eae_special(special, tol);
    track(r, "verify_eae_special");
    for (const auto& label : special_identity_labels()) o.require(r.residual(label) <= tol, label);

    ReductionOptions opts;
    opts.tol = tol;
    const PipelineReport rep = run_pipeline(sc.u, sc.v, special, opts);
    for (const auto& s : rep.stages) track(s.report, s.name.c_str());
    o.require(rep.x0_dim == 0 && rep.y0_dim == 0, "extension dims (0, 0)");
    track(verify_sc(rep.sc, tol), "final verify_sc");
  } catch (const Error& e) {
    o.require(false, e.what());
  }
  const double dt = seconds_since(t0);
  o.require(dt < 1.0, "runtime < 1 s");
  o.detail << "max residual " << worst << ", " << dt << " s";
  return o;
}

// ---------------------------------------------------------------------------
// 2 and 4 share the randomized suite.
struct SuiteCase {
  std::uint64_t seed;
  InstanceSpec spec;
};

InstanceSpec suite_spec(std::uint64_t seed)
{
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<Index> nullity(0, 4);
  InstanceSpec s;
  s.k = nullity(rng);
  std::uniform_int_distribution<Index> size(std::max<Index>(s.k, 1), 12);
  s.n = size(rng);
  s.m = size(rng);
  s.seed = seed;
  s.cond_bound = 1e3;
  return s;
}

struct SuiteResults {
  Outcome pipeline;  // criterion 2
  Outcome indices;   // criterion 4
};

SuiteResults randomized_suite()
{
  SuiteResults out;
  Outcome& o2 = out.pipeline;
  Outcome& o4 = out.indices;
  const auto t0 = Clock::now();
  double worst = 0.0;
  int passed = 0, index_checks = 0, side_checks = 0;

  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const InstanceSpec spec = suite_spec(seed);
    const std::string tag = "seed " + std::to_string(seed);
    try {
      const InstancePair p = random_instance(spec);
      const PipelineReport rep = run_pipeline(p.u, p.v);
      worst = std::max(worst, rep.max_residual());
      const bool ok = rep.passed() && rep.max_residual() <= 1e-8 && rep.x0_dim == rep.dim_ker_E11 &&
                      rep.y0_dim == rep.dim_H2 && rep.dim_H2 == rep.dim_G1 &&
                      rep.dim_ker_F22 == rep.dim_ker_E11;
      o2.require(ok, tag);
      passed += ok ? 1 : 0;

      // Indices from an independent elimination rank on the synthesized witness.
      const EAESpecialWitness& w = rep.special;
      auto index = [](const Matrix& a) { return oracle::nullity(a) - (a.rows() - oracle::gauss_rank(a)); };
      const long iF11 = index(w.F11()), iF22 = index(w.F22());
      const long iE11 = index(w.E11()), iEh11 = index(w.Ehat11());
      o4.require(iF11 == -iF22 && iE11 == -iEh11, tag + " index identities");
      o4.require(rep.fredholm.F22.index() == iF22, tag + " library index agrees with oracle");
      ++index_checks;
      const bool side_ok = iF22 == 0 ? rep.eaoe_ext_dim == 0
                                     : (iF22 > 0) == (rep.eaoe_side == ExtendedSide::U) &&
                                           rep.eaoe_ext_dim == std::labs(iF22);
      o4.require(side_ok, tag + " extension side");
      ++side_checks;
    } catch (const Error& e) {
      o2.require(false, tag + ": " + e.what());
      o4.require(false, tag + ": " + e.what());
    }
  }
  const double dt = seconds_since(t0);
  o2.require(dt < 30.0, "runtime < 30 s");
  o2.detail << passed << "/200 instances, worst stage residual " << worst << ", " << dt << " s";
  o4.detail << index_checks << " witnesses with index identities checked, " << side_checks
            << " extension sides checked";
  return out;
}

// ---------------------------------------------------------------------------
// 3. Pipeline success iff nullities agree, against an elimination oracle.
Outcome oracle_equivalence()
{
  Outcome o;
  int agree = 0;
  std::mt19937_64 rng(2024);
  for (Index ku = 0; ku <= 3; ++ku) {
    for (Index kv = 0; kv <= 3; ++kv) {
      const Index n = 5, m = 6;
      const Matrix u = random_with_rank(n, n - ku, 100.0, rng);
      const Matrix v = random_with_rank(m, m - kv, 100.0, rng);
      const bool expected = oracle::nullity(u) == oracle::nullity(v);
      bool succeeded = false;
      try {
        succeeded = run_pipeline(u, v).passed();
      } catch (const FeasibilityError&) {
        succeeded = false;
      } catch (const Error& e) {
        o.detail << "(" << ku << "," << kv << ") unexpected error: " << e.what() << "; ";
      }
      if (succeeded == expected) ++agree;
      else o.require(false, "pair (" + std::to_string(ku) + ", " + std::to_string(kv) + ")");
    }
  }
  o.require(agree == 16, "16/16 agreement");
  o.detail << agree << "/16 agreement";
  return o;
}

// ---------------------------------------------------------------------------
// 5. Finite sections for f = 2 + z.
Outcome finite_sections()
{
  Outcome o;
  const SymbolFC f{0, {2.0, 1.0}};
  try {
    const SymbolInverse inv = invert_symbol(f);
    double l1 = 0.0;
    for (long j = -50; j <= 50; ++j) {
      const Complex ref = j >= 0 ? oracle::geometric_inverse_coeff(2.0, 1.0, j) : Complex(0.0);
      l1 += std::abs(inv.symbol.at(j) - ref);
    }
    o.require(l1 <= 1e-12, "inverse coefficients l1 error");

    const HankelCouplingReport r20 = mc_residual_hankel(f, 20);
    const HankelCouplingReport r30 = mc_residual_hankel(f, 30);
    const HankelCouplingReport r40 = mc_residual_hankel(f, 40);
    o.require(r30.interior_residual <= 1e-6, "interior residual at N = 30");
    o.require(r40.interior_residual < r20.interior_residual, "residual decreases from N = 20 to N = 40");

    const RealVector sf = singular_values(r30.f_sections.H);
    const RealVector sg = singular_values(r30.g_sections.H);
    o.require(numerical_rank(sf) == 1 && numerical_rank(sg) == 1, "both Hankel sections rank 1");
    o.require(std::abs(sf(0) - 1.0) <= 1e-6, "sigma_1(H_f) = 1");
    o.require(std::abs(sg(0) - 1.0 / 3.0) <= 1e-6, "sigma_1(H_1/f) = 1/3");
    o.detail << "l1 error " << l1 << ", interior residual N=20/30/40: " << r20.interior_residual << " / "
             << r30.interior_residual << " / " << r40.interior_residual << ", sigma " << sf(0) << " and "
             << sg(0);
  } catch (const Error& e) {
    o.require(false, e.what());
  }
  return o;
}

// ---------------------------------------------------------------------------
// 6. Shift comparability.
Outcome shift_examples()
{
  Outcome o;
  const SymbolFC f{0, {2.0, 1.0}};
  try {
    const HankelCouplingReport r = mc_residual_hankel(f, 30);
    const RealVector sf = singular_values(r.f_sections.H);
    const RealVector sg = singular_values(r.g_sections.H);
    const ShiftComparabilityReport pair = shift_comparability(sf, sg, 3);
    o.require(pair.verdict && pair.verdict->k == 0 && std::abs(*pair.verdict->c - 1.0 / 3.0) <= 1e-6,
              "2+z pair: k = 0, c = 1/3");

    RealVector alpha(30), beta(30);
    for (Index i = 0; i < 30; ++i) {
      alpha(i) = std::pow(0.5, static_cast<double>(i));
      beta(i) = std::pow(0.5, static_cast<double>(i + 1));
    }
    const ShiftComparabilityReport same = shift_comparability(alpha, alpha, 3);
    o.require(same.verdict && same.verdict->k == 0 && std::abs(*same.verdict->c - 1.0) <= 1e-12,
              "identical sequences: c = 1");
    const ShiftComparabilityReport same_f = shift_comparability(sf, sf, 3);
    o.require(same_f.verdict && std::abs(*same_f.verdict->c - 1.0) <= 1e-12, "identical Hankel spectra: c = 1");

    const ShiftComparabilityReport geo = shift_comparability(alpha, beta, 3);
    o.require(geo.verdict && geo.verdict->k == 1 && std::abs(*geo.verdict->c - 1.0) <= 1e-12,
              "geometric shift: k = 1, c = 1");
    if (pair.verdict && geo.verdict)
      o.detail << "2+z: k=" << pair.verdict->k << " c=" << *pair.verdict->c << "; geometric: k=" << geo.verdict->k
               << " c=" << *geo.verdict->c << " (" << to_string(geo.verdict->orientation) << ")";
  } catch (const Error& e) {
    o.require(false, e.what());
  }
  return o;
}

// ---------------------------------------------------------------------------
// 7. Converter postconditions on random Schur couplings. A and D have
// singular values log-uniform in [1, 1e4], so cond(A), cond(D) <= 1e4; B and
// C have unit-scale entries.
Outcome converter_postconditions()
{
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> size(1, 8);
  int ok_mc = 0, ok_special = 0;
  double worst_mc = 0.0, worst_special = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Index n = size(rng), m = size(rng);
    const Matrix A = 1e4 * random_with_rank(n, n, 1e4, rng);
    const Matrix D = 1e4 * random_with_rank(m, m, 1e4, rng);
    const Matrix B = oracle::random_matrix(n, m, rng);
    const Matrix C = oracle::random_matrix(m, n, rng);
    SCWitness sc;
    sc.m = Block2x2{A, B, C, D};
    const auto [u, v] = oracle::schur_complements(A, B, C, D);
    sc.u = u;
    sc.v = v;
    const std::string tag = "trial " + std::to_string(trial);
    try {
      const MCWitness mc = sc_to_mc(sc, 1e-10);
      const double r_mc = verify_mc(mc, 1e-10).max_residual();
      worst_mc = std::max(worst_mc, r_mc);
      o.require(r_mc <= 1e-10, tag + " verify_mc");
      ok_mc += r_mc <= 1e-10 ? 1 : 0;

      const EAESpecialWitness w = mc_to_eae_special(mc, 1e-9);
      const double r_sp = verify_eae_special(w, 1e-9).max_residual();
      worst_special = std::max(worst_special, r_sp);
      o.require(r_sp <= 1e-9, tag + " verify_eae_special");
      ok_special += r_sp <= 1e-9 ? 1 : 0;
    } catch (const ConversionError& e) {
      o.require(false, tag + ": " + e.what() + " (max residual " + std::to_string(e.report().max_residual()) + ")");
    } catch (const Error& e) {
      o.require(false, tag + ": " + e.what());
    }
  }
  const double dt = seconds_since(t0);
  o.require(dt < 30.0, "runtime < 30 s");
  o.detail << ok_mc << "/500 verify_mc, " << ok_special << "/500 verify_eae_special, worst " << worst_mc << " / "
           << worst_special << ", " << dt << " s";
  return o;
}

}  // namespace

int main()
{
  int failures = 0;
  auto report = [&](int id, const char* title, const Outcome& o) {
    std::printf("criterion %d %-40s %s  %s\n", id, title, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };

  report(1, "worked instance exactness", worked_instance());
  const SuiteResults suite = randomized_suite();
  report(2, "randomized pipeline suite", suite.pipeline);
  report(3, "oracle equivalence", oracle_equivalence());
  report(4, "index identities and extension side", suite.indices);
  report(5, "finite sections for 2+z", finite_sections());
  report(6, "shift comparability", shift_examples());
  report(7, "converter postconditions", converter_postconditions());
  return failures;
}
