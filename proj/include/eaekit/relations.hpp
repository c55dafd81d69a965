#pragma once

// Witnesses for the four operator relations between U on X and V on Y:
//
//   SC    U = A - B D^-1 C and V = D - C A^-1 B for one block matrix M.
//   MC    U is the (1,1) corner of an invertible Uhat, V the (2,2) corner of
//         its inverse.
//   EAE   U (+) I_X0 = E (V (+) I_Y0) F with E, F invertible.
//   EAOE  EAE with one of X0, Y0 trivial.
//
// Verifiers report relative residuals ||lhs - rhs|| / max(1, ||rhs||) in the
// spectral norm. Converters are checked by running the verifier on their
// output and throw ConversionError if it does not pass.

#include "eaekit/blockops.hpp"
#include "eaekit/numkernel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eaekit {

struct ResidualEntry {
  std::string label;
  double residual = 0.0;
};

// Values reported alongside residuals that are not compared with tol.
struct Diagnostic {
  std::string label;
  double value = 0.0;
};

struct ResidualReport {
  double tol = 0.0;
  std::vector<ResidualEntry> entries;
  std::vector<Diagnostic> diagnostics;

  void add(std::string label, double residual) { entries.push_back({std::move(label), residual}); }
  void note(std::string label, double value) { diagnostics.push_back({std::move(label), value}); }

  bool passed() const;
  double max_residual() const;
  // Label of the first entry above tol.
  std::optional<std::string> first_failure() const;
  // Residual by label, throws std::out_of_range when absent.
  double residual(const std::string& label) const;
};

// Malformed witness: singular E or F, non-square U or V, ...
class StructuralError : public Error {
public:
  using Error::Error;
};

class ConversionError : public Error {
public:
  ConversionError(const std::string& what, ResidualReport report)
      : Error(what), report_(std::move(report)) {}
  const ResidualReport& report() const noexcept { return report_; }

private:
  ResidualReport report_;
};

struct SCWitness {
  Block2x2 m;  // [[A, B], [C, D]]
  Matrix u;
  Matrix v;
};

struct MCWitness {
  Matrix uhat;
  Matrix uhat_inv;
  Index dim_x = 0;
  Index dim_y = 0;
  Matrix u;
  Matrix v;
};

struct EAEWitness {
  Matrix u;
  Matrix v;
  Matrix e;  // (Y + Y0) -> (X + X0)
  Matrix f;  // (X + X0) -> (Y + Y0)
  Index x0_dim = 0;
  Index y0_dim = 0;
};

// EAE witness with X0 = Y and Y0 = X in the normal form
//
//   F = [[F11, I_Y], [F21, F22]]          E = [[E11, U], [E21, -F11]]
//   F^-1 = [[-F22, I_X], [I + F11 F22, -F11]]
//   E^-1 = [[Ehat11, V], [Ehat21, F22]]
//
// E^-1 is stored rather than recomputed; F^-1 is determined by F.
struct EAESpecialWitness {
  Matrix u;      // n x n
  Matrix v;      // m x m
  Matrix e;      // (n + m) x (m + n)
  Matrix f;      // (m + n) x (n + m)
  Matrix e_inv;  // (m + n) x (n + m)

  Index n() const { return u.rows(); }
  Index m() const { return v.rows(); }

  Matrix E11() const { return e.topLeftCorner(n(), m()); }
  Matrix E12() const { return e.topRightCorner(n(), n()); }
  Matrix E21() const { return e.bottomLeftCorner(m(), m()); }
  Matrix E22() const { return e.bottomRightCorner(m(), n()); }
  Matrix F11() const { return f.topLeftCorner(m(), n()); }
  Matrix F12() const { return f.topRightCorner(m(), m()); }
  Matrix F21() const { return f.bottomLeftCorner(n(), n()); }
  Matrix F22() const { return f.bottomRightCorner(n(), m()); }
  Matrix Ehat11() const { return e_inv.topLeftCorner(m(), n()); }
  Matrix Ehat12() const { return e_inv.topRightCorner(m(), m()); }
  Matrix Ehat21() const { return e_inv.bottomLeftCorner(n(), n()); }
  Matrix Ehat22() const { return e_inv.bottomRightCorner(n(), m()); }

  // F^-1 assembled from the blocks of F.
  Matrix f_inv() const;
  // The plain EAE view with X0 = Y, Y0 = X.
  EAEWitness as_eae() const;
};

enum class ExtendedSide { U, V };

struct EAOEWitness {
  ExtendedSide extended_side = ExtendedSide::U;
  Index ext_dim = 0;
  Matrix u;
  Matrix v;
  Matrix e;
  Matrix f;
};

std::string to_string(ExtendedSide side);

// Labels of the eleven identities satisfied by a special-form witness,
// in order (i) .. (xi).
const std::vector<std::string>& special_identity_labels();

ResidualReport verify_sc(const SCWitness& w, double tol);
ResidualReport verify_mc(const MCWitness& w, double tol);
ResidualReport verify_eae(const EAEWitness& w, double tol);
ResidualReport verify_eae_special(const EAESpecialWitness& w, double tol);
ResidualReport verify_eaoe(const EAOEWitness& w, double tol);

MCWitness sc_to_mc(const SCWitness& w, double tol = 1e-8);
EAESpecialWitness mc_to_eae_special(const MCWitness& w, double tol = 1e-8);
SCWitness sc_from_eaoe(const EAOEWitness& w, double tol = 1e-8);

}  // namespace eaekit
