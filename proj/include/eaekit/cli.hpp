#pragma once

// Command-line front end.
//
//   synth     write a random instance with prescribed nullity
//   pipeline  reduce an instance (or a supplied witness) to a Schur coupling
//   verify    re-check a witness file
//   hankel    finite-section experiments for a symbol on the circle
//
// Exit codes: 0 pass, 1 verification failure, 2 invalid input or I/O error.

#include <iosfwd>

namespace eaekit::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInvalid = 2;

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace eaekit::cli
