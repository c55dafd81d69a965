#pragma once

// JSON persistence of matrices, symbols, instances, witnesses and reports.
//
// Matrices are {rows, cols, data: [[re, im], ...]} in row-major order.
// Doubles are written with the shortest representation that reads back to
// the same bits, so a write/read cycle is lossless.

#include "eaekit/hankel.hpp"
#include "eaekit/instances.hpp"
#include "eaekit/reduction.hpp"
#include "eaekit/relations.hpp"

#include <json.hpp>

#include <string>
#include <variant>

namespace eaekit {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";

// Malformed file contents or unreadable/unwritable path.
class IoError : public Error {
public:
  using Error::Error;
};

Json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const Json& j);

Json symbol_to_json(const SymbolFC& f);
SymbolFC symbol_from_json(const Json& j);

struct InstanceFile {
  InstanceSpec spec;
  Matrix u, v;
};

using AnyWitness = std::variant<SCWitness, MCWitness, EAEWitness, EAESpecialWitness, EAOEWitness>;

// "sc", "mc", "eae", "eae_special", "eaoe"
std::string witness_kind(const AnyWitness& w);

Json instance_to_json(const InstanceFile& inst);
InstanceFile instance_from_json(const Json& j);

Json witness_to_json(const AnyWitness& w);
// Throws IoError for an unknown kind or missing matrices.
AnyWitness witness_from_json(const Json& j);

// Re-runs the verifier that matches the witness kind.
ResidualReport verify_any(const AnyWitness& w, double tol);

Json residual_report_to_json(const ResidualReport& r);
Json pipeline_report_to_json(const PipelineReport& r);
Json fredholm_to_json(const FredholmReport& f);
Json shift_report_to_json(const ShiftComparabilityReport& r);
Json summability_to_json(const SummabilityReport& r);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// CSV with header "index,sigma" and one row per entry.
void write_sigma_csv(const std::string& path, const RealVector& sigma);

}  // namespace eaekit
