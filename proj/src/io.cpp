#include "eaekit/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace eaekit {

namespace {

const Json& field(const Json& j, const char* key)
{
  if (!j.is_object() || !j.contains(key)) throw IoError(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* what)
{
  if (!j.is_number()) throw IoError(std::string("expected a number for ") + what);
  return j.get<double>();
}

Index count(const Json& j, const char* key)
{
  const Json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw IoError(std::string("field '") + key + "' must be a non-negative integer");
  return static_cast<Index>(v.get<long long>());
}

Json complex_to_json(Complex z)
{
  return Json::array({z.real(), z.imag()});
}

Complex complex_from_json(const Json& j)
{
  if (!j.is_array() || j.size() != 2) throw IoError("complex entries are [re, im] pairs");
  return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

Matrix mat(const Json& matrices, const char* key)
{
  try {
    return matrix_from_json(field(matrices, key));
  } catch (const IoError& e) {
    throw IoError(std::string("matrix '") + key + "': " + e.what());
  }
}

Json envelope(const char* kind, Json dims, Json matrices)
{
  return Json{{"kind", kind}, {"version", kToolVersion}, {"dims", std::move(dims)},
              {"matrices", std::move(matrices)}};
}

}  // namespace

Json matrix_to_json(const Matrix& a)
{
  Json data = Json::array();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) data.push_back(complex_to_json(a(i, j)));
  return Json{{"rows", a.rows()}, {"cols", a.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const Json& j)
{
  const Index rows = count(j, "rows");
  const Index cols = count(j, "cols");
  const Json& data = field(j, "data");
  if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols)
    throw IoError("data length does not match rows * cols");
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k) a(i, k) = complex_from_json(data[static_cast<std::size_t>(i * cols + k)]);
  return a;
}

Json symbol_to_json(const SymbolFC& f)
{
  Json coeffs = Json::array();
  for (const auto& c : f.coeffs) coeffs.push_back(complex_to_json(c));
  return Json{{"offset", f.offset}, {"coeffs", std::move(coeffs)}};
}

SymbolFC symbol_from_json(const Json& j)
{
  SymbolFC f;
  const Json& off = field(j, "offset");
  if (!off.is_number_integer()) throw IoError("symbol offset must be an integer");
  f.offset = off.get<long>();
  const Json& coeffs = field(j, "coeffs");
  if (!coeffs.is_array()) throw IoError("symbol coeffs must be an array");
  for (const auto& c : coeffs) f.coeffs.push_back(complex_from_json(c));
  return f;
}

std::string witness_kind(const AnyWitness& w)
{
  static const char* names[] = {"sc", "mc", "eae", "eae_special", "eaoe"};
  return names[w.index()];
}

Json instance_to_json(const InstanceFile& inst)
{
  Json spec{{"n", inst.spec.n},
            {"m", inst.spec.m},
            {"nullity", inst.spec.k},
            {"seed", inst.spec.seed},
            {"cond_bound", inst.spec.cond_bound}};
  return Json{{"kind", "instance"},
              {"version", kToolVersion},
              {"dims", Json{{"n", inst.u.rows()}, {"m", inst.v.rows()}}},
              {"spec", std::move(spec)},
              {"matrices", Json{{"U", matrix_to_json(inst.u)}, {"V", matrix_to_json(inst.v)}}}};
}

InstanceFile instance_from_json(const Json& j)
{
  if (!j.is_object() || j.value("kind", "") != "instance") throw IoError("not an instance file");
  InstanceFile inst;
  if (j.contains("spec")) {
    const Json& s = j.at("spec");
    inst.spec.n = count(s, "n");
    inst.spec.m = count(s, "m");
    inst.spec.k = count(s, "nullity");
    inst.spec.seed = field(s, "seed").get<std::uint64_t>();
    inst.spec.cond_bound = number(field(s, "cond_bound"), "cond_bound");
  }
  const Json& m = field(j, "matrices");
  inst.u = mat(m, "U");
  inst.v = mat(m, "V");
  if (inst.u.rows() != inst.u.cols() || inst.v.rows() != inst.v.cols())
    throw IoError("instance matrices must be square");
  return inst;
}

Json witness_to_json(const AnyWitness& any)
{
  return std::visit(
      [](const auto& w) -> Json {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, SCWitness>) {
          return envelope("sc", Json{{"n", w.m.a11.rows()}, {"m", w.m.a22.rows()}},
                          Json{{"A", matrix_to_json(w.m.a11)},
                               {"B", matrix_to_json(w.m.a12)},
                               {"C", matrix_to_json(w.m.a21)},
                               {"D", matrix_to_json(w.m.a22)},
                               {"U", matrix_to_json(w.u)},
                               {"V", matrix_to_json(w.v)}});
        } else if constexpr (std::is_same_v<W, MCWitness>) {
          return envelope("mc", Json{{"dim_x", w.dim_x}, {"dim_y", w.dim_y}},
                          Json{{"Uhat", matrix_to_json(w.uhat)},
                               {"UhatInv", matrix_to_json(w.uhat_inv)},
                               {"U", matrix_to_json(w.u)},
                               {"V", matrix_to_json(w.v)}});
        } else if constexpr (std::is_same_v<W, EAEWitness>) {
          return envelope("eae", Json{{"x0_dim", w.x0_dim}, {"y0_dim", w.y0_dim}},
                          Json{{"U", matrix_to_json(w.u)},
                               {"V", matrix_to_json(w.v)},
                               {"E", matrix_to_json(w.e)},
                               {"F", matrix_to_json(w.f)}});
        } else if constexpr (std::is_same_v<W, EAESpecialWitness>) {
          return envelope("eae_special", Json{{"n", w.n()}, {"m", w.m()}},
                          Json{{"U", matrix_to_json(w.u)},
                               {"V", matrix_to_json(w.v)},
                               {"E", matrix_to_json(w.e)},
                               {"F", matrix_to_json(w.f)},
                               {"Einv", matrix_to_json(w.e_inv)}});
        } else {
          return envelope("eaoe",
                          Json{{"extended_side", to_string(w.extended_side)}, {"ext_dim", w.ext_dim}},
                          Json{{"U", matrix_to_json(w.u)},
                               {"V", matrix_to_json(w.v)},
                               {"E", matrix_to_json(w.e)},
                               {"F", matrix_to_json(w.f)}});
        }
      },
      any);
}

AnyWitness witness_from_json(const Json& j)
{
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw IoError("witness file has no kind tag");
  const std::string kind = j.at("kind").get<std::string>();
  const Json& dims = field(j, "dims");
  const Json& m = field(j, "matrices");
  if (kind == "sc") {
    SCWitness w;
    w.m = Block2x2{mat(m, "A"), mat(m, "B"), mat(m, "C"), mat(m, "D")};
    w.u = mat(m, "U");
    w.v = mat(m, "V");
    try {
      w.m.check_shapes();
    } catch (const Error& e) {
      throw IoError(std::string("sc witness: ") + e.what());
    }
    return w;
  }
  if (kind == "mc") {
    MCWitness w;
    w.uhat = mat(m, "Uhat");
    w.uhat_inv = mat(m, "UhatInv");
    w.u = mat(m, "U");
    w.v = mat(m, "V");
    w.dim_x = count(dims, "dim_x");
    w.dim_y = count(dims, "dim_y");
    return w;
  }
  if (kind == "eae") {
    EAEWitness w;
    w.u = mat(m, "U");
    w.v = mat(m, "V");
    w.e = mat(m, "E");
    w.f = mat(m, "F");
    w.x0_dim = count(dims, "x0_dim");
    w.y0_dim = count(dims, "y0_dim");
    return w;
  }
  if (kind == "eae_special") {
    EAESpecialWitness w;
    w.u = mat(m, "U");
    w.v = mat(m, "V");
    w.e = mat(m, "E");
    w.f = mat(m, "F");
    w.e_inv = mat(m, "Einv");
    const Index n = w.u.rows(), mm = w.v.rows();
    const Index s = n + mm;
    if (w.u.cols() != n || w.v.cols() != mm || w.e.rows() != s || w.e.cols() != s || w.f.rows() != s ||
        w.f.cols() != s || w.e_inv.rows() != s || w.e_inv.cols() != s)
      throw IoError("eae_special witness: matrix sizes are inconsistent");
    return w;
  }
  if (kind == "eaoe") {
    EAOEWitness w;
    w.u = mat(m, "U");
    w.v = mat(m, "V");
    w.e = mat(m, "E");
    w.f = mat(m, "F");
    const std::string side = field(dims, "extended_side").get<std::string>();
    if (side != "U" && side != "V") throw IoError("eaoe witness: extended_side must be U or V");
    w.extended_side = side == "U" ? ExtendedSide::U : ExtendedSide::V;
    w.ext_dim = count(dims, "ext_dim");
    return w;
  }
  throw IoError("unknown witness kind '" + kind + "'");
}

ResidualReport verify_any(const AnyWitness& any, double tol)
{
  return std::visit(
      [tol](const auto& w) -> ResidualReport {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, SCWitness>) return verify_sc(w, tol);
        else if constexpr (std::is_same_v<W, MCWitness>) return verify_mc(w, tol);
        else if constexpr (std::is_same_v<W, EAEWitness>) return verify_eae(w, tol);
        else if constexpr (std::is_same_v<W, EAESpecialWitness>) return verify_eae_special(w, tol);
        else return verify_eaoe(w, tol);
      },
      any);
}

namespace {

// Non-finite residuals (a singular pivot) are written as strings so the file
// stays valid JSON.
Json real(double x)
{
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? Json("nan") : Json(x > 0 ? "inf" : "-inf");
}

}  // namespace

Json residual_report_to_json(const ResidualReport& r)
{
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back(Json{{"label", e.label}, {"residual", real(e.residual)}, {"passed", e.residual <= r.tol}});
  Json diags = Json::array();
  for (const auto& d : r.diagnostics) diags.push_back(Json{{"label", d.label}, {"value", real(d.value)}});
  Json out{{"tol", r.tol},
           {"passed", r.passed()},
           {"max_residual", real(r.max_residual())},
           {"entries", std::move(entries)},
           {"diagnostics", std::move(diags)}};
  if (auto f = r.first_failure()) out["first_failure"] = *f;
  return out;
}

Json fredholm_to_json(const FredholmReport& f)
{
  auto corner = [](const CornerIndex& c) {
    return Json{{"rank", c.rank}, {"kernel", c.kernel_dim}, {"cokernel", c.cokernel_dim}, {"index", c.index()}};
  };
  Json out{{"F11", corner(f.F11)},
           {"F22", corner(f.F22)},
           {"E11", corner(f.E11)},
           {"Ehat11", corner(f.Ehat11)},
           {"extension_dims_match", f.extension_dims_match}};
  out["extension_side"] = f.extension_side ? Json(to_string(*f.extension_side)) : Json(nullptr);
  return out;
}

Json pipeline_report_to_json(const PipelineReport& r)
{
  Json stages = Json::array();
  for (const auto& s : r.stages) {
    Json st = residual_report_to_json(s.report);
    st["name"] = s.name;
    stages.push_back(std::move(st));
  }
  return Json{{"passed", r.passed()},
              {"max_residual", real(r.max_residual())},
              {"stages", std::move(stages)},
              {"indices", fredholm_to_json(r.fredholm)},
              {"dims",
               Json{{"n", r.special.n()},
                    {"m", r.special.m()},
                    {"dim_ker_E11", r.dim_ker_E11},
                    {"dim_H2", r.dim_H2},
                    {"dim_G1", r.dim_G1},
                    {"dim_ker_F22", r.dim_ker_F22},
                    {"x0_dim", r.x0_dim},
                    {"y0_dim", r.y0_dim},
                    {"eaoe_extended_side", to_string(r.eaoe_side)},
                    {"eaoe_ext_dim", r.eaoe_ext_dim}}},
              {"conditioning",
               Json{{"E11_prime", real(r.E11_prime_condition)}, {"F22_prime", real(r.F22_prime_condition)}}},
              {"witness_synthesized", r.synthesized_mc.has_value()}};
}

Json shift_report_to_json(const ShiftComparabilityReport& r)
{
  Json cands = Json::array();
  for (const auto& c : r.candidates)
    cands.push_back(Json{{"orientation", to_string(c.orientation)},
                         {"k", c.k},
                         {"c", c.c ? Json(*c.c) : Json(nullptr)},
                         {"compared", c.compared}});
  Json out{{"k_max", r.k_max},
           {"rank_alpha", r.rank_alpha},
           {"rank_beta", r.rank_beta},
           {"rank_mismatch", r.rank_mismatch()},
           {"candidates", std::move(cands)}};
  if (r.verdict)
    out["verdict"] = Json{{"orientation", to_string(r.verdict->orientation)}, {"k", r.verdict->k}, {"c", *r.verdict->c}};
  else
    out["verdict"] = "incomparable at this truncation";
  return out;
}

Json summability_to_json(const SummabilityReport& r)
{
  Json out{{"p", r.p}, {"total", r.total}, {"tail_fraction", r.tail_fraction}, {"partial_sums", r.partial_sums}};
  out["log_log_slope"] = r.log_log_slope ? Json(*r.log_log_slope) : Json(nullptr);
  if (r.besov)
    out["besov"] = Json{{"alpha", r.besov->alpha},
                        {"order", r.besov->order},
                        {"seminorm_p", real(r.besov->seminorm_p)},
                        {"t_step", r.besov->t_step},
                        {"t_points", r.besov->t_points},
                        {"s_points", r.besov->s_points}};
  return out;
}

Json read_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j)
{
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

void write_sigma_csv(const std::string& path, const RealVector& sigma)
{
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "index,sigma\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index i = 0; i < sigma.size(); ++i) out << i << ',' << sigma(i) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace eaekit
