#include "eaekit/cli.hpp"

#include "eaekit/hankel.hpp"
#include "eaekit/io.hpp"
#include "eaekit/reduction.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace eaekit::cli {

namespace {

std::string timestamp()
{
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

Json stamp(Json report, const std::string& command)
{
  report["command"] = command;
  report["version"] = kToolVersion;
  report["timestamp"] = timestamp();
  return report;
}

void print_report(std::ostream& out, const ResidualReport& r)
{
  for (const auto& e : r.entries)
    out << (e.residual <= r.tol ? "  ok    " : "  FAIL  ") << std::setw(12) << std::scientific
        << std::setprecision(3) << e.residual << "  " << e.label << '\n';
  out << std::defaultfloat;
}

// "2,1" or "1,-0.5:0.25" (re:im) into coefficients.
SymbolFC parse_symbol(const std::string& list, long offset)
{
  SymbolFC f;
  f.offset = offset;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    try {
      std::size_t used = 0;
      const std::string re_s = item.substr(0, colon);
      const double re = std::stod(re_s, &used);
      if (used != re_s.size()) throw std::invalid_argument(item);
      double im = 0.0;
      if (colon != std::string::npos) {
        const std::string im_s = item.substr(colon + 1);
        im = std::stod(im_s, &used);
        if (used != im_s.size()) throw std::invalid_argument(item);
      }
      f.coeffs.emplace_back(re, im);
    } catch (const std::logic_error&) {
      throw IoError("cannot parse symbol coefficient '" + item + "'");
    }
  }
  if (f.coeffs.empty()) throw IoError("symbol has no coefficients");
  return f;
}

struct SynthArgs {
  Index n = 4, m = 4, nullity = 0;
  std::uint64_t seed = 1;
  double cond = 10.0;
  std::string out;
};

struct PipelineArgs {
  std::string in;
  double tol = 1e-8;
  std::string out, report;
  Index trials = 0;
  unsigned jobs = 1;
  SynthArgs gen;
};

struct VerifyArgs {
  std::string witness, kind, report;
  double tol = 1e-8;
};

struct HankelArgs {
  std::string symbol = "2,1";
  long offset = 0;
  Index N = 30, kmax = 3, grid = 1024;
  double p = 2.0, tol = 1e-6;
  bool besov = false;
  std::string out, csv;
};

int run_synth(const SynthArgs& a, std::ostream& out)
{
  InstanceFile inst;
  inst.spec = InstanceSpec{a.n, a.m, a.nullity, a.seed, a.cond};
  const InstancePair pair = random_instance(inst.spec);
  inst.u = pair.u;
  inst.v = pair.v;
  write_json_file(a.out, instance_to_json(inst));
  out << "wrote instance n=" << a.n << " m=" << a.m << " nullity=" << a.nullity << " seed=" << a.seed
      << " to " << a.out << '\n';
  return kExitPass;
}

// A pipeline input is either an instance or a witness from which a
// special-form witness can be derived.
struct PipelineInput {
  Matrix u, v;
  std::optional<EAESpecialWitness> witness;
  std::string source;
};

PipelineInput load_pipeline_input(const std::string& path, double tol)
{
  const Json j = read_json_file(path);
  const std::string kind = j.is_object() ? j.value("kind", "") : "";
  PipelineInput in;
  if (kind == "instance") {
    const InstanceFile inst = instance_from_json(j);
    in.u = inst.u;
    in.v = inst.v;
    in.source = "instance";
    return in;
  }
  const AnyWitness w = witness_from_json(j);
  in.source = kind + " witness";
  if (const auto* sc = std::get_if<SCWitness>(&w)) {
    in.witness = mc_to_eae_special(sc_to_mc(*sc, tol), tol);
  } else if (const auto* mc = std::get_if<MCWitness>(&w)) {
    in.witness = mc_to_eae_special(*mc, tol);
  } else if (const auto* sp = std::get_if<EAESpecialWitness>(&w)) {
    in.witness = *sp;
  }
  // Plain EAE / EAOE witnesses only contribute the pair (U, V).
  std::visit([&](const auto& x) { in.u = x.u; in.v = x.v; }, w);
  return in;
}

void print_pipeline(std::ostream& out, const PipelineReport& rep)
{
  for (const auto& s : rep.stages) {
    out << (s.report.passed() ? "[pass] " : "[FAIL] ") << s.name << "  max residual "
        << std::scientific << std::setprecision(3) << s.report.max_residual() << std::defaultfloat << '\n';
  }
  out << "extension dims (x0, y0) = (" << rep.x0_dim << ", " << rep.y0_dim << "), one-sided extension of "
      << to_string(rep.eaoe_side) << " by " << rep.eaoe_ext_dim << '\n';
}

int run_pipeline_single(const PipelineArgs& a, std::ostream& out, std::ostream& err)
{
  PipelineInput in;
  try {
    in = load_pipeline_input(a.in, a.tol);
  } catch (const ConversionError& e) {
    err << "input witness does not verify: " << e.what() << '\n';
    return kExitFail;
  }
  ReductionOptions opts;
  opts.tol = a.tol;
  try {
    const PipelineReport rep = run_pipeline(in.u, in.v, in.witness, opts);
    print_pipeline(out, rep);
    if (!a.out.empty()) write_json_file(a.out, witness_to_json(rep.sc));
    if (!a.report.empty()) {
      Json j = pipeline_report_to_json(rep);
      j["input"] = Json{{"path", a.in}, {"source", in.source}};
      j["tol"] = a.tol;
      write_json_file(a.report, stamp(std::move(j), "pipeline"));
    }
    return rep.passed() ? kExitPass : kExitFail;
  } catch (const FeasibilityError& e) {
    err << "not equivalent after extension: " << e.what() << '\n';
    if (!a.report.empty())
      write_json_file(a.report, stamp(Json{{"passed", false},
                                           {"failure", e.what()},
                                           {"nullity_u", e.nullity_u()},
                                           {"nullity_v", e.nullity_v()}},
                                      "pipeline"));
    return kExitFail;
  } catch (const ReductionError& e) {
    err << "stage " << e.stage() << " failed: " << e.what() << '\n';
    print_report(err, e.report());
    if (!a.report.empty())
      write_json_file(a.report, stamp(Json{{"passed", false},
                                           {"failed_stage", e.stage()},
                                           {"failure", e.what()},
                                           {"report", residual_report_to_json(e.report())}},
                                      "pipeline"));
    return kExitFail;
  }
}

int run_pipeline_batch(const PipelineArgs& a, std::ostream& out)
{
  struct Outcome {
    bool passed = false;
    double max_residual = 0.0;
    std::string failure;
  };
  std::vector<Outcome> results(static_cast<std::size_t>(a.trials));
  ReductionOptions opts;
  opts.tol = a.tol;

  std::atomic<Index> next{0};
  auto worker = [&] {
    for (Index t = next++; t < a.trials; t = next++) {
      Outcome& o = results[static_cast<std::size_t>(t)];
      try {
        const InstancePair pair =
            random_instance(InstanceSpec{a.gen.n, a.gen.m, a.gen.nullity, a.gen.seed + static_cast<std::uint64_t>(t), a.gen.cond});
        const PipelineReport rep = run_pipeline(pair.u, pair.v, std::nullopt, opts);
        o.passed = rep.passed();
        o.max_residual = rep.max_residual();
      } catch (const Error& e) {
        o.failure = e.what();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(std::max<Index>(a.trials, 1))));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Index passed = 0;
  double worst = 0.0;
  Json trials = Json::array();
  for (std::size_t t = 0; t < results.size(); ++t) {
    const Outcome& o = results[t];
    passed += o.passed ? 1 : 0;
    worst = std::max(worst, o.max_residual);
    Json tj{{"seed", a.gen.seed + t}, {"passed", o.passed}, {"max_residual", o.max_residual}};
    if (!o.failure.empty()) tj["failure"] = o.failure;
    trials.push_back(std::move(tj));
  }
  out << passed << "/" << a.trials << " trials passed, worst residual " << std::scientific
      << std::setprecision(3) << worst << std::defaultfloat << '\n';
  if (!a.report.empty())
    write_json_file(a.report, stamp(Json{{"passed", passed == a.trials},
                                         {"tol", a.tol},
                                         {"n", a.gen.n},
                                         {"m", a.gen.m},
                                         {"nullity", a.gen.nullity},
                                         {"cond_bound", a.gen.cond},
                                         {"trials", std::move(trials)},
                                         {"worst_residual", worst}},
                                    "pipeline"));
  return passed == a.trials ? kExitPass : kExitFail;
}

int run_verify(const VerifyArgs& a, std::ostream& out)
{
  const AnyWitness w = witness_from_json(read_json_file(a.witness));
  const std::string kind = witness_kind(w);
  if (!a.kind.empty() && a.kind != kind)
    throw IoError("--kind " + a.kind + " does not match the file's kind '" + kind + "'");
  ResidualReport r;
  try {
    r = verify_any(w, a.tol);
  } catch (const StructuralError& e) {
    out << "structural failure: " << e.what() << '\n';
    if (!a.report.empty())
      write_json_file(a.report, stamp(Json{{"kind", kind}, {"passed", false}, {"failure", e.what()}}, "verify"));
    return kExitFail;
  }
  out << kind << " witness: " << (r.passed() ? "verified" : "FAILED") << '\n';
  print_report(out, r);
  if (!a.report.empty()) {
    Json j = residual_report_to_json(r);
    j["kind"] = kind;
    j["witness"] = a.witness;
    write_json_file(a.report, stamp(std::move(j), "verify"));
  }
  return r.passed() ? kExitPass : kExitFail;
}

int run_hankel(const HankelArgs& a, std::ostream& out, std::ostream& err)
{
  const SymbolFC f = parse_symbol(a.symbol, a.offset);
  HankelCouplingReport coupling;
  try {
    coupling = mc_residual_hankel(f, a.N, a.grid);
  } catch (const SymbolInversionError& e) {
    err << e.what() << '\n';
    return kExitFail;
  }
  const RealVector sf = singular_values(coupling.f_sections.H);
  const RealVector sg = singular_values(coupling.g_sections.H);
  const ShiftComparabilityReport shift = shift_comparability(sf, sg, a.kmax);
  std::optional<SymbolFC> pf;
  if (a.besov) pf = riesz_projection(f);
  const SummabilityReport sum_f = spectral_summability(sf, a.p, pf);
  const SummabilityReport sum_g = spectral_summability(sg, a.p);

  const bool ok = coupling.interior_residual <= a.tol;
  out << "interior coupling residual " << std::scientific << std::setprecision(3) << coupling.interior_residual
      << " (tol " << a.tol << ")" << std::defaultfloat << '\n';
  out << "sigma_1(H_f) = " << (sf.size() ? sf(0) : 0.0) << ", rank " << numerical_rank(sf) << '\n';
  out << "sigma_1(H_1/f) = " << (sg.size() ? sg(0) : 0.0) << ", rank " << numerical_rank(sg) << '\n';
  if (shift.verdict)
    out << "comparable after shift k = " << shift.verdict->k << " (" << to_string(shift.verdict->orientation)
        << "), c = " << *shift.verdict->c << '\n';
  else
    out << "incomparable at this truncation\n";

  if (!a.csv.empty()) {
    write_sigma_csv(a.csv + "_H_f.csv", sf);
    write_sigma_csv(a.csv + "_H_inv.csv", sg);
  }
  if (!a.out.empty()) {
    Json inv{{"grid", coupling.inverse.grid},
             {"min_modulus", coupling.inverse.min_modulus},
             {"winding", coupling.inverse.winding},
             {"convolution_residual", coupling.inverse.convolution_residual},
             {"symbol", symbol_to_json(coupling.inverse.symbol)}};
    Json j{{"passed", ok},
           {"symbol", symbol_to_json(f)},
           {"N", a.N},
           {"tol", a.tol},
           {"inverse", std::move(inv)},
           {"coupling",
            Json{{"interior_residual", coupling.interior_residual},
                 {"interior_rows", coupling.interior_rows},
                 {"full_residual", coupling.full_residual},
                 {"untruncated_interior_residual", coupling.untruncated_interior_residual}}},
           {"hankel_f", Json{{"rank", numerical_rank(sf)}, {"summability", summability_to_json(sum_f)}}},
           {"hankel_inverse", Json{{"rank", numerical_rank(sg)}, {"summability", summability_to_json(sum_g)}}},
           {"shift_comparability", shift_report_to_json(shift)}};
    write_json_file(a.out, stamp(std::move(j), "hankel"));
  }
  return ok ? kExitPass : kExitFail;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"eaekit: Schur couplings, matricial couplings and equivalence after extension"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "write a random instance (U, V) with common nullity");
  c_synth->add_option("--n", synth.n, "size of U")->check(CLI::NonNegativeNumber);
  c_synth->add_option("--m", synth.m, "size of V")->check(CLI::NonNegativeNumber);
  c_synth->add_option("--nullity", synth.nullity, "common nullity")->check(CLI::NonNegativeNumber);
  c_synth->add_option("--seed", synth.seed, "random seed");
  c_synth->add_option("--cond", synth.cond, "condition bound of the nonzero singular values");
  c_synth->add_option("--out", synth.out, "instance file to write")->required();

  PipelineArgs pipe;
  auto* c_pipe = app.add_subcommand("pipeline", "reduce to a one-sided extension and a Schur coupling");
  auto* o_in = c_pipe->add_option("--in", pipe.in, "instance or sc/mc/eae_special witness file");
  c_pipe->add_option("--tol", pipe.tol, "residual tolerance of every stage");
  c_pipe->add_option("--out", pipe.out, "write the resulting sc witness here");
  c_pipe->add_option("--report", pipe.report, "write a JSON report here");
  auto* o_trials = c_pipe->add_option("--trials", pipe.trials, "batch mode: number of random instances")
                       ->check(CLI::PositiveNumber);
  c_pipe->add_option("--jobs", pipe.jobs, "batch mode: worker threads")->check(CLI::PositiveNumber);
  c_pipe->add_option("--n", pipe.gen.n, "batch mode: size of U");
  c_pipe->add_option("--m", pipe.gen.m, "batch mode: size of V");
  c_pipe->add_option("--nullity", pipe.gen.nullity, "batch mode: common nullity");
  c_pipe->add_option("--seed", pipe.gen.seed, "batch mode: first seed");
  c_pipe->add_option("--cond", pipe.gen.cond, "batch mode: condition bound");
  o_in->excludes(o_trials);

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify", "re-check a witness file");
  c_ver->add_option("--witness", ver.witness, "witness file")->required();
  c_ver->add_option("--kind", ver.kind, "expected kind")
      ->check(CLI::IsMember({"sc", "mc", "eae", "eae_special", "eaoe"}));
  c_ver->add_option("--tol", ver.tol, "residual tolerance");
  c_ver->add_option("--report", ver.report, "write a JSON report here");

  HankelArgs hk;
  auto* c_hk = app.add_subcommand("hankel", "finite-section coupling of H_f and H_1/f");
  c_hk->add_option("--symbol", hk.symbol, "coefficients, comma separated; re:im for complex");
  c_hk->add_option("--symbol-offset", hk.offset, "mode of the first coefficient");
  c_hk->add_option("--N", hk.N, "section size")->check(CLI::PositiveNumber);
  c_hk->add_option("--p", hk.p, "Schatten exponent (>= 1)");
  c_hk->add_option("--kmax", hk.kmax, "largest shift tried")->check(CLI::NonNegativeNumber);
  c_hk->add_option("--grid", hk.grid, "evaluation grid for 1/f")->check(CLI::PositiveNumber);
  c_hk->add_option("--tol", hk.tol, "threshold for the interior coupling residual");
  c_hk->add_flag("--besov", hk.besov, "also estimate the Besov seminorm of P f");
  c_hk->add_option("--out", hk.out, "write a JSON report here");
  c_hk->add_option("--csv", hk.csv, "prefix for singular value CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return code == 0 ? kExitPass : kExitInvalid;
  }

  try {
    if (*c_synth) return run_synth(synth, out);
    if (*c_pipe) {
      if (pipe.trials > 0) return run_pipeline_batch(pipe, out);
      if (pipe.in.empty()) {
        err << "pipeline needs --in or --trials\n" << c_pipe->help();
        return kExitInvalid;
      }
      return run_pipeline_single(pipe, out, err);
    }
    if (*c_ver) return run_verify(ver, out);
    if (*c_hk) return run_hankel(hk, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const PreconditionError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const StructuralError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ShapeError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ConversionError& e) {
    err << "conversion failed: " << e.what() << '\n';
    return kExitFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitInvalid;
}

int dispatch(int argc, const char* const* argv)
{
  return dispatch(argc, argv, std::cout, std::cerr);
}

}  // namespace eaekit::cli
