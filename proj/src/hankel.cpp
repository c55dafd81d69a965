#include "eaekit/hankel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace eaekit {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex()
{
  static std::mutex m;
  return m;
}

// In-place length-n transform; sign is FFTW_FORWARD or FFTW_BACKWARD.
void dft(std::vector<Complex>& data, int sign)
{
  const int n = static_cast<int>(data.size());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

double l1_distance_to_delta(const SymbolFC& h)
{
  double s = 0.0;
  for (long j = h.j_min(); j <= h.j_max(); ++j) s += std::abs(h.at(j) - (j == 0 ? 1.0 : 0.0));
  if (h.empty() || 0 < h.j_min() || 0 > h.j_max()) s += 1.0;
  return s;
}

}  // namespace

Complex SymbolFC::at(long j) const
{
  if (coeffs.empty() || j < j_min() || j > j_max()) return 0.0;
  return coeffs[static_cast<std::size_t>(j - offset)];
}

double SymbolFC::wiener_norm() const
{
  double s = 0.0;
  for (const auto& c : coeffs) s += std::abs(c);
  return s;
}

SymbolFC truncate(const SymbolFC& f, long lo, long hi)
{
  SymbolFC out;
  lo = std::max(lo, f.j_min());
  hi = std::min(hi, f.j_max());
  if (f.empty() || lo > hi) return out;
  out.offset = lo;
  for (long j = lo; j <= hi; ++j) out.coeffs.push_back(f.at(j));
  return out;
}

SymbolFC riesz_projection(const SymbolFC& f)
{
  return truncate(f, 0, f.j_max());
}

SymbolFC convolve(const SymbolFC& a, const SymbolFC& b)
{
  SymbolFC out;
  if (a.empty() || b.empty()) return out;
  out.offset = a.offset + b.offset;
  out.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) out.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  return out;
}

Complex evaluate(const SymbolFC& f, double t)
{
  Complex s = 0.0;
  for (long j = f.j_min(); j <= f.j_max(); ++j)
    s += f.at(j) * std::polar(1.0, static_cast<double>(j) * t);
  return s;
}

SymbolInverse invert_symbol(const SymbolFC& f, Index grid, double tol, double tail)
{
  if (f.empty()) throw SymbolInversionError("invert_symbol: zero symbol", 0.0);
  const Index support = static_cast<Index>(f.coeffs.size());
  const Index G = std::max<Index>({grid, 4 * support, 8});

  // f on the grid t_k = 2 pi k / G.
  std::vector<Complex> values(static_cast<std::size_t>(G), 0.0);
  for (long j = f.j_min(); j <= f.j_max(); ++j) {
    const long b = ((j % G) + G) % G;
    values[static_cast<std::size_t>(b)] += f.at(j);
  }
  dft(values, FFTW_BACKWARD);

  SymbolInverse out;
  out.grid = G;
  out.min_modulus = std::abs(values[0]);
  for (const auto& v : values) out.min_modulus = std::min(out.min_modulus, std::abs(v));
  if (!(out.min_modulus > tol)) {
    std::ostringstream msg;
    msg << "invert_symbol: symbol vanishes on the circle (min |f| = " << out.min_modulus
        << " on a grid of " << G << " points, tol " << tol << ")";
    throw SymbolInversionError(msg.str(), out.min_modulus);
  }

  double turns = 0.0;
  for (Index k = 0; k < G; ++k)
    turns += std::arg(values[static_cast<std::size_t>((k + 1) % G)] / values[static_cast<std::size_t>(k)]);
  out.winding = std::lround(turns / (2.0 * std::numbers::pi));

  for (auto& v : values) v = 1.0 / v;
  dft(values, FFTW_FORWARD);

  // Bin b holds mode b for b <= G/2 and mode b - G above.
  const long half = static_cast<long>(G / 2);
  const long lo_mode = half - static_cast<long>(G) + 1;
  std::vector<Complex> ordered;
  ordered.reserve(static_cast<std::size_t>(G));
  double peak = 0.0;
  for (long j = lo_mode; j <= half; ++j) {
    const long b = ((j % static_cast<long>(G)) + static_cast<long>(G)) % static_cast<long>(G);
    ordered.push_back(values[static_cast<std::size_t>(b)] / static_cast<double>(G));
    peak = std::max(peak, std::abs(ordered.back()));
  }
  const double cut = tail * peak;
  std::size_t first = 0, last = ordered.size();
  while (first < last && std::abs(ordered[first]) < cut) ++first;
  while (last > first && std::abs(ordered[last - 1]) < cut) --last;
  out.symbol.offset = lo_mode + static_cast<long>(first);
  out.symbol.coeffs.assign(ordered.begin() + static_cast<std::ptrdiff_t>(first),
                           ordered.begin() + static_cast<std::ptrdiff_t>(last));

  out.convolution_residual = l1_distance_to_delta(convolve(f, out.symbol));
  return out;
}

Matrix SectionBlocks::reordered() const
{
  Matrix m(2 * N + 1, 2 * N + 1);
  m.topLeftCorner(N, N + 1) = Htilde;
  m.topRightCorner(N, N) = Ttilde;
  m.bottomLeftCorner(N + 1, N + 1) = T;
  m.bottomRightCorner(N + 1, N) = H;
  return m;
}

Matrix SectionBlocks::inverse_layout() const
{
  Matrix m(2 * N + 1, 2 * N + 1);
  m.topLeftCorner(N + 1, N) = H;
  m.topRightCorner(N + 1, N + 1) = T;
  m.bottomLeftCorner(N, N) = Ttilde;
  m.bottomRightCorner(N, N + 1) = Htilde;
  return m;
}

Matrix SectionBlocks::plain() const
{
  Matrix m(2 * N + 1, 2 * N + 1);
  m.topLeftCorner(N, N) = Ttilde;
  m.topRightCorner(N, N + 1) = Htilde;
  m.bottomLeftCorner(N + 1, N) = H;
  m.bottomRightCorner(N + 1, N + 1) = T;
  return m;
}

SectionBlocks build_sections(const SymbolFC& f, Index N)
{
  if (N < 1) throw PreconditionError("build_sections: N must be at least 1");
  SectionBlocks s;
  s.N = N;
  s.Ttilde.resize(N, N);
  s.Htilde.resize(N, N + 1);
  s.H.resize(N + 1, N);
  s.T.resize(N + 1, N + 1);
  for (Index a = 0; a < N; ++a) {
    for (Index b = 0; b < N; ++b) s.Ttilde(a, b) = f.at(static_cast<long>(b - a));
    for (Index j = 0; j <= N; ++j) s.Htilde(a, j) = f.at(static_cast<long>(-(a + j + 1)));
  }
  for (Index i = 0; i <= N; ++i) {
    for (Index j = 0; j < N; ++j) s.H(i, j) = f.at(static_cast<long>(i + j + 1));
    for (Index j = 0; j <= N; ++j) s.T(i, j) = f.at(static_cast<long>(i - j));
  }
  return s;
}

Matrix toeplitz_section(const SymbolFC& f, Index N)
{
  Matrix m(2 * N + 1, 2 * N + 1);
  for (Index a = 0; a < 2 * N + 1; ++a)
    for (Index b = 0; b < 2 * N + 1; ++b) m(a, b) = f.at(static_cast<long>(a - b));
  return m;
}

HankelCouplingReport mc_residual_hankel(const SymbolFC& f, Index N, Index grid)
{
  HankelCouplingReport rep;
  rep.N = N;
  rep.inverse = invert_symbol(f, grid);
  rep.f_sections = build_sections(f, N);
  rep.g_sections = build_sections(rep.inverse.symbol, N);

  const long n = static_cast<long>(N);
  const SymbolFC g_trunc = truncate(rep.inverse.symbol, -n, n);
  const Matrix rf = rep.f_sections.reordered();
  const Matrix rg = build_sections(g_trunc, N).inverse_layout();
  const Matrix rg_full = rep.g_sections.inverse_layout();

  // Row r of the reordered section carries mode -(r+1) for r < N and r - N
  // otherwise. A row is interior when every mode a - j, j in supp f, lies
  // inside -N .. N.
  std::vector<Index> interior;
  for (Index r = 0; r < 2 * N + 1; ++r) {
    const long a = r < N ? -(static_cast<long>(r) + 1) : static_cast<long>(r - N);
    if (a - f.j_max() >= -n && a - f.j_min() <= n) interior.push_back(r);
  }
  if (interior.empty()) {
    std::ostringstream msg;
    msg << "mc_residual_hankel: N = " << N << " leaves no interior rows for a symbol supported on "
        << f.j_min() << " .. " << f.j_max();
    throw PreconditionError(msg.str());
  }
  rep.interior_rows = static_cast<Index>(interior.size());

  const Index dim = 2 * N + 1;
  const Matrix id = Matrix::Identity(dim, dim);
  const Matrix err = rf * rg - id;
  const Matrix err_full = rf * rg_full - id;
  Matrix rows(rep.interior_rows, dim), rows_full(rep.interior_rows, dim);
  for (Index i = 0; i < rep.interior_rows; ++i) {
    rows.row(i) = err.row(interior[static_cast<std::size_t>(i)]);
    rows_full.row(i) = err_full.row(interior[static_cast<std::size_t>(i)]);
  }
  rep.interior_residual = norm2(rows);
  rep.untruncated_interior_residual = norm2(rows_full);
  rep.full_residual = norm2(err);
  return rep;
}

RealVector singular_values(const Matrix& a)
{
  return svd(a).singulars;
}

Index numerical_rank(const RealVector& sv, double rel_zero)
{
  if (sv.size() == 0) return 0;
  const double cut = rel_zero * sv.maxCoeff();
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

std::string to_string(Orientation o)
{
  return o == Orientation::AlphaOverBeta ? "alpha/beta" : "beta/alpha";
}

ShiftComparabilityReport shift_comparability(const RealVector& alpha, const RealVector& beta,
                                             Index k_max, double rel_zero)
{
  auto check = [](const RealVector& s, const char* name) {
    for (Index i = 0; i < s.size(); ++i) {
      if (!(s(i) >= 0.0) || !std::isfinite(s(i)))
        throw PreconditionError(std::string("shift_comparability: ") + name + " has a negative or non-finite entry");
      if (i > 0 && s(i) > s(i - 1) * (1.0 + 1e-12) + 1e-300)
        throw PreconditionError(std::string("shift_comparability: ") + name + " is not non-increasing");
    }
  };
  check(alpha, "alpha");
  check(beta, "beta");
  if (k_max < 0) throw PreconditionError("shift_comparability: k_max must be non-negative");

  ShiftComparabilityReport rep;
  rep.alpha = alpha;
  rep.beta = beta;
  rep.k_max = k_max;
  rep.rank_alpha = numerical_rank(alpha, rel_zero);
  rep.rank_beta = numerical_rank(beta, rel_zero);
  const double za = alpha.size() ? rel_zero * alpha.maxCoeff() : 0.0;
  const double zb = beta.size() ? rel_zero * beta.maxCoeff() : 0.0;

  for (Orientation o : {Orientation::AlphaOverBeta, Orientation::BetaOverAlpha}) {
    const RealVector& num = o == Orientation::AlphaOverBeta ? alpha : beta;
    const RealVector& den = o == Orientation::AlphaOverBeta ? beta : alpha;
    const double zn = o == Orientation::AlphaOverBeta ? za : zb;
    const double zd = o == Orientation::AlphaOverBeta ? zb : za;
    for (Index k = 0; k <= k_max; ++k) {
      ShiftCandidate cand{o, k, std::nullopt, 0};
      for (Index n = 0; n < num.size() && n + k < den.size(); ++n) {
        const double x = num(n), y = den(n + k);
        if (!(x > zn) || !(y > zd)) continue;
        const double r = x / y;
        const double c = std::min(r, 1.0 / r);
        cand.c = cand.c ? std::min(*cand.c, c) : c;
        ++cand.compared;
      }
      rep.candidates.push_back(cand);
    }
  }

  // Largest c wins; ties go to the smaller shift, then to alpha/beta.
  for (const auto& cand : rep.candidates) {
    if (!cand.c) continue;
    if (!rep.verdict || *cand.c > *rep.verdict->c + 1e-15 ||
        (std::abs(*cand.c - *rep.verdict->c) <= 1e-15 && cand.k < rep.verdict->k))
      rep.verdict = cand;
  }
  return rep;
}

namespace {

BesovEstimate besov_quadrature(const SymbolFC& g, double p, const BesovQuadrature& quad)
{
  if (quad.t_points < 2 || quad.s_points < 1)
    throw PreconditionError("spectral_summability: quadrature needs t_points >= 2 and s_points >= 1");
  BesovEstimate est;
  est.alpha = 1.0 / p;
  est.order = static_cast<int>(std::floor(est.alpha)) + 1;
  est.t_points = quad.t_points;
  est.s_points = quad.s_points;
  est.t_step = 2.0 * std::numbers::pi / static_cast<double>(quad.t_points);

  // D_t^n g has coefficients (e^{ijt} - 1)^n g^(j).
  double integral = 0.0;
  for (Index k = 0; k < quad.t_points; ++k) {
    const double t = -std::numbers::pi + (static_cast<double>(k) + 0.5) * est.t_step;
    SymbolFC diff = g;
    for (long j = g.j_min(); j <= g.j_max(); ++j)
      diff.coeffs[static_cast<std::size_t>(j - g.offset)] *=
          std::pow(std::polar(1.0, static_cast<double>(j) * t) - 1.0, est.order);
    double norm_p = 0.0;
    for (Index s = 0; s < quad.s_points; ++s) {
      const double x = 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(quad.s_points);
      norm_p += std::pow(std::abs(evaluate(diff, x)), p);
    }
    norm_p /= static_cast<double>(quad.s_points);
    integral += std::pow(std::abs(t), -1.0 - est.alpha * p) * norm_p * est.t_step;
  }
  est.seminorm_p = integral;
  return est;
}

}  // namespace

SummabilityReport spectral_summability(const RealVector& sv, double p,
                                       const std::optional<SymbolFC>& besov_symbol,
                                       const BesovQuadrature& quad)
{
  if (!(p >= 1.0)) throw PreconditionError("spectral_summability: p must be at least 1");
  SummabilityReport rep;
  rep.p = p;
  double acc = 0.0;
  for (Index i = 0; i < sv.size(); ++i) {
    acc += std::pow(std::abs(sv(i)), p);
    rep.partial_sums.push_back(acc);
  }
  rep.total = acc;
  if (acc > 0.0) {
    const Index half = sv.size() / 2;
    const double head = half > 0 ? rep.partial_sums[static_cast<std::size_t>(half - 1)] : 0.0;
    rep.tail_fraction = (acc - head) / acc;
  }

  std::vector<double> xs, ys;
  const double cut = sv.size() ? 1e-12 * sv.maxCoeff() : 0.0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) {
      xs.push_back(std::log(static_cast<double>(i + 1)));
      ys.push_back(std::log(sv(i)));
    }
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    if (den > 0.0) rep.log_log_slope = (n * sxy - sx * sy) / den;
  }

  if (besov_symbol) rep.besov = besov_quadrature(*besov_symbol, p, quad);
  return rep;
}

}  // namespace eaekit
