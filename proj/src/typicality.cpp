#include "seqdec/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace seqdec {

namespace {

constexpr double kSnapTol = 1e-12;

std::string seq_string(const Sequence& s) {
  std::string out;
  for (int v : s) out += std::to_string(v);
  return out;
}

// Sequence of length n whose typicality counts are prescribed per symbol;
// enumerates d^n multi-indices and keeps the typical ones.
std::vector<Index> enumerate_typical(const RealVector& q, int n, double delta) {
  const int d = static_cast<int>(q.size());
  std::vector<double> p(q.data(), q.data() + q.size());
  std::vector<Index> kept;
  Index linear = 0;
  for_each_sequence(d, n, dimension_cap(), [&](const Sequence& s) {
    if (is_typical(s, p, delta)) kept.push_back(linear);
    ++linear;
  });
  return kept;
}

}  // namespace

ClassicalDistribution::ClassicalDistribution(std::vector<double> probs, std::vector<std::string> symbols)
    : p(std::move(probs)), names(std::move(symbols)) {
  if (p.empty()) throw std::invalid_argument("ClassicalDistribution: empty alphabet");
  if (!names.empty() && names.size() != p.size())
    throw std::invalid_argument("ClassicalDistribution: names and probabilities differ in length");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("ClassicalDistribution: negative or non-finite probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("ClassicalDistribution: probabilities do not sum to 1");
}

double ClassicalDistribution::p_min() const {
  double m = 1.0;
  for (double v : p)
    if (v > 0.0) m = std::min(m, v);
  return m;
}

double ClassicalDistribution::entropy() const {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

double ClassicalDistribution::sequence_probability(const Sequence& s) const {
  double prob = 1.0;
  for (int x : s) prob *= p[static_cast<std::size_t>(x)];
  return prob;
}

ClassicalDistribution ClassicalDistribution::uniform(int k) {
  return ClassicalDistribution(std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
}

double TypicalityParams::log_context() const {
  double l = 0.0;
  for (Index d : context_dims) l += std::log2(static_cast<double>(d));
  return l;
}

double TypicalityParams::c(double d) const { return c_delta(d, log_context()); }

double c_delta(double delta, double log2_context) {
  return delta * log2_context - delta * std::log2(delta);
}

namespace {

double threshold_real(const TypicalityParams& t, TypicalityBound which, double eps) {
  if (!(t.delta > 0.0)) throw std::invalid_argument("typicality_threshold_n: delta must be positive");
  const double log_term = t.log_context() - std::log2(eps);
  switch (which) {
    case TypicalityBound::Set:
      if (!(t.p_min > 0.0)) throw std::invalid_argument("typicality_threshold_n: p_min must be positive");
      return 2.0 / t.p_min / (t.delta * t.delta) * log_term;
    case TypicalityBound::Projector:
      if (!(t.q_min > 0.0)) throw std::invalid_argument("typicality_threshold_n: q_min must be positive");
      return 2.0 / t.q_min / (t.delta * t.delta) * log_term;
    case TypicalityBound::Conditional:
    case TypicalityBound::Averaged:
    case TypicalityBound::Smoothing:
      if (!(t.p_min > 0.0) || !(t.q_min > 0.0))
        throw std::invalid_argument("typicality_threshold_n: p_min and q_min must be positive");
      return 4.0 / (t.delta * t.delta) / t.p_min / t.q_min * log_term;
  }
  return 0.0;
}

double threshold_slope(const TypicalityParams& t, TypicalityBound which) {
  // n = slope * (log_context - log2 eps)
  switch (which) {
    case TypicalityBound::Set: return 2.0 / t.p_min / (t.delta * t.delta);
    case TypicalityBound::Projector: return 2.0 / t.q_min / (t.delta * t.delta);
    default: return 4.0 / (t.delta * t.delta) / t.p_min / t.q_min;
  }
}

}  // namespace

std::size_t typicality_threshold_n(const TypicalityParams& params, TypicalityBound which) {
  double x = threshold_real(params, which, params.epsilon);
  if (x <= 0.0) return 1;
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

double implied_epsilon(const TypicalityParams& params, TypicalityBound which, std::size_t n) {
  threshold_real(params, which, 0.5);  // validates inputs
  double slope = threshold_slope(params, which);
  return std::exp2(params.log_context() - static_cast<double>(n) / slope);
}

std::vector<int> symbol_counts(const Sequence& s, int alphabet_size) {
  std::vector<int> c(static_cast<std::size_t>(alphabet_size), 0);
  for (int x : s) {
    if (x < 0 || x >= alphabet_size) throw std::invalid_argument("symbol out of alphabet");
    ++c[static_cast<std::size_t>(x)];
  }
  return c;
}

bool is_typical(const Sequence& s, const std::vector<double>& p, double delta) {
  const double n = static_cast<double>(s.size());
  std::vector<int> c = symbol_counts(s, static_cast<int>(p.size()));
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) {
      if (c[x] != 0) return false;
      continue;
    }
    if (std::abs(c[x] - n * p[x]) > n * p[x] * delta + 1e-12) return false;
  }
  return true;
}

bool is_typical(const Sequence& s, const ClassicalDistribution& p, double delta) {
  return is_typical(s, p.p, delta);
}

std::vector<Sequence> typical_set(const ClassicalDistribution& p, int n, double delta, std::size_t cap) {
  if (n < 1) throw std::invalid_argument("typical_set: n must be positive");
  std::vector<Sequence> out;
  for_each_sequence(p.size(), n, cap, [&](const Sequence& s) {
    if (is_typical(s, p.p, delta)) out.push_back(s);
  });
  return out;
}

double Spectrum::q_min() const {
  double m = 1.0;
  for (Index i = 0; i < q.size(); ++i)
    if (q(i) > 0.0) m = std::min(m, q(i));
  return m;
}

double Spectrum::entropy() const {
  double h = 0.0;
  for (Index i = 0; i < q.size(); ++i)
    if (q(i) > 0.0) h -= q(i) * std::log2(q(i));
  return h;
}

Spectrum spectrum(const Matrix& rho) {
  HermitianEig e = hermitian_eig(rho);
  Spectrum s;
  s.basis = std::move(e.vectors);
  s.q = e.values;
  const Index d = s.q.size();
  Index start = 0;
  while (start < d) {
    Index end = start + 1;
    while (end < d && std::abs(e.values(end - 1) - e.values(end)) <= kSnapTol) ++end;
    if (end - start > 1) {
      double mean = e.values.segment(start, end - start).mean();
      s.q.segment(start, end - start).setConstant(mean);
      s.degenerate = true;
    }
    start = end;
  }
  for (Index i = 0; i < d; ++i)
    if (s.q(i) <= kSnapTol) s.q(i) = 0.0;
  return s;
}

std::vector<Index> typical_indices(const RealVector& q, int n, double delta) {
  return enumerate_typical(q, n, delta);
}

Projector typical_projector(const Spectrum& s, int n, double delta) {
  if (n < 1) throw std::invalid_argument("typical_projector: n must be positive");
  std::size_t dim = 1;
  for (int i = 0; i < n; ++i) {
    dim *= static_cast<std::size_t>(s.basis.rows());
    check_dimension(dim, "typical_projector");
  }
  std::vector<Matrix> factors(static_cast<std::size_t>(n), s.basis);
  return Projector::structured(std::move(factors), enumerate_typical(s.q, n, delta));
}

Projector typical_projector(const Matrix& rho, int n, double delta) {
  return typical_projector(spectrum(rho), n, delta);
}

Projector cond_typical_projector(std::span<const Spectrum> spectra, const Sequence& xn, double delta) {
  const int n = static_cast<int>(xn.size());
  if (n < 1) throw std::invalid_argument("cond_typical_projector: empty sequence");
  const int k = static_cast<int>(spectra.size());
  std::vector<std::vector<int>> positions(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) {
    int x = xn[static_cast<std::size_t>(i)];
    if (x < 0 || x >= k) throw std::invalid_argument("cond_typical_projector: symbol out of range");
    positions[static_cast<std::size_t>(x)].push_back(i);
  }
  std::vector<Matrix> factors;
  std::vector<Index> fd;
  std::size_t dim = 1;
  for (int i = 0; i < n; ++i) {
    const Matrix& b = spectra[static_cast<std::size_t>(xn[static_cast<std::size_t>(i)])].basis;
    factors.push_back(b);
    fd.push_back(b.rows());
    dim *= static_cast<std::size_t>(b.rows());
    check_dimension(dim, "cond_typical_projector");
  }
  std::vector<Index> stride(static_cast<std::size_t>(n));
  Index s = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[static_cast<std::size_t>(i)] = s;
    s *= fd[static_cast<std::size_t>(i)];
  }
  // Per symbol, the offsets contributed by each kept block multi-index.
  std::vector<Index> kept{0};
  for (int x = 0; x < k; ++x) {
    const auto& pos = positions[static_cast<std::size_t>(x)];
    if (pos.empty()) continue;
    const Spectrum& sp = spectra[static_cast<std::size_t>(x)];
    const int N = static_cast<int>(pos.size());
    const Index d = sp.q.size();
    std::vector<Index> block = enumerate_typical(sp.q, N, delta);
    std::vector<Index> offs;
    offs.reserve(block.size());
    for (Index b : block) {
      Index rem = b, off = 0;
      for (int j = N - 1; j >= 0; --j) {
        off += (rem % d) * stride[static_cast<std::size_t>(pos[static_cast<std::size_t>(j)])];
        rem /= d;
      }
      offs.push_back(off);
    }
    std::vector<Index> next;
    next.reserve(kept.size() * offs.size());
    for (Index a : kept)
      for (Index o : offs) next.push_back(a + o);
    kept = std::move(next);
    if (kept.empty()) break;
  }
  return Projector::structured(std::move(factors), std::move(kept));
}

Projector cond_typical_projector(std::span<const Matrix> states, const Sequence& xn, double delta) {
  std::vector<Spectrum> sp;
  sp.reserve(states.size());
  for (const auto& s : states) sp.push_back(spectrum(s));
  return cond_typical_projector(sp, xn, delta);
}

double product_eigenvalue(std::span<const Spectrum> spectra, const Sequence& xn, Index multi_index) {
  double v = 1.0;
  Index rem = multi_index;
  for (int i = static_cast<int>(xn.size()) - 1; i >= 0; --i) {
    const Spectrum& sp = spectra[static_cast<std::size_t>(xn[static_cast<std::size_t>(i)])];
    Index d = sp.q.size();
    v *= sp.q(rem % d);
    rem /= d;
  }
  return v;
}

std::vector<Matrix> local_states(std::span<const Matrix> states, const Sequence& xn) {
  std::vector<Matrix> out;
  out.reserve(xn.size());
  for (int x : xn) out.push_back(states[static_cast<std::size_t>(x)]);
  return out;
}

// ---------------------------------------------------------------------------
// Bound checkers

namespace {

// Mass check against the theoretical epsilon when the threshold is met, else
// against the epsilon the threshold implies at this n (asserted only when it
// is below 1/2, the range where the bounds are stated).
Check mass_check(const std::string& name, double mass, const TypicalityParams& params, TypicalityBound which,
                 std::size_t n) {
  std::size_t need = typicality_threshold_n(params, which);
  if (n >= need)
    return make_check(name, mass, Relation::GreaterEq, 1.0 - params.epsilon, true, 1e-12,
                      "n meets threshold " + std::to_string(need));
  double eps_n = implied_epsilon(params, which, n);
  if (eps_n < 0.5)
    return make_check(name, mass, Relation::GreaterEq, 1.0 - eps_n, true, 1e-12,
                      "epsilon implied by n");
  return make_check(name, mass, Relation::GreaterEq, 1.0 - params.epsilon, false, 1e-12,
                    "n below threshold " + std::to_string(need) + "; informative");
}

}  // namespace

Report verify_typical_set(const ClassicalDistribution& p, int n, const TypicalityParams& params_in) {
  TypicalityParams params = params_in;
  if (params.context_dims.empty()) params.context_dims = {p.size()};
  params.p_min = p.p_min();
  const double h = p.entropy();
  const double c = params.c();
  std::vector<Sequence> ts = typical_set(p, n, params.delta);
  double mass = 0.0, min_p = 1.0, max_p = 0.0;
  for (const auto& s : ts) {
    double q = p.sequence_probability(s);
    mass += q;
    min_p = std::min(min_p, q);
    max_p = std::max(max_p, q);
  }
  Report r;
  r.title = "typical-set";
  r.add(mass_check("typical-set.mass", mass, params, TypicalityBound::Set, static_cast<std::size_t>(n)));
  if (!ts.empty()) {
    r.add(make_check("typical-set.prob_lower", std::log2(min_p), Relation::GreaterEq, -n * (h + c), true, 1e-9,
                     "log2 of smallest typical sequence probability"));
    r.add(make_check("typical-set.prob_upper", std::log2(max_p), Relation::LessEq, -n * (h - c), true, 1e-9,
                     "log2 of largest typical sequence probability"));
  }
  r.add(make_check("typical-set.cardinality", static_cast<double>(ts.size()), Relation::LessEq,
                   std::exp2(n * (h + c)), true, 1e-9));
  return r;
}

Report verify_typical_projector(const Matrix& rho, int n, const TypicalityParams& params_in) {
  Spectrum sp = spectrum(rho);
  TypicalityParams params = params_in;
  if (params.context_dims.empty()) params.context_dims = {rho.rows()};
  params.q_min = sp.q_min();
  const double h = sp.entropy();
  const double c = params.c();
  std::vector<Index> kept = enumerate_typical(sp.q, n, params.delta);
  Sequence zeros(static_cast<std::size_t>(n), 0);
  std::span<const Spectrum> one(&sp, 1);
  double trace = 0.0, min_e = 1.0, max_e = 0.0;
  for (Index k : kept) {
    double e = product_eigenvalue(one, zeros, k);
    trace += e;
    min_e = std::min(min_e, e);
    max_e = std::max(max_e, e);
  }
  Report r;
  r.title = "typical-projector";
  r.add(mass_check("typical-projector.trace", trace, params, TypicalityBound::Projector, static_cast<std::size_t>(n)));
  if (!kept.empty()) {
    r.add(make_check("typical-projector.sandwich_lower", std::log2(min_e), Relation::GreaterEq, -n * (h + c), true, 1e-9,
                     "log2 of smallest eigenvalue on support"));
    r.add(make_check("typical-projector.sandwich_upper", std::log2(max_e), Relation::LessEq, -n * (h - c), true, 1e-9,
                     "log2 of largest eigenvalue on support"));
  }
  r.add(make_check("typical-projector.rank", static_cast<double>(kept.size()), Relation::LessEq, std::exp2(n * (h + c)),
                   true, 1e-9));
  return r;
}

Report verify_conditional_projector(const ClassicalDistribution& p, std::span<const Matrix> states, int n,
                    const TypicalityParams& params_in) {
  if (static_cast<int>(states.size()) != p.size())
    throw std::invalid_argument("verify_conditional_projector: one state per symbol required");
  std::vector<Spectrum> sp;
  for (const auto& s : states) sp.push_back(spectrum(s));
  TypicalityParams params = params_in;
  if (params.context_dims.empty()) params.context_dims = {states[0].rows(), p.size()};
  params.p_min = p.p_min();
  double qmin = 1.0, hbx = 0.0;
  for (int x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) continue;
    qmin = std::min(qmin, sp[static_cast<std::size_t>(x)].q_min());
    hbx += p[x] * sp[static_cast<std::size_t>(x)].entropy();
  }
  params.q_min = qmin;
  const double c = params.c();
  double worst_trace = 1.0, worst_lower = 1e300, worst_upper = 1e300, worst_rank = 1e300;
  double lower_at = 0, upper_at = 0, rank_at = 0;
  std::size_t count = 0;
  for (const auto& xn : typical_set(p, n, params.delta)) {
    Projector pr = cond_typical_projector(sp, xn, params.delta);
    double trace = 0.0, min_e = 1.0, max_e = 0.0;
    for (Index k : pr.indices()) {
      double e = product_eigenvalue(sp, xn, k);
      trace += e;
      min_e = std::min(min_e, e);
      max_e = std::max(max_e, e);
    }
    worst_trace = std::min(worst_trace, trace);
    if (pr.rank() > 0) {
      double sl = std::log2(min_e) + n * (hbx + c);
      if (sl < worst_lower) { worst_lower = sl; lower_at = std::log2(min_e); }
      double su = -n * (hbx - c) - std::log2(max_e);
      if (su < worst_upper) { worst_upper = su; upper_at = std::log2(max_e); }
    }
    double sr = std::exp2(n * (hbx + c)) - static_cast<double>(pr.rank());
    if (sr < worst_rank) { worst_rank = sr; rank_at = static_cast<double>(pr.rank()); }
    ++count;
  }
  Report r;
  r.title = "conditional-projector";
  if (count == 0) {
    r.add(make_check("conditional-projector.typical_inputs", 0.0, Relation::GreaterEq, 1.0, false, 0.0, "no typical inputs"));
    return r;
  }
  r.add(mass_check("conditional-projector.trace", worst_trace, params, TypicalityBound::Conditional, static_cast<std::size_t>(n)));
  if (worst_lower < 1e300) {
    r.add(make_check("conditional-projector.sandwich_lower", lower_at, Relation::GreaterEq, lower_at - worst_lower, true, 1e-9));
    r.add(make_check("conditional-projector.sandwich_upper", upper_at, Relation::LessEq, upper_at + worst_upper, true, 1e-9));
  }
  r.add(make_check("conditional-projector.rank", rank_at, Relation::LessEq, rank_at + worst_rank, true, 1e-9));
  return r;
}

AveragedTraces averaged_projector_traces(const ClassicalDistribution& px, const ClassicalDistribution& py,
                       std::span<const Matrix> states_xy, int n, double delta) {
  const int kx = px.size(), ky = py.size();
  if (static_cast<int>(states_xy.size()) != kx * ky)
    throw std::invalid_argument("averaged_projector_traces: states must be indexed by x*|Y|+y");
  const Index d = states_xy[0].rows();
  Matrix avg = Matrix::Zero(d, d);
  std::vector<Matrix> rho_x(static_cast<std::size_t>(kx), Matrix::Zero(d, d));
  std::vector<double> joint(static_cast<std::size_t>(kx * ky));
  for (int x = 0; x < kx; ++x)
    for (int y = 0; y < ky; ++y) {
      double w = px[x] * py[y];
      joint[static_cast<std::size_t>(x * ky + y)] = w;
      avg += w * states_xy[static_cast<std::size_t>(x * ky + y)];
      rho_x[static_cast<std::size_t>(x)] += py[y] * states_xy[static_cast<std::size_t>(x * ky + y)];
    }
  std::vector<Spectrum> sp_x, sp_xy;
  for (const auto& m : rho_x) sp_x.push_back(spectrum(m));
  for (const auto& m : states_xy) sp_xy.push_back(spectrum(m));
  Projector pi_avg = typical_projector(avg, n, 2.0 * delta);
  std::map<Sequence, Projector> cond_cache;
  AveragedTraces out;
  ClassicalDistribution pj(joint);
  for_each_sequence(kx * ky, n, kDefaultEnumerationCap, [&](const Sequence& s) {
    if (!is_typical(s, joint, delta)) return;
    out.typical_mass += pj.sequence_probability(s);
    AveragedTracePair pair;
    for (int v : s) {
      pair.xn.push_back(v / ky);
      pair.yn.push_back(v % ky);
    }
    std::vector<Matrix> locals = local_states(states_xy, s);
    pair.trace_avg = product_expectation(pi_avg, locals);
    auto it = cond_cache.find(pair.xn);
    if (it == cond_cache.end()) it = cond_cache.emplace(pair.xn, cond_typical_projector(sp_x, pair.xn, 6.0 * delta)).first;
    pair.trace_cond = product_expectation(it->second, locals);
    Projector self = cond_typical_projector(sp_xy, s, delta);
    out.worst_self_capture = std::min(out.worst_self_capture, product_expectation(self, locals));
    out.pairs.push_back(std::move(pair));
  });
  out.measured_epsilon = std::max(1.0 - out.typical_mass, 1.0 - out.worst_self_capture);
  return out;
}

Report verify_averaged_projector(const ClassicalDistribution& px, const ClassicalDistribution& py,
                    std::span<const Matrix> states_xy, int n, const TypicalityParams& params) {
  AveragedTraces data = averaged_projector_traces(px, py, states_xy, n, params.delta);
  Report r;
  r.title = "averaged-projector";
  const double bound = 1.0 - data.measured_epsilon;
  r.add(make_check("averaged-projector.typical_pairs", static_cast<double>(data.pairs.size()), Relation::GreaterEq, 1.0, true,
                   0.0));
  r.add(make_check("averaged-projector.measured_epsilon", data.measured_epsilon, Relation::LessEq, 1.0, false, 0.0,
                   "max(1 - typical mass, 1 - worst conditional capture)"));
  for (const auto& pr : data.pairs) {
    std::string tag = seq_string(pr.xn) + "," + seq_string(pr.yn);
    r.add(make_check("averaged-projector.avg[" + tag + "]", pr.trace_avg, Relation::GreaterEq, bound, true, 1e-12));
    r.add(make_check("averaged-projector.cond[" + tag + "]", pr.trace_cond, Relation::GreaterEq, bound, true, 1e-12));
  }
  return r;
}

}  // namespace seqdec
