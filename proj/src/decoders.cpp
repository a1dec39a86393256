#include "seqdec/decoders.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace seqdec {

namespace {

constexpr double kBoundSlack = 1e-9;
constexpr std::size_t kTauSamples = 4096;

double uniform53(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int draw_symbol(std::mt19937_64& rng, std::span<const double> p) {
  double u = uniform53(rng);
  double cum = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    last = static_cast<int>(i);
    cum += p[i];
    if (u < cum) return last;
  }
  if (last < 0) throw std::invalid_argument("draw_symbol: distribution has no support");
  return last;
}

std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

Sequence draw_conditional(std::mt19937_64& rng, const std::vector<std::vector<double>>& cond, const Sequence& given) {
  Sequence s;
  s.reserve(given.size());
  for (int g : given) s.push_back(draw_symbol(rng, cond[static_cast<std::size_t>(g)]));
  return s;
}

void check_symbols(std::size_t symbols) {
  if (symbols > kCodebookSymbolCap) throw CapExceeded("codebook symbols", symbols, kCodebookSymbolCap);
}

Sequence combine(const Sequence& a, const Sequence& b, int nb) {
  Sequence s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] * nb + b[i];
  return s;
}

Matrix product_state(std::span<const Matrix> states, const Sequence& seq) {
  std::vector<Matrix> loc = local_states(states, seq);
  return tensor_product(loc);
}

Index tensor_dim(Index d, int n) {
  std::size_t dim = 1;
  for (int i = 0; i < n; ++i) {
    dim *= static_cast<std::size_t>(d);
    check_dimension(dim, "decoder output space");
  }
  return static_cast<Index>(dim);
}

std::vector<Spectrum> spectra_of(const std::vector<Matrix>& states) {
  std::vector<Spectrum> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(spectrum(s));
  return out;
}

// Support alphabet and the i.i.d. probabilities restricted to it.
std::vector<int> support_of(const std::vector<double>& p) {
  std::vector<int> s;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) s.push_back(static_cast<int>(i));
  return s;
}

// Average of f(seq) over typical sequences of `joint`, weighted by p(seq)
// and normalized by the typical mass. Enumerates the support when it fits
// in `cap`; otherwise draws kTauSamples sequences from a fixed stream.
template <typename F>
double typical_average(const std::vector<double>& joint, int n, double delta, std::size_t cap, F&& f,
                       std::string& source) {
  std::vector<int> sup = support_of(joint);
  std::size_t total = 1;
  bool fits = true;
  for (int i = 0; i < n && fits; ++i) {
    total *= sup.size();
    if (total > cap) fits = false;
  }
  double acc = 0.0, mass = 0.0;
  if (fits) {
    source = "measured";
    for_each_sequence(static_cast<int>(sup.size()), n, cap, [&](const Sequence& idx) {
      Sequence s(idx.size());
      double p = 1.0;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        s[i] = sup[static_cast<std::size_t>(idx[i])];
        p *= joint[static_cast<std::size_t>(s[i])];
      }
      if (!is_typical(s, joint, delta)) return;
      acc += p * f(s);
      mass += p;
    });
  } else {
    source = "sampled";
    std::mt19937_64 rng(0x7461750000000000ULL);
    for (std::size_t k = 0; k < kTauSamples; ++k) {
      Sequence s = draw_sequence(rng, joint, n);
      if (!is_typical(s, joint, delta)) continue;
      acc += f(s);
      mass += 1.0;
    }
  }
  return mass > 0.0 ? std::clamp(acc / mass, 0.0, 1.0) : 1.0;
}

double tau_from_epsilon(double eps) { return std::max(1e-6, 1.0 - std::sqrt(std::clamp(eps, 0.0, 1.0))); }

void fill_names(DecodeReport& r, const std::string& decoder, const DecoderOptions& opt) {
  r.decoder = decoder;
  r.variant = variant_name(opt.variant);
  r.order = opt.variant == Variant::Pgm ? "none" : opt.order.name();
}

DecodeReport dispatch(const DecodeProblem& pb, const DecoderOptions& opt, const Projector* gate) {
  if (opt.variant == Variant::Pgm) return run_pgm(pb);
  auto order = opt.order.permutation(pb.candidates.size());
  return run_sequential(pb, order, opt.variant == Variant::Gated ? gate : nullptr);
}

bool same_prefix(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i)
    if (a[i] != b[i]) return false;
  return true;
}

void summarize(DecodeReport& r) {
  double e = 0.0, pe = 0.0, b = 0.0;
  r.violations = 0;
  for (const auto& m : r.messages) {
    e += m.error;
    pe += m.prefix_error;
    b += m.bound;
    if (!m.bound_holds) ++r.violations;
  }
  const double k = r.messages.empty() ? 1.0 : static_cast<double>(r.messages.size());
  r.average_error = e / k;
  r.average_prefix_error = pe / k;
  r.average_bound = b / k;
}

}  // namespace

// ---------------------------------------------------------------------------
// Seeds and codebooks

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(master) ^ (a + 1)) ^ (b + 1));
}

std::size_t message_count(int n, double rate, std::size_t cap) {
  if (n < 1) throw std::invalid_argument("message_count: n must be >= 1");
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw std::invalid_argument("message_count: rate must be finite and >= 0");
  double v = std::exp2(static_cast<double>(n) * rate);
  if (v > static_cast<double>(cap)) {
    auto req = v >= 1.8e19 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(std::ceil(v));
    throw CapExceeded("message count", req, cap);
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(v - 1e-9)));
}

Sequence draw_sequence(std::mt19937_64& rng, std::span<const double> p, int n) {
  Sequence s(static_cast<std::size_t>(n));
  for (auto& v : s) v = draw_symbol(rng, p);
  return s;
}

Codebook sample_cq_codebook(const CqChannel& ch, double rate, int n, std::uint64_t seed) {
  std::size_t m = message_count(n, rate);
  check_symbols(m * static_cast<std::size_t>(n));
  Codebook cb{n, {rate}, seed, {}, {}, {}};
  std::mt19937_64 rng(derive_seed(seed, 1));
  for (std::size_t i = 0; i < m; ++i) cb.x.push_back(draw_sequence(rng, ch.px.p, n));
  return cb;
}

Codebook sample_mac_codebook(const MacChannel& ch, double r1, double r2, int n, std::uint64_t seed) {
  std::size_t m1 = message_count(n, r1), m2 = message_count(n, r2);
  check_symbols((m1 + m2) * static_cast<std::size_t>(n));
  Codebook cb{n, {r1, r2}, seed, {}, {}, {}};
  std::mt19937_64 g1(derive_seed(seed, 1)), g2(derive_seed(seed, 2));
  for (std::size_t i = 0; i < m1; ++i) cb.x.push_back(draw_sequence(g1, ch.px.p, n));
  for (std::size_t i = 0; i < m2; ++i) cb.y.push_back(draw_sequence(g2, ch.py.p, n));
  return cb;
}

Codebook sample_cmg_codebook(const CmgChannel& ch, double r1, double r2, double r3, int n, std::uint64_t seed) {
  std::size_t m1 = message_count(n, r1), m2 = message_count(n, r2), m3 = message_count(n, r3);
  check_symbols((m1 + m3 + m1 * m2) * static_cast<std::size_t>(n));
  Codebook cb{n, {r1, r2, r3}, seed, {}, {}, {}};
  std::mt19937_64 g1(derive_seed(seed, 1)), g3(derive_seed(seed, 2));
  for (std::size_t i = 0; i < m1; ++i) cb.x.push_back(draw_sequence(g1, ch.px.p, n));
  for (std::size_t i = 0; i < m3; ++i) cb.y.push_back(draw_sequence(g3, ch.py.p, n));
  for (std::size_t i = 0; i < m1; ++i) {
    std::mt19937_64 g2(derive_seed(seed, 3, i));
    std::vector<Sequence> row;
    for (std::size_t j = 0; j < m2; ++j) row.push_back(draw_conditional(g2, ch.pz_given_x, cb.x[i]));
    cb.z.push_back(std::move(row));
  }
  return cb;
}

// ---------------------------------------------------------------------------
// Options

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Sequential: return "seq";
    case Variant::Gated: return "seq-gated";
    case Variant::Pgm: return "pgm";
  }
  return "seq";
}

Variant parse_variant(const std::string& s) {
  if (s == "seq") return Variant::Sequential;
  if (s == "seq-gated") return Variant::Gated;
  if (s == "pgm") return Variant::Pgm;
  throw std::invalid_argument("unknown decoder variant '" + s + "' (expected seq, seq-gated or pgm)");
}

MessageOrder MessageOrder::parse(const std::string& s) {
  MessageOrder o;
  if (s == "lex") return o;
  if (s == "reverse") {
    o.kind = Kind::Reverse;
    return o;
  }
  const std::string pre = "random:";
  if (s.rfind(pre, 0) == 0 && s.size() > pre.size()) {
    const std::string digits = s.substr(pre.size());
    if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }) && digits.size() <= 20) {
      o.kind = Kind::Random;
      o.seed = std::stoull(digits);
      return o;
    }
  }
  throw std::invalid_argument("unknown message order '" + s + "' (expected lex, reverse or random:<seed>)");
}

std::string MessageOrder::name() const {
  switch (kind) {
    case Kind::Lex: return "lex";
    case Kind::Reverse: return "reverse";
    case Kind::Random: return "random:" + std::to_string(seed);
  }
  return "lex";
}

std::vector<std::size_t> MessageOrder::permutation(std::size_t count) const {
  std::vector<std::size_t> p(count);
  std::iota(p.begin(), p.end(), std::size_t{0});
  if (kind == Kind::Reverse) std::reverse(p.begin(), p.end());
  if (kind == Kind::Random) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = count; i > 1; --i) std::swap(p[i - 1], p[bounded(rng, i)]);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Engine

namespace {

std::vector<double> declarations(const Matrix& rho, const std::vector<Projector>& candidates,
                                 const std::vector<std::size_t>& order, const Projector* gate,
                                 std::optional<std::size_t> stop_at) {
  if (order.size() != candidates.size()) throw std::invalid_argument("declaration_distribution: order size mismatch");
  std::vector<double> out(candidates.size() + 1, 0.0);
  Matrix cur = gate ? gate->conjugate(rho) : rho;
  const double total = rho.trace().real();
  double declared = 0.0;
  for (std::size_t j : order) {
    const Projector& p = candidates.at(j);
    if (p.rank() == 0) {
      if (stop_at && *stop_at == j) break;
      continue;
    }
    double q = p.expectation(cur);
    out[j] = q;
    declared += q;
    if (stop_at && *stop_at == j) break;
    cur = p.conjugate_complement(cur);
  }
  out.back() = std::max(0.0, total - declared);
  return out;
}

}  // namespace

std::vector<double> declaration_distribution(const Matrix& rho, const std::vector<Projector>& candidates,
                                             const std::vector<std::size_t>& order, const Projector* gate) {
  return declarations(rho, candidates, order, gate, std::nullopt);
}

DecodeReport run_sequential(const DecodeProblem& pb, const std::vector<std::size_t>& order, const Projector* gate) {
  DecodeReport r;
  if (order.size() != pb.candidates.size()) throw std::invalid_argument("run_sequential: order size mismatch");
  std::vector<std::size_t> position(pb.candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) position.at(order[i]) = i;
  for (const auto& s : pb.sent) {
    MessageResult m;
    m.message = s.label;
    std::optional<std::size_t> stop;
    if (pb.prefix == 0) stop = s.correct;
    auto dist = declarations(s.state, pb.candidates, order, gate, stop);
    const double success = dist[s.correct];
    m.error = std::clamp(1.0 - success, 0.0, 1.0);
    if (pb.prefix == 0) {
      m.prefix_error = m.error;
    } else {
      double ok = 0.0;
      for (std::size_t j = 0; j < pb.candidates.size(); ++j)
        if (same_prefix(pb.labels[j], s.label, pb.prefix)) ok += dist[j];
      m.prefix_error = std::clamp(1.0 - ok, 0.0, 1.0);
      m.abort_probability = dist.back();
    }
    Matrix eff = gate ? gate->conjugate(s.state) : s.state;
    double hostile = 0.0;
    const std::size_t pos = position[s.correct];
    for (std::size_t i = 0; i < pos; ++i) hostile += pb.candidates[order[i]].expectation(eff);
    const Projector& target = pb.candidates[s.correct];
    const double tr = eff.trace().real();
    double lb = seq_success_lower_bound(tr, hostile, tr - target.expectation(eff));
    m.bound = 1.0 - lb;
    m.bound_holds = m.error <= m.bound + kBoundSlack;
    r.messages.push_back(std::move(m));
  }
  summarize(r);
  return r;
}

DecodeReport run_pgm(const DecodeProblem& pb) {
  if (pb.pgm_elements.size() != pb.candidates.size()) throw std::invalid_argument("run_pgm: recipe size mismatch");
  DecodeReport r;
  if (pb.pgm_elements.empty()) return r;
  const Index d = pb.pgm_elements.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& a : pb.pgm_elements) sum += a;
  HermitianEig e = hermitian_eig(0.5 * (sum + sum.adjoint()));
  const double cut = 1e-12 * std::max(1.0, e.values.size() ? e.values(0) : 0.0);
  RealVector inv(e.values.size());
  for (Index i = 0; i < e.values.size(); ++i) inv(i) = e.values(i) > cut ? 1.0 / std::sqrt(e.values(i)) : 0.0;
  Matrix s_inv = e.vectors * inv.asDiagonal() * e.vectors.adjoint();
  for (const auto& s : pb.sent) {
    MessageResult m;
    m.message = s.label;
    Matrix x = s_inv * s.state * s_inv;
    std::vector<double> probs(pb.pgm_elements.size());
    double others = 0.0, self = 0.0;
    for (std::size_t j = 0; j < pb.pgm_elements.size(); ++j) {
      probs[j] = (pb.pgm_elements[j].cwiseProduct(x.transpose())).sum().real();
      double t = (pb.pgm_elements[j].cwiseProduct(s.state.transpose())).sum().real();
      if (j == s.correct) self = t;
      else others += t;
    }
    m.error = std::clamp(1.0 - probs[s.correct], 0.0, 1.0);
    double ok = 0.0, declared = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
      declared += probs[j];
      if (pb.prefix > 0 && same_prefix(pb.labels[j], s.label, pb.prefix)) ok += probs[j];
    }
    m.prefix_error = pb.prefix > 0 ? std::clamp(1.0 - ok, 0.0, 1.0) : m.error;
    m.abort_probability = std::max(0.0, 1.0 - declared);
    m.bound = 2.0 * (1.0 - self) + 4.0 * others;
    m.bound_holds = m.error <= m.bound + kBoundSlack;
    r.messages.push_back(std::move(m));
  }
  summarize(r);
  return r;
}

std::size_t sample_trajectory(std::mt19937_64& rng, const Matrix& rho, const std::vector<Projector>& candidates,
                              const std::vector<std::size_t>& order, const Projector* gate) {
  const std::size_t abort = candidates.size();
  Matrix cur = rho;
  if (gate) {
    double p = gate->expectation(cur);
    if (uniform53(rng) >= p) return abort;
    cur = gate->conjugate(cur) / p;
  }
  for (std::size_t j : order) {
    const Projector& pr = candidates.at(j);
    if (pr.rank() == 0) continue;
    double tr = cur.trace().real();
    double p = pr.expectation(cur) / tr;
    if (uniform53(rng) < p) return j;
    cur = pr.conjugate_complement(cur);
    double left = cur.trace().real();
    if (left <= 1e-300) return abort;
    cur /= left;
  }
  return abort;
}

// ---------------------------------------------------------------------------
// cq

CqDecoder::CqDecoder(CqChannel ch, int n, double delta, DecoderOptions opt)
    : ch_(std::move(ch)), n_(n), delta_(delta), opt_(std::move(opt)) {
  ch_.validate();
  if (n_ < 1) throw std::invalid_argument("CqDecoder: n must be >= 1");
  if (!(delta_ > 0.0)) throw std::invalid_argument("CqDecoder: delta must be positive");
  tensor_dim(ch_.dim(), n_);
  spec_ = spectra_of(ch_.states);
  if (opt_.variant == Variant::Gated) gate_ = typical_projector(ch_.average(), n_, 2 * delta_);
  if (opt_.smoothed_channel) {
    SmoothingModel m{ClassicalDistribution::uniform(1), {ch_.px.p}, ClassicalDistribution::uniform(1), ch_.states};
    smooth_ = std::make_unique<SmoothingContext>(std::move(m), n_, delta_);
  }
}

const Projector& CqDecoder::pi_x(const Sequence& xn) const {
  auto it = cache_.find(xn);
  if (it != cache_.end()) return it->second;
  Projector p = is_typical(xn, ch_.px, delta_) ? cond_typical_projector(spec_, xn, delta_)
                                               : Projector::zero(tensor_dim(ch_.dim(), n_));
  return cache_.emplace(xn, std::move(p)).first->second;
}

Matrix CqDecoder::state(const Sequence& xn) const {
  if (smooth_) {
    Sequence zero(xn.size(), 0);
    return smooth_->smooth(zero, xn, zero).state;
  }
  return product_state(ch_.states, xn);
}

DecodeProblem CqDecoder::problem(const Codebook& cb) const {
  if (cb.n != n_) throw std::invalid_argument("CqDecoder: codebook block length differs");
  DecodeProblem pb;
  for (std::size_t m = 0; m < cb.x.size(); ++m) {
    pb.candidates.push_back(pi_x(cb.x[m]));
    if (opt_.variant == Variant::Pgm) pb.pgm_elements.push_back(pb.candidates.back().dense());
    pb.labels.push_back({m});
    pb.sent.push_back({state(cb.x[m]), m, {m}});
  }
  return pb;
}

DecodeReport CqDecoder::decode(const Codebook& cb) const {
  DecodeReport r = dispatch(problem(cb), opt_, &gate_);
  fill_names(r, "cq", opt_);
  r.tau_source = "unused";
  return r;
}

// ---------------------------------------------------------------------------
// MAC

MacDecoder::MacDecoder(MacChannel ch, int n, double delta, DecoderOptions opt)
    : ch_(std::move(ch)), n_(n), delta_(delta), opt_(std::move(opt)) {
  ch_.validate();
  if (n_ < 1) throw std::invalid_argument("MacDecoder: n must be >= 1");
  if (!(delta_ > 0.0)) throw std::invalid_argument("MacDecoder: delta must be positive");
  tensor_dim(ch_.dim(), n_);
  for (int x = 0; x < ch_.nx(); ++x)
    for (int y = 0; y < ch_.ny(); ++y) joint_.push_back(ch_.px[x] * ch_.py[y]);
  spec_xy_ = spectra_of(ch_.states);
  std::vector<Matrix> ry;
  for (int y = 0; y < ch_.ny(); ++y) ry.push_back(ch_.rho_y(y));
  spec_y_ = spectra_of(ry);
  if (opt_.variant == Variant::Gated) gate_ = typical_projector(ch_.average(), n_, 2 * delta_);
  if (opt_.theoretical_epsilon) {
    tau_eps_ = *opt_.theoretical_epsilon;
    tau_source_ = "theoretical";
  } else {
    const int ny = ch_.ny();
    tau_eps_ = typical_average(
        joint_, n_, delta_, opt_.enumeration_cap,
        [&](const Sequence& s) {
          Sequence yn(s.size());
          for (std::size_t i = 0; i < s.size(); ++i) yn[i] = s[i] % ny;
          auto loc = local_states(ch_.states, s);
          return 1.0 - product_expectation(pi_y(yn), loc);
        },
        tau_source_);
  }
  tau_ = tau_from_epsilon(tau_eps_);
  if (opt_.smoothed_channel) {
    SmoothingModel m{ClassicalDistribution::uniform(1), {ch_.px.p}, ch_.py, ch_.states};
    smooth_ = std::make_unique<SmoothingContext>(std::move(m), n_, delta_);
  }
}

bool MacDecoder::pair_typical(const Sequence& xn, const Sequence& yn) const {
  return is_typical(combine(xn, yn, ch_.ny()), joint_, delta_);
}

const Projector& MacDecoder::pi_xy(const Sequence& xn, const Sequence& yn) const {
  auto key = std::make_pair(xn, yn);
  auto it = cache_xy_.find(key);
  if (it != cache_xy_.end()) return it->second;
  return cache_xy_.emplace(key, cond_typical_projector(spec_xy_, combine(xn, yn, ch_.ny()), delta_)).first->second;
}

const Projector& MacDecoder::pi_y(const Sequence& yn) const {
  auto it = cache_y_.find(yn);
  if (it != cache_y_.end()) return it->second;
  return cache_y_.emplace(yn, cond_typical_projector(spec_y_, yn, 6 * delta_)).first->second;
}

const Projector& MacDecoder::tilde(const Sequence& xn, const Sequence& yn) const {
  auto key = std::make_pair(xn, yn);
  auto it = cache_tilde_.find(key);
  if (it != cache_tilde_.end()) return it->second;
  Projector p = pair_typical(xn, yn) ? intersection_projector(pi_xy(xn, yn), pi_y(yn), tau_).projector
                                     : Projector::zero(tensor_dim(ch_.dim(), n_));
  return cache_tilde_.emplace(key, std::move(p)).first->second;
}

Matrix MacDecoder::state(const Sequence& xn, const Sequence& yn) const {
  if (smooth_) return smooth_->smooth(Sequence(xn.size(), 0), xn, yn).state;
  return product_state(ch_.states, combine(xn, yn, ch_.ny()));
}

DecodeProblem MacDecoder::problem(const Codebook& cb) const {
  if (cb.n != n_) throw std::invalid_argument("MacDecoder: codebook block length differs");
  DecodeProblem pb;
  const bool pgm = opt_.variant == Variant::Pgm;
  for (std::size_t a = 0; a < cb.x.size(); ++a)
    for (std::size_t b = 0; b < cb.y.size(); ++b) {
      const Sequence& xn = cb.x[a];
      const Sequence& yn = cb.y[b];
      const std::size_t idx = pb.candidates.size();
      if (pgm) {
        Matrix e = Matrix::Zero(tensor_dim(ch_.dim(), n_), tensor_dim(ch_.dim(), n_));
        if (pair_typical(xn, yn)) {
          Matrix py = pi_y(yn).dense();
          e = py * pi_xy(xn, yn).dense() * py;
        }
        pb.pgm_elements.push_back(std::move(e));
        pb.candidates.push_back(Projector::zero(tensor_dim(ch_.dim(), n_)));
      } else {
        pb.candidates.push_back(tilde(xn, yn));
      }
      pb.labels.push_back({a, b});
      pb.sent.push_back({state(xn, yn), idx, {a, b}});
    }
  return pb;
}

DecodeReport MacDecoder::decode(const Codebook& cb) const {
  DecodeReport r = dispatch(problem(cb), opt_, &gate_);
  fill_names(r, "ccq-mac", opt_);
  r.tau = tau_;
  r.tau_epsilon = tau_eps_;
  r.tau_source = opt_.variant == Variant::Pgm ? "unused" : tau_source_;
  return r;
}

// ---------------------------------------------------------------------------
// CMG

CmgDecoder::CmgDecoder(CmgChannel ch, int n, double delta, int region, DecoderOptions opt)
    : ch_(std::move(ch)), n_(n), delta_(delta), region_(region), opt_(std::move(opt)) {
  ch_.validate();
  if (n_ < 1) throw std::invalid_argument("CmgDecoder: n must be >= 1");
  if (!(delta_ > 0.0)) throw std::invalid_argument("CmgDecoder: delta must be positive");
  if (region_ != 1 && region_ != 2) throw std::invalid_argument("CmgDecoder: region must be 1 or 2");
  tensor_dim(ch_.dim(), n_);
  const int nx = ch_.nx(), nz = ch_.nz(), ny = ch_.ny();
  const Index d = ch_.dim();
  for (int x = 0; x < nx; ++x)
    for (int z = 0; z < nz; ++z) {
      double pxz = ch_.px[x] * ch_.pz_given_x[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)];
      joint_xz_.push_back(pxz);
      for (int y = 0; y < ny; ++y) joint_xzy_.push_back(pxz * ch_.py[y]);
    }
  std::vector<Matrix> rxy, ry(static_cast<std::size_t>(ny), Matrix::Zero(d, d)), rz;
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      Matrix a = Matrix::Zero(d, d);
      for (int z = 0; z < nz; ++z) a += ch_.pz_given_x[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)] * ch_.state(z, y);
      ry[static_cast<std::size_t>(y)] += ch_.px[x] * a;
      rxy.push_back(std::move(a));
    }
  // rho_y is a fixed combination of PSD terms; it is never zero.
  for (int z = 0; z < nz; ++z) {
    Matrix a = Matrix::Zero(d, d);
    for (int y = 0; y < ny; ++y) a += ch_.py[y] * ch_.state(z, y);
    rz.push_back(std::move(a));
  }
  spec_zy_ = spectra_of(ch_.states);
  spec_xy_ = spectra_of(rxy);
  spec_y_ = spectra_of(ry);
  spec_z_ = spectra_of(rz);
  if (opt_.variant == Variant::Gated) {
    Matrix avg = Matrix::Zero(d, d);
    for (int y = 0; y < ny; ++y) avg += ch_.py[y] * ry[static_cast<std::size_t>(y)];
    gate_ = typical_projector(avg, n_, 2 * delta_);
  }
  if (region_ == 1) {
    if (opt_.theoretical_epsilon) {
      tau_eps_ = *opt_.theoretical_epsilon;
      tau_source_ = "theoretical";
    } else {
      auto split = [nz, ny](const Sequence& s, Sequence& xn, Sequence& zn, Sequence& yn) {
        for (int v : s) xn.push_back(v / (nz * ny)), zn.push_back((v / ny) % nz), yn.push_back(v % ny);
      };
      auto stage = [&](bool second) {
        return typical_average(
            joint_xzy_, n_, delta_, opt_.enumeration_cap,
            [&](const Sequence& s) {
              Sequence xn, zn, yn;
              split(s, xn, zn, yn);
              auto loc = local_states(ch_.states, combine(zn, yn, ny));
              return 1.0 - product_expectation(second ? pi_y(yn) : pi_xy(xn, yn), loc);
            },
            tau_source_);
      };
      tau_eps_ = std::max(stage(false), stage(true));
    }
    tau_ = tau_from_epsilon(tau_eps_);
  } else {
    tau_source_ = "unused";
  }
  if (opt_.smoothed_channel) smooth_ = std::make_unique<SmoothingContext>(SmoothingModel::from_cmg(ch_), n_, delta_);
}

bool CmgDecoder::triple_typical(const Sequence& xn, const Sequence& zn, const Sequence& yn) const {
  return is_typical(combine(combine(xn, zn, ch_.nz()), yn, ch_.ny()), joint_xzy_, delta_);
}

bool CmgDecoder::pair_typical(const Sequence& xn, const Sequence& zn) const {
  return is_typical(combine(xn, zn, ch_.nz()), joint_xz_, delta_);
}

const Projector& CmgDecoder::pi_zy(const Sequence& zn, const Sequence& yn) const {
  auto key = std::make_pair(zn, yn);
  auto it = cache_zy_.find(key);
  if (it != cache_zy_.end()) return it->second;
  return cache_zy_.emplace(key, cond_typical_projector(spec_zy_, combine(zn, yn, ch_.ny()), delta_)).first->second;
}

const Projector& CmgDecoder::pi_xy(const Sequence& xn, const Sequence& yn) const {
  auto key = std::make_pair(xn, yn);
  auto it = cache_xy_.find(key);
  if (it != cache_xy_.end()) return it->second;
  return cache_xy_.emplace(key, cond_typical_projector(spec_xy_, combine(xn, yn, ch_.ny()), 6 * delta_)).first->second;
}

const Projector& CmgDecoder::pi_y(const Sequence& yn) const {
  auto it = cache_y_.find(yn);
  if (it != cache_y_.end()) return it->second;
  return cache_y_.emplace(yn, cond_typical_projector(spec_y_, yn, 6 * delta_)).first->second;
}

const Projector& CmgDecoder::pi_z(const Sequence& zn) const {
  auto it = cache_z_.find(zn);
  if (it != cache_z_.end()) return it->second;
  return cache_z_.emplace(zn, cond_typical_projector(spec_z_, zn, delta_)).first->second;
}

const CmgDecoder::Tilde& CmgDecoder::tilde(const Sequence& xn, const Sequence& zn, const Sequence& yn) const {
  std::vector<Sequence> key{xn, zn, yn};
  auto it = cache_tilde_.find(key);
  if (it != cache_tilde_.end()) return it->second;
  Tilde t;
  if (!triple_typical(xn, zn, yn)) {
    t.projector = Projector::zero(tensor_dim(ch_.dim(), n_));
  } else {
    const Projector& pzy = pi_zy(zn, yn);
    const Projector& pxy = pi_xy(xn, yn);
    const Projector& py = pi_y(yn);
    Projector inner = intersection_projector(pzy, pxy, tau_).projector;
    t.projector = intersection_projector(inner, py, tau_).projector;
    if (t.projector.rank() > 0) {
      Matrix dy = py.dense(), dxy = pxy.dense();
      Matrix chain = dy * dxy * pzy.dense() * dxy * dy / (tau_ * tau_);
      t.sandwich_holds = psd_leq(t.projector.dense(), chain, 1e-8);
    }
  }
  return cache_tilde_.emplace(std::move(key), std::move(t)).first->second;
}

Matrix CmgDecoder::state(const Sequence& xn, const Sequence& zn, const Sequence& yn) const {
  if (smooth_) return smooth_->smooth(xn, zn, yn).state;
  return product_state(ch_.states, combine(zn, yn, ch_.ny()));
}

DecodeProblem CmgDecoder::problem(const Codebook& cb) const {
  if (cb.n != n_) throw std::invalid_argument("CmgDecoder: codebook block length differs");
  if (cb.z.size() != cb.x.size()) throw std::invalid_argument("CmgDecoder: codebook needs z(m1, m2) per x(m1)");
  DecodeProblem pb;
  const bool pgm = opt_.variant == Variant::Pgm;
  const Index dim = tensor_dim(ch_.dim(), n_);
  const std::size_t m1 = cb.x.size(), m2 = cb.z.empty() ? 0 : cb.z.front().size(), m3 = cb.y.size();
  if (region_ == 1) {
    pb.prefix = 2;
    for (std::size_t a = 0; a < m1; ++a)
      for (std::size_t b = 0; b < m2; ++b)
        for (std::size_t c = 0; c < m3; ++c) {
          const Sequence& xn = cb.x[a];
          const Sequence& zn = cb.z[a][b];
          const Sequence& yn = cb.y[c];
          const std::size_t idx = pb.candidates.size();
          if (pgm) {
            Matrix e = Matrix::Zero(dim, dim);
            if (triple_typical(xn, zn, yn)) {
              Matrix dy = pi_y(yn).dense(), dxy = pi_xy(xn, yn).dense();
              e = dy * dxy * pi_zy(zn, yn).dense() * dxy * dy;
            }
            pb.pgm_elements.push_back(std::move(e));
            pb.candidates.push_back(Projector::zero(dim));
          } else {
            pb.candidates.push_back(tilde(xn, zn, yn).projector);
          }
          pb.labels.push_back({a, b, c});
          pb.sent.push_back({state(xn, zn, yn), idx, {a, b, c}});
        }
  } else {
    for (std::size_t a = 0; a < m1; ++a)
      for (std::size_t b = 0; b < m2; ++b) {
        const Sequence& zn = cb.z[a][b];
        Projector p = pair_typical(cb.x[a], zn) ? pi_z(zn) : Projector::zero(dim);
        if (pgm) pb.pgm_elements.push_back(p.dense());
        pb.candidates.push_back(pgm ? Projector::zero(dim) : p);
        pb.labels.push_back({a, b});
      }
    for (std::size_t a = 0; a < m1; ++a)
      for (std::size_t b = 0; b < m2; ++b)
        for (std::size_t c = 0; c < m3; ++c)
          pb.sent.push_back({state(cb.x[a], cb.z[a][b], cb.y[c]), a * m2 + b, {a, b, c}});
  }
  return pb;
}

DecodeReport CmgDecoder::decode(const Codebook& cb) const {
  DecodeProblem pb = problem(cb);
  DecodeReport r = dispatch(pb, opt_, &gate_);
  fill_names(r, region_ == 1 ? "cmg-mac-region1" : "cmg-mac-region2", opt_);
  r.tau = tau_;
  r.tau_epsilon = tau_eps_;
  r.tau_source = opt_.variant == Variant::Pgm ? "unused" : tau_source_;
  if (region_ == 1 && opt_.variant != Variant::Pgm) {
    const std::size_t m2 = cb.z.empty() ? 0 : cb.z.front().size();
    for (std::size_t a = 0; a < cb.x.size(); ++a)
      for (std::size_t b = 0; b < m2; ++b)
        for (const auto& yn : cb.y) {
          ++r.sandwich_checked;
          if (!tilde(cb.x[a], cb.z[a][b], yn).sandwich_holds) ++r.sandwich_violations;
        }
  }
  if (region_ == 2 && cb.rates.size() >= 3) {
    double iyb = ch_.to_cq_state().evaluate("I(Y:B|Z)");
    if (cb.rates[2] < iyb)
      r.warnings.push_back("R3 = " + std::to_string(cb.rates[2]) + " is below I(Y:B|Z) = " + std::to_string(iyb) +
                           "; region 2 assumes sender 3 is not decodable");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Interference channel

namespace {

void require_trivial_q(const IcChannel& ic) {
  if (ic.pq.size() != 1) throw std::invalid_argument("ic decoding supports |Q| = 1 only");
}

// p(a) and p(b|a) from a joint over a * nb + b.
void split_joint(const std::vector<double>& joint, int na, int nb, std::vector<double>& pa,
                 std::vector<std::vector<double>>& pb_given_a) {
  pa.assign(static_cast<std::size_t>(na), 0.0);
  pb_given_a.assign(static_cast<std::size_t>(na), std::vector<double>(static_cast<std::size_t>(nb), 0.0));
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b) pa[static_cast<std::size_t>(a)] += joint[static_cast<std::size_t>(a * nb + b)];
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b) {
      double s = pa[static_cast<std::size_t>(a)];
      pb_given_a[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          s > 0.0 ? joint[static_cast<std::size_t>(a * nb + b)] / s : 1.0 / nb;
    }
}

Matrix reduced(const IcChannel& ic, int x, int y, int receiver) {
  std::array<Index, 2> dims{ic.d1, ic.d2};
  std::array<Index, 1> keep{receiver == 1 ? Index{0} : Index{1}};
  return partial_trace(ic.state(x, y), dims, keep);
}

}  // namespace

CmgChannel ic_receiver_view(const IcChannel& ic, int receiver) {
  ic.validate();
  require_trivial_q(ic);
  if (receiver != 1 && receiver != 2) throw std::invalid_argument("ic_receiver_view: receiver must be 1 or 2");
  std::vector<double> pu, pv;
  std::vector<std::vector<double>> px_u, py_v;
  split_joint(ic.pux_given_q[0], ic.nu, ic.nx, pu, px_u);
  split_joint(ic.pvy_given_q[0], ic.nv, ic.ny, pv, py_v);
  CmgChannel c;
  if (receiver == 1) {
    c.px = ClassicalDistribution(pu);
    c.pz_given_x = px_u;
    c.py = ClassicalDistribution(pv);
    for (int x = 0; x < ic.nx; ++x)
      for (int v = 0; v < ic.nv; ++v) {
        Matrix a = Matrix::Zero(ic.d1, ic.d1);
        for (int y = 0; y < ic.ny; ++y) a += py_v[static_cast<std::size_t>(v)][static_cast<std::size_t>(y)] * reduced(ic, x, y, 1);
        c.states.push_back(std::move(a));
      }
  } else {
    c.px = ClassicalDistribution(pv);
    c.pz_given_x = py_v;
    c.py = ClassicalDistribution(pu);
    for (int y = 0; y < ic.ny; ++y)
      for (int u = 0; u < ic.nu; ++u) {
        Matrix a = Matrix::Zero(ic.d2, ic.d2);
        for (int x = 0; x < ic.nx; ++x) a += px_u[static_cast<std::size_t>(u)][static_cast<std::size_t>(x)] * reduced(ic, x, y, 2);
        c.states.push_back(std::move(a));
      }
  }
  return c;
}

IcCodebook sample_ic_codebook(const IcChannel& ic, std::span<const double> quad, int n, std::uint64_t seed) {
  ic.validate();
  require_trivial_q(ic);
  if (quad.size() != 4) throw std::invalid_argument("sample_ic_codebook: need (R1c, R1p, R2c, R2p)");
  std::vector<double> pu, pv;
  std::vector<std::vector<double>> px_u, py_v;
  split_joint(ic.pux_given_q[0], ic.nu, ic.nx, pu, px_u);
  split_joint(ic.pvy_given_q[0], ic.nv, ic.ny, pv, py_v);
  std::size_t m1c = message_count(n, quad[0]), m1p = message_count(n, quad[1]);
  std::size_t m2c = message_count(n, quad[2]), m2p = message_count(n, quad[3]);
  check_symbols((m1c + m2c + m1c * m1p + m2c * m2p) * static_cast<std::size_t>(n));
  IcCodebook cb;
  cb.n = n;
  cb.rates.assign(quad.begin(), quad.end());
  std::mt19937_64 gu(derive_seed(seed, 1)), gv(derive_seed(seed, 2));
  for (std::size_t i = 0; i < m1c; ++i) cb.u.push_back(draw_sequence(gu, pu, n));
  for (std::size_t i = 0; i < m2c; ++i) cb.v.push_back(draw_sequence(gv, pv, n));
  for (std::size_t i = 0; i < m1c; ++i) {
    std::mt19937_64 g(derive_seed(seed, 3, i));
    std::vector<Sequence> row;
    for (std::size_t j = 0; j < m1p; ++j) row.push_back(draw_conditional(g, px_u, cb.u[i]));
    cb.x.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < m2c; ++i) {
    std::mt19937_64 g(derive_seed(seed, 4, i));
    std::vector<Sequence> row;
    for (std::size_t j = 0; j < m2p; ++j) row.push_back(draw_conditional(g, py_v, cb.v[i]));
    cb.y.push_back(std::move(row));
  }
  return cb;
}

IcDecodeReport ic_decode(const IcChannel& ic, const IcCodebook& cb, double delta, int region1, int region2,
                         DecoderOptions opt) {
  IcDecodeReport out;
  const std::size_t m1c = cb.u.size(), m2c = cb.v.size();
  const std::size_t m1p = cb.x.empty() ? 0 : cb.x.front().size();
  const std::size_t m2p = cb.y.empty() ? 0 : cb.y.front().size();
  std::vector<double> e1, e2;
  for (int receiver = 1; receiver <= 2; ++receiver) {
    const int region = receiver == 1 ? region1 : region2;
    CmgDecoder dec(ic_receiver_view(ic, receiver), cb.n, delta, region, opt);
    Codebook view;
    view.n = cb.n;
    if (receiver == 1) {
      view.rates = {cb.rates[0], cb.rates[1], cb.rates[2]};
      view.x = cb.u;
      view.z = cb.x;
      view.y = cb.v;
    } else {
      view.rates = {cb.rates[2], cb.rates[3], cb.rates[0]};
      view.x = cb.v;
      view.z = cb.y;
      view.y = cb.u;
    }
    DecodeProblem pb = dec.problem(view);
    pb.sent.clear();
    const std::size_t own_p = receiver == 1 ? m1p : m2p;
    const std::size_t other_c = receiver == 1 ? m2c : m1c;
    std::vector<Matrix> locals;
    for (int x = 0; x < ic.nx; ++x)
      for (int y = 0; y < ic.ny; ++y) locals.push_back(reduced(ic, x, y, receiver));
    for (std::size_t a = 0; a < m1c; ++a)
      for (std::size_t b = 0; b < m1p; ++b)
        for (std::size_t c = 0; c < m2c; ++c)
          for (std::size_t d = 0; d < m2p; ++d) {
            Matrix rho = product_state(locals, combine(cb.x[a][b], cb.y[c][d], ic.ny));
            std::size_t oc = receiver == 1 ? a : c, op = receiver == 1 ? b : d, xc = receiver == 1 ? c : a;
            std::size_t correct = region == 1 ? (oc * own_p + op) * other_c + xc : oc * own_p + op;
            pb.sent.push_back({std::move(rho), correct, region == 1 ? std::vector<std::size_t>{oc, op, xc}
                                                                    : std::vector<std::size_t>{oc, op}});
          }
    DecodeReport r = dispatch(pb, opt, &dec.gate());
    fill_names(r, receiver == 1 ? "ccqq-ic-receiver1" : "ccqq-ic-receiver2", opt);
    r.tau = dec.tau();
    r.tau_epsilon = dec.tau_epsilon();
    for (const auto& m : r.messages) (receiver == 1 ? e1 : e2).push_back(m.prefix_error);
    (receiver == 1 ? out.receiver1 : out.receiver2) = std::move(r);
  }
  double u = 0.0;
  for (std::size_t i = 0; i < e1.size(); ++i) u += std::min(1.0, e1[i] + e2[i]);
  out.union_error = e1.empty() ? 0.0 : u / static_cast<double>(e1.size());
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo

MonteCarloSummary monte_carlo(std::size_t trials, std::uint64_t master_seed,
                              const std::function<DecodeReport(std::uint64_t)>& run) {
  MonteCarloSummary s;
  s.trials = trials;
  double bsum = 0.0, psum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    DecodeReport r = run(derive_seed(master_seed, t));
    s.per_trial.push_back(r.average_error);
    bsum += r.average_bound;
    psum += r.average_prefix_error;
    s.violations += r.violations;
    s.sandwich_violations += r.sandwich_violations;
  }
  if (trials == 0) return s;
  const double k = static_cast<double>(trials);
  s.mean = std::accumulate(s.per_trial.begin(), s.per_trial.end(), 0.0) / k;
  s.bound_mean = bsum / k;
  s.prefix_mean = psum / k;
  if (trials > 1) {
    double v = 0.0;
    for (double e : s.per_trial) v += (e - s.mean) * (e - s.mean);
    s.standard_error = std::sqrt(v / (k - 1.0) / k);
  }
  return s;
}

MonteCarloSummary monte_carlo_cq(const CqChannel& ch, double rate, int n, double delta, std::size_t trials,
                                 std::uint64_t seed, DecoderOptions opt) {
  CqDecoder dec(ch, n, delta, std::move(opt));
  return monte_carlo(trials, seed, [&](std::uint64_t s) { return dec.decode(sample_cq_codebook(ch, rate, n, s)); });
}

MonteCarloSummary monte_carlo_mac(const MacChannel& ch, double r1, double r2, int n, double delta,
                                  std::size_t trials, std::uint64_t seed, DecoderOptions opt) {
  MacDecoder dec(ch, n, delta, std::move(opt));
  return monte_carlo(trials, seed, [&](std::uint64_t s) { return dec.decode(sample_mac_codebook(ch, r1, r2, n, s)); });
}

MonteCarloSummary monte_carlo_cmg(const CmgChannel& ch, std::span<const double> rates, int n, double delta,
                                  int region, std::size_t trials, std::uint64_t seed, DecoderOptions opt) {
  if (rates.size() != 3) throw std::invalid_argument("monte_carlo_cmg: need three rates");
  CmgDecoder dec(ch, n, delta, region, std::move(opt));
  std::vector<double> r(rates.begin(), rates.end());
  return monte_carlo(trials, seed,
                     [&](std::uint64_t s) { return dec.decode(sample_cmg_codebook(ch, r[0], r[1], r[2], n, s)); });
}

}  // namespace seqdec
