#include "seqdec/smoothing.hpp"

#include <algorithm>
#include <cmath>

namespace seqdec {

namespace {

constexpr double kZeroDenominator = 1e-14;

}  // namespace

// ---------------------------------------------------------------------------
// SmoothingModel

double SmoothingModel::joint(int x, int z, int y) const {
  return px[x] * pz_given_x[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)] * py[y];
}

void SmoothingModel::validate() const {
  if (static_cast<int>(pz_given_x.size()) != nx()) throw std::invalid_argument("smoothing model: p(z|x) needs one row per x");
  for (const auto& row : pz_given_x) {
    if (static_cast<int>(row.size()) != nz()) throw std::invalid_argument("smoothing model: ragged p(z|x)");
    double s = 0.0;
    for (double v : row) {
      if (!(v >= 0.0)) throw std::invalid_argument("smoothing model: negative probability");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("smoothing model: p(z|x) row does not sum to 1");
  }
  if (states.size() != static_cast<std::size_t>(nx() * nz() * ny()))
    throw std::invalid_argument("smoothing model: one state per (x, z, y) required");
  for (const auto& s : states) {
    if (s.rows() != dim()) throw std::invalid_argument("smoothing model: states differ in dimension");
    if (auto err = DensityOperator::validate(s, false, 1e-8)) throw std::invalid_argument("smoothing model: " + *err);
  }
}

Matrix SmoothingModel::rho_xz(int x, int z) const {
  Matrix a = Matrix::Zero(dim(), dim());
  for (int y = 0; y < ny(); ++y) a += py[y] * state(x, z, y);
  return a;
}

Matrix SmoothingModel::rho_x(int x) const {
  Matrix a = Matrix::Zero(dim(), dim());
  for (int z = 0; z < nz(); ++z) a += pz_given_x[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)] * rho_xz(x, z);
  return a;
}

Matrix SmoothingModel::average() const {
  Matrix a = Matrix::Zero(dim(), dim());
  for (int x = 0; x < nx(); ++x) a += px[x] * rho_x(x);
  return a;
}

double SmoothingModel::h_b_given_xz() const {
  double h = 0.0;
  for (int x = 0; x < nx(); ++x)
    for (int z = 0; z < nz(); ++z) {
      double p = px[x] * pz_given_x[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)];
      if (p > 0.0) h += p * von_neumann_entropy(rho_xz(x, z));
    }
  return h;
}

double SmoothingModel::h_b_given_x() const {
  double h = 0.0;
  for (int x = 0; x < nx(); ++x)
    if (px[x] > 0.0) h += px[x] * von_neumann_entropy(rho_x(x));
  return h;
}

double SmoothingModel::h_b() const { return von_neumann_entropy(average()); }

double SmoothingModel::p_min() const {
  double m = 1.0;
  for (int x = 0; x < nx(); ++x)
    for (int z = 0; z < nz(); ++z)
      for (int y = 0; y < ny(); ++y)
        if (double p = joint(x, z, y); p > 0.0) m = std::min(m, p);
  return m;
}

double SmoothingModel::q_min() const {
  double m = 1.0;
  for (int x = 0; x < nx(); ++x)
    for (int z = 0; z < nz(); ++z)
      for (int y = 0; y < ny(); ++y)
        if (joint(x, z, y) > 0.0) m = std::min(m, spectrum(state(x, z, y)).q_min());
  return m;
}

SmoothingModel SmoothingModel::from_cmg(const CmgChannel& cmg) {
  cmg.validate();
  SmoothingModel m{cmg.px, cmg.pz_given_x, cmg.py, {}};
  for (int x = 0; x < cmg.nx(); ++x)
    for (int z = 0; z < cmg.nz(); ++z)
      for (int y = 0; y < cmg.ny(); ++y) m.states.push_back(cmg.state(z, y));
  return m;
}

// ---------------------------------------------------------------------------
// SmoothingContext

SmoothingContext::SmoothingContext(SmoothingModel model, int n, double delta)
    : model_(std::move(model)), n_(n), delta_(delta) {
  model_.validate();
  if (n < 1) throw std::invalid_argument("smoothing: n must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("smoothing: delta must be positive");
  std::size_t d = 1;
  for (int i = 0; i < n; ++i) {
    d *= static_cast<std::size_t>(model_.dim());
    check_dimension(d, "smoothing");
  }
  dim_ = static_cast<Index>(d);
  for (int x = 0; x < model_.nx(); ++x)
    for (int z = 0; z < model_.nz(); ++z)
      for (int y = 0; y < model_.ny(); ++y) joint_.push_back(model_.joint(x, z, y));
  for (int x = 0; x < model_.nx(); ++x) {
    spec_x_.push_back(spectrum(model_.rho_x(x)));
    for (int z = 0; z < model_.nz(); ++z) spec_xz_.push_back(spectrum(model_.rho_xz(x, z)));
  }
  pi_ = typical_projector(model_.average(), n, 2.0 * delta);
}

bool SmoothingContext::triple_typical(const Sequence& xn, const Sequence& zn, const Sequence& yn) const {
  Sequence t(xn.size());
  for (std::size_t i = 0; i < xn.size(); ++i) t[i] = (xn[i] * model_.nz() + zn[i]) * model_.ny() + yn[i];
  return is_typical(t, joint_, delta_);
}

double SmoothingContext::probability(const Sequence& xn, const Sequence& zn, const Sequence& yn) const {
  double p = 1.0;
  for (std::size_t i = 0; i < xn.size(); ++i) p *= model_.joint(xn[i], zn[i], yn[i]);
  return p;
}

Matrix SmoothingContext::original(const Sequence& xn, const Sequence& zn, const Sequence& yn) const {
  if (xn.size() != static_cast<std::size_t>(n_) || zn.size() != xn.size() || yn.size() != xn.size())
    throw std::invalid_argument("smoothing: sequences must have length n");
  Matrix r = model_.state(xn[0], zn[0], yn[0]);
  for (std::size_t i = 1; i < xn.size(); ++i) r = kron(r, model_.state(xn[i], zn[i], yn[i]));
  return r;
}

const Projector& SmoothingContext::pi_x(const Sequence& xn) const {
  auto it = cache_x_.find(xn);
  if (it == cache_x_.end()) it = cache_x_.emplace(xn, cond_typical_projector(spec_x_, xn, 6.0 * delta_)).first;
  return it->second;
}

const Projector& SmoothingContext::pi_xz(const Sequence& xn, const Sequence& zn) const {
  auto key = std::make_pair(xn, zn);
  auto it = cache_xz_.find(key);
  if (it == cache_xz_.end()) {
    Sequence pair(xn.size());
    for (std::size_t i = 0; i < xn.size(); ++i) pair[i] = xn[i] * model_.nz() + zn[i];
    it = cache_xz_.emplace(key, cond_typical_projector(spec_xz_, pair, 6.0 * delta_)).first;
  }
  return it->second;
}

SmoothedTriple SmoothingContext::smooth(const Sequence& xn, const Sequence& zn, const Sequence& yn) const {
  SmoothedTriple t;
  t.xn = xn;
  t.zn = zn;
  t.yn = yn;
  Matrix rho = original(xn, zn, yn);
  t.probability = probability(xn, zn, yn);
  t.typical = triple_typical(xn, zn, yn);
  if (!t.typical) {
    t.state = Matrix::Identity(dim_, dim_) / static_cast<double>(dim_);
    t.l1_to_original = trace_distance(t.state, rho);
    return t;
  }
  auto key = std::make_pair(xn, zn);
  auto mit = cache_m_.find(key);
  if (mit == cache_m_.end())
    mit = cache_m_.emplace(key, Matrix(pi_.dense() * pi_x(xn).dense() * pi_xz(xn, zn).dense())).first;
  const Matrix& m = mit->second;
  Matrix s = m * rho * m.adjoint();
  t.denominator = s.trace().real();
  t.trace_avg = pi_.expectation(rho);
  t.trace_x = pi_x(xn).expectation(rho);
  t.trace_xz = pi_xz(xn, zn).expectation(rho);
  if (t.denominator <= kZeroDenominator) {
    t.flagged = true;
    t.state = Matrix::Identity(dim_, dim_) / static_cast<double>(dim_);
  } else {
    t.state = s / t.denominator;
    t.state = 0.5 * (t.state + t.state.adjoint());
  }
  t.l1_to_original = trace_distance(t.state, rho);
  return t;
}

// ---------------------------------------------------------------------------
// SmoothedEnsemble

Matrix SmoothedEnsemble::maximally_mixed_state() const {
  return Matrix::Identity(output_dim, output_dim) / static_cast<double>(output_dim);
}

const Matrix& SmoothedEnsemble::marginal_xz(const Sequence& xn, const Sequence& zn) const {
  if (auto it = rho_xz.find({xn, zn}); it != rho_xz.end()) return it->second;
  if (mixed_cache_.rows() != output_dim) mixed_cache_ = maximally_mixed_state();
  return mixed_cache_;
}

const Matrix& SmoothedEnsemble::marginal_x(const Sequence& xn) const {
  if (auto it = rho_x.find(xn); it != rho_x.end()) return it->second;
  if (mixed_cache_.rows() != output_dim) mixed_cache_ = maximally_mixed_state();
  return mixed_cache_;
}

SmoothedEnsemble smoothed_states(const SmoothingModel& model, int n, double delta, std::size_t cap) {
  SmoothingContext ctx(model, n, delta);
  const SmoothingModel& m = ctx.model();
  struct Letter {
    int x, z, y;
    RealVector eig;
  };
  std::vector<Letter> support;
  for (int x = 0; x < m.nx(); ++x)
    for (int z = 0; z < m.nz(); ++z)
      for (int y = 0; y < m.ny(); ++y)
        if (m.joint(x, z, y) > 0.0) support.push_back({x, z, y, hermitian_eig(m.state(x, z, y)).values});

  SmoothedEnsemble se;
  se.n = n;
  se.delta = delta;
  se.output_dim = ctx.output_dimension();
  se.h_b_given_xz = m.h_b_given_xz();
  se.h_b_given_x = m.h_b_given_x();
  se.h_b = m.h_b();
  se.p_min = m.p_min();
  se.q_min = m.q_min();
  se.context_dims = {m.dim(), m.nx(), m.nz(), m.ny()};
  const Index d = se.output_dim;
  const double inv_d = 1.0 / static_cast<double>(d);

  std::map<std::pair<Sequence, Sequence>, std::pair<Matrix, double>> acc_xz;
  Matrix acc = Matrix::Zero(d, d);
  double worst = 0.0;
  Sequence xn(static_cast<std::size_t>(n)), zn(xn), yn(xn);
  for_each_sequence(static_cast<int>(support.size()), n, cap, [&](const Sequence& s) {
    ++se.enumerated;
    for (int i = 0; i < n; ++i) {
      const Letter& l = support[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])];
      xn[static_cast<std::size_t>(i)] = l.x;
      zn[static_cast<std::size_t>(i)] = l.z;
      yn[static_cast<std::size_t>(i)] = l.y;
    }
    if (!ctx.triple_typical(xn, zn, yn)) {
      // rho_t is a product state, so I/d - rho_t is diagonal in its eigenbasis.
      RealVector lam = support[static_cast<std::size_t>(s[0])].eig;
      for (int i = 1; i < n; ++i) {
        const RealVector& e = support[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])].eig;
        RealVector next(lam.size() * e.size());
        for (Index a = 0; a < lam.size(); ++a)
          for (Index b = 0; b < e.size(); ++b) next(a * e.size() + b) = lam(a) * e(b);
        lam = next;
      }
      se.atypical_l1 += ctx.probability(xn, zn, yn) * (lam.array() - inv_d).abs().sum();
      return;
    }
    SmoothedTriple t = ctx.smooth(xn, zn, yn);
    se.typical_mass += t.probability;
    worst = std::max({worst, 1.0 - t.trace_avg, 1.0 - t.trace_x, 1.0 - t.trace_xz});
    if (t.flagged) ++se.flagged;
    double py = 1.0;
    for (int i = 0; i < n; ++i) py *= m.py[yn[static_cast<std::size_t>(i)]];
    auto [it, fresh] = acc_xz.try_emplace({xn, zn}, Matrix::Zero(d, d), 0.0);
    it->second.first += py * t.state;
    it->second.second += py;
    se.triples.push_back(std::move(t));
  });

  const Matrix mixed = se.maximally_mixed_state();
  std::map<Sequence, std::pair<Matrix, double>> acc_x;
  for (auto& [key, v] : acc_xz) {
    se.rho_xz.emplace(key, v.first + (1.0 - v.second) * mixed);
    double pz = 1.0;
    for (int i = 0; i < n; ++i)
      pz *= m.pz_given_x[static_cast<std::size_t>(key.first[static_cast<std::size_t>(i)])]
                        [static_cast<std::size_t>(key.second[static_cast<std::size_t>(i)])];
    auto [it, fresh] = acc_x.try_emplace(key.first, Matrix::Zero(d, d), 0.0);
    it->second.first += pz * v.first;
    it->second.second += pz * v.second;
  }
  for (auto& [xs, v] : acc_x) {
    se.rho_x.emplace(xs, v.first + (1.0 - v.second) * mixed);
    double p = 1.0;
    for (int x : xs) p *= m.px[x];
    acc += p * v.first;
  }
  se.rho = acc + (1.0 - se.typical_mass) * mixed;

  double typical_l1 = 0.0;
  for (const auto& t : se.triples) typical_l1 += t.probability * t.l1_to_original;
  se.l1_global = typical_l1 + se.atypical_l1;
  se.measured_epsilon = std::clamp(std::max(1.0 - se.typical_mass, worst), 0.0, 1.0);
  return se;
}

// ---------------------------------------------------------------------------
// Verification

Report verify_smoothing_bounds(const SmoothedEnsemble& se, const TypicalityParams& params_in) {
  TypicalityParams params = params_in;
  params.delta = se.delta;
  params.context_dims = se.context_dims;
  params.p_min = se.p_min;
  params.q_min = se.q_min;
  const std::size_t need = typicality_threshold_n(params, TypicalityBound::Smoothing);
  const bool asymptotic = static_cast<std::size_t>(se.n) >= need;
  const double eps = asymptotic ? params.epsilon : se.measured_epsilon;
  const std::string eps_note = asymptotic ? "theoretical epsilon; n meets threshold " + std::to_string(need)
                                          : "measured epsilon; threshold " + std::to_string(need);
  const double se_root = std::sqrt(eps);
  const double lc = params.log_context();
  const double n = se.n;

  Report r;
  r.title = "smoothing";
  r.add(make_check("smoothing.measured_epsilon", se.measured_epsilon, Relation::LessEq, 1.0, false, 1e-12,
                   "max of atypical mass and per-triple projector misses"));
  r.add(make_check("smoothing.typical_mass", se.typical_mass, Relation::GreaterEq, 1.0 - eps, false, 1e-12, eps_note));
  r.add(make_check("smoothing.flagged", static_cast<double>(se.flagged), Relation::LessEq, 0.0, false, 0.0,
                   "zero denominators reassigned I/|B|^n"));

  double min_den = 1.0, max_l1 = 0.0;
  for (const auto& t : se.triples) {
    min_den = std::min(min_den, t.denominator);
    max_l1 = std::max(max_l1, t.l1_to_original);
  }
  r.add(make_check("smoothing.denominator_min", min_den, Relation::GreaterEq, 1.0 - 5.0 * se_root, true, 1e-10, eps_note));
  r.add(make_check("smoothing.l1_triple_max", max_l1, Relation::LessEq, 11.0 * se_root, true, 1e-10, eps_note));
  r.add(make_check("smoothing.l1_global", se.l1_global, Relation::LessEq, 13.0 * se_root, true, 1e-10, eps_note));

  // The operator-norm chain needs (1 - 5 sqrt(eps))^{-1} <= 2.
  const bool chain = 5.0 * se_root <= 0.5;
  const std::string linf_note = chain ? eps_note : "5 sqrt(epsilon) > 1/2; informative";
  const double floor = std::log2(1.0 / static_cast<double>(se.output_dim));
  auto log_norm = [](const Matrix& m) { return std::log2(std::max(operator_norm(m), 1e-300)); };
  double w_xz = floor, w_x = floor;
  for (const auto& [k, m] : se.rho_xz) w_xz = std::max(w_xz, log_norm(m));
  for (const auto& [k, m] : se.rho_x) w_x = std::max(w_x, log_norm(m));
  r.add(make_check("smoothing.linf_xz", w_xz, Relation::LessEq, 2.0 - n * (se.h_b_given_xz - c_delta(6 * se.delta, lc)),
                   chain, 1e-9, linf_note + "; log2 operator norm"));
  r.add(make_check("smoothing.linf_x", w_x, Relation::LessEq, 2.0 - n * (se.h_b_given_x - c_delta(6 * se.delta, lc)),
                   chain, 1e-9, linf_note + "; log2 operator norm"));
  r.add(make_check("smoothing.linf_avg", log_norm(se.rho), Relation::LessEq,
                   2.0 - n * (se.h_b - c_delta(2 * se.delta, lc)), chain, 1e-9, linf_note + "; log2 operator norm"));
  return r;
}

}  // namespace seqdec
