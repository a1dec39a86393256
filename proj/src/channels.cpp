#include "seqdec/channels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace seqdec {

namespace {

double eta_sum(const RealVector& ev) {
  double h = 0.0;
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > 1e-14) h -= ev(i) * std::log2(ev(i));
  return h;
}

RealVector eigenvalues_of(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

void check_row(const std::vector<double>& row, const std::string& what) {
  double s = 0.0;
  for (double v : row) {
    if (!(v >= 0.0)) throw std::invalid_argument(what + ": negative probability");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument(what + ": row does not sum to 1");
}

void check_states(const std::vector<Matrix>& states, std::size_t expected, const std::string& what) {
  if (states.size() != expected)
    throw std::invalid_argument(what + ": expected " + std::to_string(expected) + " output states");
  const Index d = states.front().rows();
  for (const auto& s : states) {
    if (s.rows() != d) throw std::invalid_argument(what + ": output states differ in dimension");
    if (auto err = DensityOperator::validate(s, false, 1e-8)) throw std::invalid_argument(what + ": " + *err);
  }
}

}  // namespace

double von_neumann_entropy(const Matrix& rho) {
  if (auto err = DensityOperator::validate(rho, false, 1e-8))
    throw std::invalid_argument("von_neumann_entropy: " + *err);
  return eta_sum(eigenvalues_of(rho));
}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

double holevo_information(const ClassicalDistribution& p, std::span<const Matrix> states) {
  if (static_cast<int>(states.size()) != p.size())
    throw std::invalid_argument("holevo_information: one state per symbol required");
  const Index d = states.front().rows();
  Matrix avg = Matrix::Zero(d, d);
  double cond = 0.0;
  for (int x = 0; x < p.size(); ++x) {
    const Matrix& s = states[static_cast<std::size_t>(x)];
    if (s.rows() != d) throw std::invalid_argument("holevo_information: dimension mismatch");
    avg += p[x] * s;
    if (p[x] > 0.0) cond += p[x] * von_neumann_entropy(s);
  }
  return von_neumann_entropy(avg) - cond;
}

// ---------------------------------------------------------------------------
// CqState

std::vector<std::string> parse_systems(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char ch = s[i];
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
      ++i;
      continue;
    }
    if (!std::isupper(static_cast<unsigned char>(ch)))
      throw std::invalid_argument("bad system token in '" + s + "'");
    std::string tok(1, ch);
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) tok += s[i++];
    out.push_back(tok);
  }
  return out;
}

CqState::CqState(std::vector<std::string> classical, std::vector<int> sizes, std::vector<double> joint,
                 std::vector<std::string> outputs, std::vector<Index> output_dims, std::vector<Matrix> states)
    : cnames_(std::move(classical)),
      sizes_(std::move(sizes)),
      joint_(std::move(joint)),
      onames_(std::move(outputs)),
      odims_(std::move(output_dims)),
      states_(std::move(states)) {
  if (cnames_.size() != sizes_.size()) throw std::invalid_argument("CqState: names and sizes differ");
  if (onames_.size() != odims_.size() || onames_.empty()) throw std::invalid_argument("CqState: bad outputs");
  std::size_t total = 1;
  for (int s : sizes_) {
    if (s < 1) throw std::invalid_argument("CqState: empty alphabet");
    total *= static_cast<std::size_t>(s);
  }
  if (joint_.size() != total || states_.size() != total)
    throw std::invalid_argument("CqState: joint or states do not match alphabet sizes");
  check_row(joint_, "CqState joint distribution");
  Index d = output_dimension();
  for (const auto& m : states_)
    if (m.rows() != d || m.cols() != d) throw std::invalid_argument("CqState: output dimension mismatch");
  std::set<std::string> seen;
  for (const auto& n : cnames_)
    if (!seen.insert(n).second) throw std::invalid_argument("CqState: duplicate system " + n);
  for (const auto& n : onames_)
    if (!seen.insert(n).second) throw std::invalid_argument("CqState: duplicate system " + n);
}

Index CqState::output_dimension() const {
  Index d = 1;
  for (Index x : odims_) d *= x;
  return d;
}

int CqState::classical_index(const std::string& name) const {
  auto it = std::find(cnames_.begin(), cnames_.end(), name);
  return it == cnames_.end() ? -1 : static_cast<int>(it - cnames_.begin());
}

int CqState::output_index(const std::string& name) const {
  auto it = std::find(onames_.begin(), onames_.end(), name);
  return it == onames_.end() ? -1 : static_cast<int>(it - onames_.begin());
}

std::vector<double> CqState::marginal(const std::vector<std::string>& systems) const {
  std::vector<int> idx;
  std::vector<int> msizes;
  for (const auto& s : systems) {
    int i = classical_index(s);
    if (i < 0) throw std::invalid_argument("unknown classical system " + s);
    idx.push_back(i);
    msizes.push_back(sizes_[static_cast<std::size_t>(i)]);
  }
  std::size_t total = 1;
  for (int s : msizes) total *= static_cast<std::size_t>(s);
  std::vector<double> out(total, 0.0);
  std::vector<int> digits(cnames_.size());
  for (std::size_t t = 0; t < joint_.size(); ++t) {
    std::size_t rem = t;
    for (int f = static_cast<int>(cnames_.size()) - 1; f >= 0; --f) {
      digits[static_cast<std::size_t>(f)] = static_cast<int>(rem % static_cast<std::size_t>(sizes_[static_cast<std::size_t>(f)]));
      rem /= static_cast<std::size_t>(sizes_[static_cast<std::size_t>(f)]);
    }
    std::size_t key = 0;
    for (std::size_t k = 0; k < idx.size(); ++k)
      key = key * static_cast<std::size_t>(msizes[k]) + static_cast<std::size_t>(digits[static_cast<std::size_t>(idx[k])]);
    out[key] += joint_[t];
  }
  return out;
}

double CqState::entropy(const std::vector<std::string>& systems_in) const {
  std::vector<std::string> systems = systems_in;
  std::sort(systems.begin(), systems.end());
  systems.erase(std::unique(systems.begin(), systems.end()), systems.end());
  if (auto it = cache_.find(systems); it != cache_.end()) return it->second;

  std::vector<int> cidx;
  std::vector<Index> okeep;
  for (const auto& s : systems) {
    int c = classical_index(s);
    if (c >= 0) {
      cidx.push_back(c);
      continue;
    }
    int o = output_index(s);
    if (o < 0) throw std::invalid_argument("unknown system " + s);
    okeep.push_back(o);
  }
  std::sort(cidx.begin(), cidx.end());
  std::sort(okeep.begin(), okeep.end());

  double h = 0.0;
  if (okeep.empty()) {
    std::vector<std::string> names;
    for (int c : cidx) names.push_back(cnames_[static_cast<std::size_t>(c)]);
    std::vector<double> m = marginal(names);
    h = shannon_entropy(m);
  } else {
    std::map<std::vector<int>, Matrix> blocks;
    const Index d = output_dimension();
    std::vector<int> digits(cnames_.size());
    for (std::size_t t = 0; t < joint_.size(); ++t) {
      if (joint_[t] == 0.0) continue;
      std::size_t rem = t;
      for (int f = static_cast<int>(cnames_.size()) - 1; f >= 0; --f) {
        digits[static_cast<std::size_t>(f)] = static_cast<int>(rem % static_cast<std::size_t>(sizes_[static_cast<std::size_t>(f)]));
        rem /= static_cast<std::size_t>(sizes_[static_cast<std::size_t>(f)]);
      }
      std::vector<int> key;
      for (int c : cidx) key.push_back(digits[static_cast<std::size_t>(c)]);
      auto [it, inserted] = blocks.try_emplace(key, Matrix::Zero(d, d));
      it->second += joint_[t] * states_[t];
    }
    const bool all_outputs = okeep.size() == onames_.size();
    for (auto& [key, sigma] : blocks) {
      Matrix m = all_outputs ? sigma : partial_trace(sigma, odims_, okeep);
      h += eta_sum(eigenvalues_of(m));
    }
  }
  cache_.emplace(systems, h);
  return h;
}

double CqState::mutual_information(const std::vector<std::string>& a, const std::vector<std::string>& b,
                                   const std::vector<std::string>& given) const {
  auto join = [](std::vector<std::string> x, const std::vector<std::string>& y) {
    x.insert(x.end(), y.begin(), y.end());
    return x;
  };
  for (const auto& g : given)
    if (classical_index(g) < 0)
      throw std::invalid_argument(output_index(g) < 0 ? "unknown system " + g : "conditioning on quantum system " + g);
  return entropy(join(a, given)) + entropy(join(b, given)) - entropy(join(join(a, b), given)) - entropy(given);
}

double CqState::evaluate(const std::string& expr_in) const {
  std::string expr;
  for (char c : expr_in)
    if (!std::isspace(static_cast<unsigned char>(c))) expr += c;
  if (expr.size() < 4 || expr[1] != '(' || expr.back() != ')')
    throw std::invalid_argument("bad entropic expression '" + expr_in + "'");
  std::string body = expr.substr(2, expr.size() - 3);
  std::string given_s;
  if (auto bar = body.find('|'); bar != std::string::npos) {
    given_s = body.substr(bar + 1);
    body = body.substr(0, bar);
  }
  std::vector<std::string> given = parse_systems(given_s);
  if (expr[0] == 'H') {
    std::vector<std::string> a = parse_systems(body);
    if (a.empty()) throw std::invalid_argument("empty entropy argument in '" + expr_in + "'");
    std::vector<std::string> all = a;
    all.insert(all.end(), given.begin(), given.end());
    return entropy(all) - entropy(given);
  }
  if (expr[0] == 'I') {
    auto colon = body.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("mutual information needs ':' in '" + expr_in + "'");
    std::vector<std::string> a = parse_systems(body.substr(0, colon));
    std::vector<std::string> b = parse_systems(body.substr(colon + 1));
    if (a.empty() || b.empty()) throw std::invalid_argument("empty argument in '" + expr_in + "'");
    return mutual_information(a, b, given);
  }
  throw std::invalid_argument("expression must start with H or I: '" + expr_in + "'");
}

double conditional_mutual_information(const CqState& state, const std::string& expression) {
  return state.evaluate(expression);
}

// ---------------------------------------------------------------------------
// Channel models

void CqChannel::validate() const {
  check_states(states, static_cast<std::size_t>(px.size()), "cq channel");
}

Matrix CqChannel::average() const {
  Matrix a = Matrix::Zero(dim(), dim());
  for (int x = 0; x < px.size(); ++x) a += px[x] * states[static_cast<std::size_t>(x)];
  return a;
}

CqState CqChannel::to_cq_state() const {
  return CqState({"X"}, {px.size()}, px.p, {"B"}, {dim()}, states);
}

void MacChannel::validate() const {
  check_states(states, static_cast<std::size_t>(nx() * ny()), "ccq-MAC");
}

Matrix MacChannel::average() const {
  Matrix a = Matrix::Zero(dim(), dim());
  for (int x = 0; x < nx(); ++x)
    for (int y = 0; y < ny(); ++y) a += px[x] * py[y] * state(x, y);
  return a;
}

Matrix MacChannel::rho_x(int x) const {
  Matrix a = Matrix::Zero(dim(), dim());
  for (int y = 0; y < ny(); ++y) a += py[y] * state(x, y);
  return a;
}

Matrix MacChannel::rho_y(int y) const {
  Matrix a = Matrix::Zero(dim(), dim());
  for (int x = 0; x < nx(); ++x) a += px[x] * state(x, y);
  return a;
}

CqState MacChannel::to_cq_state() const {
  std::vector<double> joint;
  for (int x = 0; x < nx(); ++x)
    for (int y = 0; y < ny(); ++y) joint.push_back(px[x] * py[y]);
  return CqState({"X", "Y"}, {nx(), ny()}, joint, {"B"}, {dim()}, states);
}

MacChannel MacChannel::from_joint(const std::vector<double>& pxy, int nx, int ny, std::vector<Matrix> states) {
  if (static_cast<int>(pxy.size()) != nx * ny) throw std::invalid_argument("ccq-MAC: joint has wrong size");
  check_row(pxy, "ccq-MAC joint");
  std::vector<double> px(static_cast<std::size_t>(nx), 0.0), py(static_cast<std::size_t>(ny), 0.0);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      px[static_cast<std::size_t>(x)] += pxy[static_cast<std::size_t>(x * ny + y)];
      py[static_cast<std::size_t>(y)] += pxy[static_cast<std::size_t>(x * ny + y)];
    }
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      if (std::abs(pxy[static_cast<std::size_t>(x * ny + y)] - px[static_cast<std::size_t>(x)] * py[static_cast<std::size_t>(y)]) > 1e-9)
        throw std::invalid_argument("ccq-MAC: inputs X and Y are not independent");
  MacChannel m{ClassicalDistribution(px), ClassicalDistribution(py), std::move(states)};
  m.validate();
  return m;
}

void CmgChannel::validate() const {
  if (static_cast<int>(pz_given_x.size()) != nx()) throw std::invalid_argument("CMG-MAC: p(z|x) needs one row per x");
  for (const auto& row : pz_given_x) {
    if (static_cast<int>(row.size()) != nz()) throw std::invalid_argument("CMG-MAC: ragged p(z|x)");
    check_row(row, "CMG-MAC p(z|x)");
  }
  check_states(states, static_cast<std::size_t>(nz() * ny()), "CMG-MAC");
}

ClassicalDistribution CmgChannel::pz() const {
  std::vector<double> p(static_cast<std::size_t>(nz()), 0.0);
  for (int x = 0; x < nx(); ++x)
    for (int z = 0; z < nz(); ++z) p[static_cast<std::size_t>(z)] += px[x] * pz_given_x[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)];
  double s = 0.0;
  for (double v : p) s += v;
  for (double& v : p) v /= s;
  return ClassicalDistribution(p);
}

CqState CmgChannel::to_cq_state() const {
  std::vector<double> joint;
  std::vector<Matrix> st;
  for (int x = 0; x < nx(); ++x)
    for (int z = 0; z < nz(); ++z)
      for (int y = 0; y < ny(); ++y) {
        joint.push_back(px[x] * pz_given_x[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)] * py[y]);
        st.push_back(state(z, y));
      }
  return CqState({"X", "Z", "Y"}, {nx(), nz(), ny()}, joint, {"B"}, {dim()}, st);
}

CmgChannel CmgChannel::from_joint(const std::vector<double>& pxzy, int nx, int nz, int ny, std::vector<Matrix> states) {
  if (static_cast<int>(pxzy.size()) != nx * nz * ny) throw std::invalid_argument("CMG-MAC: joint has wrong size");
  check_row(pxzy, "CMG-MAC joint");
  std::vector<double> pxz(static_cast<std::size_t>(nx * nz), 0.0), py(static_cast<std::size_t>(ny), 0.0);
  auto at = [&](int x, int z, int y) { return pxzy[static_cast<std::size_t>((x * nz + z) * ny + y)]; };
  for (int x = 0; x < nx; ++x)
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y) {
        pxz[static_cast<std::size_t>(x * nz + z)] += at(x, z, y);
        py[static_cast<std::size_t>(y)] += at(x, z, y);
      }
  for (int x = 0; x < nx; ++x)
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y)
        if (std::abs(at(x, z, y) - pxz[static_cast<std::size_t>(x * nz + z)] * py[static_cast<std::size_t>(y)]) > 1e-9)
          throw std::invalid_argument("CMG-MAC: Y is not independent of XZ");
  std::vector<double> px(static_cast<std::size_t>(nx), 0.0);
  std::vector<std::vector<double>> pzx(static_cast<std::size_t>(nx), std::vector<double>(static_cast<std::size_t>(nz), 0.0));
  for (int x = 0; x < nx; ++x) {
    for (int z = 0; z < nz; ++z) px[static_cast<std::size_t>(x)] += pxz[static_cast<std::size_t>(x * nz + z)];
    for (int z = 0; z < nz; ++z)
      pzx[static_cast<std::size_t>(x)][static_cast<std::size_t>(z)] =
          px[static_cast<std::size_t>(x)] > 0 ? pxz[static_cast<std::size_t>(x * nz + z)] / px[static_cast<std::size_t>(x)]
                                              : (z == 0 ? 1.0 : 0.0);
  }
  CmgChannel c{ClassicalDistribution(px), pzx, ClassicalDistribution(py), std::move(states)};
  c.validate();
  return c;
}

void IcChannel::validate() const {
  if (static_cast<int>(pux_given_q.size()) != pq.size() || static_cast<int>(pvy_given_q.size()) != pq.size())
    throw std::invalid_argument("ccqq-IC: conditionals need one row per q");
  for (const auto& r : pux_given_q) {
    if (static_cast<int>(r.size()) != nu * nx) throw std::invalid_argument("ccqq-IC: p(u,x|q) has wrong size");
    check_row(r, "ccqq-IC p(u,x|q)");
  }
  for (const auto& r : pvy_given_q) {
    if (static_cast<int>(r.size()) != nv * ny) throw std::invalid_argument("ccqq-IC: p(v,y|q) has wrong size");
    check_row(r, "ccqq-IC p(v,y|q)");
  }
  check_states(states, static_cast<std::size_t>(nx * ny), "ccqq-IC");
  if (states.front().rows() != d1 * d2) throw std::invalid_argument("ccqq-IC: outputs must live on B1 (x) B2");
}

CqState IcChannel::to_cq_state() const {
  std::vector<double> joint;
  std::vector<Matrix> st;
  for (int q = 0; q < pq.size(); ++q)
    for (int u = 0; u < nu; ++u)
      for (int x = 0; x < nx; ++x)
        for (int v = 0; v < nv; ++v)
          for (int y = 0; y < ny; ++y) {
            joint.push_back(pq[q] * pux_given_q[static_cast<std::size_t>(q)][static_cast<std::size_t>(u * nx + x)] *
                            pvy_given_q[static_cast<std::size_t>(q)][static_cast<std::size_t>(v * ny + y)]);
            st.push_back(state(x, y));
          }
  return CqState({"Q", "U", "X", "V", "Y"}, {pq.size(), nu, nx, nv, ny}, joint, {"B1", "B2"}, {d1, d2}, st);
}

IcChannel IcChannel::with_fixed_v() const {
  IcChannel c = *this;
  c.nv = 1;
  for (auto& row : c.pvy_given_q) {
    std::vector<double> m(static_cast<std::size_t>(ny), 0.0);
    for (int v = 0; v < nv; ++v)
      for (int y = 0; y < ny; ++y) m[static_cast<std::size_t>(y)] += row[static_cast<std::size_t>(v * ny + y)];
    row = m;
  }
  return c;
}

IcChannel IcChannel::with_fixed_u() const {
  IcChannel c = *this;
  c.nu = 1;
  for (auto& row : c.pux_given_q) {
    std::vector<double> m(static_cast<std::size_t>(nx), 0.0);
    for (int u = 0; u < nu; ++u)
      for (int x = 0; x < nx; ++x) m[static_cast<std::size_t>(x)] += row[static_cast<std::size_t>(u * nx + x)];
    row = m;
  }
  return c;
}

// ---------------------------------------------------------------------------
// RateRegion

RateRegion::RateRegion(std::vector<std::string> vars, std::vector<RegionPart> parts)
    : vars_(std::move(vars)), parts_(std::move(parts)) {
  for (const auto& p : parts_)
    for (const auto& c : p.constraints) {
      if (c.coeffs.size() != vars_.size()) throw std::invalid_argument("RateRegion: coefficient length mismatch");
      if (!std::isfinite(c.bound)) throw std::invalid_argument("RateRegion: non-finite bound");
    }
}

bool RateRegion::satisfies(const Constraint& c, std::span<const double> r, double margin) const {
  double lhs = 0.0;
  bool all_zero = true;
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
    lhs += c.coeffs[i] * r[i];
    if (c.coeffs[i] != 0.0 && r[i] != 0.0) all_zero = false;
  }
  switch (c.sense) {
    case Sense::Less: return all_zero || lhs <= c.bound - margin;
    case Sense::LessEq: return lhs <= c.bound + 1e-12;
    case Sense::GreaterEq: return lhs >= c.bound - 1e-12;
  }
  return false;
}

bool RateRegion::part_contains(std::size_t part, std::span<const double> r, double margin) const {
  if (r.size() != vars_.size()) throw std::invalid_argument("RateRegion: wrong number of rates");
  for (double v : r)
    if (v < 0.0) return false;
  for (const auto& c : parts_.at(part).constraints)
    if (!satisfies(c, r, margin)) return false;
  return true;
}

bool RateRegion::contains(std::span<const double> r, double margin) const {
  return containing_part(r, margin).has_value();
}

std::optional<std::size_t> RateRegion::containing_part(std::span<const double> r, double margin) const {
  for (std::size_t p = 0; p < parts_.size(); ++p)
    if (part_contains(p, r, margin)) return p;
  return std::nullopt;
}

RayInterval RateRegion::ray(std::size_t part, std::span<const double> d) const {
  RayInterval iv;
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (const auto& c : parts_.at(part).constraints) {
    double s = 0.0;
    bool touches = false;
    for (std::size_t i = 0; i < d.size(); ++i) {
      s += c.coeffs[i] * d[i];
      if (c.coeffs[i] != 0.0 && d[i] != 0.0) touches = true;
    }
    if (c.sense == Sense::GreaterEq) {
      if (s > 0) lo = std::max(lo, c.bound / s);
      else if (s < 0) hi = std::min(hi, c.bound / s);
      else if (c.bound > 0) return iv;
    } else {
      if (!touches && c.sense == Sense::Less) continue;
      if (s > 0) hi = std::min(hi, c.bound / s);
      else if (s < 0) lo = std::max(lo, c.bound / s);
      else if (c.bound < 0) return iv;
    }
  }
  hi = std::max(hi, 0.0);
  if (lo > hi) return iv;
  iv.lo = lo;
  iv.hi = hi;
  iv.empty = false;
  return iv;
}

std::vector<RateRegion::BoundaryPoint> RateRegion::boundary_points(std::size_t count, std::uint64_t seed) const {
  std::vector<std::vector<double>> dirs;
  const std::size_t k = vars_.size();
  if (k == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      double th = count > 1 ? (std::numbers::pi / 2) * static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<double> v(k);
      double norm = 0.0;
      for (auto& x : v) x = std::abs(g(rng)), norm += x * x;
      for (auto& x : v) x /= std::sqrt(norm);
      dirs.push_back(v);
    }
  }
  std::vector<BoundaryPoint> out;
  for (std::size_t p = 0; p < parts_.size(); ++p)
    for (const auto& d : dirs) {
      RayInterval iv = ray(p, d);
      if (iv.empty) continue;
      auto point = [&](double t) {
        std::vector<double> r(k);
        for (std::size_t i = 0; i < k; ++i) r[i] = t * d[i];
        return r;
      };
      if (iv.lo > 0.0) out.push_back({p, point(iv.lo), false});
      if (std::isfinite(iv.hi)) out.push_back({p, point(iv.hi), true});
    }
  return out;
}

// ---------------------------------------------------------------------------
// Region calculators

namespace {

Constraint strict(std::vector<double> a, const CqState& s, const std::string& expr) {
  return Constraint{std::move(a), Sense::Less, s.evaluate(expr), expr};
}

Constraint at_least(std::vector<double> a, const CqState& s, const std::string& expr) {
  return Constraint{std::move(a), Sense::GreaterEq, s.evaluate(expr), expr};
}

}  // namespace

RateRegion ccq_mac_region(const MacChannel& mac) {
  mac.validate();
  CqState s = mac.to_cq_state();
  RegionPart part{"pentagon",
                  {strict({1, 0}, s, "I(X:B|Y)"), strict({0, 1}, s, "I(Y:B|X)"), strict({1, 1}, s, "I(XY:B)")}};
  return RateRegion({"R1", "R2"}, {part});
}

RateRegion ccq_mac_region_finite(const MacChannel& mac, double delta) {
  RateRegion base = ccq_mac_region(mac);
  double c6 = c_delta(6.0 * delta, std::log2(static_cast<double>(mac.dim() * mac.nx() * mac.ny())));
  RegionPart part = base.parts()[0];
  part.name = "pentagon-finite";
  for (auto& c : part.constraints) {
    c.sense = Sense::LessEq;
    c.bound -= 4.0 * c6;
    c.label += " - 4c(6delta)";
  }
  return RateRegion(base.variables(), {part});
}

RateRegion disinterested_region(const MacChannel& mac) {
  mac.validate();
  CqState s = mac.to_cq_state();
  RegionPart p1{"joint", {at_least({1, 0}, s, "I(X:B)"), strict({1, 0}, s, "I(X:B|Y)"), strict({1, 1}, s, "I(XY:B)")}};
  RegionPart p2{"single", {strict({1, 0}, s, "I(X:B)")}};
  return RateRegion({"R1", "R2"}, {p1, p2});
}

CmgRegions cmg_mac_region(const CmgChannel& cmg) {
  cmg.validate();
  CqState s = cmg.to_cq_state();
  CmgRegions out;
  RegionPart p1{"region1",
                {strict({0, 0, 1}, s, "I(Y:B|Z)"), strict({0, 1, 0}, s, "I(Z:B|XY)"), strict({1, 1, 0}, s, "I(Z:B|Y)"),
                 strict({0, 1, 1}, s, "I(ZY:B|X)"), strict({1, 1, 1}, s, "I(ZY:B)")}};
  RegionPart p2{"region2", {at_least({0, 0, 1}, s, "I(Y:B|Z)"), strict({0, 1, 0}, s, "I(Z:B|X)"), strict({1, 1, 0}, s, "I(Z:B)")}};
  out.ours = RateRegion({"R1", "R2", "R3"}, {p1, p2});
  RegionPart c{"cmg",
               {strict({0, 1, 0}, s, "I(Z:B|XY)"), strict({1, 1, 0}, s, "I(Z:B|Y)"), strict({0, 1, 1}, s, "I(ZY:B|X)"),
                strict({1, 1, 1}, s, "I(ZY:B)")}};
  out.classical = RateRegion({"R1", "R2", "R3"}, {c});
  out.identity_residual_zy = std::abs(s.evaluate("H(B|ZY)") - s.evaluate("H(B|ZXY)"));
  out.identity_residual_z = std::abs(s.evaluate("H(B|Z)") - s.evaluate("H(B|XZ)"));
  return out;
}

bool IcRegions::contains(std::span<const double> quad, double margin) const {
  return receiver1.contains(quad, margin) && receiver2.contains(quad, margin);
}

IcRegions ccqq_ic_region(const IcChannel& ic) {
  ic.validate();
  CqState s = ic.to_cq_state();
  // Variables: R1c, R1p, R2c, R2p.
  RegionPart r1a{"receiver1-part1",
                 {strict({0, 0, 1, 0}, s, "I(V:B1|XQ)"), strict({0, 1, 0, 0}, s, "I(X:B1|UVQ)"),
                  strict({1, 1, 0, 0}, s, "I(X:B1|VQ)"), strict({0, 1, 1, 0}, s, "I(XV:B1|UQ)"),
                  strict({1, 1, 1, 0}, s, "I(XV:B1|Q)")}};
  RegionPart r1b{"receiver1-part2",
                 {at_least({0, 0, 1, 0}, s, "I(V:B1|XQ)"), strict({0, 1, 0, 0}, s, "I(X:B1|UQ)"),
                  strict({1, 1, 0, 0}, s, "I(X:B1|Q)")}};
  RegionPart r2a{"receiver2-part1",
                 {strict({1, 0, 0, 0}, s, "I(U:B2|YQ)"), strict({0, 0, 0, 1}, s, "I(Y:B2|UVQ)"),
                  strict({0, 0, 1, 1}, s, "I(Y:B2|UQ)"), strict({1, 0, 0, 1}, s, "I(YU:B2|VQ)"),
                  strict({1, 0, 1, 1}, s, "I(YU:B2|Q)")}};
  RegionPart r2b{"receiver2-part2",
                 {at_least({1, 0, 0, 0}, s, "I(U:B2|YQ)"), strict({0, 0, 0, 1}, s, "I(Y:B2|VQ)"),
                  strict({0, 0, 1, 1}, s, "I(Y:B2|Q)")}};
  std::vector<std::string> vars{"R1c", "R1p", "R2c", "R2p"};
  return IcRegions{RateRegion(vars, {r1a, r1b}), RateRegion(vars, {r2a, r2b})};
}

std::vector<IcWitness> ic_grid(const IcChannel& ic, double step, double max_rate) {
  if (!(step > 0.0)) throw std::invalid_argument("ic_grid: step must be positive");
  IcRegions reg = ccqq_ic_region(ic);
  const int m = static_cast<int>(std::floor(max_rate / step + 1e-9));
  std::vector<IcWitness> out;
  std::vector<double> q(4);
  for (int a = 0; a <= m; ++a)
    for (int b = 0; b <= m; ++b)
      for (int c = 0; c <= m; ++c)
        for (int d = 0; d <= m; ++d) {
          q = {a * step, b * step, c * step, d * step};
          auto p1 = reg.receiver1.containing_part(q);
          if (!p1) continue;
          auto p2 = reg.receiver2.containing_part(q);
          if (!p2) continue;
          out.push_back(IcWitness{q, q[0] + q[1], q[2] + q[3], *p1, *p2});
        }
  return out;
}

CommonMessageResult common_message_transform(const IcChannel& ic, std::span<const double> quad_in) {
  CommonMessageResult res;
  res.channel = ic;
  res.quad.assign(quad_in.begin(), quad_in.end());
  IcRegions reg = ccqq_ic_region(res.channel);
  if (!reg.receiver1.part_contains(0, res.quad) && reg.receiver1.part_contains(1, res.quad)) {
    res.channel = res.channel.with_fixed_v();
    res.quad = {res.quad[0], res.quad[1], 0.0, res.quad[2] + res.quad[3]};
    res.fixed_v = true;
    reg = ccqq_ic_region(res.channel);
  }
  if (!reg.receiver2.part_contains(0, res.quad) && reg.receiver2.part_contains(1, res.quad)) {
    res.channel = res.channel.with_fixed_u();
    res.quad = {0.0, res.quad[0] + res.quad[1], res.quad[2], res.quad[3]};
    res.fixed_u = true;
    reg = ccqq_ic_region(res.channel);
  }
  res.first_parts_hold = reg.receiver1.part_contains(0, res.quad) && reg.receiver2.part_contains(0, res.quad);
  res.rates_preserved = std::abs((res.quad[0] + res.quad[1]) - (quad_in[0] + quad_in[1])) <= 1e-12 &&
                        std::abs((res.quad[2] + res.quad[3]) - (quad_in[2] + quad_in[3])) <= 1e-12;
  return res;
}

}  // namespace seqdec
