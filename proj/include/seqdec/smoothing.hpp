#pragma once

// Primed states built by triple projector sandwiching over an XZY ensemble.

#include "seqdec/channels.hpp"
#include "seqdec/report.hpp"
#include "seqdec/typicality.hpp"

#include <map>
#include <memory>

namespace seqdec {

inline constexpr std::size_t kSmoothingEnumerationCap = std::size_t{1} << 16;

// p(x) p(z|x) p(y) with a state per (x, z, y).
struct SmoothingModel {
  ClassicalDistribution px;
  std::vector<std::vector<double>> pz_given_x;  // [x][z]
  ClassicalDistribution py;
  std::vector<Matrix> states;  // index (x * |Z| + z) * |Y| + y

  int nx() const { return px.size(); }
  int nz() const { return static_cast<int>(pz_given_x.front().size()); }
  int ny() const { return py.size(); }
  Index dim() const { return states.front().rows(); }
  const Matrix& state(int x, int z, int y) const {
    return states[static_cast<std::size_t>((x * nz() + z) * ny() + y)];
  }
  double joint(int x, int z, int y) const;
  void validate() const;

  // Averaged letter states: rho_{xz} = sum_y p(y) rho_{xzy}, rho_x, rho.
  Matrix rho_xz(int x, int z) const;
  Matrix rho_x(int x) const;
  Matrix average() const;
  double h_b_given_xz() const;
  double h_b_given_x() const;
  double h_b() const;
  // Minimum positive p(x,z) p(y), and minimum positive eigenvalue over the
  // supported rho_{xzy}.
  double p_min() const;
  double q_min() const;

  static SmoothingModel from_cmg(const CmgChannel& cmg);
};

struct SmoothedTriple {
  Sequence xn, zn, yn;
  double probability = 0.0;
  bool typical = false;
  bool flagged = false;       // zero denominator, reassigned I/|B|^n
  double denominator = 0.0;   // Tr of the sandwiched state
  double trace_avg = 0.0;     // Tr[Pi rho], Pi = Pi^{rho^n}_{2 delta}
  double trace_x = 0.0;       // Tr[Pi_{x^n} rho]
  double trace_xz = 0.0;      // Tr[Pi_{x^n z^n} rho]
  double l1_to_original = 0.0;
  Matrix state;
};

// Caches Pi^{rho^n}_{2 delta}, Pi^{rho_{x^n}}_{6 delta} and
// Pi^{rho_{x^n z^n}}_{6 delta}; smooths single triples on demand.
class SmoothingContext {
 public:
  SmoothingContext(SmoothingModel model, int n, double delta);

  const SmoothingModel& model() const { return model_; }
  int n() const { return n_; }
  double delta() const { return delta_; }
  Index output_dimension() const { return dim_; }

  bool triple_typical(const Sequence& xn, const Sequence& zn, const Sequence& yn) const;
  double probability(const Sequence& xn, const Sequence& zn, const Sequence& yn) const;
  Matrix original(const Sequence& xn, const Sequence& zn, const Sequence& yn) const;
  SmoothedTriple smooth(const Sequence& xn, const Sequence& zn, const Sequence& yn) const;

  const Projector& pi() const { return pi_; }
  const Projector& pi_x(const Sequence& xn) const;
  const Projector& pi_xz(const Sequence& xn, const Sequence& zn) const;

 private:
  SmoothingModel model_;
  int n_;
  double delta_;
  Index dim_;
  std::vector<double> joint_;  // over the X*Z*Y alphabet
  std::vector<Spectrum> spec_x_, spec_xz_;
  Projector pi_;
  mutable std::map<Sequence, Projector> cache_x_;
  mutable std::map<std::pair<Sequence, Sequence>, Projector> cache_xz_;
  mutable std::map<std::pair<Sequence, Sequence>, Matrix> cache_m_;
};

struct SmoothedEnsemble {
  int n = 0;
  double delta = 0.0;
  Index output_dim = 0;
  std::vector<SmoothedTriple> triples;  // typical triples only
  // Marginals for pairs and x^n with at least one typical extension; all
  // others equal I/|B|^n.
  std::map<std::pair<Sequence, Sequence>, Matrix> rho_xz;
  std::map<Sequence, Matrix> rho_x;
  Matrix rho;
  double typical_mass = 0.0;
  double atypical_l1 = 0.0;  // sum p(t) ||I/|B|^n - rho_t||_1 over atypical t
  double l1_global = 0.0;
  double measured_epsilon = 1.0;
  std::size_t flagged = 0;
  std::size_t enumerated = 0;
  double h_b_given_xz = 0.0, h_b_given_x = 0.0, h_b = 0.0;
  double p_min = 0.0, q_min = 0.0;
  std::vector<Index> context_dims;  // |B|, |X|, |Z|, |Y|

  Matrix maximally_mixed_state() const;
  const Matrix& marginal_xz(const Sequence& xn, const Sequence& zn) const;
  const Matrix& marginal_x(const Sequence& xn) const;

 private:
  mutable Matrix mixed_cache_;
};

// Enumerates all supported triples (support size^n <= cap).
SmoothedEnsemble smoothed_states(const SmoothingModel& model, int n, double delta,
                                 std::size_t cap = kSmoothingEnumerationCap);

// Checks the three operator-norm bounds, the per-triple and global trace
// distance bounds and the denominator chain. epsilon is params.epsilon when n
// meets the threshold, otherwise the measured epsilon.
Report verify_smoothing_bounds(const SmoothedEnsemble& se, const TypicalityParams& params = {});

}  // namespace seqdec
