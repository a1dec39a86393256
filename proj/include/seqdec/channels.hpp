#pragma once

// Channel models, entropic quantities and rate-region calculators.

#include "seqdec/operator_core.hpp"
#include "seqdec/typicality.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace seqdec {

double von_neumann_entropy(const Matrix& rho);
double shannon_entropy(std::span<const double> p);
// H(sum_x p_x rho_x) - sum_x p_x H(rho_x).
double holevo_information(const ClassicalDistribution& p, std::span<const Matrix> states);

// A joint state sum_t p(t) |t><t| (x) rho_t over named classical systems and
// named output tensor factors. Tuples are row-major over the classical
// systems in declaration order.
class CqState {
 public:
  CqState(std::vector<std::string> classical, std::vector<int> sizes, std::vector<double> joint,
          std::vector<std::string> outputs, std::vector<Index> output_dims, std::vector<Matrix> states);

  const std::vector<std::string>& classical_names() const { return cnames_; }
  const std::vector<std::string>& output_names() const { return onames_; }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<Index>& output_dims() const { return odims_; }
  const std::vector<double>& joint() const { return joint_; }
  const Matrix& state(std::size_t tuple) const { return states_[tuple]; }
  std::size_t tuple_count() const { return joint_.size(); }
  Index output_dimension() const;

  // Entropy in bits of the union of the named systems (classical and output).
  double entropy(const std::vector<std::string>& systems) const;
  // Evaluates "H(A|B)", "H(AB)", "I(A:B)", "I(A:B|C)"; system tokens are an
  // uppercase letter followed by optional digits.
  double evaluate(const std::string& expression) const;

  double mutual_information(const std::vector<std::string>& a, const std::vector<std::string>& b,
                            const std::vector<std::string>& given = {}) const;

  // Marginal over the named classical systems; order as given.
  std::vector<double> marginal(const std::vector<std::string>& systems) const;

 private:
  std::vector<std::string> cnames_;
  std::vector<int> sizes_;
  std::vector<double> joint_;
  std::vector<std::string> onames_;
  std::vector<Index> odims_;
  std::vector<Matrix> states_;
  mutable std::map<std::vector<std::string>, double> cache_;

  int classical_index(const std::string& name) const;
  int output_index(const std::string& name) const;
};

// Same as state.evaluate(expression); conditioning systems must be classical.
double conditional_mutual_information(const CqState& state, const std::string& expression);

// Splits "XY" or "B1B2" into system names.
std::vector<std::string> parse_systems(const std::string& s);

struct CqChannel {
  ClassicalDistribution px;
  std::vector<Matrix> states;  // per x

  Index dim() const { return states.front().rows(); }
  void validate() const;
  Matrix average() const;
  CqState to_cq_state() const;  // systems X, B
};

struct MacChannel {
  ClassicalDistribution px, py;
  std::vector<Matrix> states;  // index x * |Y| + y

  Index dim() const { return states.front().rows(); }
  int nx() const { return px.size(); }
  int ny() const { return py.size(); }
  const Matrix& state(int x, int y) const { return states[static_cast<std::size_t>(x * ny() + y)]; }
  void validate() const;
  Matrix average() const;
  Matrix rho_x(int x) const;
  Matrix rho_y(int y) const;
  CqState to_cq_state() const;  // systems X, Y, B

  // Throws std::invalid_argument when the joint does not factor.
  static MacChannel from_joint(const std::vector<double>& pxy, int nx, int ny, std::vector<Matrix> states);
};

// Three senders: X (cloud of sender 1), Z ~ p(z|x) (sender 2), Y independent
// (sender 3); the channel acts on (z, y).
struct CmgChannel {
  ClassicalDistribution px;
  std::vector<std::vector<double>> pz_given_x;  // [x][z]
  ClassicalDistribution py;
  std::vector<Matrix> states;  // index z * |Y| + y

  Index dim() const { return states.front().rows(); }
  int nx() const { return px.size(); }
  int nz() const { return static_cast<int>(pz_given_x.front().size()); }
  int ny() const { return py.size(); }
  const Matrix& state(int z, int y) const { return states[static_cast<std::size_t>(z * ny() + y)]; }
  void validate() const;
  CqState to_cq_state() const;  // systems X, Z, Y, B
  ClassicalDistribution pz() const;

  static CmgChannel from_joint(const std::vector<double>& pxzy, int nx, int nz, int ny, std::vector<Matrix> states);
};

// Interference channel: p(q) p(u,x|q) p(v,y|q), outputs on B1 (x) B2.
struct IcChannel {
  ClassicalDistribution pq;
  std::vector<std::vector<double>> pux_given_q;  // [q][u * |X| + x]
  std::vector<std::vector<double>> pvy_given_q;  // [q][v * |Y| + y]
  int nu = 1, nx = 1, nv = 1, ny = 1;
  Index d1 = 2, d2 = 2;
  std::vector<Matrix> states;  // index x * |Y| + y, on B1 (x) B2

  const Matrix& state(int x, int y) const { return states[static_cast<std::size_t>(x * ny + y)]; }
  void validate() const;
  CqState to_cq_state() const;  // systems Q, U, X, V, Y, B1, B2

  // Same marginals of (Q, X, Y, U) but V constant (and symmetrically U).
  IcChannel with_fixed_v() const;
  IcChannel with_fixed_u() const;
};

// ---------------------------------------------------------------------------
// Rate regions

enum class Sense { Less, LessEq, GreaterEq };

struct Constraint {
  std::vector<double> coeffs;
  Sense sense = Sense::Less;
  double bound = 0.0;
  std::string label;  // entropic expression of the bound
};

struct RegionPart {
  std::string name;
  std::vector<Constraint> constraints;
};

struct RayInterval {
  double lo = 0.0, hi = 0.0;
  bool empty = true;
};

class RateRegion {
 public:
  static constexpr double kMargin = 1e-9;

  RateRegion() = default;
  RateRegion(std::vector<std::string> vars, std::vector<RegionPart> parts);

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<RegionPart>& parts() const { return parts_; }

  // Strict constraints hold as a.r <= b - margin, and vacuously when every
  // rate with a nonzero coefficient is exactly 0. Rates must be >= 0.
  bool satisfies(const Constraint& c, std::span<const double> rates, double margin = kMargin) const;
  bool part_contains(std::size_t part, std::span<const double> rates, double margin = kMargin) const;
  bool contains(std::span<const double> rates, double margin = kMargin) const;
  // Index of the first part containing the point.
  std::optional<std::size_t> containing_part(std::span<const double> rates, double margin = kMargin) const;

  // Feasible t in part along the ray t * direction (direction >= 0).
  RayInterval ray(std::size_t part, std::span<const double> direction) const;
  // Boundary points of every part along `count` directions; 2-variable
  // regions sweep angles, others use the given rng for directions.
  struct BoundaryPoint {
    std::size_t part;
    std::vector<double> rates;
    bool outer;  // far end of the ray interval
  };
  std::vector<BoundaryPoint> boundary_points(std::size_t count, std::uint64_t seed = 1) const;

 private:
  std::vector<std::string> vars_;
  std::vector<RegionPart> parts_;
};

RateRegion ccq_mac_region(const MacChannel& mac);
// Finite-n variant: every bound lowered by 4 c(6 delta), c over |B||X||Y|.
RateRegion ccq_mac_region_finite(const MacChannel& mac, double delta);
RateRegion disinterested_region(const MacChannel& mac);

struct CmgRegions {
  RateRegion ours;       // two parts
  RateRegion classical;  // four-constraint region
  // |H(B|ZY) - H(B|ZXY)| and |H(B|Z) - H(B|XZ)|.
  double identity_residual_zy = 0.0;
  double identity_residual_z = 0.0;
};
CmgRegions cmg_mac_region(const CmgChannel& cmg);

// Variables (R1c, R1p, R2c, R2p).
struct IcRegions {
  RateRegion receiver1;
  RateRegion receiver2;

  bool contains(std::span<const double> quad, double margin = RateRegion::kMargin) const;
};
IcRegions ccqq_ic_region(const IcChannel& ic);

struct IcWitness {
  std::vector<double> quad;  // R1c, R1p, R2c, R2p
  double r1 = 0.0, r2 = 0.0;
  std::size_t part1 = 0, part2 = 0;
};
// All grid quadruples (step in bits, up to max_rate per variable) achievable
// for both receivers.
std::vector<IcWitness> ic_grid(const IcChannel& ic, double step = 0.05, double max_rate = 1.0);

struct CommonMessageResult {
  IcChannel channel;
  std::vector<double> quad;
  bool fixed_v = false, fixed_u = false;
  bool first_parts_hold = false;
  bool rates_preserved = false;
};
// Fixes the other sender's common auxiliary while a receiver needs its
// second part, then re-tests first-part membership.
CommonMessageResult common_message_transform(const IcChannel& ic, std::span<const double> quad);

}  // namespace seqdec
