#pragma once

// Two-subspace decomposition, the intersection projector, sequential
// projection chains and the associated inequalities.

#include "seqdec/operator_core.hpp"

#include <vector>

namespace seqdec {

// Numbering follows the five kinds of the two-subspace decomposition:
// 1 orthogonal to both, 2 inside both, 3 inside P only, 4 inside Q only,
// 5 two-dimensional blocks meeting each subspace in a line.
enum class BlockKind { Neither = 1, Both = 2, FirstOnly = 3, SecondOnly = 4, Angle = 5 };

struct Block {
  BlockKind kind;
  // d x 1 or d x 2 orthonormal columns. For Angle blocks column 0 is the
  // line in the first subspace.
  Matrix basis;
  double angle = 0.0;  // principal angle, Angle blocks only
  Vector a_line;       // empty unless the block meets the first subspace
  Vector b_line;       // empty unless the block meets the second subspace
};

struct CanonicalDecomposition {
  std::vector<Block> blocks;
  // Max-entry residuals of rebuilding each projector from the block lines.
  double residual_first = 0.0;
  double residual_second = 0.0;

  std::size_t count(BlockKind k) const;
  Matrix block_basis() const;  // all block columns side by side
};

inline constexpr double kSigmaOne = 1.0 - 1e-10;
inline constexpr double kSigmaZero = 1e-10;

CanonicalDecomposition jordan_decompose(const Projector& p, const Projector& q);

struct IntersectionResult {
  Projector projector;
  Index kept = 0;
  // psd_leq(R, tau^-1 PB PA PB) at tolerance 1e-8.
  bool sandwich_holds = false;
  // Smallest ||PB a||^2 over kept A-lines (1 when none kept).
  double min_kept_overlap = 1.0;
};

// Keeps the A-lines a of the decomposition with ||PB a||^2 >= tau and
// returns the projector onto span{PB a}.
IntersectionResult intersection_projector(const Projector& pa, const Projector& pb, double tau);

struct SeqStep {
  Projector projector;
  bool pass_on_success = true;  // false: the chain continues through I - P
};

struct SeqOutcome {
  std::vector<double> step_traces;  // Tr after each conjugation
  Matrix final_state;
  double success = 0.0;
};

SeqOutcome sequential_collapse(const Matrix& rho, const std::vector<SeqStep>& steps);

// Tr rho - 2 sqrt(sum_i Tr[rho Pi_i] + Tr[rho (I - target)]); `hostile` are
// the Pi_i = I - Pi'_i of the pass-through steps.
double seq_success_lower_bound(const Matrix& rho, const std::vector<Projector>& hostile,
                               const Projector& target);
// Same right-hand side from precomputed traces.
double seq_success_lower_bound(double trace_rho, double hostile_mass, double target_miss);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// ||v - Pi'_k ... Pi'_1 v||^2 <= sum ||Pi_i v||^2, with Pi_i = I - Pi'_i and
// `projectors` the Pi'_i in application order.
InequalityCheck key_inequality_check(const Vector& v, const std::vector<Projector>& projectors);

// ||rho - M rho M||_1 <= 2 sqrt(1 - Tr[M rho M]).
InequalityCheck gentle_measurement_check(const Matrix& rho, const Matrix& m);

}  // namespace seqdec
