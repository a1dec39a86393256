#pragma once

// Frequency-typical sets, typical and conditionally typical projectors, and
// checkers for the typicality bounds.

#include "seqdec/operator_core.hpp"
#include "seqdec/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace seqdec {

using Sequence = std::vector<int>;

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 20;

struct ClassicalDistribution {
  std::vector<double> p;
  std::vector<std::string> names;  // optional, same length as p when present

  ClassicalDistribution() = default;
  explicit ClassicalDistribution(std::vector<double> probs, std::vector<std::string> symbols = {});

  int size() const { return static_cast<int>(p.size()); }
  double operator[](int x) const { return p[static_cast<std::size_t>(x)]; }
  // Smallest positive probability.
  double p_min() const;
  double entropy() const;
  // Probability of a sequence under the i.i.d. extension.
  double sequence_probability(const Sequence& s) const;

  static ClassicalDistribution uniform(int k);
};

enum class TypicalityBound { Set, Projector, Conditional, Averaged, Smoothing };

struct TypicalityParams {
  double delta = 0.1;
  double epsilon = 0.1;
  // Dimensions whose product enters log(.) in c(delta) and in the threshold.
  std::vector<Index> context_dims;
  double p_min = 0.0;
  double q_min = 0.0;

  double log_context() const;
  double c(double d) const;
  double c() const { return c(delta); }
};

// c(delta) = delta * log2(prod dims) - delta * log2(delta).
double c_delta(double delta, double log2_context);

std::size_t typicality_threshold_n(const TypicalityParams& params, TypicalityBound which);
// Smallest epsilon for which n meets the threshold of `which`.
double implied_epsilon(const TypicalityParams& params, TypicalityBound which, std::size_t n);

std::vector<int> symbol_counts(const Sequence& s, int alphabet_size);
bool is_typical(const Sequence& s, const std::vector<double>& p, double delta);
bool is_typical(const Sequence& s, const ClassicalDistribution& p, double delta);

std::vector<Sequence> typical_set(const ClassicalDistribution& p, int n, double delta,
                                  std::size_t cap = kDefaultEnumerationCap);

// Calls f on every sequence of length n over an alphabet of size k, in
// lexicographic order. Throws CapExceeded when k^n > cap.
template <typename F>
void for_each_sequence(int k, int n, std::size_t cap, F&& f);

// Eigen-data of a state, with eigenvalues within 1e-12 snapped to a common
// value and eigenvalues <= 1e-12 set to zero.
struct Spectrum {
  RealVector q;
  Matrix basis;
  bool degenerate = false;

  double q_min() const;
  double entropy() const;
};

Spectrum spectrum(const Matrix& rho);

// Kept multi-indices (first position most significant) among d^n.
std::vector<Index> typical_indices(const RealVector& q, int n, double delta);

Projector typical_projector(const Spectrum& s, int n, double delta);
Projector typical_projector(const Matrix& rho, int n, double delta);

// Tensor product over symbols of typical projectors of rho_x^{N(x)}, placed
// back at the positions of xn.
Projector cond_typical_projector(std::span<const Spectrum> spectra, const Sequence& xn, double delta);
Projector cond_typical_projector(std::span<const Matrix> states, const Sequence& xn, double delta);

// Eigenvalue of rho^{(x)n} (or rho_{x^n}) attached to a kept multi-index of a
// structured projector built from `spectra` along `xn`.
double product_eigenvalue(std::span<const Spectrum> spectra, const Sequence& xn, Index multi_index);

std::vector<Matrix> local_states(std::span<const Matrix> states, const Sequence& xn);

Report verify_typical_set(const ClassicalDistribution& p, int n, const TypicalityParams& params);
Report verify_typical_projector(const Matrix& rho, int n, const TypicalityParams& params);
// Worst case over every typical x^n.
Report verify_conditional_projector(const ClassicalDistribution& p, std::span<const Matrix> states, int n,
                    const TypicalityParams& params);
// States indexed by x * |Y| + y; p_x and p_y independent. Reports both traces
// for every typical pair against 1 - measured epsilon.
Report verify_averaged_projector(const ClassicalDistribution& px, const ClassicalDistribution& py,
                    std::span<const Matrix> states_xy, int n, const TypicalityParams& params);

struct AveragedTracePair {
  Sequence xn, yn;
  double trace_avg = 0.0;   // Tr[rho_{x^n y^n} Pi^{rho^n}_{2 delta}]
  double trace_cond = 0.0;  // Tr[rho_{x^n y^n} Pi^{rho_{x^n}}_{6 delta}]
};
struct AveragedTraces {
  std::vector<AveragedTracePair> pairs;
  double typical_mass = 0.0;
  double worst_self_capture = 1.0;  // min Tr[rho_{xy} Pi^{rho_{xy}}_delta]
  double measured_epsilon = 0.0;
};
AveragedTraces averaged_projector_traces(const ClassicalDistribution& px, const ClassicalDistribution& py,
                       std::span<const Matrix> states_xy, int n, double delta);

// ---------------------------------------------------------------------------

template <typename F>
void for_each_sequence(int k, int n, std::size_t cap, F&& f) {
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    total *= static_cast<std::size_t>(k);
    if (total > cap) throw CapExceeded("sequence enumeration", total, cap);
  }
  Sequence s(static_cast<std::size_t>(n), 0);
  for (std::size_t c = 0; c < total; ++c) {
    f(static_cast<const Sequence&>(s));
    for (int pos = n - 1; pos >= 0; --pos) {
      auto up = static_cast<std::size_t>(pos);
      if (++s[up] < k) break;
      s[up] = 0;
    }
  }
}

}  // namespace seqdec
