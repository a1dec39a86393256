#pragma once

// Dense complex linear-algebra substrate shared by every other module.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqdec {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Thrown when a tensor power or enumeration would exceed the configured cap.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(const std::string& what, std::size_t required, std::size_t cap)
      : std::runtime_error(what + ": requires " + std::to_string(required) +
                           ", cap is " + std::to_string(cap)),
        required_(required),
        cap_(cap) {}
  std::size_t required() const { return required_; }
  std::size_t cap() const { return cap_; }

 private:
  std::size_t required_;
  std::size_t cap_;
};

inline constexpr std::size_t kDefaultDimensionCap = 4096;

/// Process-wide cap on dense operator dimension (default 4096).
std::size_t dimension_cap();
void set_dimension_cap(std::size_t cap);

/// Throws CapExceeded when `dim` is above the dimension cap.
void check_dimension(std::size_t dim, const std::string& what);

/// Result of a Hermitian eigendecomposition: eigenvalues descending,
/// eigenvectors as columns with the largest-magnitude entry real positive.
struct HermitianEig {
  RealVector values;
  Matrix vectors;
};

HermitianEig hermitian_eig(const Matrix& m);

template <typename Derived>
HermitianEig hermitian_eig(const Eigen::MatrixBase<Derived>& m) {
  return hermitian_eig(Matrix(m));
}

double operator_norm(const Matrix& m);
double hermitian_defect(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol);

/// Sum of absolute eigenvalues of (rho - sigma).
double trace_distance(const Matrix& rho, const Matrix& sigma);
double trace_norm(const Matrix& hermitian);

/// True iff the smallest eigenvalue of (b - a) is >= -tol * max(1, ||b||).
bool psd_leq(const Matrix& a, const Matrix& b, double tol = 1e-9);
double min_eigenvalue(const Matrix& hermitian);
double max_eigenvalue(const Matrix& hermitian);

/// Kronecker product in the given order; first factor is most significant.
Matrix tensor_product(std::span<const Matrix> factors);
Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

/// Orthonormal vectors spanning `vectors` up to singular values <= rank_tol.
std::vector<Vector> orthonormal_basis(std::span<const Vector> vectors,
                                      double rank_tol = 1e-10);
/// Same, with input vectors as matrix columns; returns an isometry.
Matrix orthonormal_columns(const Matrix& columns, double rank_tol = 1e-10);

Matrix ket_bra(const Vector& ket);
Matrix maximally_mixed(Index dim);

/// Partial trace keeping the tensor factors listed in `keep` (ascending).
Matrix partial_trace(const Matrix& rho, std::span<const Index> dims,
                     std::span<const Index> keep);

/// A density operator: Hermitian, PSD and unit trace (or trace <= 1 when
/// constructed as subnormalized).
class DensityOperator {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit DensityOperator(Matrix m, bool subnormalized = false);

  const Matrix& matrix() const { return m_; }
  Index dimension() const { return m_.rows(); }
  bool subnormalized() const { return subnormalized_; }

  /// Validates without throwing; returns an explanation on failure.
  static std::optional<std::string> validate(const Matrix& m,
                                             bool subnormalized = false,
                                             double tol = kTolerance);

 private:
  Matrix m_;
  bool subnormalized_;
};

/// Orthogonal projector. Either dense (given by an isometry spanning its
/// support) or structured: diagonal 0/1 in a product basis whose factors are
/// per-position unitaries, with the kept basis positions as linear
/// multi-indices (first factor most significant).
class Projector {
 public:
  Projector();

  static Projector zero(Index dim);
  static Projector identity(Index dim);
  /// Validates P^2 = P = P^dagger within 1e-9 * dim.
  static Projector from_dense(const Matrix& p);
  /// Columns must be orthonormal.
  static Projector from_isometry(Matrix isometry);
  static Projector from_span(std::span<const Vector> vectors,
                             double rank_tol = 1e-10);
  static Projector structured(std::vector<Matrix> factors,
                              std::vector<Index> kept);

  Index dimension() const;
  Index rank() const;
  bool is_null() const { return rank() == 0; }
  bool is_structured() const;

  /// dim x rank isometry spanning the support.
  const Matrix& support() const;
  Matrix dense() const;

  /// Structured form only: full product basis and kept positions.
  Matrix basis() const;
  const std::vector<Matrix>& factors() const;
  const std::vector<Index>& indices() const;

  Projector complement() const;

  /// P rho P.
  Matrix conjugate(const Matrix& rho) const;
  /// (I - P) rho (I - P).
  Matrix conjugate_complement(const Matrix& rho) const;
  /// Tr[rho P].
  double expectation(const Matrix& rho) const;
  Vector apply(const Vector& v) const;

  /// When the projector is diagonal in the computational basis, its 0/1
  /// diagonal.
  std::optional<RealVector> diagonal_mask() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  explicit Projector(std::shared_ptr<const Impl> impl);
};

bool is_projector(const Matrix& p, double tol);

// Tr[(A_1 x ... x A_n) P]. Uses the product form when P is structured with
// matching factors, so the tensor power is never formed.
double product_expectation(const Projector& p, std::span<const Matrix> locals);

namespace testing {
/// Negative-control hook: when enabled, hermitian_eig reports eigenvalues
/// scaled by 1.1. Used only to demonstrate that property suites catch a
/// corrupted core.
void set_corrupt_eigensolver(bool enabled);
bool corrupt_eigensolver();
}  // namespace testing

}  // namespace seqdec
