#include "seqdec/operator_core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>

namespace seqdec {

namespace {

std::atomic<std::size_t> g_dimension_cap{kDefaultDimensionCap};
std::atomic<bool> g_corrupt_eig{false};

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
}

void require_same(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

bool exactly_diagonal(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
  return true;
}

// Make the largest-magnitude entry of each column real positive. Ties within
// 1e-12 go to the first index.
void fix_phases(Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    double best = -1.0;
    Index arg = 0;
    for (Index i = 0; i < v.rows(); ++i) {
      double a = std::abs(v(i, j));
      if (a > best + 1e-12) {
        best = a;
        arg = i;
      }
    }
    if (best <= 0.0) continue;
    Complex phase = std::conj(v(arg, j)) / std::abs(v(arg, j));
    v.col(j) *= phase;
    v(arg, j) = Complex(v(arg, j).real(), 0.0);
  }
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

std::size_t dimension_cap() { return g_dimension_cap.load(); }
void set_dimension_cap(std::size_t cap) { g_dimension_cap.store(cap); }

void check_dimension(std::size_t dim, const std::string& what) {
  if (dim > dimension_cap()) throw CapExceeded(what, dim, dimension_cap());
}

double hermitian_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && hermitian_defect(m) <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    RealVector ev = hermitian_eigenvalues(m);
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return hermitian_defect(m) <= tol * std::max(1.0, operator_norm(0.5 * (m + m.adjoint())));
}

HermitianEig hermitian_eig(const Matrix& m) {
  require_square(m, "hermitian_eig");
  if (!m.allFinite()) throw std::invalid_argument("hermitian_eig: non-finite entries");
  if (!is_hermitian(m, 1e-8)) throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");
  const Index d = m.rows();
  HermitianEig out;
  if (exactly_diagonal(m)) {
    std::vector<Index> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return m(a, a).real() > m(b, b).real(); });
    out.values.resize(d);
    out.vectors = Matrix::Zero(d, d);
    for (Index k = 0; k < d; ++k) {
      out.values(k) = m(order[k], order[k]).real();
      out.vectors(order[k], k) = 1.0;
    }
  } else {
    Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_eig: solver failed");
    out.values = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
    fix_phases(out.vectors);
  }
  if (g_corrupt_eig.load()) out.values *= 1.1;
  return out;
}

double min_eigenvalue(const Matrix& hermitian) {
  require_square(hermitian, "min_eigenvalue");
  return hermitian_eigenvalues(hermitian)(0);
}

double max_eigenvalue(const Matrix& hermitian) {
  require_square(hermitian, "max_eigenvalue");
  RealVector ev = hermitian_eigenvalues(hermitian);
  return ev(ev.size() - 1);
}

double trace_norm(const Matrix& hermitian) {
  require_square(hermitian, "trace_norm");
  return hermitian_eigenvalues(hermitian).cwiseAbs().sum();
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
  require_same(rho, sigma, "trace_distance");
  return trace_norm(rho - sigma);
}

bool psd_leq(const Matrix& a, const Matrix& b, double tol) {
  require_same(a, b, "psd_leq");
  require_square(a, "psd_leq");
  double scale = std::max(1.0, operator_norm(0.5 * (b + b.adjoint())));
  return min_eigenvalue(b - a) >= -tol * scale;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Matrix tensor_product(std::span<const Matrix> factors) {
  if (factors.empty()) throw std::invalid_argument("tensor_product: empty factor list");
  std::size_t rows = 1, cols = 1;
  for (const auto& f : factors) {
    rows *= static_cast<std::size_t>(f.rows());
    cols *= static_cast<std::size_t>(f.cols());
    check_dimension(std::max(rows, cols), "tensor_product");
  }
  Matrix out = factors[0];
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

Matrix orthonormal_columns(const Matrix& columns, double rank_tol) {
  if (columns.cols() == 0) return Matrix(columns.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(columns, Eigen::ComputeThinU);
  const RealVector& s = svd.singularValues();
  Index r = 0;
  while (r < s.size() && s(r) > rank_tol) ++r;
  Matrix u = svd.matrixU().leftCols(r);
  fix_phases(u);
  return u;
}

std::vector<Vector> orthonormal_basis(std::span<const Vector> vectors, double rank_tol) {
  if (vectors.empty()) return {};
  const Index d = vectors[0].size();
  Matrix cols(d, static_cast<Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].size() != d) throw std::invalid_argument("orthonormal_basis: dimension mismatch");
    cols.col(static_cast<Index>(k)) = vectors[k];
  }
  Matrix u = orthonormal_columns(cols, rank_tol);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(u.cols()));
  for (Index j = 0; j < u.cols(); ++j) out.emplace_back(u.col(j));
  return out;
}

Matrix ket_bra(const Vector& ket) { return ket * ket.adjoint(); }

Matrix maximally_mixed(Index dim) {
  return Matrix::Identity(dim, dim) / static_cast<double>(dim);
}

Matrix partial_trace(const Matrix& rho, std::span<const Index> dims, std::span<const Index> keep) {
  require_square(rho, "partial_trace");
  const Index nf = static_cast<Index>(dims.size());
  Index total = 1;
  for (Index d : dims) total *= d;
  if (total != rho.rows()) throw std::invalid_argument("partial_trace: dims do not match operator");
  std::vector<bool> kept(static_cast<std::size_t>(nf), false);
  for (Index k : keep) {
    if (k < 0 || k >= nf) throw std::invalid_argument("partial_trace: bad factor index");
    kept[static_cast<std::size_t>(k)] = true;
  }
  // Strides for each factor in the full index (first factor most significant).
  std::vector<Index> stride(static_cast<std::size_t>(nf));
  Index s = 1;
  for (Index f = nf - 1; f >= 0; --f) {
    stride[static_cast<std::size_t>(f)] = s;
    s *= dims[static_cast<std::size_t>(f)];
  }
  std::vector<Index> kdims, tdims, kstride, tstride;
  for (Index f = 0; f < nf; ++f) {
    auto uf = static_cast<std::size_t>(f);
    if (kept[uf]) {
      kdims.push_back(dims[uf]);
      kstride.push_back(stride[uf]);
    } else {
      tdims.push_back(dims[uf]);
      tstride.push_back(stride[uf]);
    }
  }
  auto offsets = [](const std::vector<Index>& ds, const std::vector<Index>& st) {
    Index count = 1;
    for (Index d : ds) count *= d;
    std::vector<Index> off(static_cast<std::size_t>(count), 0);
    for (Index c = 0; c < count; ++c) {
      Index rem = c, o = 0;
      for (Index f = static_cast<Index>(ds.size()) - 1; f >= 0; --f) {
        auto uf = static_cast<std::size_t>(f);
        o += (rem % ds[uf]) * st[uf];
        rem /= ds[uf];
      }
      off[static_cast<std::size_t>(c)] = o;
    }
    return off;
  };
  std::vector<Index> koff = offsets(kdims, kstride);
  std::vector<Index> toff = offsets(tdims, tstride);
  const Index dk = static_cast<Index>(koff.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Index i = 0; i < dk; ++i)
    for (Index j = 0; j < dk; ++j) {
      Complex acc(0.0, 0.0);
      for (Index t : toff) acc += rho(koff[static_cast<std::size_t>(i)] + t, koff[static_cast<std::size_t>(j)] + t);
      out(i, j) = acc;
    }
  return out;
}

std::optional<std::string> DensityOperator::validate(const Matrix& m, bool subnormalized, double tol) {
  if (m.rows() != m.cols() || m.rows() < 1) return "operator is not square";
  if (!m.allFinite()) return "operator has non-finite entries";
  Matrix h = 0.5 * (m + m.adjoint());
  double norm = operator_norm(h);
  if (hermitian_defect(m) > tol * std::max(1.0, norm)) return "operator is not Hermitian";
  if (min_eigenvalue(h) < -tol) return "operator is not positive semidefinite";
  double tr = m.trace().real();
  if (subnormalized) {
    if (tr > 1.0 + tol) return "trace exceeds 1";
  } else if (std::abs(tr - 1.0) > tol) {
    return "trace is not 1";
  }
  return std::nullopt;
}

DensityOperator::DensityOperator(Matrix m, bool subnormalized)
    : m_(std::move(m)), subnormalized_(subnormalized) {
  if (auto err = validate(m_, subnormalized_)) throw std::invalid_argument("DensityOperator: " + *err);
}

// ---------------------------------------------------------------------------
// Projector

struct Projector::Impl {
  Index dim = 0;
  bool structured = false;
  std::vector<Matrix> factors;
  std::vector<Index> kept;
  mutable std::once_flag once;
  mutable Matrix support;  // dim x rank isometry; filled lazily when structured

  const Matrix& get_support() const {
    if (structured) std::call_once(once, [this] { support = build_support(); });
    return support;
  }

  Matrix build_support() const {
    Matrix v(dim, static_cast<Index>(kept.size()));
    std::vector<Index> fd;
    for (const auto& f : factors) fd.push_back(f.rows());
    for (std::size_t c = 0; c < kept.size(); ++c) {
      Index rem = kept[c];
      std::vector<Index> digits(fd.size());
      for (Index f = static_cast<Index>(fd.size()) - 1; f >= 0; --f) {
        digits[static_cast<std::size_t>(f)] = rem % fd[static_cast<std::size_t>(f)];
        rem /= fd[static_cast<std::size_t>(f)];
      }
      Vector col = factors[0].col(digits[0]);
      for (std::size_t f = 1; f < fd.size(); ++f) col = kron(col, Vector(factors[f].col(digits[f])));
      v.col(static_cast<Index>(c)) = col;
    }
    return v;
  }
};

Projector::Projector() : Projector(zero(1)) {}
Projector::Projector(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Projector Projector::zero(Index dim) {
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->support = Matrix(dim, 0);
  return Projector(impl);
}

Projector Projector::identity(Index dim) {
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->support = Matrix::Identity(dim, dim);
  return Projector(impl);
}

Projector Projector::from_isometry(Matrix isometry) {
  const Index d = isometry.rows();
  if (isometry.cols() > 0) {
    Matrix g = isometry.adjoint() * isometry;
    if ((g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() > 1e-9 * std::max<Index>(1, d))
      throw std::invalid_argument("Projector::from_isometry: columns are not orthonormal");
  }
  auto impl = std::make_shared<Impl>();
  impl->dim = d;
  impl->support = std::move(isometry);
  return Projector(impl);
}

bool is_projector(const Matrix& p, double tol) {
  if (p.rows() != p.cols()) return false;
  if (hermitian_defect(p) > tol) return false;
  return (p * p - p).cwiseAbs().maxCoeff() <= tol;
}

Projector Projector::from_dense(const Matrix& p) {
  require_square(p, "Projector::from_dense");
  const double tol = 1e-9 * static_cast<double>(p.rows());
  if (!is_projector(p, tol)) throw std::invalid_argument("Projector::from_dense: not a Hermitian idempotent");
  HermitianEig e = hermitian_eig(p);
  Index r = 0;
  while (r < e.values.size() && e.values(r) > 0.5) ++r;
  return from_isometry(e.vectors.leftCols(r));
}

Projector Projector::from_span(std::span<const Vector> vectors, double rank_tol) {
  if (vectors.empty()) throw std::invalid_argument("Projector::from_span: dimension unknown for empty span");
  std::vector<Vector> basis = orthonormal_basis(vectors, rank_tol);
  Matrix v(vectors[0].size(), static_cast<Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) v.col(static_cast<Index>(k)) = basis[k];
  return from_isometry(std::move(v));
}

Projector Projector::structured(std::vector<Matrix> factors, std::vector<Index> kept) {
  if (factors.empty()) throw std::invalid_argument("Projector::structured: no factors");
  std::size_t dim = 1;
  for (const auto& f : factors) {
    if (f.rows() != f.cols()) throw std::invalid_argument("Projector::structured: non-square factor");
    dim *= static_cast<std::size_t>(f.rows());
    check_dimension(dim, "Projector::structured");
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  if (!kept.empty() && (kept.front() < 0 || kept.back() >= static_cast<Index>(dim)))
    throw std::invalid_argument("Projector::structured: index out of range");
  auto impl = std::make_shared<Impl>();
  impl->dim = static_cast<Index>(dim);
  impl->structured = true;
  impl->factors = std::move(factors);
  impl->kept = std::move(kept);
  return Projector(impl);
}

Index Projector::dimension() const { return impl_->dim; }

Index Projector::rank() const {
  return impl_->structured ? static_cast<Index>(impl_->kept.size()) : impl_->support.cols();
}

bool Projector::is_structured() const { return impl_->structured; }

const Matrix& Projector::support() const { return impl_->get_support(); }

Matrix Projector::dense() const {
  const Matrix& v = support();
  if (v.cols() == 0) return Matrix::Zero(impl_->dim, impl_->dim);
  return v * v.adjoint();
}

Matrix Projector::basis() const {
  if (!impl_->structured) throw std::logic_error("Projector::basis: not structured");
  return tensor_product(impl_->factors);
}

const std::vector<Matrix>& Projector::factors() const {
  if (!impl_->structured) throw std::logic_error("Projector::factors: not structured");
  return impl_->factors;
}

const std::vector<Index>& Projector::indices() const {
  if (!impl_->structured) throw std::logic_error("Projector::indices: not structured");
  return impl_->kept;
}

Projector Projector::complement() const {
  if (impl_->structured) {
    std::vector<Index> rest;
    rest.reserve(static_cast<std::size_t>(impl_->dim) - impl_->kept.size());
    std::size_t k = 0;
    for (Index i = 0; i < impl_->dim; ++i) {
      if (k < impl_->kept.size() && impl_->kept[k] == i) {
        ++k;
        continue;
      }
      rest.push_back(i);
    }
    return structured(impl_->factors, std::move(rest));
  }
  const Matrix& v = impl_->support;
  const Index d = impl_->dim, r = v.cols();
  if (r == 0) return identity(d);
  if (r == d) return zero(d);
  Eigen::HouseholderQR<Matrix> qr(v);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix c = q.rightCols(d - r);
  fix_phases(c);
  return from_isometry(std::move(c));
}

Matrix Projector::conjugate(const Matrix& rho) const {
  if (rho.rows() != impl_->dim || rho.cols() != impl_->dim)
    throw std::invalid_argument("Projector::conjugate: dimension mismatch");
  const Matrix& v = support();
  if (v.cols() == 0) return Matrix::Zero(impl_->dim, impl_->dim);
  if (v.cols() == impl_->dim && !impl_->structured && v.isIdentity(0.0)) return rho;
  return v * (v.adjoint() * rho * v) * v.adjoint();
}

Matrix Projector::conjugate_complement(const Matrix& rho) const {
  if (rho.rows() != impl_->dim || rho.cols() != impl_->dim)
    throw std::invalid_argument("Projector::conjugate_complement: dimension mismatch");
  const Matrix& v = support();
  if (v.cols() == 0) return rho;
  // (I - P) rho (I - P) = rho - P rho - rho P + P rho P
  Matrix x = v.adjoint() * rho;  // r x d
  Matrix prho = v * x;
  Matrix rhop = (rho * v) * v.adjoint();
  return rho - prho - rhop + v * (x * v) * v.adjoint();
}

double Projector::expectation(const Matrix& rho) const {
  if (rho.rows() != impl_->dim || rho.cols() != impl_->dim)
    throw std::invalid_argument("Projector::expectation: dimension mismatch");
  const Matrix& v = support();
  if (v.cols() == 0) return 0.0;
  return (v.adjoint() * rho * v).trace().real();
}

Vector Projector::apply(const Vector& x) const {
  const Matrix& v = support();
  if (v.cols() == 0) return Vector::Zero(impl_->dim);
  return v * (v.adjoint() * x);
}

std::optional<RealVector> Projector::diagonal_mask() const {
  const Index d = impl_->dim;
  if (impl_->structured) {
    bool all_id = std::all_of(impl_->factors.begin(), impl_->factors.end(),
                              [](const Matrix& f) { return f.isIdentity(0.0); });
    if (all_id) {
      RealVector mask = RealVector::Zero(d);
      for (Index i : impl_->kept) mask(i) = 1.0;
      return mask;
    }
  }
  Matrix p = dense();
  RealVector mask(d);
  for (Index i = 0; i < d; ++i) {
    double x = p(i, i).real();
    if (std::abs(x) <= 1e-12) mask(i) = 0.0;
    else if (std::abs(x - 1.0) <= 1e-12) mask(i) = 1.0;
    else return std::nullopt;
  }
  Matrix off = p;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > 1e-12) return std::nullopt;
  return mask;
}

double product_expectation(const Projector& p, std::span<const Matrix> locals) {
  if (locals.empty()) throw std::invalid_argument("product_expectation: no factors");
  if (p.is_structured() && p.factors().size() == locals.size()) {
    const auto& fs = p.factors();
    std::vector<RealVector> diag(locals.size());
    std::vector<Index> fd(locals.size());
    for (std::size_t i = 0; i < locals.size(); ++i) {
      if (fs[i].rows() != locals[i].rows()) throw std::invalid_argument("product_expectation: dimension mismatch");
      diag[i] = (fs[i].adjoint() * locals[i] * fs[i]).diagonal().real();
      fd[i] = fs[i].rows();
    }
    double total = 0.0;
    for (Index k : p.indices()) {
      double term = 1.0;
      Index rem = k;
      for (Index f = static_cast<Index>(fd.size()) - 1; f >= 0; --f) {
        auto uf = static_cast<std::size_t>(f);
        term *= diag[uf](rem % fd[uf]);
        rem /= fd[uf];
      }
      total += term;
    }
    return total;
  }
  return p.expectation(tensor_product(locals));
}

namespace testing {
void set_corrupt_eigensolver(bool enabled) { g_corrupt_eig.store(enabled); }
bool corrupt_eigensolver() { return g_corrupt_eig.load(); }
}  // namespace testing

}  // namespace seqdec
