#include "seqdec/subspace_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace seqdec {

std::size_t CanonicalDecomposition::count(BlockKind k) const {
  return static_cast<std::size_t>(
      std::count_if(blocks.begin(), blocks.end(), [k](const Block& b) { return b.kind == k; }));
}

Matrix CanonicalDecomposition::block_basis() const {
  Index d = blocks.empty() ? 0 : blocks.front().basis.rows();
  Index cols = 0;
  for (const auto& b : blocks) cols += b.basis.cols();
  Matrix out(d, cols);
  Index c = 0;
  for (const auto& b : blocks) {
    out.middleCols(c, b.basis.cols()) = b.basis;
    c += b.basis.cols();
  }
  return out;
}

namespace {

Matrix outer_sum(const std::vector<Block>& blocks, bool first, Index d) {
  Matrix p = Matrix::Zero(d, d);
  for (const auto& b : blocks) {
    const Vector& v = first ? b.a_line : b.b_line;
    if (v.size() > 0) p += v * v.adjoint();
  }
  return p;
}

}  // namespace

CanonicalDecomposition jordan_decompose(const Projector& p, const Projector& q) {
  if (p.dimension() != q.dimension()) throw std::invalid_argument("jordan_decompose: dimension mismatch");
  const Index d = p.dimension();
  const Matrix& va = p.support();
  const Matrix& vb = q.support();
  const Index ra = va.cols(), rb = vb.cols();
  CanonicalDecomposition out;

  Matrix ua = va, ub = vb;  // paired bases after rotation
  RealVector sigma;
  if (ra > 0 && rb > 0) {
    Eigen::JacobiSVD<Matrix> svd(va.adjoint() * vb, Eigen::ComputeFullU | Eigen::ComputeFullV);
    ua = va * svd.matrixU();
    ub = vb * svd.matrixV();
    sigma = svd.singularValues();
  }
  const Index paired = sigma.size();
  for (Index i = 0; i < paired; ++i) {
    double s = std::min(1.0, sigma(i));
    Vector a = ua.col(i), b = ub.col(i);
    if (s >= kSigmaOne) {
      Block blk{BlockKind::Both, Matrix(a), 0.0, a, b};
      out.blocks.push_back(std::move(blk));
    } else if (s <= kSigmaZero) {
      out.blocks.push_back(Block{BlockKind::FirstOnly, Matrix(a), 0.0, a, Vector()});
      out.blocks.push_back(Block{BlockKind::SecondOnly, Matrix(b), 0.0, Vector(), b});
    } else {
      // Align the phase of b with a so that <a|b> = s exactly.
      Complex ov = a.dot(b);
      b *= std::conj(ov) / std::abs(ov);
      Vector e = b - s * a;
      e /= e.norm();
      Matrix basis(d, 2);
      basis.col(0) = a;
      basis.col(1) = e;
      out.blocks.push_back(Block{BlockKind::Angle, basis, std::acos(s), a, b});
    }
  }
  for (Index i = paired; i < ra; ++i)
    out.blocks.push_back(Block{BlockKind::FirstOnly, Matrix(ua.col(i)), 0.0, Vector(ua.col(i)), Vector()});
  for (Index i = paired; i < rb; ++i)
    out.blocks.push_back(Block{BlockKind::SecondOnly, Matrix(ub.col(i)), 0.0, Vector(), Vector(ub.col(i))});

  // Neither: orthogonal complement of everything collected so far.
  Matrix used = out.block_basis();
  if (used.cols() < d) {
    Matrix comp;
    if (used.cols() == 0) {
      comp = Matrix::Identity(d, d);
    } else {
      Projector u = Projector::from_span(
          [&] {
            std::vector<Vector> cols;
            for (Index j = 0; j < used.cols(); ++j) cols.emplace_back(used.col(j));
            return cols;
          }(),
          1e-10);
      comp = u.complement().support();
    }
    for (Index j = 0; j < comp.cols(); ++j)
      out.blocks.push_back(Block{BlockKind::Neither, Matrix(comp.col(j)), 0.0, Vector(), Vector()});
  }

  out.residual_first = (outer_sum(out.blocks, true, d) - p.dense()).cwiseAbs().maxCoeff();
  out.residual_second = (outer_sum(out.blocks, false, d) - q.dense()).cwiseAbs().maxCoeff();
  return out;
}

IntersectionResult intersection_projector(const Projector& pa, const Projector& pb, double tau) {
  if (pa.dimension() != pb.dimension()) throw std::invalid_argument("intersection_projector: dimension mismatch");
  if (!(tau > 0.0) || tau > 1.0) throw std::invalid_argument("intersection_projector: tau must lie in (0, 1]");
  const Index d = pa.dimension();
  IntersectionResult res;
  if (pa.rank() == 0 || pb.rank() == 0) {
    res.projector = Projector::zero(d);
    res.sandwich_holds = true;
    return res;
  }
  const Matrix& va = pa.support();
  const Matrix& vb = pb.support();
  Eigen::JacobiSVD<Matrix> svd(va.adjoint() * vb, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  Matrix ub = vb * svd.matrixV();
  std::vector<Index> keep;
  for (Index i = 0; i < s.size(); ++i) {
    double overlap = std::min(1.0, s(i) * s(i));
    if (s(i) > kSigmaZero && overlap >= tau - 1e-12) {
      keep.push_back(i);
      res.min_kept_overlap = std::min(res.min_kept_overlap, overlap);
    }
  }
  res.kept = static_cast<Index>(keep.size());
  if (keep.empty()) {
    res.projector = Projector::zero(d);
    res.sandwich_holds = true;
    return res;
  }
  Matrix b(d, res.kept);
  for (Index k = 0; k < res.kept; ++k) b.col(k) = ub.col(keep[static_cast<std::size_t>(k)]);
  res.projector = Projector::from_isometry(orthonormal_columns(b));
  Matrix pbd = pb.dense();
  Matrix bound = pbd * pa.dense() * pbd / tau;
  res.sandwich_holds = psd_leq(res.projector.dense(), bound, 1e-8);
  return res;
}

SeqOutcome sequential_collapse(const Matrix& rho, const std::vector<SeqStep>& steps) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("sequential_collapse: rho must be square");
  SeqOutcome out;
  Matrix cur = rho;
  for (const auto& st : steps) {
    if (st.projector.dimension() != rho.rows()) throw std::invalid_argument("sequential_collapse: dimension mismatch");
    cur = st.pass_on_success ? st.projector.conjugate(cur) : st.projector.conjugate_complement(cur);
    out.step_traces.push_back(cur.trace().real());
  }
  out.success = cur.trace().real();
  out.final_state = std::move(cur);
  return out;
}

double seq_success_lower_bound(double trace_rho, double hostile_mass, double target_miss) {
  return trace_rho - 2.0 * std::sqrt(std::max(0.0, hostile_mass + target_miss));
}

double seq_success_lower_bound(const Matrix& rho, const std::vector<Projector>& hostile, const Projector& target) {
  if (target.dimension() != rho.rows()) throw std::invalid_argument("seq_success_lower_bound: dimension mismatch");
  double tr = rho.trace().real();
  double mass = 0.0;
  for (const auto& h : hostile) {
    if (h.dimension() != rho.rows()) throw std::invalid_argument("seq_success_lower_bound: dimension mismatch");
    mass += h.expectation(rho);
  }
  return seq_success_lower_bound(tr, mass, tr - target.expectation(rho));
}

InequalityCheck key_inequality_check(const Vector& v, const std::vector<Projector>& projectors) {
  Vector w = v;
  double rhs = 0.0;
  for (const auto& p : projectors) {
    if (p.dimension() != v.size()) throw std::invalid_argument("key_inequality_check: dimension mismatch");
    rhs += (v - p.apply(v)).squaredNorm();
    w = p.apply(w);
  }
  InequalityCheck c;
  c.lhs = (v - w).squaredNorm();
  c.rhs = rhs;
  c.holds = c.lhs <= c.rhs + 1e-9;
  return c;
}

InequalityCheck gentle_measurement_check(const Matrix& rho, const Matrix& m) {
  if (rho.rows() != m.rows() || rho.cols() != m.cols())
    throw std::invalid_argument("gentle_measurement_check: dimension mismatch");
  const Index d = m.rows();
  if (!psd_leq(m, Matrix::Identity(d, d), 1e-9) || min_eigenvalue(m) < -1e-9)
    throw std::invalid_argument("gentle_measurement_check: M must satisfy 0 <= M <= I");
  Matrix mrm = m * rho * m.adjoint();
  InequalityCheck c;
  c.lhs = trace_distance(rho, mrm);
  c.rhs = 2.0 * std::sqrt(std::max(0.0, 1.0 - mrm.trace().real()));
  c.holds = c.lhs <= c.rhs + 1e-9;
  return c;
}

}  // namespace seqdec
