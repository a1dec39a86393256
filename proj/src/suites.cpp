#include "seqdec/suites.hpp"

#include "seqdec/decoders.hpp"
#include "seqdec/smoothing.hpp"
#include "seqdec/subspace_geometry.hpp"
#include "seqdec/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace seqdec {

namespace {

Matrix gaussian(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

Matrix unitary(std::mt19937_64& rng, Index d) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rng, d, d));
  return qr.householderQ() * Matrix::Identity(d, d);
}

Matrix density(std::mt19937_64& rng, Index d) {
  Matrix a = gaussian(rng, d, d);
  Matrix r = a * a.adjoint();
  return r / r.trace().real();
}

Projector projector_any_rank(std::mt19937_64& rng, Index d) {
  Index r = std::uniform_int_distribution<Index>(0, d)(rng);
  if (r == 0) return Projector::zero(d);
  return Projector::from_isometry(unitary(rng, d).leftCols(r));
}

Index dim_between(std::mt19937_64& rng, Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); }

std::string tag(const std::string& suite, std::size_t i) { return suite + "[" + std::to_string(i) + "]"; }

Report operator_core_suite(std::mt19937_64& rng) {
  Report r;
  for (std::size_t t = 0; t < 200; ++t) {
    Index d = dim_between(rng, 2, 16);
    Matrix a = gaussian(rng, d, d);
    Matrix h = 0.5 * (a + a.adjoint());
    HermitianEig e = hermitian_eig(h);
    Matrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    double res = (back - h).cwiseAbs().maxCoeff();
    r.add(make_check(tag("operator-core.eig_reconstruction", t), res, Relation::LessEq, 1e-9 * std::max(1.0, operator_norm(h))));
    Matrix rho = density(rng, d);
    r.add(make_check(tag("operator-core.eig_trace", t), hermitian_eig(rho).values.sum() - 1.0, Relation::AbsLessEq, 1e-9, true, 0.0));
  }
  return r;
}

Report key_suite(std::mt19937_64& rng) {
  Report r;
  for (std::size_t t = 0; t < 1000; ++t) {
    Index d = dim_between(rng, 2, 32);
    Vector v = gaussian(rng, d, 1).col(0);
    v /= v.norm();
    int k = static_cast<int>(dim_between(rng, 1, 5));
    std::vector<Projector> ps;
    for (int i = 0; i < k; ++i) ps.push_back(projector_any_rank(rng, d));
    auto c = key_inequality_check(v, ps);
    r.add(make_check(tag("lemma-key", t), c.lhs, Relation::LessEq, c.rhs));
  }
  return r;
}

Report seq_suite(std::mt19937_64& rng) {
  Report r;
  std::uniform_real_distribution<double> scale(0.3, 1.0);
  for (std::size_t t = 0; t < 500; ++t) {
    Index d = dim_between(rng, 2, 16);
    Matrix rho = density(rng, d) * scale(rng);
    int k = static_cast<int>(dim_between(rng, 0, 5));
    std::vector<SeqStep> steps;
    std::vector<Projector> hostile;
    for (int i = 0; i < k; ++i) {
      Projector h = projector_any_rank(rng, d);
      hostile.push_back(h);
      steps.push_back({h, false});
    }
    Projector target = projector_any_rank(rng, d);
    steps.push_back({target, true});
    double exact = sequential_collapse(rho, steps).success;
    r.add(make_check(tag("lemma-seq", t), exact, Relation::GreaterEq, seq_success_lower_bound(rho, hostile, target)));
  }
  return r;
}

Report two_subspace_suite(std::mt19937_64& rng) {
  Report r;
  for (std::size_t t = 0; t < 300; ++t) {
    Index d = dim_between(rng, 3, 32);
    Projector p = projector_any_rank(rng, d), q = projector_any_rank(rng, d);
    if (t % 3 == 0 && p.rank() > 0) {
      // Share a line so the "inside both" kind occurs.
      Matrix cols(d, q.rank() + 1);
      cols << q.support(), p.support().col(0);
      q = Projector::from_isometry(orthonormal_columns(cols));
    }
    auto cd = jordan_decompose(p, q);
    r.add(make_check(tag("two-subspace.residual", t), std::max(cd.residual_first, cd.residual_second), Relation::LessEq, 1e-8));
    double biggest = 0.0;
    std::vector<Vector> lines;
    for (const auto& b : cd.blocks) {
      biggest = std::max(biggest, static_cast<double>(b.basis.cols()));
      if (b.a_line.size() > 0) lines.push_back(b.a_line);
    }
    r.add(make_check(tag("two-subspace.block_size", t), biggest, Relation::LessEq, 2.0, true, 0.0));
    // The first-subspace lines form an orthonormal basis of supp P.
    Matrix v(d, static_cast<Index>(lines.size()));
    for (std::size_t i = 0; i < lines.size(); ++i) v.col(static_cast<Index>(i)) = lines[i];
    double basis_res = lines.empty() ? (p.rank() == 0 ? 0.0 : 1.0)
                                     : std::max((v.adjoint() * v - Matrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff(),
                                                (v * v.adjoint() - p.dense()).cwiseAbs().maxCoeff());
    r.add(make_check(tag("two-subspace.support_basis", t), basis_res, Relation::LessEq, 1e-8));
  }
  return r;
}

Report intersection_suite(std::mt19937_64& rng) {
  Report r;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::size_t idx = 0;
  for (double eps : {0.01, 0.04, 0.16}) {
    for (int t = 0; t < 30; ++t) {
      Index d = dim_between(rng, 4, 16);
      for (;;) {
        Index ra = dim_between(rng, 1, std::max<Index>(1, d / 3));
        Matrix u = unitary(rng, d);
        Matrix a = u.leftCols(ra);
        Matrix bcols(d, ra);
        double theta_max = 2.0 * std::asin(std::min(1.0, std::sqrt(eps)));
        for (Index i = 0; i < ra; ++i) {
          double th = theta_max * uni(rng);
          bcols.col(i) = std::cos(th) * a.col(i) + std::sin(th) * u.col(ra + i);
        }
        Projector pa = Projector::from_isometry(a);
        Projector pb = Projector::from_isometry(orthonormal_columns(bcols));
        Matrix c = gaussian(rng, ra, ra);
        Matrix inner = c * c.adjoint();
        Matrix rho = a * (inner / inner.trace().real()) * a.adjoint();
        if (pb.expectation(rho) < 1.0 - eps) continue;
        const double tau = 1.0 - std::sqrt(eps);
        auto res = intersection_projector(pa, pb, tau);
        Matrix pbd = pb.dense();
        Matrix bound = pbd * pa.dense() * pbd / tau;
        double gap = min_eigenvalue(bound - res.projector.dense());
        r.add(make_check(tag("intersection.sandwich", idx), gap, Relation::GreaterEq, 0.0, true, 1e-8));
        r.add(make_check(tag("intersection.trace", idx), res.projector.expectation(rho), Relation::GreaterEq,
                         1.0 - 2.0 * std::sqrt(eps)));
        ++idx;
        break;
      }
    }
  }
  return r;
}

Report typicality_suite(std::mt19937_64& rng) {
  Report r;
  for (int t = 0; t < 6; ++t) {
    std::uniform_real_distribution<double> pu(0.2, 0.8);
    double p0 = pu(rng);
    ClassicalDistribution p({p0, 1.0 - p0});
    std::vector<Matrix> st{density(rng, 2), density(rng, 2)};
    TypicalityParams params{0.2 + 0.05 * t, 0.1, {}, 0, 0};
    int n = 6 + t % 5;
    r.append(verify_typical_set(p, n, params));
    r.append(verify_typical_projector(st[0], n, params));
    r.append(verify_conditional_projector(p, st, n, params));
  }
  return r;
}

Report averaged_projector_suite() {
  const double s = 1 / std::sqrt(2.0);
  auto ket_of = [](Complex a, Complex b) {
    Vector v(2);
    v << a, b;
    return ket_bra(v);
  };
  std::vector<Matrix> st{ket_of(1, 0), ket_of(s, s), ket_of(0, 1), ket_of(s, -s)};
  TypicalityParams params{0.25, 0.1, {}, 0, 0};
  return verify_averaged_projector(ClassicalDistribution({0.5, 0.5}), ClassicalDistribution({2.0 / 3.0, 1.0 / 3.0}), st, 6, params);
}

Report gentle_suite(std::mt19937_64& rng) {
  Report r;
  for (std::size_t t = 0; t < 500; ++t) {
    Index d = dim_between(rng, 2, 8);
    Matrix rho = density(rng, d);
    Matrix a = gaussian(rng, d, d);
    HermitianEig e = hermitian_eig(0.5 * (a + a.adjoint()));
    RealVector lam = e.values.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    Matrix m = e.vectors * lam.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    m = 0.5 * (m + m.adjoint());
    auto c = gentle_measurement_check(rho, m);
    r.add(make_check(tag("gentle", t), c.lhs, Relation::LessEq, c.rhs));
  }
  return r;
}

Report smoothing_suite(std::mt19937_64& rng) {
  SmoothingModel m{ClassicalDistribution::uniform(2), {{0.5, 0.5}, {0.5, 0.5}}, ClassicalDistribution::uniform(1), {}};
  for (int i = 0; i < 4; ++i) m.states.push_back(density(rng, 2));
  Report r = verify_smoothing_bounds(smoothed_states(m, 4, 0.3));
  return r;
}

Report decoder_suite() {
  const double s = 1 / std::sqrt(2.0);
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  Vector plus(2);
  plus << s, s;
  CqChannel ch{ClassicalDistribution::uniform(2), {z, ket_bra(plus)}};
  Report r;
  for (Variant v : {Variant::Sequential, Variant::Gated, Variant::Pgm}) {
    DecoderOptions opt;
    opt.variant = v;
    for (int n = 3; n <= 6; ++n) {
      auto mc = monte_carlo_cq(ch, 0.25, n, 0.7, 10, 7, opt);
      r.add(make_check("decoders." + variant_name(v) + ".violations[n=" + std::to_string(n) + "]",
                       static_cast<double>(mc.violations), Relation::LessEq, 0.0, true, 0.0));
    }
  }
  return r;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"operator-core", "lemma-key", "lemma-seq", "two-subspace", "intersection",
          "typicality",    "averaged-projector",     "gentle",    "smoothing",    "decoders"};
}

Report run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "all") {
    Report all;
    all.title = "all";
    for (const auto& s : suite_names()) all.append(run_suite(s, seed));
    return all;
  }
  auto names = suite_names();
  auto pos = static_cast<std::uint64_t>(std::find(names.begin(), names.end(), name) - names.begin());
  std::mt19937_64 rng(derive_seed(seed, pos));
  Report r;
  if (name == "operator-core") r = operator_core_suite(rng);
  else if (name == "lemma-key") r = key_suite(rng);
  else if (name == "lemma-seq") r = seq_suite(rng);
  else if (name == "two-subspace") r = two_subspace_suite(rng);
  else if (name == "intersection") r = intersection_suite(rng);
  else if (name == "typicality") r = typicality_suite(rng);
  else if (name == "averaged-projector") r = averaged_projector_suite();
  else if (name == "gentle") r = gentle_suite(rng);
  else if (name == "smoothing") r = smoothing_suite(rng);
  else if (name == "decoders") r = decoder_suite();
  else throw std::invalid_argument("unknown suite '" + name + "'");
  r.title = name;
  return r;
}

}  // namespace seqdec
