#include <doctest.h>

#include "channel_instances.hpp"
#include "seqdec/decoders.hpp"
#include "test_util.hpp"

#include <cmath>
#include <set>

using namespace seqdec;
using namespace testutil;

namespace {

Matrix basis_state(int d, int i) {
  Matrix m = Matrix::Zero(d, d);
  m(i, i) = 1.0;
  return m;
}

CqChannel bb84_cq() {
  const double r = 1 / std::sqrt(2.0);
  return CqChannel{ClassicalDistribution::uniform(2), {basis_state(2, 0), ket_bra(ket({r, r}))}};
}

CqChannel random_cq(std::mt19937_64& rng, int nx, int d, bool diagonal = false) {
  CqChannel c{ClassicalDistribution(random_probs(rng, nx)), {}};
  for (int x = 0; x < nx; ++x) c.states.push_back(diagonal ? random_diagonal_state(rng, d) : random_density(rng, d));
  return c;
}

Codebook manual_cq(int n, std::vector<Sequence> words) {
  Codebook cb;
  cb.n = n;
  cb.rates = {0.0};
  cb.x = std::move(words);
  return cb;
}

// Success probability of the chain by direct dense products.
double dense_success(const Matrix& rho, const std::vector<Matrix>& projs, const std::vector<std::size_t>& order,
                     std::size_t target) {
  const Index d = rho.rows();
  Matrix a = Matrix::Identity(d, d);
  for (std::size_t j : order) {
    if (j == target) {
      a = projs[j] * a;
      break;
    }
    a = (Matrix::Identity(d, d) - projs[j]) * a;
  }
  return (a * rho * a.adjoint()).trace().real();
}

}  // namespace

TEST_CASE("message counts and caps") {
  CHECK(message_count(3, 0.25) == 2);
  CHECK(message_count(4, 0.5) == 4);
  CHECK(message_count(5, 0.0) == 1);
  CHECK(message_count(6, 0.25) == 3);
  CHECK(message_count(4, 1.0) == 16);
  CHECK_THROWS_AS(message_count(40, 1.0), CapExceeded);
  CHECK_THROWS_AS(message_count(3, -0.1), std::invalid_argument);
}

TEST_CASE("codebooks are deterministic and prefix-stable") {
  std::mt19937_64 rng(1);
  CmgChannel ch = random_cmg(rng, 2, 3, 2, 2);
  Codebook a = sample_cmg_codebook(ch, 0.5, 0.5, 0.25, 4, 77);
  Codebook b = sample_cmg_codebook(ch, 0.5, 0.5, 0.25, 4, 77);
  CHECK(a.x == b.x);
  CHECK(a.z == b.z);
  Codebook small = sample_cmg_codebook(ch, 0.25, 0.25, 0.0, 4, 77);
  REQUIRE(small.x.size() == 2);
  REQUIRE(a.x.size() == 4);
  for (std::size_t i = 0; i < small.x.size(); ++i) {
    CHECK(small.x[i] == a.x[i]);
    for (std::size_t j = 0; j < small.z[i].size(); ++j) CHECK(small.z[i][j] == a.z[i][j]);
  }
  CHECK(small.y.front() == a.y.front());
  Codebook other = sample_cmg_codebook(ch, 0.5, 0.5, 0.25, 4, 78);
  CHECK(other.x != a.x);

  // p(z|x) with disjoint supports pins z to the cloud symbol.
  CmgChannel copy = ch;
  copy.pz_given_x = {{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
  Codebook c = sample_cmg_codebook(copy, 0.5, 0.5, 0.0, 5, 3);
  for (std::size_t i = 0; i < c.x.size(); ++i)
    for (const auto& zn : c.z[i])
      for (std::size_t k = 0; k < zn.size(); ++k) CHECK(zn[k] == 2 * c.x[i][k]);
}

TEST_CASE("message orders") {
  CHECK(MessageOrder::parse("lex").permutation(3) == std::vector<std::size_t>{0, 1, 2});
  CHECK(MessageOrder::parse("reverse").permutation(3) == std::vector<std::size_t>{2, 1, 0});
  MessageOrder r = MessageOrder::parse("random:42");
  CHECK(r.name() == "random:42");
  auto p = r.permutation(50);
  CHECK(std::set<std::size_t>(p.begin(), p.end()).size() == 50);
  CHECK(p == MessageOrder::parse("random:42").permutation(50));
  CHECK(p != MessageOrder::parse("random:43").permutation(50));
  CHECK_THROWS_AS(MessageOrder::parse("random:"), std::invalid_argument);
  CHECK_THROWS_AS(MessageOrder::parse("random:x1"), std::invalid_argument);
  CHECK_THROWS_AS(MessageOrder::parse("sorted"), std::invalid_argument);
  CHECK(parse_variant("seq-gated") == Variant::Gated);
  CHECK_THROWS_AS(parse_variant("sequential"), std::invalid_argument);
}

TEST_CASE("orthogonal codewords decode without error") {
  CqChannel ch{ClassicalDistribution::uniform(2), {basis_state(2, 0), basis_state(2, 1)}};
  Codebook cb = manual_cq(2, {{0, 1}, {1, 0}});
  for (Variant v : {Variant::Sequential, Variant::Gated, Variant::Pgm}) {
    DecoderOptions opt;
    opt.variant = v;
    CqDecoder dec(ch, 2, 0.1, opt);
    DecodeReport r = dec.decode(cb);
    REQUIRE(r.messages.size() == 2);
    CHECK(r.average_error == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.average_bound == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.violations == 0);
  }
  // Atypical codewords get the zero projector and always fail.
  CqDecoder dec(ch, 2, 0.1);
  DecodeReport r = dec.decode(manual_cq(2, {{0, 0}, {1, 0}}));
  CHECK(r.messages[0].error == doctest::Approx(1.0));
  CHECK(r.messages[1].error == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("single message error is the projector miss") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    CqChannel ch = random_cq(rng, 2, 2);
    CqDecoder dec(ch, 4, 0.6);
    Sequence xn{0, 1, 1, 0};
    DecodeReport r = dec.decode(manual_cq(4, {xn}));
    Matrix rho = dec.state(xn);
    double oracle = 1.0 - (dec.pi_x(xn).dense() * rho).trace().real();
    CHECK(r.messages[0].error == doctest::Approx(oracle).epsilon(1e-10));
    // Sequential bound with no hostile steps: 2 sqrt(miss).
    CHECK(r.messages[0].bound == doctest::Approx(2.0 * std::sqrt(std::max(0.0, oracle))).epsilon(1e-9));
  }
}

TEST_CASE("chain probabilities match dense products") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    std::vector<Projector> cands;
    std::vector<Matrix> dense;
    const Index d = 6;
    for (int k = 0; k < 4; ++k) {
      cands.push_back(random_projector(rng, d, 1 + k % 3));
      dense.push_back(cands.back().dense());
    }
    Matrix rho = random_density(rng, d);
    auto order = MessageOrder::parse("random:" + std::to_string(t)).permutation(4);
    auto dist = declaration_distribution(rho, cands, order);
    double total = 0.0;
    for (double p : dist) total += p;
    CHECK(total == doctest::Approx(1.0));
    for (std::size_t k = 0; k < 4; ++k) CHECK(dist[k] == doctest::Approx(dense_success(rho, dense, order, k)));

    DecodeProblem pb;
    pb.candidates = cands;
    for (std::size_t k = 0; k < 4; ++k) {
      pb.labels.push_back({k});
      pb.sent.push_back({rho, k, {k}});
    }
    DecodeReport r = run_sequential(pb, order);
    for (std::size_t k = 0; k < 4; ++k) {
      std::vector<Projector> hostile;
      for (std::size_t j : order) {
        if (j == k) break;
        hostile.push_back(cands[j]);
      }
      CHECK(r.messages[k].bound == doctest::Approx(1.0 - seq_success_lower_bound(rho, hostile, cands[k])));
      CHECK(r.messages[k].bound_holds);
    }
  }
}

TEST_CASE("trajectory sampler agrees with exact declarations") {
  std::mt19937_64 rng(4);
  std::vector<Projector> cands{random_projector(rng, 4, 2), random_projector(rng, 4, 1), random_projector(rng, 4, 2)};
  Matrix rho = random_density(rng, 4);
  std::vector<std::size_t> order{2, 0, 1};
  auto dist = declaration_distribution(rho, cands, order);
  const int samples = 20000;
  std::vector<int> hits(4, 0);
  std::mt19937_64 g(9);
  for (int s = 0; s < samples; ++s) ++hits[sample_trajectory(g, rho, cands, order)];
  for (std::size_t k = 0; k < 4; ++k) {
    double p = dist[k];
    double se = std::sqrt(std::max(p * (1 - p), 1e-12) / samples);
    CHECK(std::abs(hits[k] / static_cast<double>(samples) - p) <= 3.5 * se + 1e-12);
  }
}

TEST_CASE("cq decoding bounds hold in every variant and order") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 6; ++t) {
    CqChannel ch = random_cq(rng, 2, 2);
    for (const char* order : {"lex", "reverse", "random:5"}) {
      for (Variant v : {Variant::Sequential, Variant::Gated, Variant::Pgm}) {
        DecoderOptions opt;
        opt.variant = v;
        opt.order = MessageOrder::parse(order);
        auto mc = monte_carlo_cq(ch, 0.5, 4, 0.5, 3, 100 + static_cast<std::uint64_t>(t), opt);
        CHECK(mc.violations == 0);
        CHECK(mc.mean >= 0.0);
        CHECK(mc.mean <= 1.0);
      }
    }
  }
  // Identical codewords: the later copy is shadowed by the earlier one.
  CqChannel ch = bb84_cq();
  CqDecoder dec(ch, 4, 0.6);
  DecodeReport r = dec.decode(manual_cq(4, {{0, 1, 0, 1}, {0, 1, 0, 1}}));
  CHECK(r.messages[1].error == doctest::Approx(1.0));
  CHECK(r.violations == 0);
}

TEST_CASE("gated decoding bound uses the projected state") {
  CqChannel ch = bb84_cq();
  DecoderOptions opt;
  opt.variant = Variant::Gated;
  CqDecoder dec(ch, 4, 0.6, opt);
  Sequence xn{0, 1, 1, 0};
  DecodeReport r = dec.decode(manual_cq(4, {xn}));
  Matrix eff = dec.gate().conjugate(dec.state(xn));
  double success = dec.pi_x(xn).expectation(eff);
  CHECK(r.messages[0].error == doctest::Approx(1.0 - success));
  double tr = eff.trace().real();
  CHECK(r.messages[0].bound == doctest::Approx(1.0 - seq_success_lower_bound(tr, 0.0, tr - success)));
}

TEST_CASE("mac decoder") {
  std::mt19937_64 rng(6);
  MacChannel ch = random_mac(rng, 2, 2, 2);
  MacDecoder dec(ch, 4, 0.3);
  CHECK(dec.tau() > 0.0);
  CHECK(dec.tau() <= 1.0);
  CHECK(dec.tau() == doctest::Approx(std::max(1e-6, 1.0 - std::sqrt(dec.tau_epsilon()))));
  Codebook cb = sample_mac_codebook(ch, 0.25, 0.25, 4, 11);
  DecodeReport r = dec.decode(cb);
  CHECK(r.messages.size() == cb.x.size() * cb.y.size());
  CHECK(r.violations == 0);
  CHECK(r.tau_source == "measured");
  // Tilde projectors sit inside Pi_{x^n y^n}.
  for (const auto& xn : cb.x)
    for (const auto& yn : cb.y) {
      const Projector& t = dec.tilde(xn, yn);
      if (!dec.pair_typical(xn, yn)) {
        CHECK(t.rank() == 0);
        continue;
      }
      Matrix pt = t.dense();
      CHECK(max_abs(pt * dec.pi_y(yn).dense() - pt) <= 1e-8);
    }

  DecoderOptions th;
  th.theoretical_epsilon = 0.04;
  MacDecoder dth(ch, 4, 0.3, th);
  CHECK(dth.tau() == doctest::Approx(0.8));
  CHECK(dth.decode(cb).tau_source == "theoretical");

  DecoderOptions pgm;
  pgm.variant = Variant::Pgm;
  auto mc = monte_carlo_mac(ch, 0.25, 0.25, 3, 0.5, 4, 1, pgm);
  CHECK(mc.violations == 0);
}

TEST_CASE("cmg decoders reduce to cq decoding for a copied cloud") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 4; ++t) {
    CqChannel cq = random_cq(rng, 2, 2, true);
    cq.px = ClassicalDistribution::uniform(2);
    CmgChannel cmg{cq.px, {{1.0, 0.0}, {0.0, 1.0}}, ClassicalDistribution::uniform(1), cq.states};
    const int n = 4;
    const double delta = 0.5;
    Codebook ccb = sample_cmg_codebook(cmg, 0.5, 0.0, 0.0, n, 20 + static_cast<std::uint64_t>(t));
    Codebook qcb = manual_cq(n, ccb.x);
    for (Variant v : {Variant::Sequential, Variant::Pgm}) {
      DecoderOptions opt;
      opt.variant = v;
      DecodeReport q = CqDecoder(cq, n, delta, opt).decode(qcb);
      for (int region : {1, 2}) {
        DecodeReport c = CmgDecoder(cmg, n, delta, region, opt).decode(ccb);
        REQUIRE(c.messages.size() == q.messages.size());
        for (std::size_t m = 0; m < q.messages.size(); ++m)
          CHECK(c.messages[m].error == doctest::Approx(q.messages[m].error).epsilon(1e-9));
        CHECK(c.sandwich_violations == 0);
      }
    }
  }
}

TEST_CASE("cmg region decoders on random channels") {
  std::mt19937_64 rng(8);
  CmgChannel ch = random_cmg(rng, 2, 2, 2, 2);
  CmgDecoder d1(ch, 3, 0.4, 1);
  Codebook cb = sample_cmg_codebook(ch, 0.34, 0.34, 0.34, 3, 5);
  DecodeReport r1 = d1.decode(cb);
  CHECK(r1.messages.size() == cb.x.size() * cb.z[0].size() * cb.y.size());
  CHECK(r1.violations == 0);
  CHECK(r1.sandwich_checked == r1.messages.size());
  CHECK(r1.sandwich_violations == 0);
  for (const auto& m : r1.messages) CHECK(m.prefix_error <= m.error + 1e-12);

  CmgDecoder d2(ch, 3, 0.4, 2);
  DecodeReport r2 = d2.decode(cb);
  CHECK(r2.messages.size() == r1.messages.size());
  CHECK(r2.violations == 0);
  double iyb = ch.to_cq_state().evaluate("I(Y:B|Z)");
  CHECK(r2.warnings.empty() == (0.34 >= iyb));
  Codebook big = sample_cmg_codebook(ch, 0.34, 0.34, 1.0, 3, 5);
  CHECK(d2.decode(big).warnings.empty());
  CHECK_THROWS_AS(CmgDecoder(ch, 3, 0.4, 3), std::invalid_argument);
}

TEST_CASE("smoothed channel mode sends the primed states") {
  std::mt19937_64 rng(9);
  CmgChannel ch = random_cmg(rng, 2, 2, 1, 2);
  DecoderOptions opt;
  opt.smoothed_channel = true;
  CmgDecoder dec(ch, 3, 0.5, 1, opt);
  SmoothingContext ctx(SmoothingModel::from_cmg(ch), 3, 0.5);
  Codebook cb = sample_cmg_codebook(ch, 0.34, 0.34, 0.0, 3, 8);
  Matrix s = dec.state(cb.x[0], cb.z[0][0], cb.y[0]);
  CHECK(max_abs(s - ctx.smooth(cb.x[0], cb.z[0][0], cb.y[0]).state) == 0.0);
  CHECK(!DensityOperator::validate(s, false, 1e-9));
  DecodeReport r = dec.decode(cb);
  CHECK(r.violations == 0);

  CqChannel cq = bb84_cq();
  CqDecoder cd(cq, 4, 0.6, opt);
  Matrix st = cd.state({0, 1, 0, 1});
  CHECK(!DensityOperator::validate(st, false, 1e-9));
  CHECK(cd.decode(manual_cq(4, {{0, 1, 0, 1}, {1, 0, 1, 0}})).violations == 0);
}

TEST_CASE("interference channel receivers") {
  std::mt19937_64 rng(10);
  IcChannel ic = random_ic(rng);
  CmgChannel v1 = ic_receiver_view(ic, 1);
  CHECK_NOTHROW(v1.validate());
  CHECK(v1.dim() == ic.d1);
  std::vector<double> quad{0.3, 0.0, 0.3, 0.0};
  IcCodebook cb = sample_ic_codebook(ic, quad, 3, 4);
  IcDecodeReport r = ic_decode(ic, cb, 0.5, 1, 2);
  CHECK(r.receiver1.messages.size() == 4);
  CHECK(r.receiver2.messages.size() == 4);
  CHECK(r.receiver1.violations == 0);
  CHECK(r.receiver2.violations == 0);
  CHECK(r.union_error >= 0.0);
  CHECK(r.union_error <= 1.0);

  // Receiver 1 sees only x and receiver 2 only y through classical outputs.
  IcChannel clean = ic;
  clean.states.clear();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) clean.states.push_back(kron(basis_state(2, x), basis_state(2, y)));
  CmgChannel c1 = ic_receiver_view(clean, 1);
  for (int x = 0; x < 2; ++x)
    for (int v = 0; v < 2; ++v) CHECK(max_abs(c1.state(x, v) - basis_state(2, x)) <= 1e-12);

  IcChannel withq = random_ic(rng, 2);
  CHECK_THROWS_AS(ic_receiver_view(withq, 1), std::invalid_argument);
}

TEST_CASE("monte carlo seeding and summaries") {
  CqChannel ch = bb84_cq();
  auto a = monte_carlo_cq(ch, 0.25, 4, 0.7, 8, 123);
  auto b = monte_carlo_cq(ch, 0.25, 4, 0.7, 8, 123);
  CHECK(a.per_trial == b.per_trial);
  double mean = 0.0;
  for (double e : a.per_trial) mean += e;
  mean /= 8;
  double v = 0.0;
  for (double e : a.per_trial) v += (e - mean) * (e - mean);
  CHECK(a.mean == doctest::Approx(mean));
  CHECK(a.standard_error == doctest::Approx(std::sqrt(v / 7 / 8)));
  CHECK(derive_seed(123, 0) != derive_seed(123, 1));
  CHECK(derive_seed(123, 0, 1) != derive_seed(123, 1, 0));
}
