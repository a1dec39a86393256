#pragma once

// Random codebooks and exact simulation of the sequential and PGM decoders.

#include "seqdec/channels.hpp"
#include "seqdec/smoothing.hpp"
#include "seqdec/subspace_geometry.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>

namespace seqdec {

// ---------------------------------------------------------------------------
// Seeds and codebooks

std::uint64_t splitmix64(std::uint64_t x);
// Child seed for stream `a`, sub-stream `b` of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

inline constexpr std::size_t kCodebookSymbolCap = std::size_t{1} << 22;

// ceil(2^{nR}), at least 1. Throws CapExceeded beyond `cap`.
std::size_t message_count(int n, double rate, std::size_t cap = kCodebookSymbolCap);

// Draws one i.i.d. sequence by inverse CDF on 53-bit uniforms.
Sequence draw_sequence(std::mt19937_64& rng, std::span<const double> p, int n);

struct Codebook {
  int n = 0;
  std::vector<double> rates;
  std::uint64_t seed = 0;
  std::vector<Sequence> x;               // cq: x(m); MAC and CMG: sender 1
  std::vector<Sequence> y;               // MAC: sender 2; CMG: sender 3
  std::vector<std::vector<Sequence>> z;  // CMG: z(m1, m2)
};

Codebook sample_cq_codebook(const CqChannel& ch, double rate, int n, std::uint64_t seed);
Codebook sample_mac_codebook(const MacChannel& ch, double r1, double r2, int n, std::uint64_t seed);
Codebook sample_cmg_codebook(const CmgChannel& ch, double r1, double r2, double r3, int n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Decoder options and reports

enum class Variant { Sequential, Gated, Pgm };
std::string variant_name(Variant v);
Variant parse_variant(const std::string& s);  // seq | seq-gated | pgm

struct MessageOrder {
  enum class Kind { Lex, Reverse, Random } kind = Kind::Lex;
  std::uint64_t seed = 0;

  static MessageOrder parse(const std::string& s);  // lex | reverse | random:<seed>
  std::string name() const;
  std::vector<std::size_t> permutation(std::size_t count) const;
};

struct DecoderOptions {
  Variant variant = Variant::Sequential;
  MessageOrder order;
  // tau = 1 - sqrt(epsilon); measured epsilon unless set.
  std::optional<double> theoretical_epsilon;
  // Send the smoothed states rho' instead of the channel states.
  bool smoothed_channel = false;
  std::size_t enumeration_cap = kSmoothingEnumerationCap;
};

struct MessageResult {
  std::vector<std::size_t> message;  // sent message tuple
  double error = 0.0;
  double prefix_error = 0.0;  // error on the leading tuple entries (CMG region 1: (m1, m2))
  // Upper bound on error: 1 - (sequential success lower bound), or the
  // Hayashi-Nagaoka bound for pgm.
  double bound = 0.0;
  bool bound_holds = true;
  double abort_probability = 0.0;
};

struct DecodeReport {
  std::string decoder;
  std::string variant;
  std::string order;
  std::vector<MessageResult> messages;
  double average_error = 0.0;
  double average_prefix_error = 0.0;
  double average_bound = 0.0;
  std::size_t violations = 0;  // bound failures
  double tau = 1.0;
  double tau_epsilon = 0.0;
  std::string tau_source;
  std::size_t sandwich_checked = 0, sandwich_violations = 0;
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Generic engine

struct DecodeProblem {
  std::vector<Projector> candidates;        // decode elements, lexicographic
  std::vector<Matrix> pgm_elements;         // PGM recipe, same indexing
  std::vector<std::vector<std::size_t>> labels;
  struct Sent {
    Matrix state;
    std::size_t correct = 0;
    std::vector<std::size_t> label;
  };
  std::vector<Sent> sent;
  std::size_t prefix = 0;  // label entries compared by prefix_error (0: same as error)
};

// Probability of declaring each candidate (plus abort) for one sent state,
// with the chain visiting candidates in `order`.
std::vector<double> declaration_distribution(const Matrix& rho, const std::vector<Projector>& candidates,
                                             const std::vector<std::size_t>& order, const Projector* gate = nullptr);

DecodeReport run_sequential(const DecodeProblem& problem, const std::vector<std::size_t>& order,
                            const Projector* gate = nullptr);
// Upsilon_i = S^{-1/2} A_i S^{-1/2} on the support of S = sum_i A_i.
DecodeReport run_pgm(const DecodeProblem& problem);

// Samples measurement trajectories of the sequential chain; returns the
// declared candidate, or candidates.size() on abort.
std::size_t sample_trajectory(std::mt19937_64& rng, const Matrix& rho, const std::vector<Projector>& candidates,
                              const std::vector<std::size_t>& order, const Projector* gate = nullptr);

// ---------------------------------------------------------------------------
// Channel decoders. Each caches projectors per sequence so repeated decodes
// (Monte Carlo) share work.

class CqDecoder {
 public:
  CqDecoder(CqChannel ch, int n, double delta, DecoderOptions opt = {});
  DecodeProblem problem(const Codebook& cb) const;
  DecodeReport decode(const Codebook& cb) const;
  // Pi^{rho_{x^n}}_delta, zero for atypical x^n.
  const Projector& pi_x(const Sequence& xn) const;
  const Projector& gate() const { return gate_; }
  Matrix state(const Sequence& xn) const;

 private:
  CqChannel ch_;
  int n_;
  double delta_;
  DecoderOptions opt_;
  std::vector<Spectrum> spec_;
  Projector gate_;
  std::unique_ptr<SmoothingContext> smooth_;
  mutable std::map<Sequence, Projector> cache_;
};

class MacDecoder {
 public:
  MacDecoder(MacChannel ch, int n, double delta, DecoderOptions opt = {});
  DecodeProblem problem(const Codebook& cb) const;
  DecodeReport decode(const Codebook& cb) const;
  double tau() const { return tau_; }
  double tau_epsilon() const { return tau_eps_; }
  const Projector& gate() const { return gate_; }
  // Intersection of supp Pi^{rho_{x^n y^n}}_delta and supp Pi^{rho_{y^n}}_{6 delta}.
  const Projector& tilde(const Sequence& xn, const Sequence& yn) const;
  const Projector& pi_xy(const Sequence& xn, const Sequence& yn) const;
  const Projector& pi_y(const Sequence& yn) const;
  bool pair_typical(const Sequence& xn, const Sequence& yn) const;
  Matrix state(const Sequence& xn, const Sequence& yn) const;

 private:
  MacChannel ch_;
  int n_;
  double delta_;
  DecoderOptions opt_;
  std::vector<double> joint_;
  std::vector<Spectrum> spec_xy_, spec_y_;
  Projector gate_;
  double tau_ = 1.0, tau_eps_ = 0.0;
  std::string tau_source_;
  std::unique_ptr<SmoothingContext> smooth_;
  mutable std::map<std::pair<Sequence, Sequence>, Projector> cache_xy_, cache_tilde_;
  mutable std::map<Sequence, Projector> cache_y_;
};

class CmgDecoder {
 public:
  // region 1: joint (m1, m2, m3) decoding with double intersection;
  // region 2: (m1, m2) decoding with Pi_{z^n}.
  CmgDecoder(CmgChannel ch, int n, double delta, int region, DecoderOptions opt = {});
  DecodeProblem problem(const Codebook& cb) const;
  DecodeReport decode(const Codebook& cb) const;
  double tau() const { return tau_; }
  double tau_epsilon() const { return tau_eps_; }
  int region() const { return region_; }
  const Projector& gate() const { return gate_; }

  bool triple_typical(const Sequence& xn, const Sequence& zn, const Sequence& yn) const;
  bool pair_typical(const Sequence& xn, const Sequence& zn) const;
  const Projector& pi_zy(const Sequence& zn, const Sequence& yn) const;  // delta
  const Projector& pi_xy(const Sequence& xn, const Sequence& yn) const;  // 6 delta
  const Projector& pi_y(const Sequence& yn) const;                       // 6 delta
  const Projector& pi_z(const Sequence& zn) const;                       // delta
  struct Tilde {
    Projector projector;
    bool sandwich_holds = true;
  };
  const Tilde& tilde(const Sequence& xn, const Sequence& zn, const Sequence& yn) const;
  Matrix state(const Sequence& xn, const Sequence& zn, const Sequence& yn) const;

 private:
  CmgChannel ch_;
  int n_;
  double delta_;
  int region_;
  DecoderOptions opt_;
  std::vector<double> joint_xzy_, joint_xz_;
  std::vector<Spectrum> spec_zy_, spec_xy_, spec_y_, spec_z_;
  Projector gate_;
  double tau_ = 1.0, tau_eps_ = 0.0;
  std::string tau_source_;
  std::unique_ptr<SmoothingContext> smooth_;
  mutable std::map<std::pair<Sequence, Sequence>, Projector> cache_zy_, cache_xy_;
  mutable std::map<Sequence, Projector> cache_y_, cache_z_;
  mutable std::map<std::vector<Sequence>, Tilde> cache_tilde_;
};

// ---------------------------------------------------------------------------
// Interference channel: each receiver runs a three-sender decoder on its own
// output factor (|Q| = 1).

struct IcCodebook {
  int n = 0;
  std::vector<double> rates;  // R1c, R1p, R2c, R2p
  std::vector<Sequence> u, v;
  std::vector<std::vector<Sequence>> x, y;  // x(m1c, m1p), y(m2c, m2p)
};
IcCodebook sample_ic_codebook(const IcChannel& ic, std::span<const double> quad, int n, std::uint64_t seed);

struct IcDecodeReport {
  DecodeReport receiver1, receiver2;
  double union_error = 0.0;  // average of min(1, e1 + e2)
};
// Receiver k uses region `region_k` of its three-sender view.
IcDecodeReport ic_decode(const IcChannel& ic, const IcCodebook& cb, double delta, int region1, int region2,
                         DecoderOptions opt = {});
// Receiver 1's three-sender view: cloud U, satellite X, interfering cloud V,
// output Tr_{B2}; receiver 2 symmetric.
CmgChannel ic_receiver_view(const IcChannel& ic, int receiver);

// ---------------------------------------------------------------------------
// Monte Carlo

struct MonteCarloSummary {
  std::size_t trials = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double bound_mean = 0.0;
  double prefix_mean = 0.0;
  std::size_t violations = 0;
  std::size_t sandwich_violations = 0;
  std::vector<double> per_trial;
};

// Trial t decodes a codebook drawn with seed derive_seed(master, t).
MonteCarloSummary monte_carlo(std::size_t trials, std::uint64_t master_seed,
                              const std::function<DecodeReport(std::uint64_t)>& run);

MonteCarloSummary monte_carlo_cq(const CqChannel& ch, double rate, int n, double delta, std::size_t trials,
                                 std::uint64_t seed, DecoderOptions opt = {});
MonteCarloSummary monte_carlo_mac(const MacChannel& ch, double r1, double r2, int n, double delta,
                                  std::size_t trials, std::uint64_t seed, DecoderOptions opt = {});
MonteCarloSummary monte_carlo_cmg(const CmgChannel& ch, std::span<const double> rates, int n, double delta,
                                  int region, std::size_t trials, std::uint64_t seed, DecoderOptions opt = {});

}  // namespace seqdec
