// seqdec: regions, simulate, verify and sweep over channel spec documents.

#include "seqdec/channels.hpp"
#include "seqdec/decoders.hpp"
#include "seqdec/spec_io.hpp"
#include "seqdec/suites.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

using namespace seqdec;
using nlohmann::ordered_json;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitCap = 3;
constexpr int kExitProperty = 4;

struct PropertyFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::size_t>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string csv_header(const std::string& schema) { return "# " + schema + " v1 " + kToolVersion + "\n"; }

// ---------------------------------------------------------------------------
// regions

const char* sense_name(Sense s) {
  switch (s) {
    case Sense::Less: return "<";
    case Sense::LessEq: return "<=";
    case Sense::GreaterEq: return ">=";
  }
  return "<";
}

std::vector<std::pair<std::string, RateRegion>> regions_for(const ChannelSpec& spec, std::optional<double> delta) {
  std::vector<std::pair<std::string, RateRegion>> out;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CqChannel>) {
          double i = m.to_cq_state().evaluate("I(X:B)");
          out.emplace_back("cq", RateRegion({"R"}, {{"main", {Constraint{{1.0}, Sense::Less, i, "I(X:B)"}}}}));
        } else if constexpr (std::is_same_v<T, MacChannel>) {
          out.emplace_back("ccq-mac", ccq_mac_region(m));
          if (delta) out.emplace_back("ccq-mac-finite", ccq_mac_region_finite(m, *delta));
          out.emplace_back("disinterested", disinterested_region(m));
        } else if constexpr (std::is_same_v<T, CmgChannel>) {
          CmgRegions r = cmg_mac_region(m);
          out.emplace_back("cmg-mac", r.ours);
          out.emplace_back("cmg-mac-classical", r.classical);
        } else {
          IcRegions r = ccqq_ic_region(m);
          out.emplace_back("ccqq-ic-receiver1", r.receiver1);
          out.emplace_back("ccqq-ic-receiver2", r.receiver2);
        }
      },
      spec.model);
  return out;
}

int cmd_regions(const std::string& spec_path, const std::string& out, std::optional<double> delta, std::size_t points) {
  ChannelSpec spec = load_channel_spec(spec_path);
  auto regions = regions_for(spec, delta);
  std::string csv = csv_header("seqdec-regions-csv") + "region,part,index,coefficients,sense,bound,label\n";
  ordered_json j;
  j["tool"] = kToolVersion;
  j["kind"] = spec.kind;
  j["regions"] = ordered_json::array();
  for (const auto& [name, reg] : regions) {
    ordered_json rj;
    rj["name"] = name;
    rj["variables"] = reg.variables();
    rj["parts"] = ordered_json::array();
    auto bps = reg.boundary_points(points, 1);
    for (std::size_t p = 0; p < reg.parts().size(); ++p) {
      const auto& part = reg.parts()[p];
      ordered_json pj;
      pj["name"] = part.name;
      pj["constraints"] = ordered_json::array();
      for (std::size_t c = 0; c < part.constraints.size(); ++c) {
        const auto& con = part.constraints[c];
        std::string coeffs;
        for (std::size_t k = 0; k < con.coeffs.size(); ++k) coeffs += (k ? ";" : "") + num(con.coeffs[k]);
        csv += name + "," + part.name + "," + std::to_string(c) + "," + coeffs + "," + sense_name(con.sense) + "," +
               num(con.bound) + "," + csv_field(con.label) + "\n";
        pj["constraints"].push_back(
            {{"coefficients", con.coeffs}, {"sense", sense_name(con.sense)}, {"bound", con.bound}, {"label", con.label}});
      }
      pj["boundary_points"] = ordered_json::array();
      for (const auto& bp : bps)
        if (bp.part == p) pj["boundary_points"].push_back({{"rates", bp.rates}, {"outer", bp.outer}});
      rj["parts"].push_back(std::move(pj));
    }
    j["regions"].push_back(std::move(rj));
  }
  if (const auto* cmg = std::get_if<CmgChannel>(&spec.model)) {
    CmgRegions r = cmg_mac_region(*cmg);
    j["identity_residuals"] = {{"H(B|ZY)-H(B|ZXY)", r.identity_residual_zy}, {"H(B|Z)-H(B|XZ)", r.identity_residual_z}};
  }
  if (const auto* ic = std::get_if<IcChannel>(&spec.model)) {
    auto grid = ic_grid(*ic, 0.1, 1.0);
    ordered_json w = ordered_json::array();
    for (std::size_t i = 0; i < grid.size() && i < 50; ++i)
      w.push_back({{"quad", grid[i].quad}, {"r1", grid[i].r1}, {"r2", grid[i].r2}, {"part1", grid[i].part1}, {"part2", grid[i].part2}});
    j["ic_grid"] = {{"step", 0.1}, {"max_rate", 1.0}, {"count", grid.size()}, {"witnesses", w}};
  }
  write_file(out + ".csv", csv);
  write_file(out + ".json", j.dump(2) + "\n");
  std::cout << "regions: " << regions.size() << " region(s) for " << spec.kind << " written to " << out << ".csv/.json\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate and sweep

DecoderOptions options_of(const ExperimentConfig& cfg) {
  DecoderOptions opt;
  opt.variant = cfg.variant;
  opt.order = cfg.order;
  opt.theoretical_epsilon = cfg.epsilon;
  return opt;
}

struct TrialRun {
  std::vector<std::pair<std::string, DecodeReport>> streams;
  double error = 0.0, prefix_error = 0.0, bound = 0.0;
  std::size_t violations = 0, sandwich_violations = 0;
};

// Decoders are built once; trial t uses seed derive_seed(cfg.seed, t).
class Runner {
 public:
  Runner(const ChannelSpec& spec, const ExperimentConfig& cfg) : spec_(spec), cfg_(cfg) {
    DecoderOptions opt = options_of(cfg);
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, CqChannel>) cq_ = std::make_unique<CqDecoder>(m, cfg.n, cfg.delta, opt);
          else if constexpr (std::is_same_v<T, MacChannel>) mac_ = std::make_unique<MacDecoder>(m, cfg.n, cfg.delta, opt);
          else if constexpr (std::is_same_v<T, CmgChannel>) cmg_ = std::make_unique<CmgDecoder>(m, cfg.n, cfg.delta, cfg.region, opt);
        },
        spec.model);
  }

  TrialRun run(std::size_t t) const {
    const std::uint64_t seed = derive_seed(cfg_.seed, t);
    const auto& r = cfg_.rates;
    TrialRun out;
    auto single = [&](DecodeReport rep) {
      out.error = rep.average_error;
      out.prefix_error = rep.average_prefix_error;
      out.bound = rep.average_bound;
      out.violations = rep.violations;
      out.sandwich_violations = rep.sandwich_violations;
      out.streams.emplace_back("main", std::move(rep));
    };
    if (cq_) single(cq_->decode(sample_cq_codebook(std::get<CqChannel>(spec_.model), r[0], cfg_.n, seed)));
    else if (mac_) single(mac_->decode(sample_mac_codebook(std::get<MacChannel>(spec_.model), r[0], r[1], cfg_.n, seed)));
    else if (cmg_) single(cmg_->decode(sample_cmg_codebook(std::get<CmgChannel>(spec_.model), r[0], r[1], r[2], cfg_.n, seed)));
    else {
      const auto& ic = std::get<IcChannel>(spec_.model);
      IcDecodeReport rep = ic_decode(ic, sample_ic_codebook(ic, r, cfg_.n, seed), cfg_.delta, cfg_.region, cfg_.region,
                                     options_of(cfg_));
      out.error = rep.union_error;
      out.prefix_error = rep.union_error;
      out.bound = std::min(1.0, rep.receiver1.average_bound + rep.receiver2.average_bound);
      out.violations = rep.receiver1.violations + rep.receiver2.violations;
      out.streams.emplace_back("receiver1", std::move(rep.receiver1));
      out.streams.emplace_back("receiver2", std::move(rep.receiver2));
    }
    return out;
  }

 private:
  const ChannelSpec& spec_;
  const ExperimentConfig& cfg_;
  std::unique_ptr<CqDecoder> cq_;
  std::unique_ptr<MacDecoder> mac_;
  std::unique_ptr<CmgDecoder> cmg_;
};

struct Summary {
  double mean = 0.0, se = 0.0, prefix_mean = 0.0, bound_mean = 0.0;
  std::size_t violations = 0, sandwich_violations = 0;
};

Summary summarize(const std::vector<TrialRun>& runs) {
  Summary s;
  const double k = static_cast<double>(runs.size());
  for (const auto& r : runs) {
    s.mean += r.error / k;
    s.prefix_mean += r.prefix_error / k;
    s.bound_mean += r.bound / k;
    s.violations += r.violations;
    s.sandwich_violations += r.sandwich_violations;
  }
  if (runs.size() > 1) {
    double v = 0.0;
    for (const auto& r : runs) v += (r.error - s.mean) * (r.error - s.mean);
    s.se = std::sqrt(v / (k - 1.0) / k);
  }
  return s;
}

ordered_json config_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["n"] = cfg.n;
  j["delta"] = cfg.delta;
  j["epsilon"] = cfg.epsilon ? ordered_json(*cfg.epsilon) : ordered_json(nullptr);
  j["rates"] = cfg.rates;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["decoder"] = variant_name(cfg.variant);
  j["region"] = cfg.region;
  j["order"] = cfg.order.name();
  return j;
}

int cmd_simulate(const std::string& spec_path, const ExperimentConfig& cfg) {
  ChannelSpec spec = load_channel_spec(spec_path);
  cfg.validate(spec.rate_count());
  Runner runner(spec, cfg);
  std::vector<TrialRun> runs;
  for (std::size_t t = 0; t < cfg.trials; ++t) runs.push_back(runner.run(t));
  Summary s = summarize(runs);

  std::string csv = csv_header("seqdec-simulate-csv") + "trial,stream,message,error,prefix_error,bound,bound_holds,abort\n";
  ordered_json trials = ordered_json::array();
  std::vector<std::string> warnings;
  for (std::size_t t = 0; t < runs.size(); ++t) {
    ordered_json tj;
    tj["trial"] = t;
    tj["error"] = runs[t].error;
    tj["prefix_error"] = runs[t].prefix_error;
    tj["bound"] = runs[t].bound;
    tj["violations"] = runs[t].violations;
    for (const auto& [stream, rep] : runs[t].streams) {
      for (const auto& m : rep.messages)
        csv += std::to_string(t) + "," + stream + "," + join(m.message, ':') + "," + num(m.error) + "," + num(m.prefix_error) +
               "," + num(m.bound) + "," + (m.bound_holds ? "1" : "0") + "," + num(m.abort_probability) + "\n";
      tj[stream] = {{"decoder", rep.decoder}, {"tau", rep.tau}, {"tau_epsilon", rep.tau_epsilon}, {"tau_source", rep.tau_source},
                    {"sandwich_checked", rep.sandwich_checked}, {"sandwich_violations", rep.sandwich_violations}};
      for (const auto& w : rep.warnings)
        if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
    }
    trials.push_back(std::move(tj));
  }
  ordered_json j;
  j["tool"] = kToolVersion;
  j["kind"] = spec.kind;
  j["config"] = config_json(cfg);
  j["summary"] = {{"mean_error", s.mean},         {"standard_error", s.se},          {"mean_prefix_error", s.prefix_mean},
                  {"mean_bound", s.bound_mean},   {"bound_violations", s.violations}, {"sandwich_violations", s.sandwich_violations}};
  j["warnings"] = warnings;
  j["trials"] = trials;
  write_file(cfg.out + ".csv", csv);
  write_file(cfg.out + ".json", j.dump(2) + "\n");
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "simulate: mean error " << num(s.mean) << " (se " << num(s.se) << "), mean bound " << num(s.bound_mean)
            << ", " << s.violations << " bound violation(s)\n";
  if (s.violations > 0 || s.sandwich_violations > 0) throw PropertyFailure("decoder bound violated");
  return 0;
}

int cmd_sweep(const std::string& spec_path, ExperimentConfig cfg, const std::vector<int>& ns) {
  ChannelSpec spec = load_channel_spec(spec_path);
  if (ns.empty()) throw std::invalid_argument("sweep needs at least one --n");
  std::string csv = csv_header("seqdec-sweep-csv") +
                    "n,messages,trials,mean_error,standard_error,mean_prefix_error,mean_bound,violations,"
                    "decrease_vs_previous,decrease_vs_first\n";
  ordered_json rows = ordered_json::array();
  std::optional<Summary> first, prev;
  std::size_t violations = 0;
  const std::string out = cfg.out;
  for (int n : ns) {
    cfg.n = n;
    cfg.validate(spec.rate_count());
    Runner runner(spec, cfg);
    std::vector<TrialRun> runs;
    for (std::size_t t = 0; t < cfg.trials; ++t) runs.push_back(runner.run(t));
    Summary s = summarize(runs);
    violations += s.violations + s.sandwich_violations;
    std::vector<std::size_t> counts;
    for (double r : cfg.rates) counts.push_back(message_count(n, r));
    auto decrease = [&](const std::optional<Summary>& ref) -> std::string {
      if (!ref) return "";
      return ref->mean - s.mean > 3.0 * std::sqrt(ref->se * ref->se + s.se * s.se) ? "1" : "0";
    };
    std::string dprev = decrease(prev), dfirst = decrease(first);
    csv += std::to_string(n) + "," + join(counts, ':') + "," + std::to_string(cfg.trials) + "," + num(s.mean) + "," + num(s.se) +
           "," + num(s.prefix_mean) + "," + num(s.bound_mean) + "," + std::to_string(s.violations) + "," + dprev + "," + dfirst +
           "\n";
    rows.push_back({{"n", n},
                    {"messages", counts},
                    {"mean_error", s.mean},
                    {"standard_error", s.se},
                    {"mean_prefix_error", s.prefix_mean},
                    {"mean_bound", s.bound_mean},
                    {"violations", s.violations},
                    {"decrease_vs_previous", dprev.empty() ? ordered_json(nullptr) : ordered_json(dprev == "1")},
                    {"decrease_vs_first", dfirst.empty() ? ordered_json(nullptr) : ordered_json(dfirst == "1")}});
    if (!first) first = s;
    prev = s;
  }
  ordered_json j;
  j["tool"] = kToolVersion;
  j["kind"] = spec.kind;
  j["config"] = config_json(cfg);
  j["config"].erase("n");
  j["config"]["n_values"] = ns;
  j["rows"] = rows;
  write_file(out + ".csv", csv);
  write_file(out + ".json", j.dump(2) + "\n");
  std::cout << "sweep: " << ns.size() << " block length(s) written to " << out << ".csv/.json\n";
  if (violations > 0) throw PropertyFailure("decoder bound violated");
  return 0;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const std::string& suite, bool mutate, std::uint64_t seed, const std::string& out) {
  std::vector<std::string> names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
  if (suite != "all") {
    auto all = suite_names();
    if (std::find(all.begin(), all.end(), suite) == all.end())
      throw std::invalid_argument("unknown suite '" + suite + "'");
  }
  testing::set_corrupt_eigensolver(mutate);
  ordered_json j;
  j["tool"] = kToolVersion;
  j["suite"] = suite;
  j["mutate"] = mutate;
  j["seed"] = seed;
  j["suites"] = ordered_json::array();
  std::size_t failures = 0;
  for (const auto& name : names) {
    Report r = run_suite(name, seed);
    failures += r.failures();
    std::cout << "suite " << name << ": " << r.checks.size() << " checks, " << r.failures() << " failure(s)\n";
    j["suites"].push_back(to_json(r));
  }
  testing::set_corrupt_eigensolver(false);
  j["failures"] = failures;
  if (!out.empty()) write_file(out + ".json", j.dump(2) + "\n");
  if (failures > 0) throw PropertyFailure(std::to_string(failures) + " property check(s) failed");
  return 0;
}

void add_experiment_options(CLI::App* c, std::string& spec, ExperimentConfig& cfg, std::string& decoder,
                            std::string& order, std::optional<double>& eps) {
  c->add_option("--spec", spec, "channel spec document")->required();
  c->add_option("--out", cfg.out, "output path prefix (.csv and .json are written)")->required();
  c->add_option("--delta", cfg.delta, "typicality parameter");
  c->add_option("--epsilon", eps, "theoretical epsilon for tau = 1 - sqrt(epsilon)");
  c->add_option("--rate", cfg.rates, "rate in bits per sender, repeatable")->take_all();
  c->add_option("--trials", cfg.trials, "Monte Carlo codebooks");
  c->add_option("--seed", cfg.seed, "master seed");
  c->add_option("--decoder", decoder, "seq, seq-gated or pgm");
  c->add_option("--region", cfg.region, "CMG and IC decoder region (1 or 2)");
  c->add_option("--order", order, "lex, reverse or random:<seed>");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential decoding lab for classical-quantum channels"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string spec, out, suite = "all", decoder = "seq", order = "lex";
  std::optional<double> delta, eps;
  std::size_t points = 64;
  bool mutate = false;
  std::uint64_t verify_seed = 1;
  ExperimentConfig cfg;
  std::vector<int> ns;

  auto* regions = app.add_subcommand("regions", "rate-region constraints and boundary points");
  regions->add_option("--spec", spec, "channel spec document")->required();
  regions->add_option("--out", out, "output path prefix (.csv and .json are written)")->required();
  regions->add_option("--delta", delta, "also emit the finite-n ccq-MAC region");
  regions->add_option("--points", points, "boundary directions per region");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo decoding with exact error probabilities");
  add_experiment_options(simulate, spec, cfg, decoder, order, eps);
  simulate->add_option("--n", cfg.n, "block length");

  auto* sweep = app.add_subcommand("sweep", "simulate over several block lengths");
  add_experiment_options(sweep, spec, cfg, decoder, order, eps);
  sweep->add_option("--n", ns, "block lengths, repeatable")->take_all();

  auto* verify = app.add_subcommand("verify", "run fixed-seed property suites");
  verify->add_option("--suite", suite, "suite name or all");
  verify->add_flag("--mutate", mutate, "corrupt the eigensolver (negative control)");
  verify->add_option("--seed", verify_seed, "suite seed");
  verify->add_option("--out", out, "optional JSON report path prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (*regions) return cmd_regions(spec, out, delta, points);
    cfg.variant = parse_variant(decoder);
    cfg.order = MessageOrder::parse(order);
    cfg.epsilon = eps;
    if (*simulate) return cmd_simulate(spec, cfg);
    if (*sweep) return cmd_sweep(spec, cfg, ns);
    if (*verify) return cmd_verify(suite, mutate, verify_seed, out);
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const PropertyFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProperty;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
