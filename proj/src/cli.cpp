#include "tbk/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "tbk/coupling.hpp"
#include "tbk/errors.hpp"
#include "tbk/exact.hpp"
#include "tbk/flow.hpp"
#include "tbk/measure.hpp"
#include "tbk/report.hpp"
#include "tbk/wilson.hpp"

#ifndef TBK_VERSION
#define TBK_VERSION "0.0.0"
#endif

namespace tbk {

namespace {

namespace fs = std::filesystem;

struct Payload {
  Json primary = Json::object();
  Json parameters = Json::object();
  // File name -> contents, written in order.
  std::vector<std::pair<std::string, std::string>> files;
};

struct Options {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int n = 0;
  int k = 0;
  std::string measure = "q";
  std::string metric = "tv";
  int m_max = 100;
  std::string laziness = "1/2";
  bool allow_n7 = false;
  std::string kind = "bottom-to-top";
  int trials = 1000;
  long long cap = 0;
  double p = 1.0;
  std::vector<long long> tail_steps;
  int j = 0;
  std::string type = "increasing";
  long long m = 0;
  long long l = -1;
  double c = 0.5;
  double eps = 0.5;
  int samples = 10000;
  std::string builder = "general";
  int big_c = 0;
  std::string weights = "rescaled";
  std::vector<double> eps_grid{0.1, 0.5, 0.9};
};

SparseMeasure select_measure(const std::string& name, int n, int k, const std::string& laziness) {
  if (name == "rt") return random_transposition(n);
  if (name == "rudvalis") return rudvalis_symmetric(n);
  const SparseMeasure q = top_to_bottom_k(n, k);
  if (name == "q") return q;
  if (name == "qstar") return reversal(q);
  if (name == "qtilde") return symmetrize(q);
  if (name == "qhat") return lazy(q, parse_rational(laziness));
  if (name == "qqstar") return convolve_measures(q, reversal(q));
  throw DomainError("unknown measure \"" + name + "\" (q, qstar, qtilde, qhat, qqstar, rt, rudvalis)");
}

Metric select_metric(const std::string& name) {
  if (name == "tv") return Metric::TotalVariation;
  if (name == "l2") return Metric::L2;
  throw DomainError("unknown metric \"" + name + "\" (tv or l2)");
}

template <class Fn>
std::string render(Fn fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Payload run_exact(const Options& o) {
  const SparseMeasure q = select_measure(o.measure, o.n, o.k, o.laziness);
  const std::string descriptor = o.measure + "(" + std::to_string(o.n) + "," + std::to_string(o.k) + ")";
  const MixingReport report = mixing_time(q, select_metric(o.metric), o.m_max, descriptor);
  Payload p;
  p.parameters = {{"n", o.n}, {"k", o.k}, {"measure", o.measure}, {"metric", o.metric}, {"mmax", o.m_max}};
  if (o.measure == "qhat") p.parameters["laziness"] = o.laziness;
  p.primary = to_json(report);
  p.files.emplace_back("exact.json", dump(p.primary));
  p.files.emplace_back("profile.csv", render([&](std::ostream& s) { write_profile_csv(s, report.profile); }));
  return p;
}

Payload run_spectrum(const Options& o) {
  const SparseMeasure q = select_measure(o.measure, o.n, o.k, o.laziness);
  const SpectrumReport report = spectrum(q, o.allow_n7);
  Payload p;
  p.parameters = {{"n", o.n}, {"k", o.k}, {"measure", o.measure}, {"allow_n7", o.allow_n7}};
  p.primary = to_json(report);
  if (o.measure == "qtilde") {
    const Rational formula = beta_min_formula(o.n, o.k);
    p.primary["beta_min_formula"] = to_string(formula);
    p.primary["beta_min_formula_holds"] = report.beta_min >= to_double(formula);
    const Flow odd = build_odd_flow_tbk(o.n, o.k);
    p.primary["odd_flow_bound"] = odd_flow_eigenvalue_bound(odd);
  }
  p.files.emplace_back("spectrum.json", dump(p.primary));
  p.files.emplace_back("spectrum.csv", render([&](std::ostream& s) { write_spectrum_csv(s, report); }));
  return p;
}

Payload run_couple(const Options& o) {
  CouplingOptions opts;
  opts.n = o.n;
  opts.k = o.k;
  opts.kind = parse_coupling(o.kind);
  opts.cap = o.cap;
  opts.laziness = o.p;
  const auto trials = coupling_trials(opts, o.trials, o.seed);
  Payload p;
  p.parameters = {{"n", o.n}, {"k", o.k}, {"kind", o.kind}, {"trials", o.trials},
                  {"cap", o.cap > 0 ? o.cap : default_cap(o.n)}, {"p", o.p}, {"tail", o.tail_steps}};
  Json tails = Json::array();
  for (long long m : o.tail_steps) {
    Json t = to_json(tail_probability(trials, m));
    t["m"] = m;
    tails.push_back(std::move(t));
  }
  double mean = 0.0;
  long long censored = 0;
  for (const auto& t : trials) {
    mean += static_cast<double>(t.coupling_time);
    censored += t.censored;
  }
  if (!trials.empty()) mean /= static_cast<double>(trials.size());
  p.primary = {{"n", o.n},  {"k", o.k},        {"kind", o.kind},   {"trials", o.trials},
               {"seed", o.seed}, {"mean_T", mean}, {"censored", censored}, {"tails", std::move(tails)}};
  p.files.emplace_back("couple.json", dump(p.primary));
  p.files.emplace_back("trials.csv", render([&](std::ostream& s) { write_trials_csv(s, trials); }));
  return p;
}

Payload run_collector(const Options& o) {
  const CollectorStats stats = coupon_collector(o.n, o.j, o.trials, o.seed);
  Payload p;
  p.parameters = {{"n", o.n}, {"j", o.j}, {"trials", o.trials}};
  p.primary = to_json(stats);
  p.files.emplace_back("collector.json", dump(p.primary));
  return p;
}

Payload run_lowerbound(const Options& o) {
  Payload p;
  if (o.type == "increasing") {
    const auto est = increasing_bottom_statistic(o.n, o.k, o.j, o.m, o.trials, o.seed);
    p.parameters = {{"type", o.type}, {"n", o.n}, {"k", o.k}, {"j", o.j}, {"m", o.m}, {"trials", o.trials}};
    p.primary = to_json(est);
  } else if (o.type == "single") {
    long long l = o.l;
    if (l < 0) l = static_cast<long long>(std::floor(o.c * (1 - o.c) * (1 - o.c) * o.n * o.n / 12.0));
    const auto est = single_card_lower_bound(o.n, o.k, l, o.trials, o.seed, o.c);
    p.parameters = {{"type", o.type}, {"n", o.n}, {"k", o.k}, {"l", l}, {"c", o.c}, {"trials", o.trials}};
    p.primary = to_json(est);
  } else {
    throw DomainError("unknown lower-bound type \"" + o.type + "\" (increasing or single)");
  }
  p.files.emplace_back("lowerbound.json", dump(p.primary));
  return p;
}

Payload run_wilson(const Options& o) {
  const WilsonReport report = wilson_params(o.n, o.eps, o.samples, o.seed);
  Payload p;
  p.parameters = {{"n", o.n}, {"eps", o.eps}, {"samples", o.samples}};
  p.primary = to_json(report);
  p.files.emplace_back("wilson.json", dump(p.primary));
  return p;
}

Payload run_flow(const Options& o) {
  const FlowWeights weights = o.weights == "unnormalized" ? FlowWeights::Unnormalized : FlowWeights::Rescaled;
  if (o.weights != "unnormalized" && o.weights != "rescaled") {
    throw DomainError("unknown weights \"" + o.weights + "\" (rescaled or unnormalized)");
  }
  std::optional<Flow> flow;
  Rational reference;
  std::string reference_name;
  if (o.builder == "odd") {
    flow = build_odd_flow_tbk(o.n, o.k);
  } else if (o.builder == "large-k") {
    flow = build_flow_large_k(o.n, o.big_c, weights);
    reference = large_k_flow_bound(o.big_c);
    reference_name = "8[C(C+2)^2+1]";
  } else if (o.builder == "general") {
    flow = build_flow_general(o.n, o.k, weights);
    reference = general_flow_bound(o.n, o.k);
    reference_name = "18n^2+8k^2/n^2";
  } else if (o.builder == "rudvalis") {
    flow = build_flow_rudvalis(o.n, o.k);
    reference = rudvalis_flow_bound(o.n, o.k);
    reference_name = "(4/k)sum(3(n-l)+1)^2";
  } else {
    throw DomainError("unknown builder \"" + o.builder + "\" (odd, large-k, general, rudvalis)");
  }
  FlowReport report = congestion_A(*flow);
  if (o.n <= kDenseCap) report.lower_bound = congestion_lower_bound(flow->target, flow->comparison);
  Payload p;
  p.parameters = {{"builder", o.builder}, {"n", o.n}, {"k", o.k}, {"C", o.big_c}, {"weights", o.weights}};
  p.primary = {{"target", flow->target_name}, {"q", flow->comparison_name}, {"report", to_json(report)}};
  if (o.n <= 12) p.primary["verification"] = to_json(verify_flow(*flow));
  if (!reference_name.empty()) {
    p.primary["reference_bound"] = {{"formula", reference_name},
                                    {"value", to_string(reference)},
                                    {"A_le_bound", report.a <= reference},
                                    {"A_le_twice_bound", report.a <= 2 * reference}};
  }
  if (o.builder == "odd") p.primary["eigenvalue_bound"] = odd_flow_eigenvalue_bound(*flow);
  p.primary["notes"] = flow->notes;
  p.files.emplace_back("flow_report.json", dump(p.primary));
  p.files.emplace_back("flow.json", dump(to_json(*flow)));
  p.files.emplace_back("congestion.csv", render([&](std::ostream& s) { write_congestion_csv(s, report); }));
  return p;
}

Payload run_transfer(const Options& o) {
  const TransferReport report = transfer_checks(o.n, o.k, o.eps_grid, parse_rational(o.laziness), o.m_max);
  Payload p;
  p.parameters = {{"n", o.n}, {"k", o.k}, {"eps", o.eps_grid}, {"laziness", o.laziness}, {"mmax", o.m_max}};
  p.primary = to_json(report);
  p.files.emplace_back("transfer.json", dump(p.primary));
  return p;
}

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            bool allow_replay) {
  CLI::App app{"Top to bottom-k shuffle mixing-time toolkit", "tbk"};
  app.set_version_flag("--version", TBK_VERSION);
  app.require_subcommand(0, 1);
  std::string manifest_path;
  if (allow_replay) app.add_option("--manifest", manifest_path, "Re-run a stored manifest");

  Options o;
  using Runner = std::function<Payload(const Options&)>;
  std::map<std::string, Runner> runners;
  auto common = [&](CLI::App* sub, bool stochastic) {
    sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    if (stochastic) sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  };

  auto* exact = app.add_subcommand("exact", "Exact distance profile and mixing time (n <= 8)");
  exact->add_option("--n", o.n)->required();
  exact->add_option("--k", o.k);
  exact->add_option("--measure", o.measure, "q, qstar, qtilde, qhat, qqstar, rt, rudvalis")->capture_default_str();
  exact->add_option("--metric", o.metric, "tv or l2")->capture_default_str();
  exact->add_option("--mmax", o.m_max)->capture_default_str();
  exact->add_option("--laziness", o.laziness, "p for qhat, as p/q or decimal")->capture_default_str();
  common(exact, false);
  runners["exact"] = run_exact;

  auto* spectrum_cmd = app.add_subcommand("spectrum", "Spectrum of a symmetric measure (n <= 6, 7 with --allow-n7)");
  spectrum_cmd->add_option("--n", o.n)->required();
  spectrum_cmd->add_option("--k", o.k);
  spectrum_cmd->add_option("--measure", o.measure, "qtilde, rt, rudvalis")->capture_default_str();
  spectrum_cmd->add_flag("--allow-n7", o.allow_n7);
  common(spectrum_cmd, false);
  runners["spectrum"] = run_spectrum;

  auto* couple = app.add_subcommand("couple", "Monte Carlo coupling times");
  couple->add_option("--n", o.n)->required();
  couple->add_option("--k", o.k)->required();
  couple->add_option("--kind", o.kind, "bottom-to-top or top-insert")->capture_default_str();
  couple->add_option("--trials", o.trials)->capture_default_str();
  couple->add_option("--cap", o.cap, "Step cap (default 50 n^3)");
  couple->add_option("--p", o.p, "Probability of taking a step (binomial thinning)")->capture_default_str();
  couple->add_option("--tail", o.tail_steps, "Steps m at which to report P(T > m)");
  common(couple, true);
  runners["couple"] = run_couple;

  auto* collector = app.add_subcommand("collector", "Coupon-collector times L_j");
  collector->add_option("--n", o.n)->required();
  collector->add_option("--j", o.j)->capture_default_str();
  collector->add_option("--trials", o.trials)->capture_default_str();
  common(collector, true);
  runners["collector"] = run_collector;

  auto* lower = app.add_subcommand("lowerbound", "Monte Carlo lower-bound statistics");
  lower->add_option("--type", o.type, "increasing or single")->capture_default_str();
  lower->add_option("--n", o.n)->required();
  lower->add_option("--k", o.k)->required();
  lower->add_option("--j", o.j, "Bottom block size (increasing)");
  lower->add_option("--m", o.m, "Steps (increasing)");
  lower->add_option("--l", o.l, "Steps (single; default floor(c(1-c)^2 n^2 / 12))");
  lower->add_option("--c", o.c)->capture_default_str();
  lower->add_option("--trials", o.trials)->capture_default_str();
  common(lower, true);
  runners["lowerbound"] = run_lowerbound;

  auto* wilson = app.add_subcommand("wilson", "Eigenfunction lower bound for k = 3");
  wilson->add_option("--n", o.n)->required();
  wilson->add_option("--eps", o.eps)->capture_default_str();
  wilson->add_option("--samples", o.samples)->capture_default_str();
  common(wilson, true);
  runners["wilson"] = run_wilson;

  auto* flow = app.add_subcommand("flow", "Build a flow and compute its congestion");
  flow->add_option("--builder", o.builder, "odd, large-k, general, rudvalis")->capture_default_str();
  flow->add_option("--n", o.n)->required();
  flow->add_option("--k", o.k);
  flow->add_option("--C", o.big_c, "n - k for the large-k builder")->capture_default_str();
  flow->add_option("--weights", o.weights, "rescaled or unnormalized")->capture_default_str();
  common(flow, false);
  runners["flow"] = run_flow;

  auto* transfer = app.add_subcommand("transfer", "Exact mixing-time transfer inequalities");
  transfer->add_option("--n", o.n)->required();
  transfer->add_option("--k", o.k)->required();
  transfer->add_option("--eps", o.eps_grid)->capture_default_str();
  transfer->add_option("--laziness", o.laziness)->capture_default_str();
  transfer->add_option("--mmax", o.m_max)->capture_default_str();
  common(transfer, false);
  runners["transfer"] = run_transfer;

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << TBK_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (!manifest_path.empty()) {
    if (!app.get_subcommands().empty()) {
      err << "error: --manifest cannot be combined with a subcommand\n";
      return kExitUsage;
    }
    const RunManifest m = manifest_from_json(nlohmann::json::parse(read_text(manifest_path)));
    return execute(m.argv, out, err, false);
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  RunManifest manifest;
  manifest.subcommand = name;
  manifest.argv = args;
  manifest.seed = o.seed;
  manifest.version = TBK_VERSION;
  manifest.started = utc_now();
  Payload payload = runners.at(name)(o);
  manifest.parameters = std::move(payload.parameters);
  manifest.parameters["seed"] = o.seed;

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  for (const auto& [file, contents] : payload.files) {
    write_text(dir / file, contents);
    manifest.outputs.push_back({file, sha256_hex(contents)});
  }
  manifest.finished = utc_now();
  write_text(dir / "manifest.json", dump(to_json(manifest)));
  out << dump(payload.primary);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return execute(args, out, err, true);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    for (const auto& line : e.trace()) err << "  " << line << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace tbk
