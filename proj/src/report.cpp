#include "tbk/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "tbk/errors.hpp"

namespace tbk {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_profile_csv(std::ostream& out, const std::vector<ProfilePoint>& profile) {
  out << "step,tv,l2\n";
  for (const auto& p : profile) {
    out << p.step << ',' << format_double(p.tv) << ',' << format_double(p.l2) << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report) {
  out << "index,eigenvalue\n";
  for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
    out << i << ',' << format_double(report.eigenvalues[i]) << '\n';
  }
}

void write_trials_csv(std::ostream& out, const std::vector<TrialStats>& trials) {
  out << "trial,T,censored\n";
  for (const auto& t : trials) {
    out << t.trial << ',' << t.coupling_time << ',' << (t.censored ? 1 : 0) << '\n';
  }
}

void write_congestion_csv(std::ostream& out, const FlowReport& report) {
  out << "element,letters,q,load,ratio,ratio_value\n";
  for (const auto& load : report.loads) {
    std::string letters;
    for (const auto& name : load.letters) letters += (letters.empty() ? "" : " ") + name;
    out << '"' << load.element.to_string() << "\"," << letters << ',' << to_string(load.probability)
        << ',' << to_string(load.load) << ',' << to_string(load.ratio) << ','
        << format_double(to_double(load.ratio)) << '\n';
  }
}

Json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

namespace {

Json optional_int(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const ProfilePoint& point) {
  return {{"step", point.step}, {"tv", point.tv}, {"l2", point.l2}};
}

Json to_json(const MixingReport& report) {
  Json profile = Json::array();
  for (const auto& p : report.profile) profile.push_back(to_json(p));
  return {{"measure", report.measure},
          {"metric", metric_name(report.metric)},
          {"threshold", report.threshold},
          {"m_max", report.m_max},
          {"mixing_time", optional_int(report.mixing_time)},
          {"saturated", report.saturated()},
          {"profile", std::move(profile)}};
}

Json to_json(const SpectrumReport& report) {
  return {{"beta_min", report.beta_min},
          {"spectral_gap", report.spectral_gap},
          {"eigenvalues", report.eigenvalues}};
}

Json to_json(const BetaMinCheck& check) {
  return {{"n", check.n},
          {"k", check.k},
          {"exact_beta_min", check.exact_beta_min},
          {"formula", to_string(check.formula)},
          {"formula_value", to_double(check.formula)},
          {"holds", check.holds}};
}

Json to_json(const TransferReport& report) {
  Json lazy = Json::array();
  for (const auto& c : report.lazy_checks) {
    lazy.push_back({{"epsilon", c.epsilon},
                    {"scaled_term", c.scaled_term},
                    {"constant_term", c.constant_term},
                    {"holds", c.holds}});
  }
  return {{"n", report.n},
          {"k", report.k},
          {"laziness", to_string(report.laziness)},
          {"T", optional_int(report.t_tv)},
          {"T2", optional_int(report.t_l2)},
          {"T2_star", optional_int(report.t_l2_star)},
          {"T_lazy", optional_int(report.t_lazy)},
          {"T_le_T2", report.t_le_t2},
          {"T2_le_2T2_star", report.t2_le_twice_star},
          {"lazy_checks", std::move(lazy)},
          {"all_hold", report.all_hold()}};
}

Json to_json(const Proportion& p) {
  return {{"hits", p.hits},
          {"total", p.total},
          {"estimate", p.estimate},
          {"sigma", p.sigma},
          {"ci_low", p.lower},
          {"ci_high", p.upper}};
}

Json to_json(const CollectorStats& stats) {
  const double se = stats.samples.empty() ? 0.0 : stats.stddev / std::sqrt(static_cast<double>(stats.samples.size()));
  return {{"n", stats.n},
          {"j", stats.j},
          {"trials", stats.samples.size()},
          {"mean", stats.mean},
          {"stddev", stats.stddev},
          {"standard_error", se},
          {"mean_over_nlogn", stats.mean_over_nlogn}};
}

Json to_json(const IncreasingBottomEstimate& est) {
  return {{"n", est.n},
          {"k", est.k},
          {"j", est.j},
          {"m", est.m},
          {"tail", to_json(est.tail)},
          {"estimate", est.lower_bound},
          {"ci_low", est.lower_ci},
          {"ci_high", est.upper_ci}};
}

Json to_json(const SingleCardEstimate& est) {
  return {{"n", est.n},
          {"k", est.k},
          {"l", est.l},
          {"c", est.c},
          {"start", est.start},
          {"block", est.block},
          {"probability", to_json(est.hit)},
          {"pi_A", est.pi_a},
          {"lower_bound", est.lower_bound}};
}

Json to_json(const WilsonReport& report) {
  const WilsonParams& p = report.params;
  return {{"n", p.n},
          {"epsilon", p.epsilon},
          {"lambda", complex_json(p.lambda)},
          {"gamma", p.gamma},
          {"n3_gamma", p.gamma * p.n * p.n * p.n},
          {"chi0", complex_json(p.chi0)},
          {"chi1", complex_json(p.chi1)},
          {"psi_max", p.psi_max},
          {"R", p.r},
          {"residual", report.eigen_residual},
          {"newton_iterations", report.newton.iterations},
          {"newton_residual", report.newton.residual},
          {"chi_residuals",
           {{"sum", report.chi.residual_sum},
            {"ratio", report.chi.residual_ratio},
            {"chi1", report.chi.residual_chi1}}},
          {"bound_t", report.bound_t},
          {"lazy_bound_t", report.lazy_bound_t},
          {"bound_formula", step_bound_formula(p)},
          {"lazy_closed_form", report.lazy_closed_form}};
}

Json to_json(const FlowVerification& v) {
  return {{"ok", v.ok()},
          {"letters_ok", v.letters_ok},
          {"parity_ok", v.parity_ok},
          {"marginals_ok", v.marginals_ok},
          {"discrepancies", v.discrepancies}};
}

Json to_json(const ComparisonReport& report) {
  return {{"n", report.n},
          {"A", report.a},
          {"T2_reference", report.t2_reference},
          {"T2_chain", optional_int(report.t2_chain)},
          {"beta_minus", report.beta_minus},
          {"term_reference", report.term_reference},
          {"term_volume", report.term_volume},
          {"term_spectral", report.term_spectral},
          {"bound", report.bound},
          {"holds", report.holds},
          {"slack", report.slack}};
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text(path)); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json to_json(const RunManifest& m) {
  Json outputs = Json::array();
  for (const auto& o : m.outputs) outputs.push_back({{"path", o.path}, {"sha256", o.sha256}});
  return {{"subcommand", m.subcommand},
          {"argv", m.argv},
          {"parameters", m.parameters},
          {"seed", m.seed},
          {"version", m.version},
          {"started", m.started},
          {"finished", m.finished},
          {"outputs", std::move(outputs)}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.subcommand = j.at("subcommand").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.parameters = Json::parse(j.at("parameters").dump());
  m.seed = j.value("seed", std::uint64_t{0});
  m.version = j.value("version", std::string{});
  m.started = j.value("started", std::string{});
  m.finished = j.value("finished", std::string{});
  if (j.contains("outputs")) {
    for (const auto& o : j.at("outputs")) {
      m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
    }
  }
  return m;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

FixtureStore::FixtureStore(std::filesystem::path path, bool regenerate)
    : path_(std::move(path)), regenerate_(regenerate), data_(nlohmann::json::object()) {
  if (std::filesystem::exists(path_)) data_ = nlohmann::json::parse(read_text(path_));
}

bool FixtureStore::contains(const std::string& key) const { return data_.contains(key); }

const nlohmann::json& FixtureStore::value(const std::string& key) const {
  if (!data_.contains(key)) throw DomainError("no fixture named \"" + key + "\"");
  return data_.at(key);
}

void FixtureStore::put(const std::string& key, nlohmann::json value, const std::string& note) {
  if (data_.contains(key) && !regenerate_) {
    throw DomainError("fixture \"" + key + "\" exists; regeneration must be requested explicitly");
  }
  data_[key] = std::move(value);
  data_["_notes"][key] = note;
}

void FixtureStore::save() const { write_text(path_, data_.dump(1) + "\n"); }

}  // namespace tbk
