#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "tbk/coupling.hpp"
#include "tbk/exact.hpp"
#include "tbk/flow.hpp"
#include "tbk/wilson.hpp"

namespace tbk {

using Json = nlohmann::ordered_json;

/// printf("%.17g"); round-trips every finite double.
std::string format_double(double x);

void write_profile_csv(std::ostream& out, const std::vector<ProfilePoint>& profile);
void write_spectrum_csv(std::ostream& out, const SpectrumReport& report);
void write_trials_csv(std::ostream& out, const std::vector<TrialStats>& trials);
void write_congestion_csv(std::ostream& out, const FlowReport& report);

Json to_json(const ProfilePoint& point);
Json to_json(const MixingReport& report);
Json to_json(const SpectrumReport& report);
Json to_json(const BetaMinCheck& check);
Json to_json(const TransferReport& report);
Json to_json(const Proportion& p);
Json to_json(const CollectorStats& stats);
Json to_json(const IncreasingBottomEstimate& est);
Json to_json(const SingleCardEstimate& est);
Json to_json(const WilsonReport& report);
Json to_json(const FlowVerification& v);
Json to_json(const ComparisonReport& report);

Json complex_json(Complex z);

/// Lowercase hex SHA-256 of a byte string / file.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes text to a file, throwing std::runtime_error with the path on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

struct OutputRecord {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;  // arguments after the program name
  Json parameters = Json::object();
  std::uint64_t seed = 0;
  std::string version;
  std::string started;
  std::string finished;
  std::vector<OutputRecord> outputs;
};

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// UTC timestamp, ISO 8601 with seconds.
std::string utc_now();

/// JSON file of keyed oracle values.  Existing keys are never overwritten
/// unless the store was opened with regenerate = true.
class FixtureStore {
 public:
  explicit FixtureStore(std::filesystem::path path, bool regenerate = false);

  bool contains(const std::string& key) const;
  const nlohmann::json& value(const std::string& key) const;
  void put(const std::string& key, nlohmann::json value, const std::string& note);
  void save() const;

 private:
  std::filesystem::path path_;
  bool regenerate_;
  nlohmann::json data_;
};

}  // namespace tbk
