#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace taxiflow {

inline constexpr std::string_view kTaxiflowVersion = "0.1.0";

// Audit record for one CLI run. The id is a hash of the command, parameters
// and input file contents, so reruns over identical inputs share an id and
// every CSV an id stamps stays byte-identical. Wall-clock time lives only in
// the manifest JSON, never in stamped outputs.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, content hash
  std::map<std::string, std::string> params;
  std::map<std::string, std::uint64_t> counters;  // exclusions, rejections, ...

  void add_input(const std::string& path);  // hashes the file; throws if unreadable
  std::string id() const;

  // JSON with id, version, created_at, inputs, params and counters.
  std::string to_json(bool include_timestamp = true) const;
  void write(const std::string& path) const;
};

std::uint64_t fnv1a_file(const std::string& path);
std::string hex64(std::uint64_t value);

// First line of every stamped CSV: "# manifest=<id>".
std::string manifest_stamp(const std::string& id);

// Writes content to path, prefixed with the manifest stamp.
void write_stamped(const std::string& path, const std::string& id, const std::string& content);

}  // namespace taxiflow
