#include "taxiflow/manifest.hpp"

#include <chrono>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "taxiflow/time_util.hpp"

namespace taxiflow {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t fnv1a_str(std::uint64_t h, std::string_view s) { return fnv1a(h, s.data(), s.size()); }

}  // namespace

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash input file: " + path);
  std::uint64_t h = kFnvOffset;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    h = fnv1a(h, buf, static_cast<std::size_t>(in.gcount()));
  return h;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

void RunManifest::add_input(const std::string& path) {
  inputs.emplace_back(path, hex64(fnv1a_file(path)));
}

std::string RunManifest::id() const {
  std::uint64_t h = kFnvOffset;
  h = fnv1a_str(h, command);
  for (const auto& [path, hash] : inputs) {
    h = fnv1a_str(h, path);
    h = fnv1a_str(h, hash);
  }
  for (const auto& [key, value] : params) {
    h = fnv1a_str(h, key);
    h = fnv1a_str(h, value);
  }
  return hex64(h);
}

std::string RunManifest::to_json(bool include_timestamp) const {
  nlohmann::ordered_json j;
  j["id"] = id();
  j["version"] = std::string(kTaxiflowVersion);
  j["command"] = command;
  if (include_timestamp) {
    auto now = std::chrono::system_clock::now();
    j["created_at"] = format_timestamp(std::chrono::duration_cast<std::chrono::seconds>(
                                           now.time_since_epoch())
                                           .count());
  }
  nlohmann::ordered_json in = nlohmann::ordered_json::array();
  for (const auto& [path, hash] : inputs) in.push_back({{"path", path}, {"hash", hash}});
  j["inputs"] = in;
  j["params"] = params;
  j["counters"] = counters;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << to_json();
}

std::string manifest_stamp(const std::string& id) { return "# manifest=" + id + "\n"; }

void write_stamped(const std::string& path, const std::string& id, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output: " + path);
  out << manifest_stamp(id) << content;
}

}  // namespace taxiflow
