#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace taxiflow {

// Buffered line reader over a file. Lines are exposed as views into the
// internal buffer, valid until the next call. Handles trailing \r and a
// missing final newline. Lines beginning with '#' are reported with
// is_comment so our own exports (which carry a manifest stamp) re-read
// cleanly; plain TLC-style inputs never start with '#'.
class LineReader {
 public:
  explicit LineReader(const std::string& path);

  bool is_open() const { return in_.is_open(); }
  // Returns false at end of file.
  bool next(std::string_view& line);
  std::uint64_t line_number() const { return line_number_; }

  static bool is_comment(std::string_view line) { return !line.empty() && line[0] == '#'; }

 private:
  bool fill();

  std::ifstream in_;
  std::string buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  bool eof_ = false;
  std::string carry_;
  std::uint64_t line_number_ = 0;
};

// Splits on delim without quoting rules (the formats here never quote).
void split_fields(std::string_view line, char delim, std::vector<std::string_view>& out);

bool parse_double(std::string_view s, double& out);
bool parse_i64(std::string_view s, std::int64_t& out);
bool parse_u64(std::string_view s, std::uint64_t& out);

std::string_view trim(std::string_view s);

// Deterministic, locale-free number formatting (shortest round-trip).
void append_double(std::string& out, double v);
void append_i64(std::string& out, std::int64_t v);
std::string format_double(double v);

}  // namespace taxiflow
