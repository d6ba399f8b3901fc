#include "taxiflow/csv.hpp"

#include <charconv>
#include <cstring>

namespace taxiflow {

namespace {
constexpr std::size_t kBufSize = 1 << 20;
}

LineReader::LineReader(const std::string& path) : in_(path, std::ios::binary) {
  buf_.resize(kBufSize);
}

bool LineReader::fill() {
  if (eof_) return false;
  in_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  end_ = static_cast<std::size_t>(in_.gcount());
  pos_ = 0;
  if (end_ == 0) {
    eof_ = true;
    return false;
  }
  return true;
}

bool LineReader::next(std::string_view& line) {
  carry_.clear();
  for (;;) {
    if (pos_ >= end_ && !fill()) {
      if (!carry_.empty()) {
        if (carry_.back() == '\r') carry_.pop_back();
        line = carry_;
        ++line_number_;
        return true;
      }
      return false;
    }
    const char* base = buf_.data() + pos_;
    const char* nl = static_cast<const char*>(std::memchr(base, '\n', end_ - pos_));
    if (nl == nullptr) {
      carry_.append(base, end_ - pos_);
      pos_ = end_;
      continue;
    }
    std::size_t len = static_cast<std::size_t>(nl - base);
    if (carry_.empty()) {
      if (len > 0 && base[len - 1] == '\r') --len;
      line = std::string_view(base, len);
    } else {
      carry_.append(base, len);
      if (!carry_.empty() && carry_.back() == '\r') carry_.pop_back();
      line = carry_;
    }
    pos_ += static_cast<std::size_t>(nl - base) + 1;
    ++line_number_;
    return true;
  }
}

void split_fields(std::string_view line, char delim, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  for (;;) {
    std::size_t p = line.find(delim, start);
    if (p == std::string_view::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, p - start));
    start = p + 1;
  }
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_i64(std::string_view s, std::int64_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, r.ptr);
}

void append_i64(std::string& out, std::int64_t v) {
  char buf[24];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, r.ptr);
}

std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

}  // namespace taxiflow
