#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "carigeo/error.hpp"
#include "carigeo/landmarks.hpp"

namespace carigeo {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes via a sibling temporary file and rename, so readers never see a
/// partially written file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw Error(ErrorKind::Io, "directory does not exist: " + parent.string());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot rename into " + path.string());
  }
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

// ---------------------------------------------------------------------------
// .lmk landmark files: "LMK 63" then 63 lines of "x y".

enum class LmkPrecision {
  RoundTrip,   // shortest text that parses back to the same double
  Canonical9,  // 9 significant digits
};

inline std::string format_double(double v, LmkPrecision p) {
  char buf[64];
  std::to_chars_result r;
  if (p == LmkPrecision::RoundTrip) {
    r = std::to_chars(buf, buf + sizeof buf, v);
  } else {
    r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  }
  return std::string(buf, r.ptr);
}

inline std::string format_landmarks(const LandmarkSet& l, LmkPrecision p = LmkPrecision::RoundTrip) {
  std::string out = "LMK 63\n";
  for (const auto& pt : l.points()) {
    out += format_double(pt.x(), p);
    out += ' ';
    out += format_double(pt.y(), p);
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline bool parse_number(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return r.ec == std::errc() && r.ptr == tok.data() + tok.size();
}

}  // namespace detail

/// Parses .lmk text. Surrounding whitespace on each line and trailing blank
/// lines are accepted; anything else that deviates is a ParseError naming
/// the offending line.
inline LandmarkSet parse_landmarks(std::string_view text, const std::string& source = "<lmk>") {
  std::array<Point, kLandmarkCount> pts;
  std::size_t count = 0;
  int line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  int last_content_line = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = detail::trim(raw);
    if (!header_seen) {
      if (line.substr(0, 4) != "LMK " && line != "LMK") throw ParseError(source, line_no, "expected header \"LMK 63\"");
      const auto n = detail::trim(line.substr(3));
      if (n != "63") {
        throw ParseError(source, line_no, "expected 63 points in header, found \"" + std::string(n) + "\"");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    if (last_content_line != 0 && last_content_line != line_no - 1) {
      throw ParseError(source, line_no, "blank line inside point list");
    }
    last_content_line = line_no;
    if (count == kLandmarkCount) throw ParseError(source, line_no, "expected 63 points, found more");
    const auto sep = line.find_first_of(" \t");
    if (sep == std::string_view::npos) throw ParseError(source, line_no, "expected \"x y\"");
    double x = 0.0, y = 0.0;
    if (!detail::parse_number(line.substr(0, sep), x) || !detail::parse_number(detail::trim(line.substr(sep)), y)) {
      throw ParseError(source, line_no, "malformed coordinate pair");
    }
    if (!std::isfinite(x) || !std::isfinite(y)) throw ParseError(source, line_no, "non-finite coordinate");
    pts[count++] = Point(x, y);
  }
  if (!header_seen) throw ParseError(source, 1, "empty file");
  if (count != kLandmarkCount) {
    throw ParseError(source, line_no, "expected 63 points, found " + std::to_string(count));
  }
  return LandmarkSet(pts);
}

inline LandmarkSet load_landmarks(const std::filesystem::path& path) {
  return parse_landmarks(read_text_file(path), path.string());
}

inline void save_landmarks(const LandmarkSet& l, const std::filesystem::path& path,
                           LmkPrecision p = LmkPrecision::RoundTrip) {
  write_file_atomic(path, format_landmarks(l, p));
}

}  // namespace carigeo
