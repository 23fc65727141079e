#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

#include "carigeo/png_io.hpp"
#include "support.hpp"

using namespace carigeo;
namespace fs = std::filesystem;

namespace {

std::string points_text(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += std::to_string(i) + " " + std::to_string(2 * i) + "\n";
  return s;
}

int parse_error_line(const std::string& text) {
  try {
    parse_landmarks(text);
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    return e.line();
  }
  ADD_FAILURE() << "expected a parse error";
  return -1;
}

}  // namespace

TEST(Lmk, SaveLoadRoundTripIsExact) {
  Rng rng(1);
  const fs::path p = fs::temp_directory_path() / "carigeo_io_roundtrip.lmk";
  for (int i = 0; i < 20; ++i) {
    std::array<Point, kLandmarkCount> pts;
    for (auto& q : pts) q = Point(rng.uniform(-1e3, 1e3), rng.normal() * 1e-7);
    const LandmarkSet l(pts);
    save_landmarks(l, p);
    EXPECT_EQ(load_landmarks(p), l);
  }
  fs::remove(p);
}

TEST(Lmk, CanonicalFormatHasNineSignificantDigits) {
  EXPECT_EQ(format_double(1.0 / 3.0, LmkPrecision::Canonical9), "0.333333333");
  EXPECT_EQ(format_double(128.0, LmkPrecision::Canonical9), "128");
  EXPECT_EQ(format_double(0.1, LmkPrecision::RoundTrip), "0.1");
  const std::string text = format_landmarks(face_template(), LmkPrecision::Canonical9);
  EXPECT_EQ(format_landmarks(parse_landmarks(text), LmkPrecision::Canonical9), text);
}

TEST(Lmk, WrongCountNamesExpected) {
  try {
    parse_landmarks("LMK 63\n" + points_text(62));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("63"), std::string::npos);
  }
  EXPECT_THROW(parse_landmarks("LMK 63\n" + points_text(64)), ParseError);
  EXPECT_THROW(parse_landmarks("LMK 62\n" + points_text(62)), ParseError);
}

TEST(Lmk, TolerantWhitespace) {
  EXPECT_NO_THROW(parse_landmarks("LMK 63   \n" + points_text(63)));
  EXPECT_NO_THROW(parse_landmarks("LMK 63\r\n" + points_text(63) + "\n\n"));
  EXPECT_NO_THROW(parse_landmarks("LMK 63\n  1.5\t-2e1  \n" + points_text(62)));
}

TEST(Lmk, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("LMX 63\n" + points_text(63)), 1);
  EXPECT_EQ(parse_error_line("LMK 63\n" + points_text(10) + "nan 3\n" + points_text(52)), 12);
  EXPECT_EQ(parse_error_line("LMK 63\n" + points_text(4) + "1 inf\n" + points_text(58)), 6);
  EXPECT_EQ(parse_error_line("LMK 63\n" + points_text(2) + "1,2\n" + points_text(60)), 4);
  EXPECT_EQ(parse_error_line("LMK 63\n" + points_text(2) + "\n" + points_text(61)), 5);
  EXPECT_EQ(parse_error_line(""), 1);
}

TEST(Lmk, MissingFileIsIo) {
  try {
    load_landmarks("/nonexistent/dir/x.lmk");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(Png, EncodeDecodeRoundTrip) {
  Rng rng(2);
  ImageBuffer img(37, 21);
  for (auto& s : img.samples()) s = static_cast<std::uint8_t>(rng.index(256));
  const fs::path p = fs::temp_directory_path() / "carigeo_io_roundtrip.png";
  write_png(img, p);
  EXPECT_EQ(read_png(p), img);
  EXPECT_EQ(encode_png(img), encode_png(img));
  fs::remove(p);
  EXPECT_THROW(read_png(p), Error);
}

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}
