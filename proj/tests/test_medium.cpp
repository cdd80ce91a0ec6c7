#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "specklewalk/error.hpp"
#include "specklewalk/medium.hpp"
#include "specklewalk/rng.hpp"
#include "specklewalk/slm.hpp"

using namespace specklewalk;

namespace {
std::vector<Complex> to_vec(std::span<const Complex> s) { return {s.begin(), s.end()}; }
}  // namespace

TEST_CASE("generate_medium validates its config") {
  MediumConfig c;
  c.n_in = 0;
  CHECK_THROWS_AS(generate_medium(c), Error);
  c = MediumConfig{};
  c.m_out = 0;
  try {
    generate_medium(c);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfig);
  }
  c = MediumConfig{};
  c.transmission = 0.0;
  CHECK_THROWS_AS(generate_medium(c), Error);
  c.transmission = 1.5;
  CHECK_THROWS_AS(generate_medium(c), Error);
}

TEST_CASE("generate_medium is deterministic per seed") {
  MediumConfig c{64, 32, 1.0, 99, std::nullopt};
  CHECK(generate_medium(c) == generate_medium(c));
  c.seed = 100;
  MediumConfig d{64, 32, 1.0, 99, std::nullopt};
  CHECK_FALSE(generate_medium(c) == generate_medium(d));
}

TEST_CASE("1x1 medium: mean |S|^2 over seeds equals transmission") {
  double sum = 0.0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    const auto m = generate_medium(MediumConfig{1, 1, 1.0, static_cast<std::uint64_t>(s), {}});
    sum += std::norm(m(0, 0));
  }
  CHECK(std::fabs(sum / seeds - 1.0) < 0.05);
}

TEST_CASE("column power sums to m_out * transmission / n_in") {
  const auto s = generate_medium(MediumConfig{1024, 4096, 0.5, 17, {}});
  double column = 0.0;
  for (std::size_t m = 0; m < s.m_out(); ++m) column += std::norm(s(m, 0));
  CHECK(std::fabs(column - 2.0) < 0.2);
  // Real and imaginary parts each carry half the entry variance.
  double re2 = 0.0;
  double im2 = 0.0;
  for (const auto& z : s.entries()) {
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
  }
  const double expected = 0.5 / (2.0 * 1024) * static_cast<double>(s.entries().size());
  CHECK(re2 == doctest::Approx(expected).epsilon(0.01));
  CHECK(im2 == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("propagate: hand-checked products") {
  const Complex i{0.0, 1.0};
  ScatteringMatrix id(2, 2, {1.0, 0.0, 0.0, 1.0});
  auto out = propagate(id, ComplexField({1.0, i}));
  CHECK(out[0] == Complex(1.0));
  CHECK(out[1] == i);

  ScatteringMatrix swap(2, 2, {0.0, 1.0, 1.0, 0.0});
  out = propagate(swap, ComplexField({1.0, 0.0}));
  CHECK(out[0] == Complex(0.0));
  CHECK(out[1] == Complex(1.0));

  ScatteringMatrix s(2, 2, {1.0, i, 2.0, -1.0});
  out = propagate(s, ComplexField({1.0, 1.0}));
  CHECK(out[0] == Complex(1.0, 1.0));
  CHECK(out[1] == Complex(1.0, 0.0));
}

TEST_CASE("propagate matches the naive product and is linear") {
  const auto s = generate_medium(MediumConfig{37, 23, 1.0, 5, {}});
  Stream rng(8);
  std::vector<Complex> x(37), y(37);
  for (auto& v : x) v = {rng.normal(), rng.normal()};
  for (auto& v : y) v = {rng.normal(), rng.normal()};
  const Complex alpha{0.3, -1.2};
  const Complex beta{-2.0, 0.5};

  const auto ref = oracle::matvec(to_vec(s.entries()), s.m_out(), s.n_in(), x);
  const auto got = propagate(s, ComplexField(x));
  for (std::size_t m = 0; m < ref.size(); ++m) CHECK(std::abs(got[m] - ref[m]) <= 1e-12 * (1.0 + std::abs(ref[m])));

  std::vector<Complex> combo(37);
  for (std::size_t n = 0; n < combo.size(); ++n) combo[n] = alpha * x[n] + beta * y[n];
  const auto lhs = propagate(s, ComplexField(combo));
  const auto px = propagate(s, ComplexField(x));
  const auto py = propagate(s, ComplexField(y));
  for (std::size_t m = 0; m < lhs.size(); ++m) {
    const Complex rhs = alpha * px[m] + beta * py[m];
    CHECK(std::abs(lhs[m] - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("propagate rejects length mismatch") {
  ScatteringMatrix s(2, 3, std::vector<Complex>(6, 1.0));
  try {
    propagate(s, ComplexField({1.0, 1.0}));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Dimension);
  }
}

TEST_CASE("matrix and field reject non-finite values") {
  CHECK_THROWS_AS(ScatteringMatrix(1, 1, {Complex(NAN, 0.0)}), Error);
  CHECK_THROWS_AS(ScatteringMatrix(1, 2, {Complex(1.0)}), Error);
  CHECK_THROWS_AS(ComplexField({Complex(0.0, INFINITY)}), Error);
}

TEST_CASE("speckle_contrast") {
  const std::vector<double> flat(10, 3.0);
  CHECK(speckle_contrast(flat) == 0.0);
  const std::vector<double> two{0.0, 2.0};
  CHECK(speckle_contrast(two) == doctest::Approx(1.0));
  CHECK_THROWS_AS(speckle_contrast(std::vector<double>{}), Error);
  CHECK_THROWS_AS(speckle_contrast(std::vector<double>{0.0, 0.0}), Error);
}

TEST_CASE("fully developed speckle has unit contrast and exponential statistics") {
  const auto s = generate_medium(MediumConfig{1024, 4096, 1.0, 21, {}});
  const auto intensities = propagate(s, apply_mask(random_mask(1024, 4), 1.0)).intensities();
  CHECK(std::fabs(speckle_contrast(intensities) - 1.0) < 0.05);
  CHECK(oracle::ks_exponential(intensities) < 0.03);
}

TEST_CASE("SMX1 layout is bit-exact") {
  ScatteringMatrix s(1, 2, {Complex(1.0, -2.0), Complex(0.5, 0.0)});
  std::ostringstream out;
  write_smx1(out, s);
  const std::string bytes = out.str();
  REQUIRE(bytes.size() == 4 + 8 + 8 + 2 * 16);
  CHECK(bytes.substr(0, 4) == "SMX1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // m_out little-endian
  CHECK(static_cast<unsigned char>(bytes[12]) == 2); // n_in
  // 1.0 = 0x3FF0000000000000 stored LE: last byte 0x3F, second last 0xF0.
  CHECK(static_cast<unsigned char>(bytes[20 + 7]) == 0x3F);
  CHECK(static_cast<unsigned char>(bytes[20 + 6]) == 0xF0);
  // -2.0 = 0xC000000000000000
  CHECK(static_cast<unsigned char>(bytes[28 + 7]) == 0xC0);
}

TEST_CASE("SMX1 round trip and rejection") {
  const auto s = generate_medium(MediumConfig{16, 8, 0.7, 3, {}});
  std::stringstream buf;
  write_smx1(buf, s);
  const std::string bytes = buf.str();
  CHECK(read_smx1(buf) == s);

  std::istringstream bad_magic("SMX2" + bytes.substr(4));
  CHECK_THROWS_AS(read_smx1(bad_magic), Error);

  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  try {
    read_smx1(truncated);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
  }
  std::istringstream header_only(bytes.substr(0, 10));
  CHECK_THROWS_AS(read_smx1(header_only), Error);
}
