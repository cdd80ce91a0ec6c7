#include "specklewalk/medium.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "specklewalk/error.hpp"
#include "specklewalk/rng.hpp"

namespace specklewalk {

namespace {

bool is_finite(const Complex& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (in.gcount() != 8) throw Error(ErrorKind::Format, "SMX1: truncated payload");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

ComplexField::ComplexField(std::vector<Complex> amplitudes)
    : amplitudes_(std::move(amplitudes)) {
  for (const auto& a : amplitudes_) {
    if (!is_finite(a)) throw Error(ErrorKind::InvalidArgument, "field amplitude is not finite");
  }
}

std::vector<double> ComplexField::intensities() const {
  std::vector<double> out(amplitudes_.size());
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) out[i] = std::norm(amplitudes_[i]);
  return out;
}

double ComplexField::total_power() const noexcept {
  double sum = 0.0;
  for (const auto& a : amplitudes_) sum += std::norm(a);
  return sum;
}

ScatteringMatrix::ScatteringMatrix(std::size_t m_out, std::size_t n_in,
                                   std::vector<Complex> entries, Meta meta)
    : m_out_(m_out), n_in_(n_in), entries_(std::move(entries)), meta_(std::move(meta)) {
  if (m_out_ == 0 || n_in_ == 0) {
    throw Error(ErrorKind::InvalidConfig, "scattering matrix dimensions must be positive");
  }
  if (entries_.size() != m_out_ * n_in_) {
    throw Error(ErrorKind::Dimension, "scattering matrix entry count != m_out * n_in");
  }
  for (const auto& z : entries_) {
    if (!is_finite(z)) throw Error(ErrorKind::InvalidArgument, "scattering matrix entry is not finite");
  }
}

void MediumConfig::validate() const {
  if (n_in == 0 || m_out == 0) {
    throw Error(ErrorKind::InvalidConfig, "medium: n_in and m_out must be >= 1");
  }
  if (!(transmission > 0.0 && transmission <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "medium: transmission must lie in (0, 1]");
  }
}

ScatteringMatrix generate_medium(const MediumConfig& config) {
  config.validate();
  const double sigma = std::sqrt(config.transmission / (2.0 * static_cast<double>(config.n_in)));
  std::vector<Complex> entries(config.m_out * config.n_in);
  for (std::size_t m = 0; m < config.m_out; ++m) {
    Stream rng(config.seed, StreamPurpose::MediumRow, m);
    Complex* row = entries.data() + m * config.n_in;
    for (std::size_t n = 0; n < config.n_in; ++n) {
      const double re = rng.normal();
      const double im = rng.normal();
      row[n] = Complex(sigma * re, sigma * im);
    }
  }
  ScatteringMatrix::Meta meta{{"ensemble", "iid-circular-gaussian"},
                              {"seed", std::to_string(config.seed)}};
  if (config.mean_free_path_note) meta["mean_free_path"] = *config.mean_free_path_note;
  return ScatteringMatrix(config.m_out, config.n_in, std::move(entries), std::move(meta));
}

ComplexField propagate(const ScatteringMatrix& s, const ComplexField& e_in) {
  if (e_in.size() != s.n_in()) {
    throw Error(ErrorKind::Dimension, "propagate: input length " + std::to_string(e_in.size()) +
                                          " != n_in " + std::to_string(s.n_in()));
  }
  const auto x = e_in.amplitudes();
  std::vector<Complex> out(s.m_out());
  for (std::size_t m = 0; m < s.m_out(); ++m) {
    const auto row = s.row(m);
    // Split accumulation keeps the inner loop free of std::complex NaN checks.
    double re = 0.0;
    double im = 0.0;
    for (std::size_t n = 0; n < row.size(); ++n) {
      re += row[n].real() * x[n].real() - row[n].imag() * x[n].imag();
      im += row[n].real() * x[n].imag() + row[n].imag() * x[n].real();
    }
    out[m] = Complex(re, im);
  }
  return ComplexField(std::move(out));
}

double speckle_contrast(std::span<const double> intensities) {
  if (intensities.empty()) throw Error(ErrorKind::Statistics, "speckle_contrast: empty input");
  double mean = 0.0;
  for (double v : intensities) mean += v;
  mean /= static_cast<double>(intensities.size());
  if (!(mean > 0.0)) throw Error(ErrorKind::Statistics, "speckle_contrast: mean intensity is zero");
  double var = 0.0;
  for (double v : intensities) var += (v - mean) * (v - mean);
  var /= static_cast<double>(intensities.size());
  return std::sqrt(var) / mean;
}

void write_smx1(std::ostream& out, const ScatteringMatrix& s) {
  out.write("SMX1", 4);
  put_u64(out, s.m_out());
  put_u64(out, s.n_in());
  for (const auto& z : s.entries()) {
    put_u64(out, std::bit_cast<std::uint64_t>(z.real()));
    put_u64(out, std::bit_cast<std::uint64_t>(z.imag()));
  }
  if (!out) throw Error(ErrorKind::Io, "SMX1: write failed");
}

ScatteringMatrix read_smx1(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || std::string_view(magic.data(), 4) != "SMX1") {
    throw Error(ErrorKind::Format, "SMX1: bad magic");
  }
  const std::uint64_t m_out = get_u64(in);
  const std::uint64_t n_in = get_u64(in);
  if (m_out == 0 || n_in == 0) throw Error(ErrorKind::Format, "SMX1: zero dimension");
  if (n_in > (std::uint64_t{1} << 40) / m_out) {
    throw Error(ErrorKind::Format, "SMX1: dimensions too large");
  }
  std::vector<Complex> entries;
  entries.reserve(m_out * n_in);
  for (std::uint64_t i = 0; i < m_out * n_in; ++i) {
    const double re = std::bit_cast<double>(get_u64(in));
    const double im = std::bit_cast<double>(get_u64(in));
    entries.emplace_back(re, im);
  }
  try {
    return ScatteringMatrix(m_out, n_in, std::move(entries));
  } catch (const Error& e) {
    throw Error(ErrorKind::Format, std::string("SMX1: ") + e.what());
  }
}

void save_smx1(const std::filesystem::path& path, const ScatteringMatrix& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  write_smx1(out, s);
}

ScatteringMatrix load_smx1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_smx1(in);
}

}  // namespace specklewalk
