#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace specklewalk {

using Complex = std::complex<double>;

/// Sequence of complex field amplitudes. All amplitudes are finite.
class ComplexField {
 public:
  ComplexField() = default;
  explicit ComplexField(std::vector<Complex> amplitudes);

  std::size_t size() const noexcept { return amplitudes_.size(); }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }

  /// |E_m|^2 for every mode.
  std::vector<double> intensities() const;
  double total_power() const noexcept;

 private:
  std::vector<Complex> amplitudes_;
};

/// M x N complex transfer matrix, row-major. Immutable once built.
class ScatteringMatrix {
 public:
  using Meta = std::map<std::string, std::string>;

  ScatteringMatrix(std::size_t m_out, std::size_t n_in, std::vector<Complex> entries,
                   Meta meta = {});

  std::size_t m_out() const noexcept { return m_out_; }
  std::size_t n_in() const noexcept { return n_in_; }

  const Complex& operator()(std::size_t m, std::size_t n) const {
    return entries_[m * n_in_ + n];
  }
  std::span<const Complex> row(std::size_t m) const {
    return std::span<const Complex>(entries_).subspan(m * n_in_, n_in_);
  }
  std::span<const Complex> entries() const noexcept { return entries_; }
  const Meta& meta() const noexcept { return meta_; }

  friend bool operator==(const ScatteringMatrix& a, const ScatteringMatrix& b) {
    return a.m_out_ == b.m_out_ && a.n_in_ == b.n_in_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t m_out_;
  std::size_t n_in_;
  std::vector<Complex> entries_;
  Meta meta_;
};

struct MediumConfig {
  std::size_t n_in = 1024;
  std::size_t m_out = 4096;
  double transmission = 1.0;  // expected |S_mn|^2 summed over n_in inputs
  std::uint64_t seed = 0;
  std::optional<std::string> mean_free_path_note;

  void validate() const;
  friend bool operator==(const MediumConfig&, const MediumConfig&) = default;
};

/// Draws S with i.i.d. circular complex Gaussian entries of variance
/// transmission / n_in. Row m uses the stream (seed, MediumRow, m).
ScatteringMatrix generate_medium(const MediumConfig& config);

/// E_out = S * E_in.
ComplexField propagate(const ScatteringMatrix& s, const ComplexField& e_in);

/// Population standard deviation over mean.
double speckle_contrast(std::span<const double> intensities);

// SMX1 file format: "SMX1", u64 m_out, u64 n_in, then m_out*n_in pairs of
// binary64 (re, im). All little-endian, row-major.
void write_smx1(std::ostream& out, const ScatteringMatrix& s);
ScatteringMatrix read_smx1(std::istream& in);
void save_smx1(const std::filesystem::path& path, const ScatteringMatrix& s);
ScatteringMatrix load_smx1(const std::filesystem::path& path);

}  // namespace specklewalk
