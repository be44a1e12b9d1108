#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gencs {

enum class WaveletFamily { kHaar, kDaubechies4 };

std::string_view to_string(WaveletFamily f);
WaveletFamily parse_wavelet_family(std::string_view s);

// Periodised orthonormal discrete wavelet transform on frames of length n.
struct WaveletBasis {
  WaveletFamily family = WaveletFamily::kDaubechies4;
  std::size_t levels = 5;
  std::size_t n = 512;

  // Throws unless n is a power of two and levels <= log2(n).
  void validate() const;
};

// Smallest power of two >= n.
std::size_t next_power_of_two(std::size_t n);

// Analysis: coefficients ordered [approx_L | detail_L | ... | detail_1].
std::vector<double> dwt(const WaveletBasis& basis, std::span<const double> x);
// Synthesis, the exact inverse of dwt.
std::vector<double> idwt(const WaveletBasis& basis, std::span<const double> coeffs);

// Orthonormal synthesis matrix W (x = W * coeffs); analysis is W^T.
Eigen::MatrixXd dwt_matrix(const WaveletBasis& basis);

}  // namespace gencs
