#include "gencs/wavelet.hpp"

#include <array>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "gencs/error.hpp"

namespace gencs {

namespace {

// Scaling filter taps. The wavelet filter is g[k] = (-1)^k h[L-1-k].
std::vector<double> scaling_filter(WaveletFamily f) {
  if (f == WaveletFamily::kHaar) {
    const double s = 1.0 / std::sqrt(2.0);
    return {s, s};
  }
  const double r3 = std::sqrt(3.0);
  const double d = 4.0 * std::sqrt(2.0);
  return {(1.0 + r3) / d, (3.0 + r3) / d, (3.0 - r3) / d, (1.0 - r3) / d};
}

std::vector<double> wavelet_filter(const std::vector<double>& h) {
  std::vector<double> g(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    g[k] = ((k % 2) ? -1.0 : 1.0) * h[h.size() - 1 - k];
  }
  return g;
}

std::size_t log2_exact(std::size_t n) {
  std::size_t l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return l;
}

}  // namespace

std::string_view to_string(WaveletFamily f) {
  return f == WaveletFamily::kHaar ? "haar" : "daubechies4";
}

WaveletFamily parse_wavelet_family(std::string_view s) {
  if (s == "haar") return WaveletFamily::kHaar;
  if (s == "daubechies4" || s == "db4") return WaveletFamily::kDaubechies4;
  throw ValidationError("unknown wavelet family '" + std::string(s) + "' (expected haar|daubechies4)");
}

void WaveletBasis::validate() const {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw ValidationError(fmt::format("wavelet: frame length {} is not a power of two; zero-pad", n));
  }
  if (levels > log2_exact(n)) {
    throw ValidationError(fmt::format("wavelet: {} levels exceed log2({})", levels, n));
  }
}

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> dwt(const WaveletBasis& basis, std::span<const double> x) {
  basis.validate();
  if (x.size() != basis.n) throw DimensionError("dwt: input length differs from basis length");
  const auto h = scaling_filter(basis.family);
  const auto g = wavelet_filter(h);
  std::vector<double> out(x.begin(), x.end());
  std::vector<double> scratch(basis.n);
  std::size_t len = basis.n;
  for (std::size_t level = 0; level < basis.levels; ++level) {
    const auto half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      double a = 0.0, d = 0.0;
      for (std::size_t j = 0; j < h.size(); ++j) {
        const double v = out[(2 * k + j) % len];
        a += h[j] * v;
        d += g[j] * v;
      }
      scratch[k] = a;
      scratch[half + k] = d;
    }
    std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(len), out.begin());
    len = half;
  }
  return out;
}

std::vector<double> idwt(const WaveletBasis& basis, std::span<const double> coeffs) {
  basis.validate();
  if (coeffs.size() != basis.n) throw DimensionError("idwt: input length differs from basis length");
  const auto h = scaling_filter(basis.family);
  const auto g = wavelet_filter(h);
  std::vector<double> out(coeffs.begin(), coeffs.end());
  std::vector<double> scratch(basis.n);
  std::size_t len = basis.n >> basis.levels;
  for (std::size_t level = 0; level < basis.levels; ++level) {
    const auto full = 2 * len;
    std::fill(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(full), 0.0);
    for (std::size_t k = 0; k < len; ++k) {
      for (std::size_t j = 0; j < h.size(); ++j) {
        scratch[(2 * k + j) % full] += h[j] * out[k] + g[j] * out[len + k];
      }
    }
    std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(full), out.begin());
    len = full;
  }
  return out;
}

Eigen::MatrixXd dwt_matrix(const WaveletBasis& basis) {
  basis.validate();
  const auto n = static_cast<Eigen::Index>(basis.n);
  Eigen::MatrixXd w(n, n);
  std::vector<double> unit(basis.n, 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    unit[static_cast<std::size_t>(j)] = 1.0;
    const auto col = idwt(basis, unit);
    unit[static_cast<std::size_t>(j)] = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) w(i, j) = col[static_cast<std::size_t>(i)];
  }
  return w;
}

}  // namespace gencs
