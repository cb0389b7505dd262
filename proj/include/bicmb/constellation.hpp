#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bicmb/numerics.hpp"

namespace bicmb {

using Bits = std::vector<std::uint8_t>;

/// Square Gray-labelled QAM with unit average energy. A label is read MSB
/// first: the first half of the bits selects the in-phase level, the second
/// half the quadrature level, each Gray coded with bit 0 on the positive
/// side. 4-QAM: 00 -> (1+i)/sqrt2, 01 -> (1-i)/sqrt2, 10 -> (-1+i)/sqrt2,
/// 11 -> (-1-i)/sqrt2.
class Constellation {
 public:
  explicit Constellation(int order = 4);

  int order() const { return static_cast<int>(points_.size()); }
  int bits_per_symbol() const { return bits_; }
  double d_min() const { return d_min_; }

  /// Point carrying the given label (label bit j is bit (B-1-j) of the integer).
  Complex point(unsigned label) const { return points_[label]; }
  int label_bit(unsigned label, int j) const { return (label >> (bits_ - 1 - j)) & 1u; }
  /// Labels whose bit j equals b.
  const std::vector<unsigned>& subset(int j, int b) const { return subsets_[2 * j + b]; }

  std::vector<Complex> map(std::span<const std::uint8_t> bits) const;
  /// Label of the nearest point.
  unsigned label_of(Complex symbol) const;
  Bits labels_of(std::span<const Complex> symbols) const;

 private:
  int bits_;
  double d_min_;
  std::vector<Complex> points_;
  std::vector<std::vector<unsigned>> subsets_;
};

}  // namespace bicmb
