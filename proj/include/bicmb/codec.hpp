#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "bicmb/constellation.hpp"

namespace bicmb {

using Rational = boost::rational<long long>;

/// Binary puncturing matrix: one row per generator, one column per trellis
/// step of the period. 1 keeps the bit.
using PuncturePattern = std::vector<std::vector<int>>;

struct CodeSpec {
  int k_c = 1;
  int n_c = 2;
  int constraint_length = 3;
  std::vector<unsigned> generators;  // octal values, MSB taps the current bit
  PuncturePattern puncture;          // empty = unpunctured

  /// Builds a spec from octal generator strings; K is the bit length of the
  /// largest generator.
  static CodeSpec from_octal(const std::vector<std::string>& octal,
                             PuncturePattern puncture = {});
  /// The code family used throughout: rate 1/4 (5,7,7,7), rate 1/2 (5,7), and
  /// rates 2/3 and 4/5 punctured from (5,7).
  static CodeSpec preset(const std::string& rate);

  int period() const { return puncture.empty() ? 1 : static_cast<int>(puncture[0].size()); }
  bool keeps(int generator, int step) const {
    return puncture.empty() || puncture[generator][step % period()] != 0;
  }
  int kept_per_period() const;
  Rational rate() const { return Rational(k_c * period(), kept_per_period()); }
  int state_count() const { return 1 << (constraint_length - 1); }

  void validate() const;
};

std::string octal_string(unsigned g);
std::string describe(const PuncturePattern& p);  // "[1 0;1 1]"
PuncturePattern parse_pattern(const std::string& text);

/// Encoder transitions for every (state, input) pair.
class Trellis {
 public:
  explicit Trellis(const CodeSpec& code);

  int states() const { return states_; }
  int outputs() const { return n_; }
  int next(int state, int input) const { return next_[2 * state + input]; }
  /// Output bit i (generator order) on the branch.
  int output(int state, int input, int i) const { return (out_[2 * state + input] >> i) & 1u; }
  unsigned output_mask(int state, int input) const { return out_[2 * state + input]; }

 private:
  int states_;
  int n_;
  std::vector<int> next_;
  std::vector<unsigned> out_;
};

/// Zero-tail encoding: appends K-1 zero flush bits, returns (len+K-1)*n_c
/// mother-code bits in step-major, generator-minor order.
Bits conv_encode(std::span<const std::uint8_t> bits, const CodeSpec& code);

/// Keeps the bits whose pattern entry is 1. The mother block must hold a whole
/// number of pattern periods.
Bits puncture(std::span<const std::uint8_t> coded, const PuncturePattern& pattern);

/// Metrics of one coded bit: cost of hypothesising 0 and 1.
struct BitMetric {
  double zero = 0.0;
  double one = 0.0;
};

/// Re-inserts neutral (0,0) metrics at punctured positions of a block of
/// `mother_length` bits.
std::vector<BitMetric> depuncture(std::span<const BitMetric> metrics,
                                  const PuncturePattern& pattern, std::size_t mother_length);

struct InterleaverSpec {
  int streams = 1;          // S
  int subcarriers = 1;      // M_eff
  int bits_per_symbol = 2;  // B

  int slots() const { return streams * subcarriers; }
  int bits_per_ofdm_symbol() const { return slots() * bits_per_symbol; }
};

struct BitLocation {
  int symbol;      // k
  int subcarrier;  // m
  int stream;      // s
  int position;    // j
};

/// Rotation rule for coded bit k' (0-based).
BitLocation interleaver_location(std::size_t index, const InterleaverSpec& spec);

/// Returns the bits in transmission order: symbol-major, then subcarrier,
/// stream and label position.
Bits interleave(std::span<const std::uint8_t> bits, const InterleaverSpec& spec);

/// Position of a location within the transmission-ordered block.
inline std::size_t slot_index(const BitLocation& loc, const InterleaverSpec& spec) {
  return ((static_cast<std::size_t>(loc.symbol) * spec.subcarriers + loc.subcarrier) *
              spec.streams +
          loc.stream) *
             spec.bits_per_symbol +
         loc.position;
}

void check_interleaver_block(std::size_t length, const InterleaverSpec& spec);

/// Inverse of interleave; works on bits or on per-bit metrics.
template <typename T>
std::vector<T> deinterleave(std::span<const T> slots, const InterleaverSpec& spec) {
  check_interleaver_block(slots.size(), spec);
  std::vector<T> out(slots.size());
  for (std::size_t k = 0; k < slots.size(); ++k)
    out[k] = slots[slot_index(interleaver_location(k, spec), spec)];
  return out;
}

/// min over points x with label bit j == b of |y - lambda x|^2.
double bit_metric(Complex y, double lambda, int j, int b, const Constellation& c);

/// Exact ML over the zero-terminated trellis; equal metrics resolve toward
/// the lexicographically smaller information sequence. Takes one metric per
/// mother-code bit and returns the information bits without the flush.
Bits viterbi_decode(std::span<const BitMetric> metrics, const CodeSpec& code);

/// Free distance by shortest-path search over the (punctured) trellis.
int free_distance(const CodeSpec& code);

}  // namespace bicmb
