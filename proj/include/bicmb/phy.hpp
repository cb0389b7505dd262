#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bicmb/channel.hpp"
#include "bicmb/codec.hpp"
#include "bicmb/constellation.hpp"

namespace bicmb {

enum class ChainModel { Diagonal, Full };

struct LinkConfig {
  int nt = 2;
  int nr = 2;
  int streams = 1;  // S
  int taps = 2;     // L
  int subcarriers = 64;
  int cp_length = 16;
  std::string rate = "1/2";
  CodeSpec code = CodeSpec::preset("1/2");
  TapProfile profile = TapProfile::equal(2);
  int qam_order = 4;
  bool grouping = false;
  std::vector<double> snr_db;
  int block_bits = 1024;  // information bits per codeword
  std::uint64_t seed = 1;
  ChainModel chain = ChainModel::Diagonal;

  void validate() const;
  /// Codewords carried in parallel per frame: M/L with grouping, else 1.
  int codewords() const { return grouping ? subcarriers / taps : 1; }
  /// Subcarriers seen by one codeword.
  int subcarriers_per_codeword() const { return subcarriers / codewords(); }
  InterleaverSpec interleaver() const;
};

/// Per-subcarrier stream vectors for one OFDM symbol: entry m has S values.
using StreamFrame = std::vector<ComplexVector>;

// --- OFDM ------------------------------------------------------------------

void require_cp_covers(int cp_length, int taps);

/// IFFT of one antenna's M subcarrier values followed by a cyclic prefix of
/// the last cp_length samples.
std::vector<Complex> ofdm_modulate(std::span<const Complex> subcarrier_values, int cp_length);
/// Drops the prefix and returns the M subcarrier values.
std::vector<Complex> ofdm_demodulate(std::span<const Complex> samples, int subcarriers,
                                     int cp_length);

/// Linear convolution of the per-antenna transmit streams with the tap
/// matrices (integer delays); output keeps the input length.
std::vector<std::vector<Complex>> apply_taps(const std::vector<std::vector<Complex>>& tx,
                                             const TapList& taps, const TapProfile& profile);

// --- beamforming ------------------------------------------------------------

/// Diagonal model y_s(m) = lambda_s(m) x_s(m) + n_s(m), n ~ CN(0, n0).
/// With n0 == 0 no noise is drawn.
std::vector<StreamFrame> diagonal_chain(const std::vector<StreamFrame>& x,
                                        const ChannelRealization& channel, SeededRng& rng,
                                        double n0);

/// Explicit chain over a frame of OFDM symbols: V_S precoding, IFFT+CP, tap
/// convolution across symbols, CP removal+FFT, U_S^H combining. Noise is
/// added per receive antenna in the time domain with variance n0/M per
/// sample, i.e. CN(0, n0) per subcarrier.
std::vector<StreamFrame> beamform_chain(const std::vector<StreamFrame>& x,
                                        const ChannelRealization& channel,
                                        const TapProfile& profile, int cp_length,
                                        SeededRng& rng, double n0);

/// Same chain with caller-supplied time-domain noise: noise[u] holds
/// frames*(M+cp) samples for receive antenna u.
std::vector<StreamFrame> beamform_chain(const std::vector<StreamFrame>& x,
                                        const ChannelRealization& channel,
                                        const TapProfile& profile, int cp_length,
                                        const std::vector<std::vector<Complex>>& noise);

/// The per-stream noise that time-domain noise turns into after CP removal,
/// FFT and U_S^H combining.
std::vector<StreamFrame> combined_noise(const std::vector<std::vector<Complex>>& noise,
                                        const ChannelRealization& channel, int streams,
                                        int cp_length);

// --- grouping ---------------------------------------------------------------

/// forward[p] is the physical stream slot (m*S + s) of permuted slot p; the
/// permuted order puts each uncorrelated group's subcarriers next to each
/// other. inverse undoes it.
struct GroupingPermutation {
  std::vector<int> forward;
  std::vector<int> inverse;
};

GroupingPermutation grouping_permutation(int subcarriers, int taps, int streams = 1);

// --- end to end -------------------------------------------------------------

/// Information bits per frame across all codewords.
inline std::size_t frame_bits(const LinkConfig& config) {
  return static_cast<std::size_t>(config.codewords()) * config.block_bits;
}

/// Number of OFDM symbols a frame occupies.
int frame_symbols(const LinkConfig& config);

/// Encodes, interleaves, maps and (optionally) group-permutes the message,
/// sends it through the channel with noise variance n0 and decodes every
/// codeword. The message holds codewords() * block_bits bits.
Bits transmit_receive(std::span<const std::uint8_t> message, const LinkConfig& config,
                      const ChannelRealization& channel, SeededRng& rng, double n0);

/// N0 = N_t / gamma.
inline double noise_variance(int nt, double snr_db) { return nt / std::pow(10.0, snr_db / 10.0); }

}  // namespace bicmb
