#include <algorithm>
#include <limits>

#include "bicmb/phy.hpp"

namespace bicmb {

void LinkConfig::validate() const {
  if (nt < 1 || nt > 4 || nr < 1 || nr > 4) throw Error("antenna count out of range");
  if (streams < 1 || streams > std::min(nt, nr)) throw Error("S must not exceed min(Nt, Nr)");
  if (taps < 1 || taps > 8) throw Error("tap count out of range");
  if (profile.tap_count() != taps) throw Error("tap profile does not match tap count");
  profile.validate();
  if (!is_power_of_two(subcarriers) || subcarriers > 4096) throw Error("subcarrier count must be a power of two");
  if (subcarriers < taps) throw Error("undersampled delay spread");
  require_cp_covers(cp_length, taps);
  if (grouping && subcarriers % taps != 0) throw Error("grouping unavailable");
  if (block_bits < 1) throw Error("block length must be positive");
  code.validate();
  Constellation check(qam_order);
  (void)check;
}

InterleaverSpec LinkConfig::interleaver() const {
  const Constellation c(qam_order);
  return {streams, subcarriers_per_codeword(), c.bits_per_symbol()};
}

namespace {

struct CodewordLayout {
  std::size_t padded_info;  // message + zeros so the tail ends on a pattern period
  std::size_t mother;       // mother-code bits
  std::size_t coded;        // after puncturing
  std::size_t slots;        // coded + filler, a whole number of OFDM symbols
  int symbols;
};

CodewordLayout layout_of(const LinkConfig& config) {
  const CodeSpec& code = config.code;
  const std::size_t period = static_cast<std::size_t>(code.period());
  const std::size_t tail = static_cast<std::size_t>(code.constraint_length - 1);
  CodewordLayout out{};
  const std::size_t base = static_cast<std::size_t>(config.block_bits) + tail;
  out.padded_info = config.block_bits + (period - base % period) % period;
  const std::size_t steps = out.padded_info + tail;
  out.mother = steps * code.n_c;
  out.coded = steps / period * code.kept_per_period();
  const std::size_t per_symbol = static_cast<std::size_t>(config.interleaver().bits_per_ofdm_symbol());
  out.symbols = static_cast<int>((out.coded + per_symbol - 1) / per_symbol);
  out.slots = out.symbols * per_symbol;
  return out;
}

}  // namespace

int frame_symbols(const LinkConfig& config) { return layout_of(config).symbols; }

Bits transmit_receive(std::span<const std::uint8_t> message, const LinkConfig& config,
                      const ChannelRealization& channel, SeededRng& rng, double n0) {
  config.validate();
  if (message.size() != frame_bits(config)) throw Error("message length does not match frame");
  if (channel.subcarriers() != config.subcarriers) throw Error("dimension mismatch");

  const Constellation constellation(config.qam_order);
  const InterleaverSpec inter = config.interleaver();
  const CodewordLayout layout = layout_of(config);
  const int groups = config.codewords();
  const int meff = inter.subcarriers;
  const int streams = config.streams;
  const int bits = inter.bits_per_symbol;
  const int m_total = config.subcarriers;

  GroupingPermutation perm;
  if (config.grouping) {
    perm = grouping_permutation(m_total, config.taps, streams);
  } else {
    perm.forward.resize(static_cast<std::size_t>(m_total) * streams);
    for (std::size_t i = 0; i < perm.forward.size(); ++i) perm.forward[i] = static_cast<int>(i);
  }
  // physical slot of (codeword g, local subcarrier l, stream s)
  auto physical = [&](int g, int l, int s) { return perm.forward[(g * meff + l) * streams + s]; };

  std::vector<StreamFrame> x(layout.symbols, StreamFrame(m_total, ComplexVector::Zero(streams)));
  for (int g = 0; g < groups; ++g) {
    Bits info(message.begin() + static_cast<std::ptrdiff_t>(g) * config.block_bits,
              message.begin() + static_cast<std::ptrdiff_t>(g + 1) * config.block_bits);
    info.resize(layout.padded_info, 0);
    Bits coded = conv_encode(info, config.code);
    if (!config.code.puncture.empty()) coded = puncture(coded, config.code.puncture);
    coded.resize(layout.slots, 0);  // filler
    const Bits slots = interleave(coded, inter);
    const auto symbols = constellation.map(slots);
    for (int k = 0; k < layout.symbols; ++k)
      for (int l = 0; l < meff; ++l)
        for (int s = 0; s < streams; ++s) {
          const int p = physical(g, l, s);
          x[k][p / streams](p % streams) = symbols[(static_cast<std::size_t>(k) * meff + l) * streams + s];
        }
  }

  const auto y = config.chain == ChainModel::Full
                     ? beamform_chain(x, channel, config.profile, config.cp_length, rng, n0)
                     : diagonal_chain(x, channel, rng, n0);

  Bits decoded;
  decoded.reserve(message.size());
  std::vector<BitMetric> slot_metrics(layout.slots);
  std::vector<double> distance(constellation.order());
  for (int g = 0; g < groups; ++g) {
    for (int k = 0; k < layout.symbols; ++k)
      for (int l = 0; l < meff; ++l)
        for (int s = 0; s < streams; ++s) {
          const int p = physical(g, l, s);
          const int m = p / streams;
          const Complex obs = y[k][m](p % streams);
          const double lambda = channel.singular_systems[m].singular_values[p % streams];
          for (int label = 0; label < constellation.order(); ++label)
            distance[label] = std::norm(obs - lambda * constellation.point(label));
          const std::size_t base = ((static_cast<std::size_t>(k) * meff + l) * streams + s) * bits;
          for (int j = 0; j < bits; ++j) {
            BitMetric& metric = slot_metrics[base + j];
            metric.zero = metric.one = std::numeric_limits<double>::infinity();
            for (int label = 0; label < constellation.order(); ++label) {
              double& target = constellation.label_bit(label, j) ? metric.one : metric.zero;
              target = std::min(target, distance[label]);
            }
          }
        }
    auto ordered = deinterleave<BitMetric>(slot_metrics, inter);
    ordered.resize(layout.coded);
    if (!config.code.puncture.empty())
      ordered = depuncture(ordered, config.code.puncture, layout.mother);
    const Bits info = viterbi_decode(ordered, config.code);
    decoded.insert(decoded.end(), info.begin(), info.begin() + config.block_bits);
  }
  return decoded;
}

}  // namespace bicmb
