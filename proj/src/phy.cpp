#include "bicmb/phy.hpp"

#include <cmath>
#include <limits>

namespace bicmb {

// --- constellation ----------------------------------------------------------

Constellation::Constellation(int order) {
  int bits = 0;
  while ((1 << bits) < order) ++bits;
  if (order < 4 || (1 << bits) != order || bits % 2 != 0)
    throw Error("constellation order must be 4, 16, 64, ...");
  bits_ = bits;
  const int half = bits / 2;
  const int side = 1 << half;
  const double energy = 2.0 * (side * side - 1) / 3.0;
  const double scale = 1.0 / std::sqrt(energy);
  d_min_ = 2.0 * scale;

  auto level = [&](unsigned gray) {
    unsigned pos = gray;
    for (unsigned shift = gray >> 1; shift; shift >>= 1) pos ^= shift;
    return (side - 1) - 2.0 * pos;
  };
  points_.resize(order);
  for (unsigned label = 0; label < static_cast<unsigned>(order); ++label)
    points_[label] = scale * Complex(level(label >> half), level(label & (side - 1)));

  subsets_.resize(2 * bits_);
  for (int j = 0; j < bits_; ++j)
    for (unsigned label = 0; label < static_cast<unsigned>(order); ++label)
      subsets_[2 * j + label_bit(label, j)].push_back(label);
}

std::vector<Complex> Constellation::map(std::span<const std::uint8_t> bits) const {
  if (bits.size() % bits_ != 0) throw Error("bit count not divisible by bits per symbol");
  std::vector<Complex> out(bits.size() / bits_);
  for (std::size_t k = 0; k < out.size(); ++k) {
    unsigned label = 0;
    for (int j = 0; j < bits_; ++j) label = (label << 1) | (bits[k * bits_ + j] & 1u);
    out[k] = points_[label];
  }
  return out;
}

unsigned Constellation::label_of(Complex symbol) const {
  unsigned best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (unsigned label = 0; label < points_.size(); ++label) {
    const double d = std::norm(symbol - points_[label]);
    if (d < dist) {
      dist = d;
      best = label;
    }
  }
  return best;
}

Bits Constellation::labels_of(std::span<const Complex> symbols) const {
  Bits out;
  out.reserve(symbols.size() * bits_);
  for (Complex z : symbols) {
    const unsigned label = label_of(z);
    for (int j = 0; j < bits_; ++j) out.push_back(static_cast<std::uint8_t>(label_bit(label, j)));
  }
  return out;
}

// --- OFDM ------------------------------------------------------------------

void require_cp_covers(int cp_length, int taps) {
  if (cp_length < taps) throw Error("ISI not absorbed");
}

std::vector<Complex> ofdm_modulate(std::span<const Complex> subcarrier_values, int cp_length) {
  const int m = static_cast<int>(subcarrier_values.size());
  if (cp_length < 0 || cp_length > m) throw Error("cyclic prefix longer than symbol");
  const auto time = dft(subcarrier_values, DftDirection::Inverse);
  std::vector<Complex> out;
  out.reserve(m + cp_length);
  out.insert(out.end(), time.end() - cp_length, time.end());
  out.insert(out.end(), time.begin(), time.end());
  return out;
}

std::vector<Complex> ofdm_demodulate(std::span<const Complex> samples, int subcarriers,
                                     int cp_length) {
  if (static_cast<int>(samples.size()) != subcarriers + cp_length) throw Error("symbol length mismatch");
  return dft(samples.subspan(cp_length), DftDirection::Forward);
}

std::vector<std::vector<Complex>> apply_taps(const std::vector<std::vector<Complex>>& tx,
                                             const TapList& taps, const TapProfile& profile) {
  if (taps.empty() || static_cast<int>(taps.size()) != profile.tap_count())
    throw Error("tap list does not match profile");
  const int nr = static_cast<int>(taps[0].rows());
  const int nt = static_cast<int>(taps[0].cols());
  if (static_cast<int>(tx.size()) != nt) throw Error("dimension mismatch");
  const std::size_t length = tx[0].size();
  std::vector<std::vector<Complex>> rx(nr, std::vector<Complex>(length));
  for (std::size_t l = 0; l < taps.size(); ++l) {
    const double d = profile.delays[l];
    if (d != std::floor(d)) throw Error("tap delays must be whole samples");
    const std::size_t delay = static_cast<std::size_t>(d);
    for (int u = 0; u < nr; ++u)
      for (int v = 0; v < nt; ++v) {
        const Complex h = taps[l](u, v);
        for (std::size_t n = delay; n < length; ++n) rx[u][n] += h * tx[v][n - delay];
      }
  }
  return rx;
}

// --- beamforming ------------------------------------------------------------

namespace {

void check_frame(const std::vector<StreamFrame>& x, const ChannelRealization& channel) {
  if (x.empty()) throw Error("empty frame");
  const int m = channel.subcarriers();
  const auto streams = x[0].empty() ? 0 : x[0][0].size();
  const auto limit = static_cast<Eigen::Index>(channel.singular_systems[0].singular_values.size());
  if (streams < 1 || static_cast<Eigen::Index>(streams) > limit) throw Error("dimension mismatch");
  for (const auto& symbol : x) {
    if (static_cast<int>(symbol.size()) != m) throw Error("dimension mismatch");
    for (const auto& v : symbol)
      if (v.size() != static_cast<Eigen::Index>(streams)) throw Error("dimension mismatch");
  }
}

// CP removal, FFT per antenna and U_S^H combining for every symbol.
std::vector<StreamFrame> receive(const std::vector<std::vector<Complex>>& rx,
                                 const ChannelRealization& channel, int streams, int cp_length,
                                 std::size_t symbols) {
  const int m = channel.subcarriers();
  const int nr = static_cast<int>(rx.size());
  const std::size_t span = static_cast<std::size_t>(m + cp_length);
  if (rx.empty() || rx[0].size() != symbols * span) throw Error("dimension mismatch");
  std::vector<StreamFrame> y(symbols, StreamFrame(m, ComplexVector::Zero(streams)));
  std::vector<std::vector<Complex>> z(nr);
  for (std::size_t k = 0; k < symbols; ++k) {
    for (int u = 0; u < nr; ++u)
      z[u] = ofdm_demodulate(std::span<const Complex>(rx[u]).subspan(k * span, span), m, cp_length);
    for (int sc = 0; sc < m; ++sc) {
      const ComplexMatrix& uu = channel.singular_systems[sc].u;
      for (int s = 0; s < streams; ++s) {
        Complex acc{0.0, 0.0};
        for (int u = 0; u < nr; ++u) acc += std::conj(uu(u, s)) * z[u][sc];
        y[k][sc](s) = acc;
      }
    }
  }
  return y;
}

std::vector<std::vector<Complex>> transmit(const std::vector<StreamFrame>& x,
                                           const ChannelRealization& channel,
                                           const TapProfile& profile, int cp_length) {
  check_frame(x, channel);
  require_cp_covers(cp_length, profile.tap_count());
  const int m = channel.subcarriers();
  const int nt = static_cast<int>(channel.taps[0].cols());
  const int streams = static_cast<int>(x[0][0].size());
  std::vector<std::vector<Complex>> tx(nt);
  std::vector<Complex> values(m);
  for (const auto& symbol : x) {
    for (int v = 0; v < nt; ++v) {
      for (int sc = 0; sc < m; ++sc) {
        const ComplexMatrix& vv = channel.singular_systems[sc].v;
        Complex acc{0.0, 0.0};
        for (int s = 0; s < streams; ++s) acc += vv(v, s) * symbol[sc](s);
        values[sc] = acc;
      }
      const auto samples = ofdm_modulate(values, cp_length);
      tx[v].insert(tx[v].end(), samples.begin(), samples.end());
    }
  }
  return apply_taps(tx, channel.taps, profile);
}

}  // namespace

std::vector<StreamFrame> diagonal_chain(const std::vector<StreamFrame>& x,
                                        const ChannelRealization& channel, SeededRng& rng,
                                        double n0) {
  check_frame(x, channel);
  if (n0 < 0.0) throw Error("noise variance must be non-negative");
  std::vector<StreamFrame> y = x;
  for (auto& symbol : y)
    for (std::size_t sc = 0; sc < symbol.size(); ++sc) {
      const auto& sv = channel.singular_systems[sc].singular_values;
      for (Eigen::Index s = 0; s < symbol[sc].size(); ++s) {
        symbol[sc](s) *= sv[s];
        if (n0 > 0.0) symbol[sc](s) += complex_gaussian(rng, n0);
      }
    }
  return y;
}

std::vector<StreamFrame> beamform_chain(const std::vector<StreamFrame>& x,
                                        const ChannelRealization& channel,
                                        const TapProfile& profile, int cp_length,
                                        const std::vector<std::vector<Complex>>& noise) {
  auto rx = transmit(x, channel, profile, cp_length);
  if (!noise.empty()) {
    if (noise.size() != rx.size()) throw Error("dimension mismatch");
    for (std::size_t u = 0; u < rx.size(); ++u) {
      if (noise[u].size() != rx[u].size()) throw Error("dimension mismatch");
      for (std::size_t n = 0; n < rx[u].size(); ++n) rx[u][n] += noise[u][n];
    }
  }
  return receive(rx, channel, static_cast<int>(x[0][0].size()), cp_length, x.size());
}

std::vector<StreamFrame> beamform_chain(const std::vector<StreamFrame>& x,
                                        const ChannelRealization& channel,
                                        const TapProfile& profile, int cp_length,
                                        SeededRng& rng, double n0) {
  if (n0 < 0.0) throw Error("noise variance must be non-negative");
  check_frame(x, channel);
  std::vector<std::vector<Complex>> noise;
  if (n0 > 0.0) {
    const int m = channel.subcarriers();
    const std::size_t length = x.size() * static_cast<std::size_t>(m + cp_length);
    noise.assign(channel.taps[0].rows(), std::vector<Complex>(length));
    for (auto& antenna : noise)
      for (auto& sample : antenna) sample = complex_gaussian(rng, n0 / m);
  }
  return beamform_chain(x, channel, profile, cp_length, noise);
}

std::vector<StreamFrame> combined_noise(const std::vector<std::vector<Complex>>& noise,
                                        const ChannelRealization& channel, int streams,
                                        int cp_length) {
  if (noise.empty()) throw Error("dimension mismatch");
  const std::size_t span = static_cast<std::size_t>(channel.subcarriers() + cp_length);
  if (noise[0].size() % span != 0) throw Error("dimension mismatch");
  return receive(noise, channel, streams, cp_length, noise[0].size() / span);
}

// --- grouping ---------------------------------------------------------------

GroupingPermutation grouping_permutation(int subcarriers, int taps, int streams) {
  const auto groups = uncorrelated_groups(subcarriers, taps);
  if (streams < 1) throw Error("stream count must be positive");
  GroupingPermutation p;
  p.forward.reserve(static_cast<std::size_t>(subcarriers) * streams);
  for (const auto& group : groups)
    for (int sc : group)
      for (int s = 0; s < streams; ++s) p.forward.push_back(sc * streams + s);
  p.inverse.assign(p.forward.size(), 0);
  for (std::size_t i = 0; i < p.forward.size(); ++i) p.inverse[p.forward[i]] = static_cast<int>(i);
  return p;
}

}  // namespace bicmb
