#include "bicmb/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace bicmb {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

TapProfile TapProfile::equal(int taps) {
  if (taps < 1) throw Error("tap count must be positive");
  TapProfile p;
  p.kind = TapProfileKind::Equal;
  p.powers.assign(taps, 1.0 / taps);
  p.delays.resize(taps);
  std::iota(p.delays.begin(), p.delays.end(), 0.0);
  return p;
}

TapProfile TapProfile::exponential(int taps, double last_to_first_db) {
  if (taps < 1) throw Error("tap count must be positive");
  TapProfile p;
  p.kind = TapProfileKind::Exponential;
  p.powers.resize(taps);
  p.delays.resize(taps);
  const double beta = taps > 1 ? -last_to_first_db / 10.0 * std::log(10.0) / (taps - 1) : 0.0;
  double total = 0.0;
  for (int l = 0; l < taps; ++l) {
    p.powers[l] = std::exp(-beta * l);
    p.delays[l] = l;
    total += p.powers[l];
  }
  for (double& w : p.powers) w /= total;
  return p;
}

void TapProfile::validate() const {
  if (powers.empty() || powers.size() != delays.size()) throw Error("malformed tap profile");
  double total = 0.0;
  for (std::size_t l = 0; l < powers.size(); ++l) {
    if (!(powers[l] > 0.0)) throw Error("tap powers must be positive");
    if (delays[l] < 0.0 || (l > 0 && delays[l] <= delays[l - 1]))
      throw Error("tap delays must be non-negative and strictly increasing");
    total += powers[l];
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error("tap powers must sum to one");
}

std::string to_string(TapProfileKind kind) {
  return kind == TapProfileKind::Equal ? "equal" : "exponential";
}

TapProfileKind tap_profile_kind_from_string(const std::string& name) {
  if (name == "equal") return TapProfileKind::Equal;
  if (name == "exponential") return TapProfileKind::Exponential;
  throw Error("unknown tap profile '" + name + "'");
}

TapList draw_taps(int nt, int nr, const TapProfile& profile, SeededRng& rng) {
  if (nt < 1 || nt > 4 || nr < 1 || nr > 4) throw Error("antenna count out of range");
  if (profile.tap_count() < 1 || profile.tap_count() > 8) throw Error("tap count out of range");
  TapList taps;
  taps.reserve(profile.tap_count());
  for (double power : profile.powers) {
    ComplexMatrix h(nr, nt);
    // column-major fill keeps the draw order fixed
    for (int v = 0; v < nt; ++v)
      for (int u = 0; u < nr; ++u) h(u, v) = complex_gaussian(rng, power);
    taps.push_back(std::move(h));
  }
  return taps;
}

std::vector<ComplexMatrix> freq_response(const TapList& taps, int subcarriers,
                                         const TapProfile& profile) {
  if (taps.empty() || static_cast<int>(taps.size()) != profile.tap_count())
    throw Error("tap list does not match profile");
  if (subcarriers < profile.tap_count()) throw Error("undersampled delay spread");
  if (!is_power_of_two(subcarriers)) throw Error("subcarrier count must be a power of two");

  std::vector<ComplexMatrix> out;
  out.reserve(subcarriers);
  for (int m = 0; m < subcarriers; ++m) {
    ComplexMatrix h = ComplexMatrix::Zero(taps[0].rows(), taps[0].cols());
    for (std::size_t l = 0; l < taps.size(); ++l) {
      const double angle = -2.0 * std::numbers::pi * m * profile.delays[l] / subcarriers;
      h += taps[l] * std::polar(1.0, angle);
    }
    out.push_back(std::move(h));
  }
  return out;
}

ChannelRealization ChannelRealization::from_taps(TapList taps, int subcarriers,
                                                 const TapProfile& profile) {
  ChannelRealization r;
  r.freq_responses = freq_response(taps, subcarriers, profile);
  r.taps = std::move(taps);
  r.singular_systems.reserve(subcarriers);
  for (const auto& h : r.freq_responses) r.singular_systems.push_back(svd(h));
  return r;
}

ChannelRealization draw_realization(int nt, int nr, const TapProfile& profile, int subcarriers,
                                    SeededRng& rng) {
  return ChannelRealization::from_taps(draw_taps(nt, nr, profile, rng), subcarriers, profile);
}

namespace {

// e^{-i 2 pi k / m} built from first-octant values and exact symmetries, so
// roots that should cancel (1 and -1, i and -i, ...) cancel to exactly zero.
Complex unit_root(long long k, int m) {
  k %= m;
  if (k < 0) k += m;
  if (m % 8 != 0) return std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / m);
  const long long quarter = m / 4;
  const long long quadrant = k / quarter;
  const long long rem = k % quarter;
  const long long folded = std::min(rem, quarter - rem);
  double c = std::cos(2.0 * std::numbers::pi * static_cast<double>(folded) / m);
  double s = std::sin(2.0 * std::numbers::pi * static_cast<double>(folded) / m);
  if (2 * folded == quarter) s = c;
  if (folded != rem) std::swap(c, s);
  // angle within the quadrant is (c, -s); rotate by -pi/2 per quadrant
  Complex z{c, -s};
  for (long long q = 0; q < quadrant; ++q) z = Complex(z.imag(), -z.real());
  return z;
}

}  // namespace

double subcarrier_correlation(const TapProfile& profile, int subcarriers, int delta) {
  if (subcarriers < 1 || delta < 0 || delta >= subcarriers) throw Error("delta out of range");
  Complex acc{0.0, 0.0};
  double total = 0.0;
  for (int l = 0; l < profile.tap_count(); ++l) {
    acc += profile.powers[l] * unit_root(static_cast<long long>(delta) * profile.delays[l], subcarriers);
    total += profile.powers[l];
  }
  return std::abs(acc) / total;
}

std::vector<std::vector<int>> uncorrelated_groups(int subcarriers, int taps) {
  if (taps < 1 || subcarriers < taps || subcarriers % taps != 0)
    throw Error("grouping unavailable");
  const int group_count = subcarriers / taps;
  std::vector<std::vector<int>> groups(group_count);
  for (int u = 0; u < group_count; ++u)
    for (int l = 0; l < taps; ++l) groups[u].push_back(u + l * group_count);
  return groups;
}

}  // namespace bicmb
