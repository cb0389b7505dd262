#pragma once

#include <string>
#include <vector>

#include "bicmb/numerics.hpp"

namespace bicmb {

enum class TapProfileKind { Equal, Exponential };

/// Power-delay profile of a tapped-delay-line channel. Powers sum to one,
/// delays are in sampling periods and strictly increasing.
struct TapProfile {
  TapProfileKind kind = TapProfileKind::Equal;
  std::vector<double> powers;
  std::vector<double> delays;

  int tap_count() const { return static_cast<int>(powers.size()); }

  /// P_l = 1/L, delay l-1.
  static TapProfile equal(int taps);
  /// P_l proportional to exp(-beta (l-1)) with P_L / P_1 = 10^(last_to_first_db/10),
  /// normalized to unit sum, delay l-1.
  static TapProfile exponential(int taps, double last_to_first_db = -7.0);

  void validate() const;
};

std::string to_string(TapProfileKind kind);
TapProfileKind tap_profile_kind_from_string(const std::string& name);

using TapList = std::vector<ComplexMatrix>;

/// Taps H(l) (Nr x Nt) with i.i.d. CN(0, P_l) entries.
TapList draw_taps(int nt, int nr, const TapProfile& profile, SeededRng& rng);

/// H(m) = sum_l H(l) exp(-i 2 pi m tau_l / M), m = 0..M-1.
std::vector<ComplexMatrix> freq_response(const TapList& taps, int subcarriers,
                                         const TapProfile& profile);

struct ChannelRealization {
  TapList taps;
  std::vector<ComplexMatrix> freq_responses;
  std::vector<SvdResult> singular_systems;

  int subcarriers() const { return static_cast<int>(freq_responses.size()); }

  static ChannelRealization from_taps(TapList taps, int subcarriers, const TapProfile& profile);
};

ChannelRealization draw_realization(int nt, int nr, const TapProfile& profile, int subcarriers,
                                    SeededRng& rng);

/// |sum_l P_l exp(-i 2 pi delta tau_l / M)| / sum_l P_l.
double subcarrier_correlation(const TapProfile& profile, int subcarriers, int delta);

/// Groups of mutually uncorrelated subcarriers (0-based):
/// group u = {u, u + M/L, u + 2M/L, ...}, u = 0..M/L-1.
std::vector<std::vector<int>> uncorrelated_groups(int subcarriers, int taps);

bool is_power_of_two(int n);

}  // namespace bicmb
