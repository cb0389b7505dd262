#include <limits>

#include "bicmb/analysis.hpp"

namespace bicmb {

int diversity_of(const AlphaSpectrum& a, int nt, int nr) {
  if (a.cols > std::min(nt, nr)) throw Error("S exceeds min(Nt, Nr)");
  int d = 0;
  bool any = false;
  for (int m = 0; m < a.rows; ++m)
    for (int s = 0; s < a.cols; ++s)
      if (a.at(m, s) > 0) {
        const int delta = s + 1;
        d += (nr - delta + 1) * (nt - delta + 1);
        any = true;
        break;
      }
  if (!any) throw Error("not an error event");
  return d;
}

DiversityReport max_achievable_diversity(const CodeSpec& code, int nt, int nr, int streams,
                                         int subcarriers, int max_dH, EnumerationMethod method) {
  if (streams > std::min(nt, nr)) throw Error("S exceeds min(Nt, Nr)");
  DiversityReport report;
  report.max_diversity = nr * nt * subcarriers;
  report.d_min = std::numeric_limits<int>::max();
  for (auto& term : enumerate_alpha_spectra(code, streams, subcarriers, max_dH, method)) {
    const int d = diversity_of(term.spectrum, nt, nr);
    // terms arrive sorted by (d_H, spectrum), so the first minimum wins ties
    if (d < report.d_min) {
      report.d_min = d;
      report.dominant = term.spectrum;
    }
    report.per_event.emplace_back(std::move(term), d);
  }
  report.full_diversity = report.d_min == report.max_diversity;
  return report;
}

bool full_diversity_condition(Rational rate, int streams, int taps) {
  if (rate <= 0 || rate > 1 || streams < 1 || taps < 1) throw Error("invalid arguments");
  return rate * streams * taps <= 1;
}

bool full_diversity_condition(Rational rate, const std::vector<int>& streams_per_subcarrier) {
  if (rate <= 0 || rate > 1 || streams_per_subcarrier.empty()) throw Error("invalid arguments");
  long long total = 0;
  for (int s : streams_per_subcarrier) {
    if (s < 1) throw Error("invalid arguments");
    total += s;
  }
  return rate * total <= 1;
}

namespace {

std::vector<int> support(const std::vector<int>& a) {
  std::vector<int> p;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0) p.push_back(static_cast<int>(i) + 1);
  return p;
}

int side_degree(int x, int y, int p1) { return (x - p1 + 1) * (y - p1 + 1); }

void check_support(int y, const std::vector<int>& p) {
  if (p.empty()) throw Error("empty support");
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] < 1 || p[i] > y || (i > 0 && p[i] <= p[i - 1])) throw Error("support must be increasing within 1..Y");
}

}  // namespace

CorrelatedDegree correlated_pep_degree(const CorrelatedPepSpec& spec) {
  const int x = spec.x(), y = spec.y();
  if (static_cast<int>(spec.a.size()) != y) throw Error("alpha vector length must equal min(Nt, Nr)");
  const auto p = support(spec.a);
  if (p.empty()) throw Error("empty support");
  CorrelatedDegree out;
  if (spec.a_tilde.empty()) {
    // both halves on one subcarrier: the flat-fading value, no offset term
    out.diversity = side_degree(x, y, p[0]);
    out.snr_offset = 0.0;
    return out;
  }
  if (static_cast<int>(spec.a_tilde.size()) != y) throw Error("alpha vector length must equal min(Nt, Nr)");
  const auto q = support(spec.a_tilde);
  if (q.empty()) throw Error("empty support");
  if (spec.rho < 0.0 || spec.rho >= 1.0) throw Error("rho must lie in [0, 1)");
  out.diversity = side_degree(x, y, p[0]) + side_degree(x, y, q[0]);
  out.snr_offset = 1.0 / (1.0 - spec.rho * spec.rho);
  return out;
}

int closed_form_marginal_degree(int x, int y, const std::vector<int>& p,
                                const std::vector<int>& p_tilde) {
  check_support(y, p);
  check_support(y, p_tilde);
  return side_degree(x, y, p[0]) + side_degree(x, y, p_tilde[0]) - static_cast<int>(p.size()) -
         static_cast<int>(p_tilde.size());
}

}  // namespace bicmb
