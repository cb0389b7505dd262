#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bicmb/channel.hpp"
#include "bicmb/codec.hpp"

namespace bicmb {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// alpha_{m,s}: erroneous coded bits an error event puts on stream s of
/// subcarrier m. Stored row-major (M rows, S columns).
struct AlphaSpectrum {
  int rows = 0;
  int cols = 0;
  std::vector<int> entries;

  AlphaSpectrum() = default;
  AlphaSpectrum(int rows, int cols) : rows(rows), cols(cols), entries(rows * cols, 0) {}
  AlphaSpectrum(int rows, int cols, std::vector<int> values);

  int& at(int m, int s) { return entries[m * cols + s]; }
  int at(int m, int s) const { return entries[m * cols + s]; }
  int hamming_weight() const;
  std::string str() const;  // "[0 1;2 2]"

  auto operator<=>(const AlphaSpectrum&) const = default;
};

AlphaSpectrum parse_spectrum(const std::string& text);

struct SpectrumTerm {
  AlphaSpectrum spectrum;
  BigInt multiplicity;
};

enum class EnumerationMethod { PathSearch, TransferFunction };

/// Trellis steps after which the stream assignment repeats: the smallest
/// multiple of the puncture period whose kept bits fill whole rounds of the
/// S*M streams.
int spectrum_period(const CodeSpec& code, int streams, int subcarriers);

/// True if the punctured, stream-labelled trellis has a cycle of zero-weight
/// branches through non-zero states (such a code has unbounded error events
/// of bounded weight).
bool has_zero_weight_cycle(const CodeSpec& code, int streams, int subcarriers);

/// All error events with d_H <= max_dH, summed over every starting phase of
/// the period, grouped by spectrum with exact multiplicities. Sorted by
/// (d_H, spectrum).
std::vector<SpectrumTerm> enumerate_alpha_spectra(const CodeSpec& code, int streams,
                                                  int subcarriers, int max_dH,
                                                  EnumerationMethod method =
                                                      EnumerationMethod::TransferFunction);

/// D = sum over non-zero rows of (Nr - delta_m + 1)(Nt - delta_m + 1), delta_m
/// the 1-based index of the row's first non-zero entry.
int diversity_of(const AlphaSpectrum& a, int nt, int nr);

struct DiversityReport {
  std::vector<std::pair<SpectrumTerm, int>> per_event;
  int d_min = 0;
  AlphaSpectrum dominant;
  int max_diversity = 0;  // Nr * Nt * L
  bool full_diversity = false;
};

/// Worst-case diversity over all enumerated events for an L = M system.
/// Ties on D resolve to the smaller d_H, then the lexicographically smaller
/// spectrum.
DiversityReport max_achievable_diversity(const CodeSpec& code, int nt, int nr, int streams,
                                         int subcarriers, int max_dH,
                                         EnumerationMethod method =
                                             EnumerationMethod::TransferFunction);

/// R_c * S * L <= 1, exact.
bool full_diversity_condition(Rational rate, int streams, int taps);
/// Variant with per-subcarrier stream counts in one group: R_c * sum S <= 1.
bool full_diversity_condition(Rational rate, const std::vector<int>& streams_per_subcarrier);

// --- correlated subcarriers ---------------------------------------------------

/// Two subcarriers carrying alpha vectors a and a_tilde (length Y) with
/// correlation rho. An empty a_tilde means both halves sit on one subcarrier.
struct CorrelatedPepSpec {
  std::vector<int> a;
  std::vector<int> a_tilde;
  int nt = 2;
  int nr = 2;
  double rho = 0.0;

  int x() const { return std::max(nt, nr); }
  int y() const { return std::min(nt, nr); }
};

struct CorrelatedDegree {
  int diversity = 0;
  /// The bound decays like (c * gamma + offset)^-D with offset 1 / (1 - rho^2).
  double snr_offset = 1.0;
};

CorrelatedDegree correlated_pep_degree(const CorrelatedPepSpec& spec);

/// Closed-form smallest degree of the marginal polynomial:
/// (X-p1+1)(Y-p1+1) + (X-q1+1)(Y-q1+1) - W - W~ (p, q 1-based, increasing).
int closed_form_marginal_degree(int x, int y, const std::vector<int>& p,
                                const std::vector<int>& p_tilde);

/// Sparse multivariate polynomial with exact rational coefficients. Variables
/// are identified by index into the exponent vector.
using Monomial = std::vector<int>;
using Polynomial = std::map<Monomial, BigRational>;

/// Exact symbolic evaluation of the smallest degree: expands the eigenvalue
/// polynomial of the correlated Wishart pair (Vandermonde factors, the
/// (phi phi~)^(X-Y) factor and the truncated Bessel-series determinant),
/// integrates the unobserved eigenvalues term by term with the t! and
/// v^(t+1)/(t+1) rules and returns the smallest surviving total degree.
/// Limited to X, Y <= 3.
int smallest_degree_oracle(int x, int y, const std::vector<int>& p,
                           const std::vector<int>& p_tilde);

/// Lowest-order part of det[I~_{X-Y}(eps phi_u phi~_v)], truncated series.
/// Variables: [eps, phi_1..phi_Y, phi~_1..phi~_Y].
Polynomial bessel_determinant(int x, int y, int max_eps_degree);

/// Among the lowest-degree terms of the determinant, the one with the
/// lexicographically largest exponent vector (largest eigenvalues first).
std::pair<Monomial, BigRational> dominant_determinant_term(int x, int y);

// --- Monte-Carlo PEP --------------------------------------------------------------

/// Which physical subcarrier each row of the spectrum occupies.
struct PepChannel {
  int nt = 2;
  int nr = 2;
  int subcarriers = 2;
  TapProfile profile = TapProfile::equal(2);
  std::vector<int> rows_on;  // physical subcarrier per spectrum row
};

struct PepPoint {
  double snr_db = 0.0;
  std::uint64_t trials = 0;
  double pep = 0.0;
  double std_error = 0.0;
  double ci95 = 0.0;
};

struct PepCurve {
  std::vector<PepPoint> points;
};

/// E[exp(-(d_min^2 / (4 N0)) sum alpha_{m,s} lambda_s(m)^2)] with N0 = Nt/gamma.
/// Subcarriers are split into mutually correlated clusters (independent
/// clusters multiply). Within a cluster the channel is a linear map of
/// n i.i.d. CN(0,1) variables w; w = R u with |w|^2 ~ Gamma(n) integrated in
/// closed form, u sampled uniformly on the sphere.
PepCurve pep_expectation_mc(const AlphaSpectrum& a, const PepChannel& channel,
                            const std::vector<double>& snr_db, std::uint64_t trials,
                            std::uint64_t seed, int workers = 1, double d_min = std::sqrt(2.0));

/// Plain estimator: draw taps, take singular values, average the exponential.
PepCurve pep_expectation_naive(const AlphaSpectrum& a, const PepChannel& channel,
                               const std::vector<double>& snr_db, std::uint64_t trials,
                               std::uint64_t seed, double d_min = std::sqrt(2.0));

/// Least-squares slope of -log10(rate) against log10(gamma) over points in
/// [lo_db, hi_db].
double estimate_slope(const std::vector<double>& snr_db, const std::vector<double>& rate,
                      double lo_db, double hi_db);

}  // namespace bicmb
