#include "bicmb/numerics.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/SVD>
#include <unsupported/Eigen/FFT>

namespace bicmb {

std::vector<Complex> dft(std::span<const Complex> v, DftDirection direction) {
  if (v.empty()) throw Error("empty input");
  std::vector<Complex> in(v.begin(), v.end());
  if (in.size() == 1) return in;  // kissfft cannot plan a length-1 transform
  std::vector<Complex> out;
  Eigen::FFT<double> fft;
  if (direction == DftDirection::Forward) {
    fft.fwd(out, in);
  } else {
    fft.inv(out, in);  // scaled by 1/M
  }
  return out;
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

SvdResult svd(const ComplexMatrix& h) {
  if (h.rows() < 1 || h.cols() < 1 || h.rows() > 8 || h.cols() > 8)
    throw Error("matrix size out of range");
  if (!all_finite(h)) throw Error("invalid matrix");

  Eigen::JacobiSVD<ComplexMatrix> solver(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult r;
  r.u = solver.matrixU();
  r.v = solver.matrixV();
  const auto& sv = solver.singularValues();
  r.singular_values.assign(sv.data(), sv.data() + sv.size());

  // Phase convention: first significant entry of each V column real >= 0.
  // Columns of V beyond min(rows, cols) have no partner in U.
  const Eigen::Index paired = std::min(h.rows(), h.cols());
  for (Eigen::Index c = 0; c < r.v.cols(); ++c) {
    for (Eigen::Index k = 0; k < r.v.rows(); ++k) {
      const Complex z = r.v(k, c);
      if (std::abs(z) > 1e-12) {
        const Complex phase = std::conj(z) / std::abs(z);
        r.v.col(c) *= phase;
        if (c < paired) r.u.col(c) *= phase;
        break;
      }
    }
  }
  return r;
}

namespace {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  const std::array<std::uint32_t, 4> words{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t index) {
  return mix64(mix64(parent) ^ (index * 0xd1b54a32d192ed03ULL + 0x8bb84b93962eacc9ULL));
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

double SeededRng::uniform() {
  // 53 random mantissa bits, shifted off zero
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double SeededRng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Complex complex_gaussian(SeededRng& rng, double variance) {
  if (!(variance > 0.0)) throw Error("variance must be positive");
  const double sd = std::sqrt(variance / 2.0);
  const double re = rng.gaussian();
  const double im = rng.gaussian();
  return {sd * re, sd * im};
}

}  // namespace bicmb
