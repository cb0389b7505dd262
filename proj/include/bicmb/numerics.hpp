#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bicmb {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Raised for every contract violation in the library. The message is the
/// short reason ("empty input", "invalid matrix", ...) so callers and tests
/// can match on it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DftDirection { Forward, Inverse };

/// Forward: X[m] = sum_k x[k] e^{-i 2 pi m k / M} (no scaling).
/// Inverse: x[k] = (1/M) sum_m X[m] e^{+i 2 pi m k / M}.
std::vector<Complex> dft(std::span<const Complex> v, DftDirection direction);

struct SvdResult {
  ComplexMatrix u;                      // rows x rows, unitary
  std::vector<double> singular_values;  // min(rows, cols), non-increasing
  ComplexMatrix v;                      // cols x cols, unitary
};

/// Full SVD H = U diag(sigma) V^H for matrices up to 8x8. The first entry of
/// every V column with magnitude above 1e-12 is made real non-negative (the
/// matching U column is rotated by the same phase).
SvdResult svd(const ComplexMatrix& h);

/// Explicitly seeded generator. Each (seed, stream_id) pair selects an
/// independent sequence; the sequence only depends on std::mt19937_64 and
/// std::seed_seq, both of which are fully specified by the standard, so
/// draws are identical across platforms.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal, Box-Muller (cached pair).
  double gaussian();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives a child stream id from a parent id and an index, e.g.
/// (snr point, trial) -> stream.
std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t index);

/// Circularly symmetric complex Gaussian, E|z|^2 = variance.
Complex complex_gaussian(SeededRng& rng, double variance);

bool all_finite(const ComplexMatrix& m);

}  // namespace bicmb
