#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <thread>

#include <Eigen/Eigenvalues>

#include "bicmb/analysis.hpp"

namespace bicmb {

namespace {

constexpr std::uint64_t kChunk = 8192;

struct Row {
  int subcarrier;
  std::vector<int> alpha;  // per stream
};

struct Cluster {
  std::vector<int> subcarriers;            // distinct physical subcarriers
  std::vector<std::pair<int, Row>> rows;   // (index into subcarriers, row)
  ComplexMatrix basis;                     // n x r, K = basis basis^H
};

// Squared singular values, descending.
std::vector<double> squared_singular_values(const ComplexMatrix& h) {
  const ComplexMatrix gram = h.cols() <= h.rows() ? ComplexMatrix(h.adjoint() * h)
                                                  : ComplexMatrix(h * h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();  // ascending
  std::vector<double> out(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) out[i] = std::max(0.0, ev(ev.size() - 1 - i));
  return out;
}

Complex tap_phase(const TapProfile& profile, int l, int subcarrier, int m) {
  return std::polar(1.0, -2.0 * std::numbers::pi * subcarrier * profile.delays[l] / m);
}

std::vector<Row> active_rows(const AlphaSpectrum& a, const PepChannel& channel) {
  if (static_cast<int>(channel.rows_on.size()) != a.rows) throw Error("rows_on must list one subcarrier per row");
  if (a.cols > std::min(channel.nt, channel.nr)) throw Error("S exceeds min(Nt, Nr)");
  channel.profile.validate();
  std::vector<Row> rows;
  for (int m = 0; m < a.rows; ++m) {
    const int sc = channel.rows_on[m];
    if (sc < 0 || sc >= channel.subcarriers) throw Error("subcarrier index out of range");
    Row r{sc, std::vector<int>(a.entries.begin() + m * a.cols, a.entries.begin() + (m + 1) * a.cols)};
    if (std::accumulate(r.alpha.begin(), r.alpha.end(), 0) > 0) rows.push_back(std::move(r));
  }
  if (rows.empty()) throw Error("degenerate spectrum");
  return rows;
}

std::vector<Cluster> make_clusters(const std::vector<Row>& rows, const PepChannel& channel) {
  std::vector<int> subs;
  for (const auto& r : rows)
    if (std::find(subs.begin(), subs.end(), r.subcarrier) == subs.end()) subs.push_back(r.subcarrier);
  // union-find over correlated subcarriers
  std::vector<int> parent(subs.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int i) { return parent[i] == i ? i : parent[i] = root(parent[i]); };
  for (std::size_t i = 0; i < subs.size(); ++i)
    for (std::size_t j = i + 1; j < subs.size(); ++j) {
      const int delta = std::abs(subs[i] - subs[j]);
      if (subcarrier_correlation(channel.profile, channel.subcarriers, delta) > 1e-12)
        parent[root(static_cast<int>(i))] = root(static_cast<int>(j));
    }
  std::vector<Cluster> clusters;
  std::vector<int> cluster_of(subs.size(), -1);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const int r = root(static_cast<int>(i));
    if (cluster_of[r] < 0) {
      cluster_of[r] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[cluster_of[r]].subcarriers.push_back(subs[i]);
  }
  for (const auto& row : rows) {
    const int idx = static_cast<int>(std::find(subs.begin(), subs.end(), row.subcarrier) - subs.begin());
    Cluster& c = clusters[cluster_of[root(idx)]];
    const int local = static_cast<int>(
        std::find(c.subcarriers.begin(), c.subcarriers.end(), row.subcarrier) - c.subcarriers.begin());
    c.rows.emplace_back(local, row);
  }
  // frequency-domain covariance across the cluster and a rank-revealing factor
  const TapProfile& profile = channel.profile;
  for (auto& c : clusters) {
    const int n = static_cast<int>(c.subcarriers.size());
    ComplexMatrix g(n, profile.tap_count());
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < profile.tap_count(); ++l)
        g(i, l) = std::sqrt(profile.powers[l]) * tap_phase(profile, l, c.subcarriers[i], channel.subcarriers);
    const ComplexMatrix k = g * g.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(k);
    const auto& ev = solver.eigenvalues();
    const double top = ev.maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = ev.size(); i-- > 0;)
      if (ev(i) > 1e-12 * top) keep.push_back(i);
    c.basis.resize(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
      c.basis.col(static_cast<Eigen::Index>(j)) = solver.eigenvectors().col(keep[j]) * std::sqrt(ev(keep[j]));
  }
  return clusters;
}

struct Moments {
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

// Runs fn(chunk_index, moments) for every chunk on `workers` threads and
// reduces in chunk order so the result does not depend on the worker count.
template <typename Fn>
Moments run_chunks(std::uint64_t trials, std::size_t points, int workers, Fn fn) {
  const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<Moments> partial(chunks, Moments{std::vector<double>(points), std::vector<double>(points)});
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(chunks)));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::uint64_t c = t; c < chunks; c += threads) fn(c, std::min(kChunk, trials - c * kChunk), partial[c]);
    });
  for (auto& th : pool) th.join();
  Moments total{std::vector<double>(points), std::vector<double>(points)};
  for (const auto& p : partial)
    for (std::size_t i = 0; i < points; ++i) {
      total.sum[i] += p.sum[i];
      total.sum_sq[i] += p.sum_sq[i];
    }
  return total;
}

double scale_factor(double snr_db, int nt, double d_min) {
  const double gamma = std::pow(10.0, snr_db / 10.0);
  return d_min * d_min * gamma / (4.0 * nt);
}

}  // namespace

PepCurve pep_expectation_mc(const AlphaSpectrum& a, const PepChannel& channel,
                            const std::vector<double>& snr_db, std::uint64_t trials,
                            std::uint64_t seed, int workers, double d_min) {
  if (trials < 100000) throw Error("need at least 1e5 trials");
  const auto rows = active_rows(a, channel);
  const auto clusters = make_clusters(rows, channel);
  const std::size_t points = snr_db.size();
  const int nt = channel.nt, nr = channel.nr;

  std::vector<double> estimate(points, 1.0), rel_var(points, 0.0);
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    const Cluster& cluster = clusters[ci];
    const int n = static_cast<int>(cluster.subcarriers.size());
    const int r = static_cast<int>(cluster.basis.cols());
    const int dims = nr * nt * r;
    const Moments m = run_chunks(trials, points, workers, [&](std::uint64_t chunk, std::uint64_t count, Moments& out) {
      SeededRng rng(seed, derive_stream(ci, chunk));
      std::vector<ComplexMatrix> h(n, ComplexMatrix(nr, nt));
      ComplexVector w(r);
      std::vector<Complex> draw(dims);
      for (std::uint64_t t = 0; t < count; ++t) {
        double norm = 0.0;
        for (auto& z : draw) {
          z = complex_gaussian(rng, 1.0);
          norm += std::norm(z);
        }
        const double inv = 1.0 / std::sqrt(norm);
        for (int u = 0, k = 0; u < nr; ++u)
          for (int v = 0; v < nt; ++v) {
            for (int j = 0; j < r; ++j) w(j) = draw[k++] * inv;
            const ComplexVector col = cluster.basis * w;
            for (int i = 0; i < n; ++i) h[i](u, v) = col(i);
          }
        double z = 0.0;
        std::vector<std::vector<double>> sv(n);
        for (int i = 0; i < n; ++i) sv[i] = squared_singular_values(h[i]);
        for (const auto& [local, row] : cluster.rows)
          for (std::size_t s = 0; s < row.alpha.size(); ++s) z += row.alpha[s] * sv[local][s];
        for (std::size_t p = 0; p < points; ++p) {
          const double value = std::pow(1.0 + scale_factor(snr_db[p], nt, d_min) * z, -dims);
          out.sum[p] += value;
          out.sum_sq[p] += value * value;
        }
      }
    });
    for (std::size_t p = 0; p < points; ++p) {
      const double mean = m.sum[p] / trials;
      const double var = std::max(0.0, m.sum_sq[p] / trials - mean * mean) * trials / std::max<std::uint64_t>(1, trials - 1);
      estimate[p] *= mean;
      if (mean > 0.0) rel_var[p] += var / trials / (mean * mean);
    }
  }

  PepCurve curve;
  for (std::size_t p = 0; p < points; ++p) {
    PepPoint pt;
    pt.snr_db = snr_db[p];
    pt.trials = trials;
    pt.pep = estimate[p];
    pt.std_error = estimate[p] * std::sqrt(rel_var[p]);  // delta method over clusters
    pt.ci95 = 1.96 * pt.std_error;
    curve.points.push_back(pt);
  }
  return curve;
}

PepCurve pep_expectation_naive(const AlphaSpectrum& a, const PepChannel& channel,
                               const std::vector<double>& snr_db, std::uint64_t trials,
                               std::uint64_t seed, double d_min) {
  if (trials < 1) throw Error("trials must be positive");
  const auto rows = active_rows(a, channel);
  const std::size_t points = snr_db.size();
  const int nt = channel.nt, nr = channel.nr;
  const TapProfile& profile = channel.profile;
  const Moments m = run_chunks(trials, points, 1, [&](std::uint64_t chunk, std::uint64_t count, Moments& out) {
    SeededRng rng(seed, derive_stream(0x6e61697665ULL, chunk));
    for (std::uint64_t t = 0; t < count; ++t) {
      const TapList taps = draw_taps(nt, nr, profile, rng);
      double z = 0.0;
      for (const auto& row : rows) {
        ComplexMatrix h = ComplexMatrix::Zero(nr, nt);
        for (int l = 0; l < profile.tap_count(); ++l)
          h += taps[l] * tap_phase(profile, l, row.subcarrier, channel.subcarriers);
        const auto sv = squared_singular_values(h);
        for (std::size_t s = 0; s < row.alpha.size(); ++s) z += row.alpha[s] * sv[s];
      }
      for (std::size_t p = 0; p < points; ++p) {
        const double value = std::exp(-scale_factor(snr_db[p], nt, d_min) * z);
        out.sum[p] += value;
        out.sum_sq[p] += value * value;
      }
    }
  });
  PepCurve curve;
  for (std::size_t p = 0; p < points; ++p) {
    PepPoint pt;
    pt.snr_db = snr_db[p];
    pt.trials = trials;
    pt.pep = m.sum[p] / trials;
    const double var = std::max(0.0, m.sum_sq[p] / trials - pt.pep * pt.pep);
    pt.std_error = std::sqrt(var / trials);
    pt.ci95 = 1.96 * pt.std_error;
    curve.points.push_back(pt);
  }
  return curve;
}

double estimate_slope(const std::vector<double>& snr_db, const std::vector<double>& rate,
                      double lo_db, double hi_db) {
  if (snr_db.size() != rate.size()) throw Error("length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < snr_db.size(); ++i) {
    if (snr_db[i] < lo_db - 1e-9 || snr_db[i] > hi_db + 1e-9) continue;
    if (!(rate[i] > 0.0)) throw Error("insufficient trials");
    xs.push_back(snr_db[i] / 10.0);
    ys.push_back(std::log10(rate[i]));
  }
  if (xs.size() < 3) throw Error("need at least three points in the window");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return -sxy / sxx;
}

}  // namespace bicmb
