#include <cmath>
#include <numbers>

#include "bicmb/numerics.hpp"
#include "doctest.h"

using namespace bicmb;

namespace {

// Textbook O(M^2) transform used as the reference.
std::vector<Complex> naive_dft(const std::vector<Complex>& v, int sign, double scale) {
  const std::size_t m = v.size();
  std::vector<Complex> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    Complex acc{0, 0};
    for (std::size_t n = 0; n < m; ++n)
      acc += v[n] * std::polar(1.0, sign * 2.0 * std::numbers::pi * double(k * n % m) / double(m));
    out[k] = acc * scale;
  }
  return out;
}

std::vector<Complex> random_vector(std::size_t n, SeededRng& rng) {
  std::vector<Complex> v(n);
  for (auto& z : v) z = complex_gaussian(rng, 1.0);
  return v;
}

ComplexMatrix random_matrix(int r, int c, SeededRng& rng) {
  ComplexMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = complex_gaussian(rng, 1.0);
  return m;
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("dft matches the direct sum in both directions") {
    SeededRng rng(7, 0);
    for (int m : {1, 2, 4, 8, 64}) {
      const auto v = random_vector(m, rng);
      const auto fwd = dft(v, DftDirection::Forward);
      const auto inv = dft(v, DftDirection::Inverse);
      const auto ref_fwd = naive_dft(v, -1, 1.0);
      const auto ref_inv = naive_dft(v, +1, 1.0 / m);
      for (int k = 0; k < m; ++k) {
        CHECK(std::abs(fwd[k] - ref_fwd[k]) < 1e-10);
        CHECK(std::abs(inv[k] - ref_inv[k]) < 1e-12);
      }
    }
  }

  TEST_CASE("dft impulse and constant") {
    const std::vector<Complex> impulse{1, 0, 0, 0};
    for (const auto& z : dft(impulse, DftDirection::Forward)) CHECK(std::abs(z - Complex(1, 0)) < 1e-15);
    const std::vector<Complex> ones{1, 1, 1, 1};
    const auto back = dft(ones, DftDirection::Inverse);
    CHECK(std::abs(back[0] - Complex(1, 0)) < 1e-15);
    for (int k = 1; k < 4; ++k) CHECK(std::abs(back[k]) < 1e-15);
  }

  TEST_CASE("dft round trip and Parseval") {
    SeededRng rng(11, 3);
    const auto v = random_vector(64, rng);
    const auto f = dft(v, DftDirection::Forward);
    const auto back = dft(f, DftDirection::Inverse);
    double e_time = 0, e_freq = 0, worst = 0;
    for (int k = 0; k < 64; ++k) {
      worst = std::max(worst, std::abs(back[k] - v[k]));
      e_time += std::norm(v[k]);
      e_freq += std::norm(f[k]);
    }
    CHECK(worst < 1e-12);
    CHECK(std::abs(e_time - e_freq / 64.0) < 1e-10 * e_time);
  }

  TEST_CASE("dft rejects empty input") {
    std::vector<Complex> empty;
    CHECK_THROWS_WITH_AS(dft(empty, DftDirection::Forward), "empty input", Error);
  }

  TEST_CASE("svd of simple matrices") {
    const auto id = svd(ComplexMatrix::Identity(2, 2));
    CHECK(id.singular_values[0] == doctest::Approx(1.0));
    CHECK(id.singular_values[1] == doctest::Approx(1.0));

    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 3;
    d(1, 1) = 1;
    const auto r = svd(d);
    CHECK(r.singular_values[0] == doctest::Approx(3.0));
    CHECK(r.singular_values[1] == doctest::Approx(1.0));
    // permutation of identity up to phase
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double a = std::abs(r.v(i, j));
        CHECK((std::abs(a) < 1e-12 || std::abs(a - 1) < 1e-12));
      }
  }

  TEST_CASE("svd invariants on random matrices") {
    SeededRng rng(5, 9);
    for (int trial = 0; trial < 200; ++trial) {
      const int rows = 1 + trial % 4, cols = 1 + (trial / 4) % 4;
      const ComplexMatrix h = random_matrix(rows, cols, rng);
      const auto r = svd(h);
      CHECK((r.u.adjoint() * r.u - ComplexMatrix::Identity(rows, rows)).norm() < 1e-10);
      CHECK((r.v.adjoint() * r.v - ComplexMatrix::Identity(cols, cols)).norm() < 1e-10);
      ComplexMatrix sigma = ComplexMatrix::Zero(rows, cols);
      for (std::size_t i = 0; i < r.singular_values.size(); ++i) {
        sigma(i, i) = r.singular_values[i];
        if (i) CHECK(r.singular_values[i] <= r.singular_values[i - 1]);
        CHECK(r.singular_values[i] >= 0.0);
      }
      CHECK((r.u * sigma * r.v.adjoint() - h).norm() < 1e-9 * h.norm());
      // phase convention: first significant entry of each V column is real >= 0
      for (int c = 0; c < cols; ++c)
        for (int k = 0; k < cols; ++k)
          if (std::abs(r.v(k, c)) > 1e-12) {
            CHECK(std::abs(r.v(k, c).imag()) < 1e-12);
            CHECK(r.v(k, c).real() > 0.0);
            break;
          }
    }
  }

  TEST_CASE("2x2 singular values equal roots of the characteristic polynomial of H H^H") {
    SeededRng rng(2, 2);
    for (int trial = 0; trial < 100; ++trial) {
      const ComplexMatrix h = random_matrix(2, 2, rng);
      const ComplexMatrix g = h * h.adjoint();
      const double tr = g.trace().real();
      const double det = g.determinant().real();
      const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
      const double l1 = tr / 2 + disc, l2 = tr / 2 - disc;
      const auto r = svd(h);
      CHECK(std::abs(r.singular_values[0] - std::sqrt(l1)) < 1e-9);
      CHECK(std::abs(r.singular_values[1] - std::sqrt(std::max(0.0, l2))) < 1e-9);
    }
  }

  TEST_CASE("svd rejects invalid input") {
    ComplexMatrix h = ComplexMatrix::Identity(2, 2);
    h(0, 1) = Complex(std::nan(""), 0);
    CHECK_THROWS_WITH_AS(svd(h), "invalid matrix", Error);
    CHECK_THROWS_AS(svd(ComplexMatrix::Identity(9, 9)), Error);
  }

  TEST_CASE("complex gaussian statistics") {
    SeededRng rng(123, 0);
    const int n = 1'000'000;
    Complex mean{0, 0};
    double power = 0, re2 = 0, im2 = 0, cross = 0;
    for (int i = 0; i < n; ++i) {
      const Complex z = complex_gaussian(rng, 0.5);
      mean += z;
      power += std::norm(z);
      re2 += z.real() * z.real();
      im2 += z.imag() * z.imag();
      cross += z.real() * z.imag();
    }
    mean /= n;
    CHECK(std::abs(mean) < 0.005);
    CHECK(power / n > 0.495);
    CHECK(power / n < 0.505);
    CHECK(re2 / n == doctest::Approx(0.25).epsilon(0.01));
    CHECK(im2 / n == doctest::Approx(0.25).epsilon(0.01));
    CHECK(std::abs(cross / n) < 0.002);
  }

  TEST_CASE("unit variance mean is near zero") {
    SeededRng rng(99, 1);
    Complex mean{0, 0};
    for (int i = 0; i < 1'000'000; ++i) mean += complex_gaussian(rng, 1.0);
    CHECK(std::abs(mean / 1e6) < 0.005);
  }

  TEST_CASE("rng determinism and stream independence") {
    SeededRng a(42, 1), b(42, 1), c(42, 2);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
      const Complex za = complex_gaussian(a, 1.0), zb = complex_gaussian(b, 1.0), zc = complex_gaussian(c, 1.0);
      CHECK(za == zb);
      differs = differs || za != zc;
    }
    CHECK(differs);
    CHECK(derive_stream(1, 2) == derive_stream(1, 2));
    CHECK(derive_stream(1, 2) != derive_stream(2, 1));
    CHECK_THROWS_AS(complex_gaussian(a, 0.0), Error);
    CHECK_THROWS_AS(complex_gaussian(a, -1.0), Error);
  }

  TEST_CASE("engine output is pinned") {
    // std::mt19937_64 seeded through std::seed_seq is fully specified, so the
    // first word for a fixed seed must never change.
    SeededRng a(1, 0), b(1, 0);
    const auto first = a.next_u64();
    CHECK(first == b.next_u64());
    SeededRng u(3, 4);
    for (int i = 0; i < 1000; ++i) {
      const double x = u.uniform();
      CHECK(x > 0.0);
      CHECK(x < 1.0);
    }
  }
}
