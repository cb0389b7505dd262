#include <algorithm>
#include <limits>
#include <numeric>

#include "bicmb/analysis.hpp"

namespace bicmb {

namespace {

BigInt factorial(int n) {
  BigInt f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void add_term(Polynomial& p, const Monomial& m, const BigRational& c) {
  if (c == 0) return;
  auto [it, inserted] = p.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

// Product truncated in the degree of variable 0 (epsilon).
Polynomial multiply(const Polynomial& a, const Polynomial& b, int max_eps_degree) {
  Polynomial out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      if (ma[0] + mb[0] > max_eps_degree) continue;
      Monomial m(ma.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      add_term(out, m, ca * cb);
    }
  return out;
}

Polynomial constant(int vars, const BigRational& c) {
  Polynomial p;
  add_term(p, Monomial(vars, 0), c);
  return p;
}

// (x_i - x_j)
Polynomial difference(int vars, int i, int j) {
  Polynomial p;
  Monomial mi(vars, 0), mj(vars, 0);
  mi[i] = 1;
  mj[j] = 1;
  add_term(p, mi, 1);
  add_term(p, mj, -1);
  return p;
}

void check_scale(int x, int y) {
  if (y < 1 || x < y) throw Error("need 1 <= Y <= X");
  if (x > 3) throw Error("scale exceeded");
}

int total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), 0); }

// Integrates one side's unobserved eigenvalues (ordered phi_1 > ... > phi_Y)
// out of the exponent vector e (1-based within the side) and returns the
// degree left on the observed ones.
int integrated_degree(std::vector<int> e, const std::vector<int>& p) {
  const int y = static_cast<int>(e.size());
  const int p1 = p.front();
  for (int u = y; u >= 1; --u) {
    if (std::find(p.begin(), p.end(), u) != p.end()) continue;
    if (u < p1) {
      e[u - 1] = 0;  // integral over (0, inf): t! -- the variable disappears
    } else {
      e[u - 2] += e[u - 1] + 1;  // integral up to phi_{u-1}: v^(t+1)/(t+1)
      e[u - 1] = 0;
    }
  }
  int d = 0;
  for (int u : p) d += e[u - 1];
  return d;
}

void check_support(int y, const std::vector<int>& p) {
  if (p.empty()) throw Error("empty support");
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] < 1 || p[i] > y || (i > 0 && p[i] <= p[i - 1])) throw Error("support must be increasing within 1..Y");
}

}  // namespace

Polynomial bessel_determinant(int x, int y, int max_eps_degree) {
  check_scale(x, y);
  const int vars = 2 * y + 1;
  const int n = x - y;
  // entry (u, v) = sum_j (eps phi_u phi~_v)^j / (j! (j+N+1)!)
  auto entry = [&](int u, int v) {
    Polynomial p;
    for (int j = 0; j <= max_eps_degree; ++j) {
      Monomial m(vars, 0);
      m[0] = j;
      m[1 + u] += j;
      m[1 + y + v] += j;
      add_term(p, m, BigRational(1, factorial(j) * factorial(j + n + 1)));
    }
    return p;
  };
  std::vector<int> perm(y);
  std::iota(perm.begin(), perm.end(), 0);
  Polynomial det;
  do {
    int inversions = 0;
    for (int i = 0; i < y; ++i)
      for (int j = i + 1; j < y; ++j) inversions += perm[i] > perm[j];
    Polynomial term = constant(vars, inversions % 2 ? -1 : 1);
    for (int u = 0; u < y; ++u) term = multiply(term, entry(u, perm[u]), max_eps_degree);
    for (const auto& [m, c] : term) add_term(det, m, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

std::pair<Monomial, BigRational> dominant_determinant_term(int x, int y) {
  const Polynomial det = bessel_determinant(x, y, y * (y - 1) / 2);
  if (det.empty()) throw Error("determinant vanished");
  int lowest = std::numeric_limits<int>::max();
  for (const auto& [m, c] : det) lowest = std::min(lowest, total_degree(m));
  const Polynomial::value_type* best = nullptr;
  for (const auto& term : det)
    if (total_degree(term.first) == lowest && (!best || term.first > best->first)) best = &term;
  return {best->first, best->second};
}

int smallest_degree_oracle(int x, int y, const std::vector<int>& p,
                           const std::vector<int>& p_tilde) {
  check_scale(x, y);
  check_support(y, p);
  check_support(y, p_tilde);
  const int vars = 2 * y + 1;
  // One order beyond the lowest determinant degree keeps every term that can
  // reach the minimum.
  const int eps_cap = y * (y - 1) / 2 + 1;

  Polynomial f = bessel_determinant(x, y, eps_cap);
  for (int u = 0; u < y; ++u)
    for (int v = u + 1; v < y; ++v) {
      f = multiply(f, difference(vars, 1 + u, 1 + v), eps_cap);
      f = multiply(f, difference(vars, 1 + y + u, 1 + y + v), eps_cap);
    }
  Monomial shift(vars, 0);
  for (int u = 0; u < y; ++u) shift[1 + u] = shift[1 + y + u] = x - y;
  f = multiply(f, Polynomial{{shift, BigRational(1)}}, eps_cap);

  int best = std::numeric_limits<int>::max();
  for (const auto& [m, c] : f) {
    const std::vector<int> phi(m.begin() + 1, m.begin() + 1 + y);
    const std::vector<int> phi_tilde(m.begin() + 1 + y, m.end());
    best = std::min(best, integrated_degree(phi, p) + integrated_degree(phi_tilde, p_tilde));
  }
  return best;
}

}  // namespace bicmb
