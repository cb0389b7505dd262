#include <algorithm>
#include <limits>
#include <numeric>

#include "bicmb/codec.hpp"

namespace bicmb {

// Survivors are ranked lexicographically at every step so that equal path
// metrics always resolve to the smaller information sequence. Both branches
// entering a state carry the same input bit (it becomes the state's MSB), so
// comparing two candidates reduces to comparing their predecessors' ranks.
Bits viterbi_decode(std::span<const BitMetric> metrics, const CodeSpec& code) {
  code.validate();
  const Trellis trellis(code);
  const int n = code.n_c;
  const int tail = code.constraint_length - 1;
  if (metrics.empty() || metrics.size() % n != 0) throw Error("length mismatch");
  const std::size_t steps = metrics.size() / n;
  if (steps <= static_cast<std::size_t>(tail)) throw Error("length mismatch");

  const int states = trellis.states();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(states, inf), next_cost(states);
  std::vector<int> rank(states, 0), next_rank(states);
  cost[0] = 0.0;

  // predecessor per (step, state)
  std::vector<int> from(steps * states, -1);
  std::vector<double> branch(1u << n);

  std::vector<int> order(states);
  for (std::size_t t = 0; t < steps; ++t) {
    const BitMetric* m = metrics.data() + t * n;
    // cost of every output pattern at this step
    for (unsigned mask = 0; mask < branch.size(); ++mask) {
      double c = 0.0;
      for (int i = 0; i < n; ++i) c += ((mask >> i) & 1u) ? m[i].one : m[i].zero;
      branch[mask] = c;
    }
    std::fill(next_cost.begin(), next_cost.end(), inf);
    int* pred = from.data() + t * states;
    const bool flushing = t >= steps - tail;
    for (int s = 0; s < states; ++s) {
      if (cost[s] == inf) continue;
      for (int u = 0; u < (flushing ? 1 : 2); ++u) {
        const int ns = trellis.next(s, u);
        const double c = cost[s] + branch[trellis.output_mask(s, u)];
        if (c < next_cost[ns] || (c == next_cost[ns] && rank[s] < rank[pred[ns]])) {
          next_cost[ns] = c;
          pred[ns] = s;
        }
      }
    }
    // new ranks: order by (predecessor rank, input bit)
    std::iota(order.begin(), order.end(), 0);
    const int msb = states >> 1;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const bool ra = pred[a] >= 0, rb = pred[b] >= 0;
      if (ra != rb) return ra;
      if (!ra) return a < b;
      if (rank[pred[a]] != rank[pred[b]]) return rank[pred[a]] < rank[pred[b]];
      return (a & msb) < (b & msb);
    });
    for (int r = 0; r < states; ++r) next_rank[order[r]] = r;
    cost.swap(next_cost);
    rank.swap(next_rank);
  }
  if (cost[0] == inf) throw Error("length mismatch");

  Bits decoded(steps);
  int state = 0;
  for (std::size_t t = steps; t-- > 0;) {
    decoded[t] = static_cast<std::uint8_t>((state >> (code.constraint_length - 2)) & 1);
    state = from[t * states + state];
  }
  decoded.resize(steps - tail);
  return decoded;
}

}  // namespace bicmb
