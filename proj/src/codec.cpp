#include "bicmb/codec.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <sstream>

namespace bicmb {

CodeSpec CodeSpec::from_octal(const std::vector<std::string>& octal, PuncturePattern puncture) {
  CodeSpec code;
  unsigned widest = 0;
  for (const auto& text : octal) {
    if (text.empty() || text.find_first_not_of("01234567") != std::string::npos)
      throw Error("bad octal generator '" + text + "'");
    const unsigned g = static_cast<unsigned>(std::stoul(text, nullptr, 8));
    if (g == 0) throw Error("zero generator");
    code.generators.push_back(g);
    widest = std::max(widest, g);
  }
  int k = 0;
  while ((widest >> k) != 0) ++k;
  code.constraint_length = k;
  code.n_c = static_cast<int>(code.generators.size());
  code.puncture = std::move(puncture);
  code.validate();
  return code;
}

CodeSpec CodeSpec::preset(const std::string& rate) {
  if (rate == "1/4") return from_octal({"5", "7", "7", "7"});
  if (rate == "1/2") return from_octal({"5", "7"});
  // The mother-code rows are (5, 7). Both patterns avoid zero-weight cycles in
  // the punctured trellis.
  if (rate == "2/3") return from_octal({"5", "7"}, {{1, 0}, {1, 1}});
  if (rate == "4/5") return from_octal({"5", "7"}, {{1, 0, 1, 1}, {1, 1, 0, 0}});
  throw Error("unknown code rate '" + rate + "'");
}

int CodeSpec::kept_per_period() const {
  if (puncture.empty()) return n_c;
  int kept = 0;
  for (const auto& row : puncture)
    for (int v : row) kept += v;
  return kept;
}

void CodeSpec::validate() const {
  if (k_c != 1) throw Error("only k_c = 1 codes are supported");
  if (constraint_length < 2 || constraint_length > 16) throw Error("constraint length out of range");
  if (n_c < 1 || static_cast<int>(generators.size()) != n_c)
    throw Error("generator count must equal n_c");
  for (unsigned g : generators)
    if (g == 0 || g >= (1u << constraint_length)) throw Error("generator exceeds constraint length");
  if (!puncture.empty()) {
    if (static_cast<int>(puncture.size()) != n_c) throw Error("puncture pattern needs one row per generator");
    const std::size_t period = puncture[0].size();
    if (period == 0) throw Error("empty puncture pattern");
    for (const auto& row : puncture) {
      if (row.size() != period) throw Error("ragged puncture pattern");
      for (int v : row)
        if (v != 0 && v != 1) throw Error("puncture entries must be 0 or 1");
    }
    if (kept_per_period() < k_c * static_cast<int>(period)) throw Error("puncture pattern rate exceeds one");
  }
}

std::string octal_string(unsigned g) {
  std::ostringstream os;
  os << std::oct << g;
  return os.str();
}

std::string describe(const PuncturePattern& p) {
  std::string out = "[";
  for (std::size_t r = 0; r < p.size(); ++r) {
    if (r) out += ';';
    for (std::size_t c = 0; c < p[r].size(); ++c) {
      if (c) out += ' ';
      out += std::to_string(p[r][c]);
    }
  }
  return out + "]";
}

PuncturePattern parse_pattern(const std::string& text) {
  std::string body = text;
  body.erase(std::remove_if(body.begin(), body.end(), [](char c) { return c == '[' || c == ']'; }),
             body.end());
  PuncturePattern p;
  std::istringstream rows(body);
  std::string row;
  while (std::getline(rows, row, ';')) {
    std::istringstream cells(row);
    std::vector<int> r;
    std::string cell;
    while (cells >> cell) {
      if (cell != "0" && cell != "1") throw Error("puncture entries must be 0 or 1");
      r.push_back(cell == "1");
    }
    if (!r.empty()) p.push_back(std::move(r));
  }
  for (const auto& r : p)
    if (r.size() != p[0].size()) throw Error("ragged puncture pattern");
  return p;
}

Trellis::Trellis(const CodeSpec& code)
    : states_(code.state_count()), n_(code.n_c), next_(2 * states_), out_(2 * states_) {
  const int k = code.constraint_length;
  for (int state = 0; state < states_; ++state) {
    for (int u = 0; u < 2; ++u) {
      const unsigned reg = (static_cast<unsigned>(u) << (k - 1)) | static_cast<unsigned>(state);
      unsigned mask = 0;
      for (int i = 0; i < n_; ++i)
        mask |= static_cast<unsigned>(__builtin_parity(reg & code.generators[i])) << i;
      next_[2 * state + u] = static_cast<int>(reg >> 1);
      out_[2 * state + u] = mask;
    }
  }
}

Bits conv_encode(std::span<const std::uint8_t> bits, const CodeSpec& code) {
  const Trellis trellis(code);
  const std::size_t steps = bits.size() + code.constraint_length - 1;
  Bits out;
  out.reserve(steps * code.n_c);
  int state = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    const int u = t < bits.size() ? (bits[t] & 1) : 0;
    for (int i = 0; i < code.n_c; ++i) out.push_back(static_cast<std::uint8_t>(trellis.output(state, u, i)));
    state = trellis.next(state, u);
  }
  return out;
}

namespace {

void check_pattern_block(std::size_t mother_length, const PuncturePattern& pattern) {
  if (pattern.empty() || pattern[0].empty()) throw Error("empty puncture pattern");
  const std::size_t block = pattern.size() * pattern[0].size();
  if (mother_length % block != 0) throw Error("pattern/block mismatch");
}

}  // namespace

Bits puncture(std::span<const std::uint8_t> coded, const PuncturePattern& pattern) {
  if (pattern.empty()) return Bits(coded.begin(), coded.end());
  check_pattern_block(coded.size(), pattern);
  const std::size_t n = pattern.size();
  const std::size_t period = pattern[0].size();
  Bits out;
  for (std::size_t idx = 0; idx < coded.size(); ++idx) {
    const std::size_t step = idx / n;
    if (pattern[idx % n][step % period]) out.push_back(coded[idx]);
  }
  return out;
}

std::vector<BitMetric> depuncture(std::span<const BitMetric> metrics,
                                  const PuncturePattern& pattern, std::size_t mother_length) {
  if (pattern.empty()) {
    if (metrics.size() != mother_length) throw Error("pattern/block mismatch");
    return {metrics.begin(), metrics.end()};
  }
  check_pattern_block(mother_length, pattern);
  const std::size_t n = pattern.size();
  const std::size_t period = pattern[0].size();
  std::vector<BitMetric> out(mother_length);
  std::size_t next = 0;
  for (std::size_t idx = 0; idx < mother_length; ++idx) {
    if (!pattern[idx % n][(idx / n) % period]) continue;
    if (next >= metrics.size()) throw Error("pattern/block mismatch");
    out[idx] = metrics[next++];
  }
  if (next != metrics.size()) throw Error("pattern/block mismatch");
  return out;
}

void check_interleaver_block(std::size_t length, const InterleaverSpec& spec) {
  if (spec.streams < 1 || spec.subcarriers < 1 || spec.bits_per_symbol < 1)
    throw Error("invalid interleaver");
  if (length % static_cast<std::size_t>(spec.bits_per_ofdm_symbol()) != 0)
    throw Error("block not divisible by S*M*B");
}

BitLocation interleaver_location(std::size_t index, const InterleaverSpec& spec) {
  const std::size_t slots = static_cast<std::size_t>(spec.slots());
  const std::size_t sigma = index % slots;
  const std::size_t count = index / slots;  // bits already on this stream
  return {static_cast<int>(count / spec.bits_per_symbol),
          static_cast<int>(sigma / spec.streams), static_cast<int>(sigma % spec.streams),
          static_cast<int>(count % spec.bits_per_symbol)};
}

Bits interleave(std::span<const std::uint8_t> bits, const InterleaverSpec& spec) {
  check_interleaver_block(bits.size(), spec);
  Bits out(bits.size());
  for (std::size_t k = 0; k < bits.size(); ++k)
    out[slot_index(interleaver_location(k, spec), spec)] = bits[k];
  return out;
}

double bit_metric(Complex y, double lambda, int j, int b, const Constellation& c) {
  if (lambda < 0.0) throw Error("lambda must be non-negative");
  if (j < 0 || j >= c.bits_per_symbol() || (b != 0 && b != 1)) throw Error("bit position out of range");
  double best = std::numeric_limits<double>::infinity();
  for (unsigned label : c.subset(j, b)) best = std::min(best, std::norm(y - lambda * c.point(label)));
  return best;
}

int free_distance(const CodeSpec& code) {
  // Dijkstra over (phase, state); an event leaves state 0 with input 1 at some
  // phase and ends on its first return to state 0.
  const Trellis trellis(code);
  const int period = code.period();
  const int states = trellis.states();
  auto branch_weight = [&](int state, int u, int phase) {
    int w = 0;
    for (int i = 0; i < code.n_c; ++i)
      if (code.keeps(i, phase)) w += trellis.output(state, u, i);
    return w;
  };
  int best = std::numeric_limits<int>::max();
  for (int start = 0; start < period; ++start) {
    std::vector<int> dist(static_cast<std::size_t>(period * states), std::numeric_limits<int>::max());
    using Item = std::pair<int, int>;  // (distance, node)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    const int first = trellis.next(0, 1);
    const int node = ((start + 1) % period) * states + first;
    dist[node] = branch_weight(0, 1, start);
    queue.push({dist[node], node});
    while (!queue.empty()) {
      auto [d, v] = queue.top();
      queue.pop();
      if (d != dist[v]) continue;
      const int phase = v / states;
      const int state = v % states;
      for (int u = 0; u < 2; ++u) {
        const int nd = d + branch_weight(state, u, phase);
        const int ns = trellis.next(state, u);
        if (ns == 0) {
          best = std::min(best, nd);
          continue;
        }
        const int w = ((phase + 1) % period) * states + ns;
        if (nd < dist[w]) {
          dist[w] = nd;
          queue.push({nd, w});
        }
      }
    }
  }
  return best;
}

}  // namespace bicmb
