#include <algorithm>
#include <functional>
#include <cstdint>
#include <sstream>
#include <string>
#include <unordered_map>

#include "bicmb/analysis.hpp"

namespace bicmb {

AlphaSpectrum::AlphaSpectrum(int rows, int cols, std::vector<int> values)
    : rows(rows), cols(cols), entries(std::move(values)) {
  if (rows < 1 || cols < 1 || static_cast<int>(entries.size()) != rows * cols)
    throw Error("spectrum size mismatch");
  for (int v : entries)
    if (v < 0) throw Error("spectrum entries must be non-negative");
}

int AlphaSpectrum::hamming_weight() const {
  int total = 0;
  for (int v : entries) total += v;
  return total;
}

std::string AlphaSpectrum::str() const {
  std::string out = "[";
  for (int m = 0; m < rows; ++m) {
    if (m) out += ';';
    for (int s = 0; s < cols; ++s) {
      if (s) out += ' ';
      out += std::to_string(at(m, s));
    }
  }
  return out + "]";
}

AlphaSpectrum parse_spectrum(const std::string& text) {
  const PuncturePattern rows_text = [&] {
    // same bracket syntax as puncture patterns, but any non-negative integers
    std::string body = text;
    body.erase(std::remove_if(body.begin(), body.end(), [](char c) { return c == '[' || c == ']'; }),
               body.end());
    PuncturePattern rows;
    std::istringstream in(body);
    std::string row;
    while (std::getline(in, row, ';')) {
      std::istringstream cells(row);
      std::vector<int> r;
      int v = 0;
      while (cells >> v) r.push_back(v);
      if (!cells.eof()) throw Error("bad spectrum '" + text + "'");
      if (!r.empty()) rows.push_back(std::move(r));
    }
    return rows;
  }();
  if (rows_text.empty()) throw Error("bad spectrum '" + text + "'");
  std::vector<int> values;
  for (const auto& r : rows_text) {
    if (r.size() != rows_text[0].size()) throw Error("ragged spectrum '" + text + "'");
    values.insert(values.end(), r.begin(), r.end());
  }
  return AlphaSpectrum(static_cast<int>(rows_text.size()), static_cast<int>(rows_text[0].size()),
                       std::move(values));
}

namespace {

// Trellis with phase and, per branch, the streams that receive a 1.
struct LabelledTrellis {
  int period = 1;
  int states = 0;
  int streams = 0;  // S*M
  Trellis trellis;
  std::vector<std::vector<int>> hits;  // [(phase*states + state)*2 + u] -> stream indices

  LabelledTrellis(const CodeSpec& code, int s, int m) : trellis(code) {
    code.validate();
    if (s < 1 || m < 1) throw Error("stream and subcarrier counts must be positive");
    streams = s * m;
    states = trellis.states();
    period = spectrum_period(code, s, m);
    hits.resize(static_cast<std::size_t>(period) * states * 2);
    int offset = 0;
    for (int ph = 0; ph < period; ++ph) {
      for (int st = 0; st < states; ++st)
        for (int u = 0; u < 2; ++u) {
          auto& h = hits[(ph * states + st) * 2 + u];
          int k = offset;
          for (int i = 0; i < code.n_c; ++i) {
            if (!code.keeps(i, ph)) continue;
            if (trellis.output(st, u, i)) h.push_back(k % streams);
            ++k;
          }
        }
      for (int i = 0; i < code.n_c; ++i) offset += code.keeps(i, ph) ? 1 : 0;
    }
  }

  const std::vector<int>& branch(int phase, int state, int u) const {
    return hits[(phase * states + state) * 2 + u];
  }
  int nodes() const { return period * (states - 1); }
};

std::vector<SpectrumTerm> sorted_terms(const std::map<std::vector<int>, BigInt>& table, int s,
                                       int m) {
  std::vector<SpectrumTerm> out;
  for (const auto& [alpha, count] : table) out.push_back({AlphaSpectrum(m, s, alpha), count});
  std::sort(out.begin(), out.end(), [](const SpectrumTerm& a, const SpectrumTerm& b) {
    const int wa = a.spectrum.hamming_weight(), wb = b.spectrum.hamming_weight();
    if (wa != wb) return wa < wb;
    return a.spectrum < b.spectrum;
  });
  return out;
}

// Explicit depth-first walk over every error event.
std::map<std::vector<int>, BigInt> path_search(const LabelledTrellis& lt, int max_dH) {
  std::map<std::vector<int>, BigInt> table;
  std::vector<int> alpha(lt.streams, 0);
  std::function<void(int, int, int)> walk = [&](int phase, int state, int weight) {
    for (int u = 0; u < 2; ++u) {
      const auto& h = lt.branch(phase, state, u);
      const int w = weight + static_cast<int>(h.size());
      if (w > max_dH) continue;
      for (int k : h) ++alpha[k];
      const int next = lt.trellis.next(state, u);
      if (next == 0) {
        table[alpha] += 1;
      } else {
        walk((phase + 1) % lt.period, next, w);
      }
      for (int k : h) --alpha[k];
    }
  };
  for (int start = 0; start < lt.period; ++start) {
    const auto& h = lt.branch(start, 0, 1);
    if (static_cast<int>(h.size()) > max_dH) continue;
    for (int k : h) ++alpha[k];
    const int next = lt.trellis.next(0, 1);
    if (next == 0) {
      table[alpha] += 1;
    } else {
      walk((start + 1) % lt.period, next, static_cast<int>(h.size()));
    }
    for (int k : h) --alpha[k];
  }
  return table;
}

// Monomial exponents packed one byte per stream; short keys avoid allocation.
using Monomial = std::string;
using StreamPolynomial = std::unordered_map<Monomial, std::uint64_t>;

void add_count(std::uint64_t& target, std::uint64_t value) {
  if (__builtin_add_overflow(target, value, &target)) throw Error("multiplicity overflow");
}

// Multiplies every term by the branch label and accumulates into target.
void accumulate(StreamPolynomial& target, const StreamPolynomial& source,
                const std::vector<int>& label) {
  for (const auto& [monomial, coef] : source) {
    Monomial shifted = monomial;
    for (int k : label) ++shifted[k];
    add_count(target[shifted], coef);
  }
}

// Series g t + sum_u g F^u t over the non-zero product states, built degree
// by degree. Within a degree only zero-weight branches move terms, and those
// form a DAG for a non-catastrophic code, so visiting nodes in topological
// order expands every (node, monomial) exactly once.
std::map<std::vector<int>, BigInt> transfer_series(const LabelledTrellis& lt, int max_dH) {
  const int states = lt.states;
  const int nodes = lt.nodes();
  auto node_of = [&](int phase, int state) { return phase * (states - 1) + state - 1; };

  std::vector<int> indegree(nodes, 0);
  std::vector<std::vector<int>> zero_edges(nodes);
  for (int phase = 0; phase < lt.period; ++phase)
    for (int st = 1; st < states; ++st)
      for (int u = 0; u < 2; ++u) {
        const int ns = lt.trellis.next(st, u);
        if (ns == 0 || !lt.branch(phase, st, u).empty()) continue;
        const int w = node_of((phase + 1) % lt.period, ns);
        zero_edges[node_of(phase, st)].push_back(w);
        ++indegree[w];
      }
  std::vector<int> order;
  for (int v = 0; v < nodes; ++v)
    if (indegree[v] == 0) order.push_back(v);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int w : zero_edges[order[i]])
      if (--indegree[w] == 0) order.push_back(w);
  if (static_cast<int>(order.size()) != nodes) throw Error("catastrophic code");

  using Layered = std::vector<StreamPolynomial>;  // indexed by degree
  std::vector<Layered> x(nodes, Layered(max_dH + 1));
  Layered output(max_dH + 1);

  // t: the diverging branch at every starting phase
  for (int start = 0; start < lt.period; ++start) {
    const auto& h = lt.branch(start, 0, 1);
    const int w = static_cast<int>(h.size());
    if (w > max_dH) continue;
    Monomial mono(static_cast<std::size_t>(lt.streams), '\0');
    for (int k : h) ++mono[k];
    const int next = lt.trellis.next(0, 1);
    if (next == 0) {
      add_count(output[w][mono], 1);
    } else {
      add_count(x[node_of((start + 1) % lt.period, next)][w][mono], 1);
    }
  }

  for (int d = 0; d <= max_dH; ++d)
    for (int v : order) {
      StreamPolynomial poly;
      poly.swap(x[v][d]);
      if (poly.empty()) continue;
      const int phase = v / (states - 1), st = v % (states - 1) + 1;
      for (int u = 0; u < 2; ++u) {
        const auto& label = lt.branch(phase, st, u);
        const int target = d + static_cast<int>(label.size());
        if (target > max_dH) continue;
        const int ns = lt.trellis.next(st, u);
        auto& dest = ns == 0 ? output[target] : x[node_of((phase + 1) % lt.period, ns)][target];
        accumulate(dest, poly, label);  // g or F
      }
    }

  std::map<std::vector<int>, BigInt> table;
  for (const auto& layer : output)
    for (const auto& [monomial, count] : layer)
      table[std::vector<int>(monomial.begin(), monomial.end())] += count;
  return table;
}

}  // namespace

int spectrum_period(const CodeSpec& code, int streams, int subcarriers) {
  const int slots = streams * subcarriers;
  if (slots < 1) throw Error("stream and subcarrier counts must be positive");
  const int base = code.period();
  const int kept = code.kept_per_period();
  int period = base;
  int rounds = 1;
  while ((rounds * kept) % slots != 0) {
    ++rounds;
    period += base;
  }
  return period;
}

bool has_zero_weight_cycle(const CodeSpec& code, int streams, int subcarriers) {
  const LabelledTrellis lt(code, streams, subcarriers);
  const int states = lt.states;
  const int nodes = lt.period * states;
  // 0 = unseen, 1 = on stack, 2 = done
  std::vector<int> color(nodes, 0);
  std::function<bool(int)> visit = [&](int v) {
    color[v] = 1;
    const int phase = v / states, st = v % states;
    for (int u = 0; u < 2; ++u) {
      const int ns = lt.trellis.next(st, u);
      if (ns == 0 || !lt.branch(phase, st, u).empty()) continue;
      const int w = ((phase + 1) % lt.period) * states + ns;
      if (color[w] == 1) return true;
      if (color[w] == 0 && visit(w)) return true;
    }
    color[v] = 2;
    return false;
  };
  for (int v = 0; v < nodes; ++v)
    if (v % states != 0 && color[v] == 0 && visit(v)) return true;
  return false;
}

std::vector<SpectrumTerm> enumerate_alpha_spectra(const CodeSpec& code, int streams,
                                                  int subcarriers, int max_dH,
                                                  EnumerationMethod method) {
  if (max_dH < 1 || max_dH > 16) throw Error("max_dH out of range");
  if (has_zero_weight_cycle(code, streams, subcarriers)) throw Error("catastrophic code");
  const LabelledTrellis lt(code, streams, subcarriers);
  const auto table =
      method == EnumerationMethod::PathSearch ? path_search(lt, max_dH) : transfer_series(lt, max_dH);
  if (table.empty()) throw Error("raise max_dH");
  return sorted_terms(table, streams, subcarriers);
}

}  // namespace bicmb
