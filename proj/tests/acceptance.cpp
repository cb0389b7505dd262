// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "bicmb/harness.hpp"
#include "coded_awgn_reference.hpp"

using namespace bicmb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<double> grid(double lo, double step, double hi) {
  std::vector<double> out;
  for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
  return out;
}

// ---------------------------------------------------------------------------

// 1. Closed-form series of the (5,7) code over two subcarriers x two streams,
//    rows [a b; c d], through weight 8.
void transfer_function_fidelity(Outcome& o) {
  const std::map<std::string, int> expected = {
      {"[2 2;0 1]", 1}, {"[0 1;2 2]", 1},                                      // Z^5
      {"[2 1;2 1]", 2}, {"[2 2;0 2]", 1}, {"[0 2;2 2]", 1},                    // Z^6
      {"[2 3;2 0]", 1}, {"[2 2;2 1]", 2}, {"[2 1;2 2]", 2}, {"[0 3;2 2]", 1},  // Z^7
      {"[2 2;0 3]", 1}, {"[2 0;2 3]", 1},                                      //
      {"[4 2;2 0]", 1}, {"[2 3;2 1]", 4}, {"[2 2;2 2]", 4}, {"[0 4;2 2]", 1},  // Z^8
      {"[2 0;4 2]", 1}, {"[2 1;2 3]", 4}, {"[2 2;0 4]", 1}};
  const auto t0 = Clock::now();
  const auto code = CodeSpec::preset("1/2");
  for (auto method : {EnumerationMethod::TransferFunction, EnumerationMethod::PathSearch}) {
    const auto terms = enumerate_alpha_spectra(code, 2, 2, 8, method);
    std::map<std::string, int> got;
    for (const auto& t : terms) got[t.spectrum.str()] += t.multiplicity.convert_to<int>();
    o.require(got == expected, method == EnumerationMethod::TransferFunction ? "series route" : "path route");
  }
  const double elapsed = seconds_since(t0);
  o.detail << "18 terms through Z^8 matched by both routes (e.g. 4 on [2 3;2 1] = a^2 b^3 c^2 d) in "
           << format_double(std::round(elapsed * 1000) / 1000) << " s";
  o.require(elapsed < 10.0, "runtime >= 10 s");
}

// 2. Diversity predictions for the grouped (L = M) links.
void diversity_predictions(Outcome& o) {
  struct Row {
    int s, l;
    const char* rate;
    int expected;
  };
  const Row rows[] = {{1, 2, "1/4", 8}, {1, 2, "2/3", 4},  {2, 2, "1/4", 8},  {2, 2, "1/2", 5},
                      {2, 2, "2/3", 2}, {2, 2, "4/5", 1},  {1, 4, "1/4", 16}, {1, 4, "1/2", 12},
                      {1, 4, "2/3", 8}, {1, 4, "4/5", 4}};
  for (const auto& r : rows) {
    const auto rep = max_achievable_diversity(CodeSpec::preset(r.rate), 2, 2, r.s, r.l, 12);
    o.detail << "S=" << r.s << ",L=" << r.l << ",Rc=" << r.rate << ":" << rep.d_min << " ";
    o.require(rep.d_min == r.expected, std::string("D for ") + r.rate);
  }
}

// 3. D_min = Nr Nt L exactly when Rc S L <= 1, over the whole matrix.
void full_diversity_theorem(Outcome& o) {
  const auto t0 = Clock::now();
  int checked = 0, full = 0;
  for (int s : {1, 2})
    for (int l : {1, 2, 4})
      for (const char* rate : {"1/4", "1/2", "2/3", "4/5"}) {
        const auto code = CodeSpec::preset(rate);
        const auto method = l <= 8 ? EnumerationMethod::TransferFunction : EnumerationMethod::PathSearch;
        const auto rep = max_achievable_diversity(code, 2, 2, s, l, 12, method);
        const bool condition = full_diversity_condition(code.rate(), s, l);
        const bool achieved = rep.d_min == 4 * l;
        ++checked;
        full += achieved;
        if (achieved != condition)
          o.require(false, std::string("S=") + std::to_string(s) + " L=" + std::to_string(l) + " Rc=" + rate +
                               " D=" + std::to_string(rep.d_min));
      }
  const double elapsed = seconds_since(t0);
  o.detail << checked << " configs, " << full << " at full diversity, all agree with Rc*S*L<=1, "
           << format_double(std::round(elapsed * 10) / 10) << " s";
  o.require(elapsed < 60.0, "runtime >= 60 s");
}

// 4. Monte-Carlo PEP slopes over 15-30 dB.
void pep_slopes(Outcome& o) {
  const auto snr = grid(15, 2.5, 30);
  const std::uint64_t trials = 1'000'000;
  const int workers = worker_count();
  auto slope_of = [&](const char* spec, std::vector<int> rows_on, std::vector<double>* pep_out = nullptr) {
    PepChannel ch{2, 2, 64, TapProfile::equal(2), rows_on};
    const auto curve = pep_expectation_mc(parse_spectrum(spec), ch, snr, trials, 2024, workers);
    std::vector<double> pep;
    for (const auto& p : curve.points) pep.push_back(p.pep);
    if (pep_out) *pep_out = pep;
    return estimate_slope(snr, pep, 15, 30);
  };
  std::vector<double> uncorrelated, intermediate, coherent;
  const double s_10_10 = slope_of("[1 0;1 0]", {0, 32}, &uncorrelated);
  const double s_10_01 = slope_of("[1 0;0 1]", {0, 32});
  const double s_20 = slope_of("[2 0]", {0}, &coherent);
  const double s_11 = slope_of("[1 1]", {0});
  const double s_mid = slope_of("[1 0;1 0]", {0, 16}, &intermediate);
  auto fmt = [](double v) { return format_double(std::round(v * 100) / 100); };
  o.detail << "rho=0 [1 0;1 0]:" << fmt(s_10_10) << " [1 0;0 1]:" << fmt(s_10_01) << " rho=1 [2 0]:" << fmt(s_20)
           << " [1 1]:" << fmt(s_11) << " rho=" << fmt(subcarrier_correlation(TapProfile::equal(2), 64, 16))
           << " [1 0;1 0]:" << fmt(s_mid) << " (" << trials << " draws per curve)";
  o.require(std::abs(s_10_10 - 8) <= 0.8, "[1 0;1 0] slope");
  o.require(std::abs(s_10_01 - 5) <= 0.5, "[1 0;0 1] slope");
  o.require(std::abs(s_20 - 4) <= 0.5, "[2 0] slope");
  o.require(std::abs(s_11 - 4) <= 0.5, "[1 1] slope");
  o.require(s_mid > s_20 && s_mid < s_10_10, "intermediate slope not between");
  bool between = true;
  for (std::size_t i = 0; i < snr.size(); ++i)
    between = between && intermediate[i] > uncorrelated[i] && intermediate[i] < coherent[i];
  o.require(between, "intermediate curve not between");
}

// 5. Noiseless decoding and the unit-gain AWGN cross-check.
void end_to_end(Outcome& o) {
  LinkConfig base;
  std::vector<LinkConfig> configs;
  configs.push_back(base);
  LinkConfig grouped = base;
  grouped.grouping = true;
  configs.push_back(grouped);
  LinkConfig full = base;
  full.chain = ChainModel::Full;
  configs.push_back(full);
  LinkConfig s2 = grouped;
  s2.streams = 2;
  s2.rate = "1/4";
  s2.code = CodeSpec::preset("1/4");
  configs.push_back(s2);
  std::uint64_t errors = 0, bits = 0;
  for (std::size_t c = 0; c < configs.size(); ++c)
    for (int blk = 0; blk < 100; ++blk) {
      SeededRng rng(500 + c, blk);
      Bits msg(frame_bits(configs[c]));
      for (auto& b : msg) b = rng.next_u64() & 1u;
      const auto ch = draw_realization(2, 2, configs[c].profile, configs[c].subcarriers, rng);
      const Bits dec = transmit_receive(msg, configs[c], ch, rng, 0.0);
      for (std::size_t i = 0; i < msg.size(); ++i) errors += dec[i] != msg[i];
      bits += msg.size();
    }
  o.detail << "noiseless: " << errors << " errors in " << bits << " bits (4 link setups x 100 blocks); AWGN:";
  o.require(errors == 0, "noiseless errors");

  LinkConfig awgn;
  awgn.nt = awgn.nr = 1;
  awgn.taps = 1;
  awgn.profile = TapProfile::equal(1);
  awgn.cp_length = 1;
  const auto ch = ChannelRealization::from_taps({ComplexMatrix::Identity(1, 1)}, awgn.subcarriers, awgn.profile);
  const int blocks = 1500;
  for (double snr : {0.0, 1.0, 2.0, 3.0}) {
    const double n0 = noise_variance(1, snr);
    reference::BerTally link;
    for (int b = 0; b < blocks; ++b) {
      SeededRng rng(derive_stream(77, static_cast<std::uint64_t>(snr * 10)), b);
      Bits msg(awgn.block_bits);
      for (auto& x : msg) x = rng.next_u64() & 1u;
      const Bits dec = transmit_receive(msg, awgn, ch, rng, n0);
      std::size_t e = 0;
      for (std::size_t i = 0; i < msg.size(); ++i) e += dec[i] != msg[i];
      link.bits += msg.size();
      link.errors += e;
      link.per_block.push_back(double(e) / msg.size());
    }
    const auto ref = reference::simulate(awgn.block_bits, blocks, n0, 9000 + static_cast<std::uint64_t>(snr));
    const double se = std::hypot(link.standard_error(), ref.standard_error());
    const double z = se > 0 ? std::abs(link.ber() - ref.ber()) / se : 0.0;
    o.detail << " " << format_double(snr) << "dB " << link.ber() << " vs " << ref.ber() << " ("
             << format_double(std::round(z * 100) / 100) << " SE)";
    o.require(link.errors > 0 && ref.errors > 0, "no errors observed");
    o.require(z <= 2.0, "AWGN mismatch at " + format_double(snr) + " dB");
  }
}

// 6. Grouping benefit at 10 dB and above, both tap profiles.
struct Interval {
  double lo, hi;
};

Interval interval_of(const BerPoint& p) {
  if (p.zero_errors) return {0.0, p.ber};  // 3.7 / trials upper bound
  return {std::max(0.0, p.ber - p.ci95), p.ber + p.ci95};
}

// log10(ungrouped / grouped). A zero-error grouped point makes this a lower bound.
double gap_of(const BerPoint& on, const BerPoint& off) { return std::log10(off.ber / on.ber); }

void grouping_benefit(Outcome& o) {
  std::map<std::string, std::pair<std::vector<BerPoint>, std::vector<BerPoint>>> results;
  for (const char* profile : {"equal", "exponential"}) {
    std::map<bool, BerCurve> curves;
    for (bool grouping : {true, false}) {
      ConfigFile f = ConfigFile::parse(std::string("nt = 2\nnr = 2\nstreams = 1\ntaps = 2\nsubcarriers = 64\n") +
                                       "rate = 1/2\nprofile = " + profile + "\ngrouping = " +
                                       (grouping ? "on" : "off") +
                                       "\nsnr_db = 0:2.5:12.5\nmin_errors = 200\nmax_bits = 1e8\nseed = 11\n");
      auto config = experiment_from(f, Mode::Ber);
      config.workers = worker_count();
      curves[grouping] = run_ber(config);
    }
    const auto& on = curves[true].points;
    const auto& off = curves[false].points;
    o.detail << profile << ":";
    for (std::size_t i = 0; i < on.size(); ++i) {
      if (on[i].snr_db < 10.0) continue;
      const Interval a = interval_of(on[i]), b = interval_of(off[i]);
      o.detail << " " << format_double(on[i].snr_db) << "dB " << on[i].ber << (on[i].zero_errors ? "(bound)" : "")
               << " vs " << off[i].ber;
      o.require(a.hi < b.lo, std::string(profile) + " CIs overlap at " + format_double(on[i].snr_db) + " dB");
    }
    o.detail << "; ";
    results[profile] = {on, off};
  }

  // The exponential gap must be a measured value (both of its curves have errors);
  // the equal gap may be a lower bound, which only makes the comparison stricter.
  const auto& [eq_on, eq_off] = results["equal"];
  const auto& [ex_on, ex_off] = results["exponential"];
  int compared = 0;
  for (std::size_t i = 0; i < ex_on.size(); ++i) {
    if (ex_on[i].snr_db < 10.0 || ex_on[i].bit_errors == 0 || ex_off[i].bit_errors == 0 ||
        eq_off[i].bit_errors == 0)
      continue;
    const double eq = gap_of(eq_on[i], eq_off[i]), ex = gap_of(ex_on[i], ex_off[i]);
    o.detail << "gap(log10) at " << format_double(ex_on[i].snr_db) << "dB equal" << (eq_on[i].zero_errors ? ">=" : "=")
             << format_double(std::round(eq * 100) / 100) << " exponential=" << format_double(std::round(ex * 100) / 100)
             << " ";
    o.require(ex < eq, "exponential gap not smaller at " + format_double(ex_on[i].snr_db) + " dB");
    ++compared;
  }
  o.require(compared > 0, "no SNR point >= 10 dB with a measurable exponential gap");
}

// 7. Correlation tables at M = 64, L in {2, 4}, -7 dB exponential profile.
void correlation_tables(Outcome& o) {
  int compared = 0;
  for (int l : {2, 4}) {
    const auto eq = TapProfile::equal(l);
    const auto ex = TapProfile::exponential(l, -7.0);
    for (int d = 0; d < 64; ++d) {
      ++compared;
      o.require(subcarrier_correlation(ex, 64, d) >= subcarrier_correlation(eq, 64, d),
                "exponential below equal at L=" + std::to_string(l) + " delta=" + std::to_string(d));
    }
    for (int k = 1; k < l; ++k)
      o.require(subcarrier_correlation(eq, 64, k * 64 / l) == 0.0,
                "rho_equal(" + std::to_string(k * 64 / l) + ") != 0 at L=" + std::to_string(l));
  }
  o.detail << compared << " deltas compared; rho_equal(32)=" << subcarrier_correlation(TapProfile::equal(2), 64, 32)
           << " for L=2, rho_equal(16,32,48)=0 for L=4";
}

// 8. Symbolic oracle against the closed-form degree, and the dominant terms.
void appendix_oracle(Outcome& o) {
  int cases = 0;
  for (int y = 1; y <= 3; ++y)
    for (int x = y; x <= 3; ++x) {
      std::vector<std::vector<int>> supports;
      for (int mask = 1; mask < (1 << y); ++mask) {
        std::vector<int> p;
        for (int i = 0; i < y; ++i)
          if (mask >> i & 1) p.push_back(i + 1);
        supports.push_back(p);
      }
      for (const auto& p : supports)
        for (const auto& q : supports) {
          ++cases;
          const int oracle = smallest_degree_oracle(x, y, p, q);
          const int closed = closed_form_marginal_degree(x, y, p, q);
          if (oracle != closed)
            o.require(false, "X=" + std::to_string(x) + " Y=" + std::to_string(y) + " oracle " +
                                 std::to_string(oracle) + " vs " + std::to_string(closed));
        }
    }
  const BigRational fact[] = {1, 1, 2, 6};
  for (int x = 1; x <= 3; ++x) {
    const auto [m, c] = dominant_determinant_term(x, 1);
    o.require(m == Monomial{0, 0, 0} && c == 1 / fact[x], "Y=1 dominant term");
  }
  for (int x = 2; x <= 3; ++x) {
    const auto [m, c] = dominant_determinant_term(x, 2);
    o.require(m == Monomial{1, 1, 0, 1, 0} && c == 1 / (fact[x] * fact[x - 1]), "Y=2 dominant term");
  }
  o.detail << cases << " support pairs (X,Y<=3) equal the closed form; dominant terms 1/X! (Y=1) and "
           << "eps phi1 phi~1/(X!(X-1)!) (Y=2) exact for X<=3";
}

// 9. Byte-identical CSVs across repeated runs and worker counts.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(Outcome& o) {
  const fs::path dir = fs::temp_directory_path() / "bicmb_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::map<std::string, std::string> configs = {
      {"ber", "nt = 2\nnr = 2\ntaps = 2\nsubcarriers = 64\ngrouping = off\nblock_bits = 256\n"
              "snr_db = 0:2.5:7.5\nmin_errors = 100\nmax_bits = 2e5\nseed = 3\n"},
      {"pep", "spectrum = [1 0;1 0]\nrows_on = [0, 16]\npep_trials = 2e5\nsnr_db = [15, 20, 25]\nseed = 3\n"},
      {"analyze", "streams = 2\ntaps = 2\ngrouping = on\nrate = 2/3\n"},
      {"correlate", "taps = 4\nprofile = exponential\n"}};
  const std::map<std::string, std::string> csv = {
      {"ber", "ber.csv"}, {"pep", "pep.csv"}, {"analyze", "spectra.csv"}, {"correlate", "correlation.csv"}};
  int runs = 0;
  for (const auto& [mode, text] : configs) {
    const fs::path conf = dir / (mode + ".conf");
    std::ofstream(conf) << text;
    std::vector<std::string> outputs;
    for (const char* workers : {"1", "4", "1"}) {
      const fs::path out = dir / (mode + "_" + workers + "_" + std::to_string(runs++));
      const std::string cmd = std::string(BICMB_CLI_PATH) + " " + mode + " --config " + conf.string() +
                              " --workers " + workers + " --out " + out.string() + " > /dev/null 2>&1";
      o.require(std::system(cmd.c_str()) == 0, mode + " run failed");
      outputs.push_back(slurp(out / csv.at(mode)));
    }
    o.require(!outputs[0].empty(), mode + " produced no CSV");
    o.require(outputs[0] == outputs[1] && outputs[0] == outputs[2], mode + " CSVs differ");
  }
  o.detail << "ber, pep, analyze, correlate: 3 runs each (workers 1, 4, 1) byte-identical";
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "transfer-function fidelity", transfer_function_fidelity},
      {2, "diversity predictions", diversity_predictions},
      {3, "full-diversity theorem", full_diversity_theorem},
      {4, "PEP slopes", pep_slopes},
      {5, "end-to-end correctness", end_to_end},
      {6, "grouping benefit", grouping_benefit},
      {7, "correlation tables", correlation_tables},
      {8, "marginal-degree oracle", appendix_oracle},
      {9, "determinism", determinism},
  };
  // optional list of criterion ids to run; default is all
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      c.fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failed += !o.pass;
    std::printf("criterion %d: %s  %s -- %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.str().c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
