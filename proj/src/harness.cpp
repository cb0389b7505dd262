#include "bicmb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace bicmb {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Ber: return "ber";
    case Mode::Pep: return "pep";
    case Mode::Analyze: return "analyze";
    case Mode::Correlate: return "correlate";
  }
  return "?";
}

Mode mode_from_string(const std::string& name) {
  if (name == "ber") return Mode::Ber;
  if (name == "pep") return Mode::Pep;
  if (name == "analyze") return Mode::Analyze;
  if (name == "correlate") return Mode::Correlate;
  throw Error("unknown mode '" + name + "'");
}

namespace {

std::string join(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out + "]";
}

std::string join(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out + "]";
}

std::string generators_of(const CodeSpec& code) {
  std::string out = "[";
  for (std::size_t i = 0; i < code.generators.size(); ++i)
    out += (i ? ", " : "") + octal_string(code.generators[i]);
  return out + "]";
}

std::string rate_string(const CodeSpec& code) {
  const Rational r = code.rate();
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

}  // namespace

ExperimentConfig experiment_from(const ConfigFile& file, Mode mode) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  if (file.has("mode") && mode_from_string(file.get_string("mode", "")) != mode)
    throw Error("config mode does not match the requested subcommand");

  LinkConfig& link = cfg.link;
  link.nt = static_cast<int>(file.get_int("nt", link.nt));
  link.nr = static_cast<int>(file.get_int("nr", link.nr));
  link.streams = static_cast<int>(file.get_int("streams", link.streams));
  link.taps = static_cast<int>(file.get_int("taps", link.taps));
  link.subcarriers = static_cast<int>(file.get_int("subcarriers", link.subcarriers));
  link.cp_length = static_cast<int>(file.get_int("cp_length", link.cp_length));
  link.qam_order = static_cast<int>(file.get_int("qam_order", link.qam_order));
  link.block_bits = static_cast<int>(file.get_int("block_bits", link.block_bits));
  link.grouping = file.get_bool("grouping", link.grouping);
  link.seed = file.get_u64("seed", link.seed);

  link.rate = file.get_string("rate", link.rate);
  if (file.has("generators")) {
    const auto gens = file.get_strings("generators", {});
    link.code = CodeSpec::from_octal(gens, parse_pattern(file.get_string("puncture", "")));
    link.rate = rate_string(link.code);
  } else {
    link.code = CodeSpec::preset(link.rate);
    if (file.has("puncture")) throw Error("puncture requires generators");
  }

  const auto chain = file.get_string("chain", "diagonal");
  if (chain == "diagonal") {
    link.chain = ChainModel::Diagonal;
  } else if (chain == "full") {
    link.chain = ChainModel::Full;
  } else {
    throw Error("chain must be diagonal or full");
  }

  cfg.profile_db = file.get_double("profile_db", cfg.profile_db);
  const auto kind = tap_profile_kind_from_string(file.get_string("profile", "equal"));
  link.profile = kind == TapProfileKind::Equal ? TapProfile::equal(link.taps)
                                               : TapProfile::exponential(link.taps, cfg.profile_db);

  const std::vector<double> default_grid =
      mode == Mode::Pep ? std::vector<double>{15, 17.5, 20, 22.5, 25, 27.5, 30}
                        : std::vector<double>{0, 2.5, 5, 7.5, 10, 12.5, 15};
  link.snr_db = file.get_doubles("snr_db", default_grid);

  cfg.out_dir = file.get_string("out", cfg.out_dir);
  cfg.workers = static_cast<int>(file.get_int("workers", cfg.workers));
  cfg.min_errors = file.get_u64("min_errors", cfg.min_errors);
  cfg.max_bits = file.get_u64("max_bits", cfg.max_bits);
  cfg.pep_trials = file.get_u64("pep_trials", cfg.pep_trials);
  cfg.max_dH = static_cast<int>(file.get_int("max_dH", cfg.max_dH));
  cfg.slope_window = file.get_doubles("slope_window", cfg.slope_window);
  if (file.has("spectrum")) cfg.spectrum = parse_spectrum(file.get_string("spectrum", ""));
  cfg.rows_on = file.get_ints("rows_on", cfg.rows_on);

  if (const auto extra = file.unused(); !extra.empty()) throw Error("unknown config key '" + extra.front() + "'");

  link.validate();
  if (cfg.workers < 1) throw Error("workers must be positive");
  if (cfg.min_errors < 1 || cfg.max_bits < 1) throw Error("stop rule needs positive limits");
  if (cfg.slope_window.size() != 2 || cfg.slope_window[0] >= cfg.slope_window[1])
    throw Error("slope_window must be [lo, hi]");
  if (mode != Mode::Analyze && mode != Mode::Correlate && link.snr_db.empty())
    throw Error("snr_db must not be empty");
  if (mode == Mode::Pep) {
    if (cfg.pep_trials < 1) throw Error("pep_trials must be positive");
    if (static_cast<int>(cfg.rows_on.size()) != cfg.spectrum.rows)
      throw Error("rows_on must list one subcarrier per spectrum row");
  }
  return cfg;
}

std::string ExperimentConfig::echo() const {
  std::map<std::string, std::string> kv;
  kv["mode"] = to_string(mode);
  kv["nt"] = std::to_string(link.nt);
  kv["nr"] = std::to_string(link.nr);
  kv["streams"] = std::to_string(link.streams);
  kv["taps"] = std::to_string(link.taps);
  kv["subcarriers"] = std::to_string(link.subcarriers);
  kv["cp_length"] = std::to_string(link.cp_length);
  kv["qam_order"] = std::to_string(link.qam_order);
  kv["block_bits"] = std::to_string(link.block_bits);
  kv["grouping"] = link.grouping ? "on" : "off";
  kv["seed"] = std::to_string(link.seed);
  kv["rate"] = link.rate;
  kv["generators"] = generators_of(link.code);
  kv["puncture"] = link.code.puncture.empty() ? "none" : describe(link.code.puncture);
  kv["chain"] = link.chain == ChainModel::Full ? "full" : "diagonal";
  kv["profile"] = to_string(link.profile.kind);
  kv["profile_db"] = format_double(profile_db);
  kv["tap_powers"] = join(link.profile.powers);
  kv["tap_delays"] = join(link.profile.delays);
  kv["snr_db"] = join(link.snr_db);
  kv["out"] = out_dir;
  kv["workers"] = std::to_string(workers);
  kv["min_errors"] = std::to_string(min_errors);
  kv["max_bits"] = std::to_string(max_bits);
  kv["pep_trials"] = std::to_string(pep_trials);
  kv["max_dH"] = std::to_string(max_dH);
  kv["spectrum"] = spectrum.str();
  kv["rows_on"] = join(rows_on);
  kv["slope_window"] = join(slope_window);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

StopDecision stop_rule(std::uint64_t errors, std::uint64_t trials, const ExperimentConfig& config) {
  if (errors >= config.min_errors || trials >= config.max_bits) return StopDecision::Stop;
  return StopDecision::Continue;
}

void finalize_point(BerPoint& point, const ExperimentConfig& config) {
  point.hit_cap = point.bit_errors < config.min_errors;
  point.zero_errors = point.bit_errors == 0;
  const double n = static_cast<double>(point.trials);
  point.ber = point.zero_errors ? 3.7 / n : static_cast<double>(point.bit_errors) / n;
  point.ci95 = 1.96 * std::sqrt(point.ber * (1.0 - point.ber) / n);
}

BerCurve run_ber(const ExperimentConfig& config) {
  const LinkConfig& link = config.link;
  link.validate();
  const std::size_t bits = frame_bits(link);
  const std::size_t batch = static_cast<std::size_t>(config.workers) * 4;
  BerCurve curve;

  for (std::size_t i = 0; i < link.snr_db.size(); ++i) {
    const double n0 = noise_variance(link.nt, link.snr_db[i]);
    const std::uint64_t point_stream = derive_stream(link.seed, i);
    BerPoint point;
    point.snr_db = link.snr_db[i];
    std::uint64_t next_frame = 0;
    bool done = false;
    while (!done) {
      std::vector<std::uint64_t> errors(batch, 0);
      auto simulate = [&](std::size_t slot) {
        SeededRng rng(link.seed, derive_stream(point_stream, next_frame + slot));
        Bits message(bits);
        for (std::size_t b = 0; b < bits; b += 64) {
          const std::uint64_t word = rng.next_u64();
          for (std::size_t k = 0; k < 64 && b + k < bits; ++k) message[b + k] = (word >> k) & 1u;
        }
        const auto channel = draw_realization(link.nt, link.nr, link.profile, link.subcarriers, rng);
        const Bits decoded = transmit_receive(message, link, channel, rng, n0);
        std::uint64_t e = 0;
        for (std::size_t k = 0; k < bits; ++k) e += decoded[k] != message[k];
        errors[slot] = e;
      };
      if (config.workers == 1) {
        for (std::size_t s = 0; s < batch; ++s) simulate(s);
      } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < config.workers; ++w)
          pool.emplace_back([&, w] {
            for (std::size_t s = w; s < batch; s += config.workers) simulate(s);
          });
        for (auto& t : pool) t.join();
      }
      // ordered merge; frames past the stopping point are discarded
      for (std::size_t s = 0; s < batch; ++s) {
        point.bit_errors += errors[s];
        point.trials += bits;
        ++point.frames;
        if (stop_rule(point.bit_errors, point.trials, config) == StopDecision::Stop) {
          done = true;
          break;
        }
      }
      next_frame += batch;
    }
    finalize_point(point, config);
    curve.points.push_back(point);
  }
  return curve;
}

int predicted_diversity(const LinkConfig& link, int max_dH) {
  if (link.grouping || link.subcarriers == link.taps)
    return max_achievable_diversity(link.code, link.nt, link.nr, link.streams, link.taps, max_dH).d_min;
  const int cap = link.nr * link.nt * link.taps;
  const auto report = max_achievable_diversity(link.code, link.nt, link.nr, link.streams, link.subcarriers,
                                               max_dH, EnumerationMethod::PathSearch);
  return std::min(cap, report.d_min);
}

int predicted_pep_diversity(const AlphaSpectrum& a, const std::vector<int>& rows_on, int nt, int nr) {
  if (static_cast<int>(rows_on.size()) != a.rows) throw Error("rows_on must list one subcarrier per row");
  std::map<int, std::vector<int>> merged;
  for (int m = 0; m < a.rows; ++m) {
    auto& row = merged[rows_on[m]];
    row.resize(a.cols, 0);
    for (int s = 0; s < a.cols; ++s) row[s] += a.at(m, s);
  }
  std::vector<int> values;
  for (const auto& [sc, row] : merged) values.insert(values.end(), row.begin(), row.end());
  return diversity_of(AlphaSpectrum(static_cast<int>(merged.size()), a.cols, values), nt, nr);
}

std::string ber_csv(const BerCurve& curve) {
  std::string out = "snr_db,trials,bit_errors,ber,ci95\n";
  for (const auto& p : curve.points)
    out += format_double(p.snr_db) + "," + std::to_string(p.trials) + "," + std::to_string(p.bit_errors) +
           "," + format_double(p.ber) + "," + format_double(p.ci95) + "\n";
  return out;
}

std::string pep_csv(const PepCurve& curve) {
  std::string out = "snr_db,trials,pep,std_error,ci95\n";
  for (const auto& p : curve.points)
    out += format_double(p.snr_db) + "," + std::to_string(p.trials) + "," + format_double(p.pep) + "," +
           format_double(p.std_error) + "," + format_double(p.ci95) + "\n";
  return out;
}

std::string spectra_csv(const DiversityReport& report) {
  std::string out = "d_h,multiplicity,spectrum,diversity\n";
  for (const auto& [term, d] : report.per_event)
    out += std::to_string(term.spectrum.hamming_weight()) + "," + term.multiplicity.str() + "," +
           term.spectrum.str() + "," + std::to_string(d) + "\n";
  return out;
}

std::string correlation_csv(const TapProfile& profile, int subcarriers, double profile_db) {
  const auto equal = TapProfile::equal(profile.tap_count());
  const auto expo = TapProfile::exponential(profile.tap_count(), profile_db);
  std::string out = "delta,rho,rho_equal,rho_exponential\n";
  for (int d = 0; d < subcarriers; ++d)
    out += std::to_string(d) + "," + format_double(subcarrier_correlation(profile, subcarriers, d)) + "," +
           format_double(subcarrier_correlation(equal, subcarriers, d)) + "," +
           format_double(subcarrier_correlation(expo, subcarriers, d)) + "\n";
  return out;
}

namespace {

std::string slope_line(const std::vector<double>& snr, const std::vector<double>& rate,
                       const std::vector<double>& window) {
  try {
    return format_double(estimate_slope(snr, rate, window[0], window[1]));
  } catch (const Error& e) {
    return std::string("unavailable (") + e.what() + ")";
  }
}

}  // namespace

void run(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
  write_file(dir / "config_echo.txt", config.echo());
  const LinkConfig& link = config.link;

  switch (config.mode) {
    case Mode::Ber: {
      const BerCurve curve = run_ber(config);
      write_file(dir / "ber.csv", ber_csv(curve));
      std::vector<double> snr, rate;
      for (const auto& p : curve.points)
        if (!p.zero_errors) {
          snr.push_back(p.snr_db);
          rate.push_back(p.ber);
        }
      std::ostringstream s;
      s << "mode: ber\n";
      s << "window_db: " << join(config.slope_window) << "\n";
      s << "slope: " << slope_line(snr, rate, config.slope_window) << "\n";
      s << "predicted_diversity: " << predicted_diversity(link, config.max_dH) << "\n";
      s << "full_diversity_condition: "
        << (full_diversity_condition(link.code.rate(), link.streams, link.taps) ? "true" : "false") << "\n";
      s << "points:\n";
      for (const auto& p : curve.points) {
        s << "  snr_db=" << format_double(p.snr_db) << " frames=" << p.frames << " errors=" << p.bit_errors;
        if (p.zero_errors) s << " zero_errors(upper_bound_3.7/trials)";
        if (p.hit_cap) s << " low_confidence(trial_cap)";
        s << "\n";
      }
      write_file(dir / "summary.txt", s.str());
      break;
    }
    case Mode::Pep: {
      PepChannel ch{link.nt, link.nr, link.subcarriers, link.profile, config.rows_on};
      const PepCurve curve =
          pep_expectation_mc(config.spectrum, ch, link.snr_db, config.pep_trials, link.seed, config.workers);
      write_file(dir / "pep.csv", pep_csv(curve));
      std::vector<double> snr, rate;
      for (const auto& p : curve.points) {
        snr.push_back(p.snr_db);
        rate.push_back(p.pep);
      }
      std::ostringstream s;
      s << "mode: pep\n";
      s << "spectrum: " << config.spectrum.str() << " on subcarriers " << join(config.rows_on) << "\n";
      if (config.rows_on.size() == 2) {
        const int delta = std::abs(config.rows_on[1] - config.rows_on[0]);
        s << "correlation: " << format_double(subcarrier_correlation(link.profile, link.subcarriers, delta)) << "\n";
      }
      s << "window_db: " << join(config.slope_window) << "\n";
      s << "slope: " << slope_line(snr, rate, config.slope_window) << "\n";
      s << "predicted_diversity: " << predicted_pep_diversity(config.spectrum, config.rows_on, link.nt, link.nr)
        << "\n";
      write_file(dir / "summary.txt", s.str());
      break;
    }
    case Mode::Analyze: {
      const int m = link.subcarriers_per_codeword();
      const auto method = m <= 8 ? EnumerationMethod::TransferFunction : EnumerationMethod::PathSearch;
      const auto report = max_achievable_diversity(link.code, link.nt, link.nr, link.streams, m, config.max_dH, method);
      write_file(dir / "spectra.csv", spectra_csv(report));
      std::ostringstream s;
      s << "code: generators " << generators_of(link.code) << ", puncture "
        << (link.code.puncture.empty() ? "none" : describe(link.code.puncture)) << ", rate " << rate_string(link.code)
        << "\n";
      s << "antennas: " << link.nt << "x" << link.nr << ", streams: " << link.streams
        << ", subcarriers per codeword: " << m << "\n";
      s << "max_dH: " << config.max_dH << "\n";
      s << "events: " << report.per_event.size() << "\n";
      s << "D_min: " << report.d_min << "\n";
      s << "dominant: " << report.dominant.str() << "\n";
      s << "max_diversity: " << report.max_diversity << "\n";
      s << "full_diversity: " << (report.full_diversity ? "true" : "false") << "\n";
      s << "condition_RcSL_le_1: "
        << (full_diversity_condition(link.code.rate(), link.streams, link.taps) ? "true" : "false") << "\n";
      write_file(dir / "report.txt", s.str());
      break;
    }
    case Mode::Correlate:
      write_file(dir / "correlation.csv", correlation_csv(link.profile, link.subcarriers, config.profile_db));
      break;
  }
}

}  // namespace bicmb
