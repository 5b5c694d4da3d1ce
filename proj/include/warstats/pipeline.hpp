#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "warstats/catalog.hpp"
#include "warstats/ccdf.hpp"
#include "warstats/error.hpp"
#include "warstats/fit.hpp"
#include "warstats/series.hpp"
#include "warstats/timefreq.hpp"

namespace warstats {

inline constexpr const char* kVersion = "1.0.0";

enum class SeriesSelection { all, per_year, per_war };

struct PipelineConfig {
  std::filesystem::path catalog;
  std::optional<std::filesystem::path> population;
  YearRange window{1400, 2000};
  double step = 1000;                   // CCDF grid step for raw fatality counts
  std::optional<FitRange> fit_range;    // default: trim 10% of grid points at each end
  std::optional<double> tail_min;       // default: grid point nearest the 90th percentile
  Attribution attribution = Attribution::end_year;
  bool normalize = true;
  Interpolation interpolation = Interpolation::log_linear;
  bool log_grid = false;                // geometric grid for normalized CCDFs
  SeriesSelection series = SeriesSelection::all;
  char delimiter = ',';
  std::filesystem::path out_dir = "out";
  bool strict = false;
  bool timestamp = false;
};

inline std::string to_string(SeriesSelection s) {
  switch (s) {
    case SeriesSelection::per_year: return "per-year";
    case SeriesSelection::per_war: return "per-war";
    default: return "all";
  }
}

inline SeriesSelection parse_series_selection(std::string_view s) {
  if (s == "all") return SeriesSelection::all;
  if (s == "per-year") return SeriesSelection::per_year;
  if (s == "per-war") return SeriesSelection::per_war;
  throw std::invalid_argument("series must be all, per-year or per-war, got '" + std::string(s) + "'");
}

struct AnalysisReport {
  nlohmann::ordered_json json;
  std::vector<std::filesystem::path> files;  // every file written, report.json last
};

inline nlohmann::ordered_json echo_options(const PipelineConfig& c) {
  nlohmann::ordered_json o;
  o["catalog"] = c.catalog.string();
  o["population"] = c.population ? nlohmann::ordered_json(c.population->string()) : nlohmann::ordered_json(nullptr);
  o["window"] = std::to_string(c.window.first) + ":" + std::to_string(c.window.last);
  o["step"] = c.step;
  o["fit_range"] = c.fit_range ? nlohmann::ordered_json({c.fit_range->lo, c.fit_range->hi}) : nlohmann::ordered_json(nullptr);
  o["tail_min"] = c.tail_min ? nlohmann::ordered_json(*c.tail_min) : nlohmann::ordered_json(nullptr);
  o["attribute_start"] = c.attribution == Attribution::start_year;
  o["normalize"] = c.normalize;
  o["interpolation"] = c.interpolation == Interpolation::linear ? "linear" : "log-linear";
  o["log_grid"] = c.log_grid;
  o["series"] = to_string(c.series);
  o["delimiter"] = std::string(1, c.delimiter);
  o["strict"] = c.strict;
  o["timestamp"] = c.timestamp;
  return o;
}

namespace detail {

class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) std::filesystem::remove(f, ec);
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::filesystem::filesystem_error("cannot open for writing", path, std::make_error_code(std::errc::io_error));
    files_.push_back(path);
    body(out);
    out.flush();
    if (!out) throw std::filesystem::filesystem_error("write failed", path, std::make_error_code(std::errc::io_error));
  }

  std::vector<std::filesystem::path> commit() {
    committed_ = true;
    return files_;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
  bool committed_ = false;
};

inline nlohmann::ordered_json counts_json(const SeriesCounts& c) {
  return {{"included", c.included}, {"missing_fatalities", c.missing_fatalities},
          {"outside_window", c.outside_window}};
}

struct NamedFit {
  std::string label;
  std::optional<FitResult> fit;
  std::string error;
};

// Default tail threshold, lowered if needed so at least three grid points remain.
inline double default_tail_min(const EmpiricalCcdf& ccdf, std::span<const double> samples) {
  double x = tail_threshold(ccdf, samples);
  if (ccdf.grid.size() >= 3 && x > ccdf.grid[ccdf.grid.size() - 3]) x = ccdf.grid[ccdf.grid.size() - 3];
  return x;
}

struct SeriesJob {
  std::string name;
  std::vector<double> values;  // the full series, zeros included
  bool normalized = false;
  SeriesCounts counts;
};

inline nlohmann::ordered_json analyze(const SeriesJob& job, const PipelineConfig& cfg, OutputSet& out,
                                      std::vector<std::string>& unconverged) {
  nlohmann::ordered_json block;
  block["series"] = job.name;
  block["length"] = job.values.size();
  block["counts"] = counts_json(job.counts);

  const auto samples = positive_only(job.values);
  block["positive_samples"] = samples.size();

  std::vector<NamedFit> fits;
  std::optional<EmpiricalCcdf> ccdf;
  try {
    if (samples.empty()) throw std::invalid_argument("no positive values");
    if (job.normalized) {
      if (cfg.log_grid) {
        ccdf = empirical_ccdf_log(samples, 1000);
        block["ccdf_grid"] = {{"kind", "log"}, {"points", 1000}};
      } else {
        const double step = *std::max_element(samples.begin(), samples.end()) / 1000.0;
        ccdf = empirical_ccdf(samples, step);
        block["ccdf_grid"] = {{"kind", "linear"}, {"step", step}};
      }
    } else {
      ccdf = empirical_ccdf(samples, cfg.step);
      block["ccdf_grid"] = {{"kind", "linear"}, {"step", cfg.step}};
    }
    block["ccdf_points"] = ccdf->size();
  } catch (const std::exception& e) {
    block["ccdf_error"] = e.what();
  }

  auto attempt = [&](std::string label, const std::function<FitResult()>& fn) {
    NamedFit nf{std::move(label), std::nullopt, {}};
    try {
      nf.fit = fn();
      if (!nf.fit->converged) unconverged.push_back(job.name + "/" + nf.label);
    } catch (const std::invalid_argument& e) {
      nf.error = e.what();
    } catch (const NumericError& e) {
      nf.error = e.what();
    }
    fits.push_back(std::move(nf));
  };

  if (ccdf) {
    if (job.normalized) {
      attempt("power_law", [&] { return fit_power_law(*ccdf); });
    } else {
      attempt("log_gaussian", [&] { return fit_log_gaussian(*ccdf); });
      attempt("power_law_trimmed", [&] {
        return fit_power_law(*ccdf, cfg.fit_range.value_or(trimmed_range(*ccdf)));
      });
      attempt("power_law_tail", [&] {
        return fit_tail(*ccdf, cfg.tail_min.value_or(default_tail_min(*ccdf, samples)));
      });
    }
    out.write("ccdf_" + job.name + ".csv", [&](std::ostream& os) {
      os << "x,prob";
      for (const auto& f : fits) os << ",fit_" << f.label;
      os << '\n';
      for (std::size_t i = 0; i < ccdf->size(); ++i) {
        os << csv::format_double(ccdf->grid[i]) << ',' << csv::format_double(ccdf->probs[i]);
        for (const auto& f : fits) {
          os << ',';
          if (f.fit) os << csv::format_double(f.fit->predict(ccdf->grid[i]));
        }
        os << '\n';
      }
    });
  }

  auto fits_json = nlohmann::ordered_json::array();
  for (const auto& f : fits) {
    nlohmann::ordered_json j;
    j["label"] = f.label;
    if (f.fit) {
      const auto fit_json = to_json(*f.fit);
      for (const auto& [k, v] : fit_json.items()) j[k] = v;
    } else {
      j["error"] = f.error;
    }
    fits_json.push_back(j);
  }
  block["fits"] = std::move(fits_json);

  try {
    const auto acf = autocorrelation_fft(job.values);
    const auto w = whiteness_check(acf);
    block["acf"] = {{"T", acf.T},
                    {"se_white", acf.se_white},
                    {"fraction_inside", w.fraction_inside},
                    {"verdict_random", w.verdict},
                    {"rule", "white if >= 95% of lags 1..T-1 satisfy |r| <= 1.96*sqrt(1/T)"}};
    out.write("acf_" + job.name + ".csv", [&](std::ostream& os) { write_acf(os, acf); });
  } catch (const std::exception& e) {
    block["acf"] = {{"error", e.what()}};
  }

  try {
    const auto spec = periodogram(job.values);
    auto peaks = nlohmann::ordered_json::array();
    for (const auto& p : spectrum_peaks(spec, 5)) {
      peaks.push_back({{"freq", p.freq}, {"power", p.power}, {"dominance", p.dominance}});
    }
    block["spectrum_peaks"] = peaks;
    out.write("spectrum_" + job.name + ".csv", [&](std::ostream& os) { write_spectrum(os, spec); });
  } catch (const std::exception& e) {
    block["spectrum_peaks"] = {{"error", e.what()}};
  }
  return block;
}

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

inline std::ifstream open_input(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    const auto why = std::filesystem::exists(p) ? std::errc::permission_denied : std::errc::no_such_file_or_directory;
    throw std::filesystem::filesystem_error("cannot open input", p, std::make_error_code(why));
  }
  return in;
}

/// Runs ingestion, series construction, CCDF fits, ACF and periodogram, writing
/// plot-data CSVs and `report.json` into `cfg.out_dir`. On any error the files
/// written so far are removed.
inline AnalysisReport run_pipeline(const PipelineConfig& cfg) {
  auto cat_in = open_input(cfg.catalog);
  ConflictCatalog catalog;
  try {
    catalog = parse_catalog(cat_in, cfg.window, cfg.delimiter);
  } catch (const FormatError& e) {
    throw FormatError(cfg.catalog.string() + ": " + e.what());
  }
  std::optional<PopulationTable> pop;
  if (cfg.population) {
    auto pop_in = open_input(*cfg.population);
    try {
      pop = parse_population(pop_in, cfg.delimiter, cfg.interpolation);
    } catch (const FormatError& e) {
      throw FormatError(cfg.population->string() + ": " + e.what());
    }
  }
  const bool normalize = cfg.normalize && pop.has_value();

  std::filesystem::create_directories(cfg.out_dir);
  detail::OutputSet out(cfg.out_dir);

  nlohmann::ordered_json report;
  report["tool"] = "warstats";
  report["version"] = kVersion;
  if (cfg.timestamp) report["generated_at"] = detail::utc_now();
  report["options"] = echo_options(cfg);
  report["dataset"] = {{"window", {cfg.window.first, cfg.window.last}},
                       {"retained", catalog.report.retained},
                       {"missing_fatalities", catalog.report.missing_fatalities},
                       {"rejected", catalog.report.rejected},
                       {"outside_window", catalog.report.outside_window},
                       {"total_fatalities", catalog.total_fatalities()},
                       {"population_anchors", pop ? pop->anchors().size() : 0}};

  const bool per_year = cfg.series != SeriesSelection::per_war;
  const bool per_war = cfg.series != SeriesSelection::per_year;

  std::vector<detail::SeriesJob> jobs;
  auto& built = report["series_files"] = nlohmann::ordered_json::array();
  if (per_year) {
    const auto wars = wars_per_year(catalog, cfg.attribution);
    out.write("wars_per_year.csv", [&](std::ostream& os) { write_series(os, wars); });
    built.push_back("wars_per_year.csv");
    const auto fat = fatalities_per_year(catalog);
    out.write("fatalities_per_year.csv", [&](std::ostream& os) { write_series(os, fat); });
    built.push_back("fatalities_per_year.csv");
    std::size_t zero_years = 0;
    for (double v : fat.values) zero_years += v == 0 ? 1 : 0;
    report["dataset"]["zero_fatality_years"] = zero_years;
    report["dataset"]["years"] = fat.values.size();
    jobs.push_back({"fatalities_per_year", fat.values, false, fat.counts});
    if (normalize) {
      const auto wars_n = normalize_per_capita(wars, *pop);
      out.write("wars_per_year_normalized.csv", [&](std::ostream& os) { write_series(os, wars_n); });
      built.push_back("wars_per_year_normalized.csv");
      const auto fat_n = normalize_per_capita(fat, *pop);
      out.write("fatalities_per_year_normalized.csv", [&](std::ostream& os) { write_series(os, fat_n); });
      built.push_back("fatalities_per_year_normalized.csv");
      jobs.push_back({"fatalities_per_year_normalized", fat_n.values, true, fat_n.counts});
    }
  }
  if (per_war) {
    const auto fat = fatalities_per_war(catalog);
    out.write("fatalities_per_war.csv", [&](std::ostream& os) { write_series(os, fat); });
    built.push_back("fatalities_per_war.csv");
    report["dataset"]["wars_with_fatalities"] = fat.size();
    jobs.push_back({"fatalities_per_war", fat.values(), false, fat.counts});
    if (normalize) {
      const auto fat_n = normalize_per_capita(fat, *pop);
      out.write("fatalities_per_war_normalized.csv", [&](std::ostream& os) { write_series(os, fat_n); });
      built.push_back("fatalities_per_war_normalized.csv");
      jobs.push_back({"fatalities_per_war_normalized", fat_n.values(), true, fat_n.counts});
    }
  }

  std::vector<std::string> unconverged;
  auto& blocks = report["analyses"] = nlohmann::ordered_json::array();
  for (const auto& job : jobs) blocks.push_back(detail::analyze(job, cfg, out, unconverged));
  report["unconverged_fits"] = unconverged;
  if (cfg.strict && !unconverged.empty()) {
    throw NumericError("fit did not converge: " + unconverged.front());
  }

  out.write("report.json", [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  return {report, out.commit()};
}

}  // namespace warstats
