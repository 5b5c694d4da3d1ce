// warstats: command-line front end for the conflict statistics pipeline.
//
// Every subcommand reads CSV and writes CSV or JSON, so stages compose through
// files. Exit codes: 0 success, 2 input format error, 3 numeric failure,
// 4 I/O error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>

#include "warstats/warstats.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum Exit : int { kOk = 0, kFormat = 2, kNumeric = 3, kIo = 4 };

// Reads `--config PATH` as a JSON object whose keys are long option names.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const auto& name = opt->get_lnames()[0];
      if (opt->count() > 0) {
        const auto& res = opt->results();
        j[name] = res.size() == 1 ? nlohmann::json(res[0]) : nlohmann::json(res);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      auto scalar = [&](const nlohmann::json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number_integer()) return v.dump();
        if (v.is_number()) return warstats::csv::format_double(v.get<double>());
        throw CLI::ConversionError("config key '" + key + "' must be a scalar or array of scalars");
      };
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

struct Options {
  std::string catalog;
  std::string population;
  std::string window = "1400:2000";
  std::string step = "1000";
  std::string fit_range;
  std::optional<double> tail_min;
  bool attribute_start = false;
  std::optional<bool> normalize;
  bool linear_interp = false;
  bool log_grid = false;
  std::string delimiter = ",";
  std::string out;
  std::uint64_t seed = 1;
  bool timestamp = false;
  bool strict = false;
  std::string series = "all";
  std::string input;
  std::string model = "log-gaussian";
  // synth
  std::string kind = "power-law";
  std::size_t n = 1000;
  double alpha = -2.08;
  double x_min = 1000;
  double mu = 7.225;
  double sigma = 1.0;
  double period = 50;
  double amplitude = 1;
  double noise_sd = 0;
};

char delimiter_of(const Options& o) {
  if (o.delimiter == "\\t" || o.delimiter == "tab") return '\t';
  if (o.delimiter.size() != 1) throw std::invalid_argument("--delimiter must be a single character");
  return o.delimiter[0];
}

warstats::Interpolation interpolation_of(const Options& o) {
  return o.linear_interp ? warstats::Interpolation::linear : warstats::Interpolation::log_linear;
}

std::ifstream open(const std::string& path, const char* flag) {
  if (path.empty()) throw std::invalid_argument(std::string(flag) + " is required");
  return warstats::open_input(path);
}

// Writes to DIR/name when --out is set, otherwise to stdout.
void emit(const Options& o, const std::string& name, const std::function<void(std::ostream&)>& body) {
  if (o.out.empty()) {
    body(std::cout);
    return;
  }
  fs::create_directories(o.out);
  const auto path = fs::path(o.out) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw fs::filesystem_error("cannot open for writing", path, std::make_error_code(std::errc::io_error));
  body(f);
  if (!f) throw fs::filesystem_error("write failed", path, std::make_error_code(std::errc::io_error));
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

warstats::ConflictCatalog load_catalog(const Options& o) {
  auto in = open(o.catalog, "--catalog");
  try {
    return warstats::parse_catalog(in, warstats::YearRange::parse(o.window), delimiter_of(o));
  } catch (const warstats::FormatError& e) {
    throw warstats::FormatError(o.catalog + ": " + e.what());
  }
}

std::optional<warstats::PopulationTable> load_population(const Options& o) {
  if (o.population.empty()) return std::nullopt;
  auto in = open(o.population, "--population");
  try {
    return warstats::parse_population(in, delimiter_of(o), interpolation_of(o));
  } catch (const warstats::FormatError& e) {
    throw warstats::FormatError(o.population + ": " + e.what());
  }
}

int cmd_ingest(const Options& o) {
  const auto cat = load_catalog(o);
  const auto pop = load_population(o);
  ordered_json j;
  j["catalog"] = o.catalog;
  j["window"] = {cat.window.first, cat.window.last};
  j["retained"] = cat.report.retained;
  j["missing_fatalities"] = cat.report.missing_fatalities;
  j["rejected"] = cat.report.rejected;
  j["outside_window"] = cat.report.outside_window;
  j["total_fatalities"] = cat.total_fatalities();
  j["messages"] = cat.report.messages;
  if (pop) {
    j["population"] = {{"anchors", pop->anchors().size()},
                       {"first_year", pop->span().first},
                       {"last_year", pop->span().last}};
  }
  emit(o, "ingest.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kOk;
}

int cmd_series(const Options& o) {
  if (o.out.empty()) throw std::invalid_argument("--out DIR is required for series");
  const auto cat = load_catalog(o);
  const bool normalize = o.normalize.value_or(false);
  const auto pop = load_population(o);
  if (normalize && !pop) throw std::invalid_argument("--normalize needs --population");
  const auto attribution = o.attribute_start ? warstats::Attribution::start_year : warstats::Attribution::end_year;

  const auto wars = warstats::wars_per_year(cat, attribution);
  const auto per_year = warstats::fatalities_per_year(cat);
  const auto per_war = warstats::fatalities_per_war(cat);
  emit(o, "wars_per_year.csv", [&](std::ostream& os) { warstats::write_series(os, wars); });
  emit(o, "fatalities_per_year.csv", [&](std::ostream& os) { warstats::write_series(os, per_year); });
  emit(o, "fatalities_per_war.csv", [&](std::ostream& os) { warstats::write_series(os, per_war); });
  if (normalize) {
    const auto wn = warstats::normalize_per_capita(wars, *pop);
    const auto yn = warstats::normalize_per_capita(per_year, *pop);
    const auto en = warstats::normalize_per_capita(per_war, *pop);
    emit(o, "wars_per_year_normalized.csv", [&](std::ostream& os) { warstats::write_series(os, wn); });
    emit(o, "fatalities_per_year_normalized.csv", [&](std::ostream& os) { warstats::write_series(os, yn); });
    emit(o, "fatalities_per_war_normalized.csv", [&](std::ostream& os) { warstats::write_series(os, en); });
  }
  std::cerr << "series: " << per_year.counts.included << " wars with fatalities, "
            << per_year.counts.missing_fatalities << " without\n";
  return kOk;
}

warstats::csv::Column read_column(const Options& o) {
  auto in = open(o.input, "--input");
  try {
    return warstats::csv::read_two_column(in, delimiter_of(o));
  } catch (const warstats::FormatError& e) {
    throw warstats::FormatError(o.input + ": " + e.what());
  }
}

int cmd_ccdf(const Options& o) {
  const auto col = read_column(o);
  const auto samples = warstats::positive_only(col.values);
  if (samples.empty()) throw std::invalid_argument("ccdf: input has no positive values");
  warstats::EmpiricalCcdf c;
  if (o.log_grid) {
    c = warstats::empirical_ccdf_log(samples, 1000);
  } else if (o.step == "auto") {
    c = warstats::empirical_ccdf(samples, *std::max_element(samples.begin(), samples.end()) / 1000.0);
  } else {
    const auto step = warstats::csv::parse_double(o.step);
    if (!step) throw std::invalid_argument("--step must be a number or 'auto'");
    c = warstats::empirical_ccdf(samples, *step);
  }
  emit(o, "ccdf_" + stem_of(o.input) + ".csv", [&](std::ostream& os) { warstats::write_ccdf(os, c); });
  return kOk;
}

int cmd_fit(const Options& o) {
  const auto col = read_column(o);
  warstats::EmpiricalCcdf c;
  c.grid = col.keys;
  c.probs = col.values;
  std::optional<warstats::FitRange> range;
  if (!o.fit_range.empty()) range = warstats::FitRange::parse(o.fit_range);

  warstats::FitResult r;
  if (o.model == "log-gaussian") {
    r = warstats::fit_log_gaussian(c, range);
  } else if (o.model == "power-law") {
    r = warstats::fit_power_law(c, range);
  } else if (o.model == "tail") {
    double x_min = 0;
    if (o.tail_min) {
      x_min = *o.tail_min;
    } else {
      // Grid point whose exceedance probability is closest to 10%.
      std::size_t best = 0;
      for (std::size_t i = 1; i < c.probs.size(); ++i) {
        if (std::abs(c.probs[i] - 0.1) < std::abs(c.probs[best] - 0.1)) best = i;
      }
      x_min = c.grid.at(best);
    }
    r = warstats::fit_tail(c, x_min);
  } else {
    throw std::invalid_argument("--model must be log-gaussian, power-law or tail");
  }
  const auto j = warstats::to_json(r);
  emit(o, "fit_" + stem_of(o.input) + "_" + o.model + ".json", [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  if (o.strict && !r.converged) {
    std::cerr << "fit did not converge after " << r.iterations << " iterations\n";
    return kNumeric;
  }
  return kOk;
}

int cmd_acf(const Options& o) {
  const auto col = read_column(o);
  const auto acf = warstats::autocorrelation_fft(col.values);
  const auto w = warstats::whiteness_check(acf);
  emit(o, "acf_" + stem_of(o.input) + ".csv", [&](std::ostream& os) { warstats::write_acf(os, acf); });
  ordered_json j{{"T", acf.T},
                 {"se_white", acf.se_white},
                 {"fraction_inside", w.fraction_inside},
                 {"verdict_random", w.verdict}};
  (o.out.empty() ? std::cerr : std::cout) << j.dump() << '\n';
  return kOk;
}

int cmd_spectrum(const Options& o) {
  const auto col = read_column(o);
  const auto s = warstats::periodogram(col.values);
  emit(o, "spectrum_" + stem_of(o.input) + ".csv", [&](std::ostream& os) { warstats::write_spectrum(os, s); });
  return kOk;
}

int cmd_report(const Options& o) {
  warstats::PipelineConfig cfg;
  if (o.catalog.empty()) throw std::invalid_argument("--catalog is required");
  cfg.catalog = o.catalog;
  if (!o.population.empty()) cfg.population = o.population;
  cfg.window = warstats::YearRange::parse(o.window);
  const auto step = warstats::csv::parse_double(o.step);
  if (!step || !(*step > 0)) throw std::invalid_argument("--step must be a positive number for report");
  cfg.step = *step;
  if (!o.fit_range.empty()) cfg.fit_range = warstats::FitRange::parse(o.fit_range);
  cfg.tail_min = o.tail_min;
  cfg.attribution = o.attribute_start ? warstats::Attribution::start_year : warstats::Attribution::end_year;
  cfg.normalize = o.normalize.value_or(true);
  cfg.interpolation = interpolation_of(o);
  cfg.log_grid = o.log_grid;
  cfg.series = warstats::parse_series_selection(o.series);
  cfg.delimiter = delimiter_of(o);
  cfg.out_dir = o.out.empty() ? "out" : o.out;
  cfg.strict = o.strict;
  cfg.timestamp = o.timestamp;
  const auto report = warstats::run_pipeline(cfg);
  std::cerr << "report: wrote " << report.files.size() << " files to " << cfg.out_dir.string() << '\n';
  return kOk;
}

int cmd_synth(const Options& o) {
  const warstats::synth::Seed seed{o.seed};
  std::vector<double> v;
  if (o.kind == "power-law") {
    v = warstats::synth::gen_power_law(o.n, o.alpha, o.x_min, seed);
  } else if (o.kind == "lognormal") {
    v = warstats::synth::gen_lognormal(o.n, o.mu, o.sigma, seed);
  } else if (o.kind == "white-noise") {
    v = warstats::synth::gen_white_noise(o.n, seed);
  } else if (o.kind == "sinusoid") {
    v = warstats::synth::gen_sinusoid(o.n, o.period, o.amplitude, o.noise_sd, seed);
  } else {
    throw std::invalid_argument("--kind must be power-law, lognormal, white-noise or sinusoid");
  }
  emit(o, "synth_" + o.kind + ".csv", [&](std::ostream& os) {
    os << "ordinal,value\n";
    for (std::size_t i = 0; i < v.size(); ++i) os << i << ',' << warstats::csv::format_double(v[i]) << '\n';
  });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistics of violent-conflict catalogs: series, CCDF fits, ACF, periodogram"};
  app.set_version_flag("--version", warstats::kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file of option values; command-line flags take precedence");

  Options o;
  app.add_option("--catalog", o.catalog, "Conflict catalog CSV (name,start_year,end_year,fatalities)");
  app.add_option("--population", o.population, "World population CSV (year,population)");
  app.add_option("--window", o.window, "Analysis window LO:HI")->capture_default_str();
  app.add_option("--step", o.step, "CCDF grid step, or 'auto' for max/1000")->capture_default_str();
  app.add_option("--fit-range", o.fit_range, "Grid range LO:HI for the trimmed power-law fit");
  app.add_option("--tail-min", o.tail_min, "Lower threshold of the right-tail power-law fit");
  app.add_flag("--attribute-start", o.attribute_start, "Count wars in their start year");
  app.add_flag("--normalize,!--no-normalize", o.normalize, "Divide series by world population");
  app.add_flag("--linear-interp", o.linear_interp, "Interpolate population linearly instead of geometrically");
  app.add_flag("--log-grid", o.log_grid, "Geometric CCDF grid (1000 points) for normalized data");
  app.add_option("--delimiter", o.delimiter, "Input field delimiter (',' or 'tab')")->capture_default_str();
  app.add_option("--out", o.out, "Output directory (stdout when omitted, where possible)");
  app.add_option("--seed", o.seed, "Random seed for synth")->capture_default_str();
  app.add_flag("--timestamp", o.timestamp, "Embed a generation timestamp in report.json");
  app.add_flag("--strict", o.strict, "Exit with code 3 when a fit does not converge");
  app.add_option("--series", o.series, "all, per-year or per-war")->capture_default_str();
  app.add_option("--input", o.input, "Input CSV for ccdf/fit/acf/spectrum");
  app.add_option("--model", o.model, "log-gaussian, power-law or tail")->capture_default_str();
  app.add_option("--kind", o.kind, "synth kind: power-law, lognormal, white-noise, sinusoid")->capture_default_str();
  app.add_option("--n", o.n, "synth sample count / series length")->capture_default_str();
  app.add_option("--alpha", o.alpha, "synth power-law density exponent (< -1)")->capture_default_str();
  app.add_option("--x-min", o.x_min, "synth power-law lower bound")->capture_default_str();
  app.add_option("--mu", o.mu, "synth lognormal log-mean")->capture_default_str();
  app.add_option("--sigma", o.sigma, "synth lognormal log-sd")->capture_default_str();
  app.add_option("--period", o.period, "synth sinusoid period")->capture_default_str();
  app.add_option("--amplitude", o.amplitude, "synth sinusoid amplitude")->capture_default_str();
  app.add_option("--noise-sd", o.noise_sd, "synth sinusoid noise sd")->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Validate the catalog (and population) and report row counts");
  auto* series = app.add_subcommand("series", "Write per-year and per-war series CSVs");
  auto* ccdf = app.add_subcommand("ccdf", "Empirical CCDF of a series CSV (zeros dropped)");
  auto* fit = app.add_subcommand("fit", "Fit a model to a CCDF CSV and print the JSON result");
  auto* acf = app.add_subcommand("acf", "Autocorrelation with standard-error bands");
  auto* spectrum = app.add_subcommand("spectrum", "FFT periodogram");
  auto* report = app.add_subcommand("report", "Run the whole pipeline and write report.json");
  auto* synth = app.add_subcommand("synth", "Emit seeded synthetic data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kFormat;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(o);
    if (series->parsed()) return cmd_series(o);
    if (ccdf->parsed()) return cmd_ccdf(o);
    if (fit->parsed()) return cmd_fit(o);
    if (acf->parsed()) return cmd_acf(o);
    if (spectrum->parsed()) return cmd_spectrum(o);
    if (report->parsed()) return cmd_report(o);
    if (synth->parsed()) return cmd_synth(o);
  } catch (const warstats::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const warstats::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kFormat;
  } catch (const std::out_of_range& e) {
    std::cerr << "range error: " << e.what() << '\n';
    return kFormat;
  }
  return kFormat;
}
