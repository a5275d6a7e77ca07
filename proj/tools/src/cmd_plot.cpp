#include <filesystem>
#include <map>
#include <sstream>

#include "commands.hpp"
#include "common.hpp"
#include "tradenet/io/market_file.hpp"
#include "tradenet/io/results.hpp"
#include "tradenet/io/svg.hpp"

namespace tradenet::cli {
namespace {

namespace fs = std::filesystem;

// Header-indexed CSV as written by the results module (no quoting).
struct Csv {
  std::map<std::string, std::size_t> columns;
  std::vector<std::vector<std::string>> rows;

  const std::string& at(std::size_t row, const std::string& column) const {
    const auto it = columns.find(column);
    if (it == columns.end()) throw io::ParseError("missing CSV column \"" + column + "\"", "");
    return rows[row].at(it->second);
  }
  // Empty fields yield nullopt.
  std::optional<double> number(std::size_t row, const std::string& column) const {
    const std::string& s = at(row, column);
    if (s.empty()) return std::nullopt;
    return std::stod(s);
  }
};

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<Csv> ReadCsv(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  std::stringstream in(io::ReadFile(path));
  Csv csv;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  const std::vector<std::string> header = SplitFields(line);
  for (std::size_t i = 0; i < header.size(); ++i) csv.columns[header[i]] = i;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields = SplitFields(line);
    fields.resize(header.size());
    csv.rows.push_back(std::move(fields));
  }
  if (csv.rows.empty()) return std::nullopt;
  return csv;
}

std::string Label(double x) { return io::FormatReal(x); }

std::optional<io::ChartSpec> SeriesChart(const Csv& csv) {
  io::ChartSeries s;
  s.label = "satisfied";
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    s.x.push_back(*csv.number(r, "iteration"));
    s.y.push_back(*csv.number(r, "satisfied_proportion"));
  }
  return io::ChartSpec{"Satisfied agents", "best responses", "satisfied proportion",
                       {std::move(s)}, 0.0, 1.0};
}

std::optional<io::ChartSpec> PathsChart(const Csv& csv) {
  std::map<double, io::ChartSeries> by_value;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const double v = *csv.number(r, "sweep_value");
    io::ChartSeries& s = by_value[v];
    s.label = "value " + Label(v);
    const double mean = *csv.number(r, "mean_satisfied");
    const double sd = csv.number(r, "std_satisfied").value_or(0.0);
    s.x.push_back(*csv.number(r, "iteration"));
    s.y.push_back(mean);
    s.lo.push_back(std::max(0.0, mean - sd));
    s.hi.push_back(std::min(1.0, mean + sd));
  }
  io::ChartSpec spec{"Convergence paths", "best responses", "satisfied proportion", {}, 0.0,
                     1.0};
  if (by_value.size() == 1) by_value.begin()->second.label = "mean";
  for (auto& [v, s] : by_value) spec.series.push_back(std::move(s));
  return spec;
}

std::optional<io::ChartSpec> AggregatesChart(const Csv& csv) {
  io::ChartSeries s;
  s.label = "mean iterations";
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto mean = csv.number(r, "mean_iterations");
    if (!mean) continue;
    const double sd = csv.number(r, "std_iterations").value_or(0.0);
    s.x.push_back(*csv.number(r, "sweep_value"));
    s.y.push_back(*mean);
    s.lo.push_back(*mean - sd);
    s.hi.push_back(*mean + sd);
  }
  if (s.x.empty()) return std::nullopt;
  return io::ChartSpec{"Convergence time", "sweep value", "best responses", {std::move(s)}, std::nullopt, std::nullopt};
}

std::optional<io::ChartSpec> WelfareChart(const Csv& csv) {
  std::map<std::string, io::ChartSeries> by_class;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto mean = csv.number(r, "mean_utility");
    if (!mean) continue;
    const std::string& cls = csv.at(r, "class");
    io::ChartSeries& s = by_class[cls];
    s.label = cls;
    const double sd = csv.number(r, "std_utility").value_or(0.0);
    s.x.push_back(*csv.number(r, "sweep_value"));
    s.y.push_back(*mean);
    s.lo.push_back(*mean - sd);
    s.hi.push_back(*mean + sd);
  }
  if (by_class.empty()) return std::nullopt;
  io::ChartSpec spec{"Welfare", "sweep value", "mean utility", {}, std::nullopt, std::nullopt};
  for (auto& [cls, s] : by_class) spec.series.push_back(std::move(s));
  return spec;
}

std::optional<io::ChartSpec> ShocksChart(const Csv& csv) {
  // Plot against whichever shock parameter varies (shock size by default).
  bool size_varies = false;
  for (std::size_t r = 1; r < csv.rows.size(); ++r) {
    size_varies = size_varies || csv.at(r, "shock_size") != csv.at(0, "shock_size");
  }
  bool proportion_varies = false;
  for (std::size_t r = 1; r < csv.rows.size(); ++r) {
    proportion_varies =
        proportion_varies || csv.at(r, "shocked_proportion") != csv.at(0, "shocked_proportion");
  }
  const std::string x_column =
      proportion_varies && !size_varies ? "shocked_proportion" : "shock_size";
  io::ChartSeries prop{"propagation", {}, {}, {}, {}};
  io::ChartSeries reconv{"T1/T0", {}, {}, {}, {}};
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const double x = *csv.number(r, x_column);
    auto add = [&](io::ChartSeries& s, const char* mean_col, const char* std_col) {
      const auto mean = csv.number(r, mean_col);
      if (!mean) return;
      const double sd = csv.number(r, std_col).value_or(0.0);
      s.x.push_back(x);
      s.y.push_back(*mean);
      s.lo.push_back(*mean - sd);
      s.hi.push_back(*mean + sd);
    };
    add(prop, "propagation_mean", "propagation_std");
    add(reconv, "reconv_norm_mean", "reconv_norm_std");
  }
  io::ChartSpec spec{"Shocks", x_column == "shock_size" ? "shock size" : "shocked proportion",
                     "fraction", {}, std::nullopt, std::nullopt};
  if (!prop.x.empty()) spec.series.push_back(std::move(prop));
  if (!reconv.x.empty()) spec.series.push_back(std::move(reconv));
  if (spec.series.empty()) return std::nullopt;
  return spec;
}

}  // namespace

void RegisterPlot(CLI::App& app, Action& action) {
  struct Flags {
    std::string bundle;
    std::string out;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* cmd = app.add_subcommand("plot", "Render SVG charts from a run or sweep bundle");
  cmd->add_option("--bundle", f->bundle, "Directory written by run, shock or sweep")->required();
  cmd->add_option("--out", f->out, "Directory for the SVG files (default: the bundle)");

  cmd->callback([f, &action] {
    action = [f] {
      const fs::path bundle = f->bundle;
      if (!fs::is_directory(bundle)) {
        throw io::IoError("bundle directory \"" + bundle.string() + "\" does not exist");
      }
      const fs::path out = f->out.empty() ? bundle : fs::path(f->out);
      using Builder = std::optional<io::ChartSpec> (*)(const Csv&);
      const std::vector<std::tuple<const char*, const char*, Builder>> charts = {
          {"series.csv", "series.svg", SeriesChart},
          {"paths.csv", "paths.svg", PathsChart},
          {"aggregates.csv", "convergence.svg", AggregatesChart},
          {"welfare.csv", "welfare.svg", WelfareChart},
          {"shocks.csv", "shocks.svg", ShocksChart},
      };
      std::size_t written = 0;
      for (const auto& [input, output, build] : charts) {
        const std::optional<Csv> csv = ReadCsv(bundle / input);
        if (!csv) continue;
        std::optional<io::ChartSpec> spec;
        try {
          spec = build(*csv);
        } catch (const std::invalid_argument&) {
          throw io::ParseError(std::string("non-numeric field in ") + input, "");
        }
        if (!spec) continue;
        io::WriteFile(out / output, io::RenderLineChart(*spec));
        Report("wrote " + (out / output).string());
        ++written;
      }
      if (written == 0) {
        throw PreconditionError("no plottable CSV files in \"" + bundle.string() + "\"");
      }
      return 0;
    };
  });
}

}  // namespace tradenet::cli
