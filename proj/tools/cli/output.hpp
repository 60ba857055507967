#ifndef KICKHO_CLI_OUTPUT_HPP
#define KICKHO_CLI_OUTPUT_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace kickho::cli {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest text that reads back to the same double: 17 significant digits.
std::string format_real(double v);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Provenance {
  std::string command;
  std::string version;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> notes;
};

/// Comment header ('#' lines: version, command, every resolved config key,
/// notes), then the column names, then one row per record.
void write_csv(const std::string& path, const Provenance& provenance, const Table& table);

struct CsvFile {
  std::vector<std::string> comments;  // without the leading '#'
  Table table;
};

CsvFile read_csv(const std::string& path);

void write_sidecar(const std::string& path, const Provenance& provenance, const Table& table,
                   const nlohmann::json& summary);

enum class PlotKind { Lines, Points, Grid };

/// gnuplot script drawing `ycol` against `xcol` (or the grid's third column).
void write_plot_script(const std::string& path, const std::string& csv_path, PlotKind kind,
                       const std::string& title, const std::vector<std::string>& columns,
                       std::size_t xcol, std::size_t ycol);

/// "run.csv" -> "run_suffix.csv"; paths without ".csv" get "_suffix.csv" appended.
std::string derived_path(const std::string& csv_path, const std::string& suffix);

}  // namespace kickho::cli

#endif
