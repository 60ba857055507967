#include "output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "config.hpp"

namespace kickho::cli {

namespace {

std::ofstream open_for_writing(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open " + path + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw OutputError("write to " + path + " failed");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const Provenance& provenance, const Table& table) {
  auto out = open_for_writing(path);
  out << "# kickho " << provenance.version << "\n";
  out << "# command: " << provenance.command << "\n";
  for (const auto& [k, v] : provenance.config) out << "# " << k << " = " << v << "\n";
  for (const auto& note : provenance.notes) out << "# " << note << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw OutputError("row width does not match the column count in " + path);
    }
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_real(row[c]);
    out << "\n";
  }
  finish(out, path);
}

CsvFile read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw OutputError("cannot open " + path);
  CsvFile file;
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') {
      file.comments.push_back(line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1));
      continue;
    }
    if (line.empty()) continue;
    if (!have_columns) {
      file.table.columns = split(line);
      have_columns = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(parse_real("csv cell", cell));
    if (row.size() != file.table.columns.size()) {
      throw OutputError("ragged row in " + path);
    }
    file.table.rows.push_back(std::move(row));
  }
  if (!have_columns) throw OutputError(path + " has no column header");
  return file;
}

void write_sidecar(const std::string& path, const Provenance& provenance, const Table& table,
                   const nlohmann::json& summary) {
  nlohmann::ordered_json doc;
  doc["version"] = provenance.version;
  doc["command"] = provenance.command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : provenance.config) config[k] = v;
  doc["config"] = config;
  doc["notes"] = provenance.notes;
  doc["columns"] = table.columns;
  doc["rows"] = table.rows.size();
  doc["summary"] = summary;
  auto out = open_for_writing(path);
  out << doc.dump(2) << "\n";
  finish(out, path);
}

void write_plot_script(const std::string& path, const std::string& csv_path, PlotKind kind,
                       const std::string& title, const std::vector<std::string>& columns,
                       std::size_t xcol, std::size_t ycol) {
  auto out = open_for_writing(path);
  out << "# gnuplot script; run: gnuplot -persist " << path << "\n";
  out << "set datafile separator ','\n";
  out << "set datafile commentschars '#'\n";
  out << "set key autotitle columnhead\n";
  out << "set title '" << title << "'\n";
  out << "set xlabel '" << columns.at(xcol) << "'\n";
  out << "set ylabel '" << columns.at(ycol) << "'\n";
  switch (kind) {
    case PlotKind::Lines:
      out << "plot '" << csv_path << "' using " << xcol + 1 << ":" << ycol + 1
          << " with lines\n";
      break;
    case PlotKind::Points:
      out << "plot '" << csv_path << "' using " << xcol + 1 << ":" << ycol + 1
          << " with points pt 7 ps 0.3\n";
      break;
    case PlotKind::Grid:
      out << "set view map\nset size ratio -1\n";
      out << "splot '" << csv_path << "' using " << xcol + 1 << ":" << ycol + 1 << ":"
          << columns.size() << " with image\n";
      break;
  }
  finish(out, path);
}

std::string derived_path(const std::string& csv_path, const std::string& suffix) {
  const std::string ext = ".csv";
  if (csv_path.size() > ext.size() &&
      csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0) {
    return csv_path.substr(0, csv_path.size() - ext.size()) + "_" + suffix + ext;
  }
  return csv_path + "_" + suffix + ext;
}

}  // namespace kickho::cli
