#include "fmd/csv.hpp"

#include "fmd/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace fmd {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, long row, long col) {
  size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(cell, &consumed);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + cell + "'", row, col);
  }
  if (consumed != cell.size()) throw ParseError("trailing characters in '" + cell + "'", row, col);
  if (!std::isfinite(value)) throw ParseError("non-finite value", row, col);
  return value;
}

}  // namespace

FunctionalSample read_curves_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input", 1, 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_line(line);
  if (header.size() < 3 || header[0] != "t")
    throw ParseError("header must be t,<t_1>,...,<t_p>[,label]", 1, 1);

  bool labeled = header.back() == "label";
  const size_t p = header.size() - 1 - (labeled ? 1 : 0);
  if (p < 2) throw ParseError("need at least 2 grid points", 1, 2);

  Eigen::VectorXd points(static_cast<Index>(p));
  for (size_t i = 0; i < p; ++i)
    points(static_cast<Index>(i)) = parse_cell(header[i + 1], 1, static_cast<long>(i + 2));

  FunctionalSample sample;
  sample.grid = make_trapezoid_grid(points);

  std::vector<Eigen::VectorXd> rows;
  std::vector<int> labels;
  long row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()),
                       row_no, static_cast<long>(cells.size()));
    Eigen::VectorXd values(static_cast<Index>(p));
    for (size_t i = 0; i < p; ++i)
      values(static_cast<Index>(i)) = parse_cell(cells[i + 1], row_no, static_cast<long>(i + 2));
    rows.push_back(std::move(values));
    if (labeled) {
      const double lab = parse_cell(cells.back(), row_no, static_cast<long>(cells.size()));
      labels.push_back(static_cast<int>(lab));
    }
  }
  if (rows.empty()) throw ParseError("no curve rows", row_no, 1);

  sample.curves.resize(static_cast<Index>(rows.size()), static_cast<Index>(p));
  for (size_t i = 0; i < rows.size(); ++i) sample.curves.row(static_cast<Index>(i)) = rows[i];
  sample.labels = std::move(labels);
  return sample;
}

FunctionalSample read_curves_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return read_curves_csv(in);
}

void write_curves_csv(std::ostream& out, const FunctionalSample& sample) {
  const bool labeled = !sample.labels.empty();
  out << "t";
  for (Index i = 0; i < sample.grid.size(); ++i) out << ',' << format_double(sample.grid.points(i));
  if (labeled) out << ",label";
  out << '\n';
  for (Index r = 0; r < sample.n(); ++r) {
    out << r;
    for (Index i = 0; i < sample.p(); ++i) out << ',' << format_double(sample.curves(r, i));
    if (labeled) out << ',' << sample.labels[static_cast<size_t>(r)];
    out << '\n';
  }
}

void write_curves_csv_file(const std::string& path, const FunctionalSample& sample) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_curves_csv(out, sample);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace fmd
