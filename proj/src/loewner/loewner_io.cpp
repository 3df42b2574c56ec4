#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "mcsle/errors.hpp"
#include "mcsle/loewner.hpp"

namespace mcsle {

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t expected, std::size_t row) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw InvalidInput("row " + std::to_string(row) + ": cannot parse '" + cell + "'");
    }
  }
  if (out.size() != expected)
    throw InvalidInput("row " + std::to_string(row) + ": expected " + std::to_string(expected) +
                       " columns, got " + std::to_string(out.size()));
  return out;
}

template <class F>
void for_each_row(std::istream& in, const std::string& header, std::size_t columns, F f) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw InvalidInput("expected CSV header '" + header + "', got '" + line + "'");
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    f(parse_row(line, columns, row));
  }
}

}  // namespace

void write_curve_csv(const Curve& c, std::ostream& out) {
  out << "t,re,im\n" << std::setprecision(17);
  for (std::size_t k = 0; k < c.points.size(); ++k)
    out << c.capacity_times[k] << ',' << c.points[k].real() << ',' << c.points[k].imag() << '\n';
}

void write_curve_csv(const Curve& c, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_curve_csv(c, f);
  if (!f) throw IoError("write failed for '" + path + "'");
}

Curve read_curve_csv(std::istream& in) {
  Curve c;
  for_each_row(in, "t,re,im", 3, [&](const std::vector<double>& r) {
    c.capacity_times.push_back(r[0]);
    c.points.emplace_back(r[1], r[2]);
  });
  c.validate();
  return c;
}

Curve read_curve_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return read_curve_csv(f);
}

void write_driving_csv(const DrivingSeries& d, std::ostream& out) {
  out << "t,w\n" << std::setprecision(17);
  for (std::size_t k = 0; k < d.size(); ++k) out << d.times[k] << ',' << d.values[k] << '\n';
}

DrivingSeries read_driving_csv(std::istream& in) {
  DrivingSeries d;
  for_each_row(in, "t,w", 2, [&](const std::vector<double>& r) {
    d.times.push_back(r[0]);
    d.values.push_back(r[1]);
  });
  d.validate();
  return d;
}

DrivingSeries read_driving_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return read_driving_csv(f);
}

}  // namespace mcsle
