#include "truncreg/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "truncreg/errors.hpp"

namespace truncreg {

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& os, const Dataset& data) {
  for (int j = 1; j <= data.k; ++j) os << "x" << j << ",";
  os << "y\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto s = data.sample(i);
    for (double v : s.x) os << format_double(v) << ",";
    os << format_double(s.y) << "\n";
  }
}

namespace {

double parse_field(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw Error("csv: bad number '" + std::string(tok) + "' on line " +
                std::to_string(line_no));
  return v;
}

}  // namespace

Dataset load_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  int k = 0;
  {
    std::size_t pos = 0, fields = 0;
    while (true) {
      std::size_t next = line.find(',', pos);
      ++fields;
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (fields < 2) throw Error("csv: header must be x1,...,xk,y");
    k = static_cast<int>(fields) - 1;
  }
  Dataset data(k);
  Vec row(k);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t pos = 0;
    for (int j = 0; j < k; ++j) {
      const std::size_t next = line.find(',', pos);
      if (next == std::string::npos)
        throw Error("csv: short row on line " + std::to_string(line_no));
      row[j] = parse_field(std::string_view(line).substr(pos, next - pos),
                           line_no);
      pos = next + 1;
    }
    if (line.find(',', pos) != std::string::npos)
      throw Error("csv: too many fields on line " + std::to_string(line_no));
    const double y = parse_field(std::string_view(line).substr(pos), line_no);
    data.append(row, y);
  }
  return data;
}

Dataset load_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "'");
  return load_csv(f);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + tmp + "' for writing");
    f << contents;
    if (!f) throw Error("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error("rename '" + tmp + "' -> '" + path + "' failed");
}

}  // namespace truncreg
