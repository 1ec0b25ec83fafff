#pragma once

#include <iosfwd>
#include <string>

#include "truncreg/dataset.hpp"

namespace truncreg {

// Shortest decimal text that round-trips the double exactly. Locale-free.
std::string format_double(double v);

// CSV with header "x1,...,xk,y", one observed pair per row.
void write_csv(std::ostream& os, const Dataset& data);
Dataset load_csv(std::istream& is);
Dataset load_csv_file(const std::string& path);

// Write via a temporary file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace truncreg
