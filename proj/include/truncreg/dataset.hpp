#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "truncreg/mat.hpp"

namespace truncreg {

// One observed pair: feature row (view into the owning dataset) and label.
struct Sample {
  std::span<const double> x;
  double y = 0.0;
};

// n feature rows of dimension k, stored contiguously, with labels.
struct Dataset {
  int k = 0;
  std::vector<double> xs;  // n * k, row-major
  Vec ys;

  Dataset() = default;
  explicit Dataset(int dim) : k(dim) {}

  std::size_t n() const { return ys.size(); }

  Sample sample(std::size_t i) const {
    return {{xs.data() + i * static_cast<std::size_t>(k),
             static_cast<std::size_t>(k)},
            ys[i]};
  }

  void append(std::span<const double> x, double y) {
    if (static_cast<int>(x.size()) != k)
      throw std::invalid_argument("Dataset::append: row dimension mismatch");
    xs.insert(xs.end(), x.begin(), x.end());
    ys.push_back(y);
  }

  Dataset subset(std::span<const std::size_t> idx) const {
    Dataset out(k);
    out.xs.reserve(idx.size() * k);
    out.ys.reserve(idx.size());
    for (std::size_t i : idx) out.append(sample(i).x, ys[i]);
    return out;
  }

  DenseMatrix design_matrix() const {
    DenseMatrix m(static_cast<int>(n()), k);
    m.a = xs;
    return m;
  }
};

}  // namespace truncreg
