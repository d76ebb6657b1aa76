#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hetsim {

// splitmix64 finalizer. Bijective on 64-bit words, used to decorrelate seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for trial `trial_id` under `master_seed`. Pure function of its
// arguments, so any worker may run any trial and results never depend on
// scheduling. Extending a run keeps the seeds of earlier trials unchanged.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_id) {
  return mix64(master_seed + 0x9E3779B97F4A7C15ULL * (trial_id + 1));
}

// Dense row-major matrix of doubles. Just enough for gain/rate tables.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace hetsim
