#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace maxstable {

// A sequence X_1, X_2, ... of d-dimensional field values stored row-major in
// one buffer. Row k (0-based) holds X_{k+1}.
class FieldSequence {
 public:
  FieldSequence() = default;
  explicit FieldSequence(int d) : d_(d) {}

  int dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return d_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(d_); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> operator[](std::size_t k) const noexcept {
    return {data_.data() + k * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  std::span<double> operator[](std::size_t k) noexcept {
    return {data_.data() + k * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }

  /// Appends an uninitialized row and returns it.
  std::span<double> append() {
    data_.resize(data_.size() + static_cast<std::size_t>(d_));
    return (*this)[size() - 1];
  }
  void push_back(std::span<const double> row) {
    assert(row.size() == static_cast<std::size_t>(d_));
    data_.insert(data_.end(), row.begin(), row.end());
  }
  void append(const FieldSequence& other) {
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  }
  void pop_back() { data_.resize(data_.size() - static_cast<std::size_t>(d_)); }
  void clear() noexcept { data_.clear(); }
  void reserve(std::size_t rows) { data_.reserve(rows * static_cast<std::size_t>(d_)); }
  void reset(int d) {
    d_ = d;
    data_.clear();
  }

  std::span<const double> flat() const noexcept { return data_; }

 private:
  int d_ = 0;
  std::vector<double> data_;
};

}  // namespace maxstable
