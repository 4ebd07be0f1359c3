#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcran {

/// Dense row-major 2-D array with value semantics.
template <class T>
class Array2 {
public:
    Array2() = default;
    Array2(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool has_shape(std::size_t r, std::size_t c) const noexcept {
        return rows_ == r && cols_ == c;
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    bool operator==(const Array2&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Dense row-major 3-D array, indexed (a, b, c).
template <class T>
class Array3 {
public:
    Array3() = default;
    Array3(std::size_t n0, std::size_t n1, std::size_t n2, T fill = T{})
        : n0_(n0), n1_(n1), n2_(n2), data_(n0 * n1 * n2, fill) {}

    T& operator()(std::size_t a, std::size_t b, std::size_t c) {
        return data_[(a * n1_ + b) * n2_ + c];
    }
    const T& operator()(std::size_t a, std::size_t b, std::size_t c) const {
        return data_[(a * n1_ + b) * n2_ + c];
    }

    [[nodiscard]] std::size_t dim0() const noexcept { return n0_; }
    [[nodiscard]] std::size_t dim1() const noexcept { return n1_; }
    [[nodiscard]] std::size_t dim2() const noexcept { return n2_; }
    [[nodiscard]] bool has_shape(std::size_t a, std::size_t b, std::size_t c) const noexcept {
        return n0_ == a && n1_ == b && n2_ == c;
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    bool operator==(const Array3&) const = default;

private:
    std::size_t n0_ = 0;
    std::size_t n1_ = 0;
    std::size_t n2_ = 0;
    std::vector<T> data_;
};

class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace hcran
