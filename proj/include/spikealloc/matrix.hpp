// matrix.hpp - dense row-major matrix used for the vehicle x task tables.
#ifndef SPIKEALLOC_MATRIX_HPP
#define SPIKEALLOC_MATRIX_HPP

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace spikealloc
{

template <typename T> class Matrix
{
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
            : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    // Nested-list construction, mostly for tests: Matrix<double>{{1, 2}, {3, 4}}
    Matrix(std::initializer_list<std::initializer_list<T>> rows)
            : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0)
    {
        data_.reserve(rows_ * cols_);
        for (const auto &row : rows)
        {
            if (row.size() != cols_)
            {
                throw std::invalid_argument("ragged matrix initializer");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    T &operator()(std::size_t r, std::size_t c)
    {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    const T &operator()(std::size_t r, std::size_t c) const
    {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const
    {
        return {data_.data() + r * cols_, cols_};
    }

    std::span<T> flat() noexcept { return data_; }
    std::span<const T> flat() const noexcept { return data_; }

    bool operator==(const Matrix &) const = default;

private:
    std::size_t rows_{0};
    std::size_t cols_{0};
    std::vector<T> data_;
};

} // namespace spikealloc

#endif
