#ifndef COSMOS_TENSOR_H_
#define COSMOS_TENSOR_H_

#include <cstddef>
#include <span>
#include <vector>

namespace cosmos {

// Dense row-major matrix of doubles. Vectors are 1 x n.
class Tensor {
 public:
  Tensor() = default;
  Tensor(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Tensor(size_t rows, size_t cols, std::vector<double> data);

  static Tensor RowVector(std::span<const double> values);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  const std::vector<double>& values() const { return data_; }

  void Fill(double v);
  // this += other (same shape).
  void AddInPlace(const Tensor& other);
  bool SameShape(const Tensor& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

// Fresh products through the dispatched kernels.
Tensor MatMul(const Tensor& a, const Tensor& b);    // a * b
Tensor MatMulNT(const Tensor& a, const Tensor& b);  // a * b^T
Tensor MatMulTN(const Tensor& a, const Tensor& b);  // a^T * b

}  // namespace cosmos

#endif  // COSMOS_TENSOR_H_
