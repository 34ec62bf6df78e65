#include "cosmos/tensor.h"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "cosmos/kernels.h"

namespace cosmos {

Tensor::Tensor(size_t rows, size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("tensor data size mismatch");
  }
}

Tensor Tensor::RowVector(std::span<const double> values) {
  return Tensor(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

void Tensor::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::AddInPlace(const Tensor& other) {
  if (!SameShape(other)) throw std::invalid_argument("AddInPlace shape mismatch");
  kernels::Axpy(1.0, other.data(), data(), data_.size());
}

static void ShapeError(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                              " and " + std::to_string(b.rows()) + "x" +
                              std::to_string(b.cols()));
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) ShapeError("MatMul", a, b);
  Tensor c(a.rows(), b.cols());
  kernels::GemmNN(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  return c;
}

Tensor MatMulNT(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.cols()) ShapeError("MatMulNT", a, b);
  Tensor c(a.rows(), b.rows());
  kernels::GemmNT(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.rows());
  return c;
}

Tensor MatMulTN(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) ShapeError("MatMulTN", a, b);
  Tensor c(a.cols(), b.cols());
  kernels::GemmTN(a.data(), b.data(), c.data(), a.cols(), a.rows(), b.cols());
  return c;
}

}  // namespace cosmos
