// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace scenegen {

using Shape = std::vector<int>;

std::int64_t shape_size(const Shape& s);
std::string shape_str(const Shape& s);

namespace detail {

struct TensorNode {
  Shape shape;
  Eigen::ArrayXd value;
  Eigen::ArrayXd grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  // Accumulates this node's grad into its parents' grads.
  std::function<void(TensorNode&)> backprop;

  void ensure_grad() {
    if (grad.size() != value.size()) grad = Eigen::ArrayXd::Zero(value.size());
  }
};

// Global switch: when off, ops produce detached constants (no tape).
bool& grad_mode();

}  // namespace detail

// RAII scope that disables tape construction (frozen-model inference).
class NoGradGuard {
 public:
  NoGradGuard() : prev_(detail::grad_mode()) { detail::grad_mode() = false; }
  ~NoGradGuard() { detail::grad_mode() = prev_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

// A dense row-major double tensor with reverse-mode autodiff. Cheap to copy
// (shared handle). All shapes are logical views over a flat Eigen array.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(const Shape& s);
  static Tensor constant(const Shape& s, double v);
  static Tensor from_vector(const Shape& s, std::vector<double> data);
  static Tensor from_array(const Shape& s, Eigen::ArrayXd data);
  static Tensor scalar(double v) { return constant({1}, v); }
  // A zero-initialized trainable leaf.
  static Tensor param(const Shape& s);

  bool defined() const { return static_cast<bool>(n_); }
  const Shape& shape() const { return n_->shape; }
  int ndim() const { return static_cast<int>(n_->shape.size()); }
  int dim(int i) const;
  std::int64_t size() const { return n_->value.size(); }

  bool requires_grad() const { return n_->requires_grad; }
  void set_requires_grad(bool b) { n_->requires_grad = b; }

  double* data() { return n_->value.data(); }
  const double* data() const { return n_->value.data(); }
  Eigen::ArrayXd& array() { return n_->value; }
  const Eigen::ArrayXd& array() const { return n_->value; }
  double item() const;
  double at(std::int64_t i) const { return n_->value(i); }

  const Eigen::ArrayXd& grad() const;
  void zero_grad();
  // Reverse-mode sweep from a scalar root.
  void backward();

  // Same values, no tape history. Shares no node with this tensor.
  Tensor detach() const;

  std::shared_ptr<detail::TensorNode> node() const { return n_; }
  explicit Tensor(std::shared_ptr<detail::TensorNode> n) : n_(std::move(n)) {}

 private:
  std::shared_ptr<detail::TensorNode> n_;
};

// Builds an op node. Parents whose values feed the backprop closure must be
// captured by the closure itself; `parents` only wires the autodiff graph.
Tensor make_op(Shape shape, Eigen::ArrayXd value, std::vector<Tensor> parents,
               std::function<void(detail::TensorNode&)> backprop);

}  // namespace scenegen
