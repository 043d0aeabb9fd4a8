// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/core/tensor.hpp"

#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace scenegen {

std::int64_t shape_size(const Shape& s) {
  std::int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ")";
  return os.str();
}

namespace detail {

bool& grad_mode() {
  thread_local bool mode = true;
  return mode;
}

}  // namespace detail

Tensor Tensor::zeros(const Shape& s) {
  auto n = std::make_shared<detail::TensorNode>();
  n->shape = s;
  n->value = Eigen::ArrayXd::Zero(shape_size(s));
  return Tensor(std::move(n));
}

Tensor Tensor::constant(const Shape& s, double v) {
  auto n = std::make_shared<detail::TensorNode>();
  n->shape = s;
  n->value = Eigen::ArrayXd::Constant(shape_size(s), v);
  return Tensor(std::move(n));
}

Tensor Tensor::from_vector(const Shape& s, std::vector<double> data) {
  if (static_cast<std::int64_t>(data.size()) != shape_size(s))
    throw std::invalid_argument("from_vector: data size " + std::to_string(data.size()) +
                                " does not match shape " + shape_str(s));
  auto n = std::make_shared<detail::TensorNode>();
  n->shape = s;
  n->value = Eigen::Map<const Eigen::ArrayXd>(data.data(), data.size());
  return Tensor(std::move(n));
}

Tensor Tensor::from_array(const Shape& s, Eigen::ArrayXd data) {
  if (data.size() != shape_size(s))
    throw std::invalid_argument("from_array: data size does not match shape " + shape_str(s));
  auto n = std::make_shared<detail::TensorNode>();
  n->shape = s;
  n->value = std::move(data);
  return Tensor(std::move(n));
}

Tensor Tensor::param(const Shape& s) {
  Tensor t = zeros(s);
  t.set_requires_grad(true);
  return t;
}

int Tensor::dim(int i) const {
  if (i < 0) i += ndim();
  if (i < 0 || i >= ndim()) throw std::out_of_range("Tensor::dim index out of range");
  return n_->shape[i];
}

double Tensor::item() const {
  if (size() != 1) throw std::logic_error("Tensor::item on non-scalar of shape " + shape_str(shape()));
  return n_->value(0);
}

const Eigen::ArrayXd& Tensor::grad() const {
  n_->ensure_grad();
  return n_->grad;
}

void Tensor::zero_grad() {
  n_->grad = Eigen::ArrayXd::Zero(n_->value.size());
}

void Tensor::backward() {
  if (size() != 1) throw std::logic_error("backward() requires a scalar root");
  // Iterative post-order topological sort over the tape.
  std::vector<detail::TensorNode*> order;
  std::unordered_set<detail::TensorNode*> visited;
  std::vector<std::pair<detail::TensorNode*, size_t>> stack;
  stack.emplace_back(n_.get(), 0);
  visited.insert(n_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::TensorNode* p = node->parents[next++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  n_->ensure_grad();
  n_->grad(0) = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::TensorNode* node = *it;
    if (node->backprop) node->backprop(*node);
  }
}

Tensor Tensor::detach() const {
  auto n = std::make_shared<detail::TensorNode>();
  n->shape = n_->shape;
  n->value = n_->value;
  return Tensor(std::move(n));
}

Tensor make_op(Shape shape, Eigen::ArrayXd value, std::vector<Tensor> parents,
               std::function<void(detail::TensorNode&)> backprop) {
  auto n = std::make_shared<detail::TensorNode>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  bool track = detail::grad_mode();
  bool any = false;
  if (track) {
    for (const auto& p : parents)
      if (p.requires_grad()) { any = true; break; }
  }
  if (track && any) {
    n->requires_grad = true;
    n->parents.reserve(parents.size());
    for (auto& p : parents) n->parents.push_back(p.node());
    n->backprop = std::move(backprop);
  }
  return Tensor(std::move(n));
}

}  // namespace scenegen
