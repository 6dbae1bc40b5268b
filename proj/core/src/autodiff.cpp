//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#include "frad/autodiff.hpp"

#include <cmath>
#include <string>

#include "frad/errors.hpp"

namespace frad::ad {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw NumericalError(std::string("autodiff: ") + what);
}

}  // namespace

const Mat& Var::value() const {
  require(valid(), "value() on an empty Var");
  return graph_->at(id_).value;
}

Var Var::grad() const {
  require(valid(), "grad() on an empty Var");
  const int adj = graph_->at(id_).adjoint;
  return adj < 0 ? Var() : Var(graph_, adj);
}

Var Graph::emit(Node node) {
  nodes_.push_back(std::move(node));
  return wrap(static_cast<int>(nodes_.size()) - 1);
}

Var Graph::constant(Mat value) {
  Node n;
  n.op = Op::Const;
  n.value = std::move(value);
  return emit(std::move(n));
}

Var Graph::leaf(Mat value) {
  Node n;
  n.op = Op::Leaf;
  n.value = std::move(value);
  n.needs_grad = true;
  return emit(std::move(n));
}

Var Graph::add(Var a, Var b) {
  require(a.graph() == this && b.graph() == this, "graph mismatch");
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add shape");
  Node n;
  n.op = Op::Add;
  n.a = a.id();
  n.b = b.id();
  n.value = a.value() + b.value();
  n.needs_grad = at(n.a).needs_grad || at(n.b).needs_grad;
  return emit(std::move(n));
}

Var Graph::sub(Var a, Var b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "sub shape");
  Node n;
  n.op = Op::Sub;
  n.a = a.id();
  n.b = b.id();
  n.value = a.value() - b.value();
  n.needs_grad = at(n.a).needs_grad || at(n.b).needs_grad;
  return emit(std::move(n));
}

Var Graph::neg(Var a) {
  Node n;
  n.op = Op::Neg;
  n.a = a.id();
  n.value = -a.value();
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::mul(Var a, Var b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "mul shape");
  Node n;
  n.op = Op::Mul;
  n.a = a.id();
  n.b = b.id();
  n.value = a.value().cwiseProduct(b.value());
  n.needs_grad = at(n.a).needs_grad || at(n.b).needs_grad;
  return emit(std::move(n));
}

Var Graph::matmul(Var a, Var b) {
  require(a.cols() == b.rows(), "matmul shape");
  Node n;
  n.op = Op::MatMul;
  n.a = a.id();
  n.b = b.id();
  n.value = a.value() * b.value();
  n.needs_grad = at(n.a).needs_grad || at(n.b).needs_grad;
  return emit(std::move(n));
}

Var Graph::scale(Var a, double s) {
  Node n;
  n.op = Op::Scale;
  n.a = a.id();
  n.aux = s;
  n.value = s * a.value();
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::add_scalar(Var a, double s) {
  Node n;
  n.op = Op::AddScalar;
  n.a = a.id();
  n.aux = s;
  n.value = a.value().array() + s;
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::recip(Var a) {
  Node n;
  n.op = Op::Recip;
  n.a = a.id();
  n.value = a.value().cwiseInverse();
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::sqrt_(Var a) {
  Node n;
  n.op = Op::Sqrt;
  n.a = a.id();
  n.value = a.value().cwiseSqrt();
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::exp_(Var a) {
  Node n;
  n.op = Op::Exp;
  n.a = a.id();
  n.value = a.value().array().exp();
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::sigmoid(Var a) {
  Node n;
  n.op = Op::Sigmoid;
  n.a = a.id();
  n.value = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::sin_(Var a) {
  Node n;
  n.op = Op::Sin;
  n.a = a.id();
  n.value = a.value().array().sin();
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::cos_(Var a) {
  Node n;
  n.op = Op::Cos;
  n.a = a.id();
  n.value = a.value().array().cos();
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::block(Var a, int r, int c, int h, int w) {
  require(r >= 0 && c >= 0 && r + h <= a.rows() && c + w <= a.cols(),
          "block bounds");
  Node n;
  n.op = Op::Block;
  n.a = a.id();
  n.r = r;
  n.c = c;
  n.h = h;
  n.w = w;
  n.value = a.value().block(r, c, h, w);
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::pad(Var a, int rows, int cols, int at_r, int at_c) {
  require(at_r >= 0 && at_c >= 0 && at_r + a.rows() <= rows &&
              at_c + a.cols() <= cols,
          "pad bounds");
  Node n;
  n.op = Op::Pad;
  n.a = a.id();
  n.r = at_r;
  n.c = at_c;
  n.h = a.rows();
  n.w = a.cols();
  Mat value = Mat::Zero(rows, cols);
  value.block(at_r, at_c, a.rows(), a.cols()) = a.value();
  n.value = std::move(value);
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::sum(Var a) {
  Node n;
  n.op = Op::Sum;
  n.a = a.id();
  n.value = Mat::Constant(1, 1, a.value().sum());
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::transpose(Var a) {
  Node n;
  n.op = Op::Transpose;
  n.a = a.id();
  n.value = a.value().transpose();
  n.needs_grad = at(n.a).needs_grad;
  return emit(std::move(n));
}

Var Graph::rowsum(Var a) { return matmul(a, constant(Mat::Ones(a.cols(), 1))); }

Var Graph::colsum(Var a) { return matmul(constant(Mat::Ones(1, a.rows())), a); }

Var Graph::broadcast_col(Var col, int n) {
  require(col.cols() == 1, "broadcast_col wants a column");
  return matmul(col, constant(Mat::Ones(1, n)));
}

Var Graph::broadcast_row(Var row, int n) {
  require(row.rows() == 1, "broadcast_row wants a row");
  return matmul(constant(Mat::Ones(n, 1)), row);
}

Var Graph::concat_cols(Var a, Var b) {
  require(a.rows() == b.rows(), "concat_cols rows");
  const int total = a.cols() + b.cols();
  return add(pad(a, a.rows(), total, 0, 0), pad(b, a.rows(), total, 0, a.cols()));
}

Var Graph::mean_all(Var a) {
  return scale(sum(a), 1.0 / (static_cast<double>(a.rows()) * a.cols()));
}

void Graph::accumulate(int node, Var contribution) {
  if (nodes_[node].adjoint < 0) {
    nodes_[node].adjoint = contribution.id();
  } else {
    nodes_[node].adjoint = add(wrap(nodes_[node].adjoint), contribution).id();
  }
}

void Graph::backward(const Var& root) {
  require(root.graph() == this, "backward on foreign Var");
  require(root.rows() == 1 && root.cols() == 1, "backward root must be 1x1");
  for (Node& n : nodes_) n.adjoint = -1;

  const int root_id = root.id();
  nodes_[root_id].adjoint = constant(Mat::Ones(1, 1)).id();

  for (int i = root_id; i >= 0; --i) {
    const int adj = nodes_[i].adjoint;
    if (adj < 0 || !nodes_[i].needs_grad) continue;
    const Op op = nodes_[i].op;
    if (op == Op::Const || op == Op::Leaf) continue;

    const int ia = nodes_[i].a;
    const int ib = nodes_[i].b;
    const Var g = wrap(adj);
    const Var out = wrap(i);
    const Var a = wrap(ia);
    const Var b = ib >= 0 ? wrap(ib) : Var();
    const bool ga = ia >= 0 && nodes_[ia].needs_grad;
    const bool gb = ib >= 0 && nodes_[ib].needs_grad;

    switch (op) {
      case Op::Add:
        if (ga) accumulate(ia, g);
        if (gb) accumulate(ib, g);
        break;
      case Op::Sub:
        if (ga) accumulate(ia, g);
        if (gb) accumulate(ib, neg(g));
        break;
      case Op::Neg:
        if (ga) accumulate(ia, neg(g));
        break;
      case Op::Mul:
        if (ga) accumulate(ia, mul(g, b));
        if (gb) accumulate(ib, mul(g, a));
        break;
      case Op::MatMul:
        if (ga) accumulate(ia, matmul(g, transpose(b)));
        if (gb) accumulate(ib, matmul(transpose(a), g));
        break;
      case Op::Scale:
        if (ga) accumulate(ia, scale(g, nodes_[i].aux));
        break;
      case Op::AddScalar:
        if (ga) accumulate(ia, g);
        break;
      case Op::Recip:
        if (ga) accumulate(ia, neg(mul(g, mul(out, out))));
        break;
      case Op::Sqrt:
        if (ga) accumulate(ia, scale(mul(g, recip(out)), 0.5));
        break;
      case Op::Exp:
        if (ga) accumulate(ia, mul(g, out));
        break;
      case Op::Sigmoid:
        if (ga) accumulate(ia, mul(g, sub(out, mul(out, out))));
        break;
      case Op::Sin:
        if (ga) accumulate(ia, mul(g, cos_(a)));
        break;
      case Op::Cos:
        if (ga) accumulate(ia, neg(mul(g, sin_(a))));
        break;
      case Op::Block:
        if (ga) {
          accumulate(ia, pad(g, static_cast<int>(nodes_[ia].value.rows()),
                             static_cast<int>(nodes_[ia].value.cols()),
                             nodes_[i].r, nodes_[i].c));
        }
        break;
      case Op::Pad:
        if (ga) {
          accumulate(ia, block(g, nodes_[i].r, nodes_[i].c, nodes_[i].h,
                               nodes_[i].w));
        }
        break;
      case Op::Sum:
        if (ga) {
          const int rows = static_cast<int>(nodes_[ia].value.rows());
          const int cols = static_cast<int>(nodes_[ia].value.cols());
          accumulate(
              ia, matmul(matmul(constant(Mat::Ones(rows, 1)), g),
                         constant(Mat::Ones(1, cols))));
        }
        break;
      case Op::Transpose:
        if (ga) accumulate(ia, transpose(g));
        break;
      case Op::Const:
      case Op::Leaf:
        break;
    }
  }
}

}  // namespace frad::ad
