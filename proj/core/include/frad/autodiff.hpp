//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#ifndef FRAD_AUTODIFF_HPP
#define FRAD_AUTODIFF_HPP

#include <Eigen/Core>
#include <vector>

namespace frad::ad {

using Mat = Eigen::MatrixXd;

class Graph;

/// Lightweight handle to a tape node.
class Var {
 public:
  Var() = default;
  bool valid() const { return graph_ != nullptr; }
  const Mat& value() const;
  int rows() const { return static_cast<int>(value().rows()); }
  int cols() const { return static_cast<int>(value().cols()); }
  /// Adjoint accumulated by the most recent backward(); invalid Var when
  /// this node was not reached.
  Var grad() const;
  int id() const { return id_; }
  Graph* graph() const { return graph_; }

 private:
  friend class Graph;
  Var(Graph* graph, int id) : graph_(graph), id_(id) {}
  Graph* graph_ = nullptr;
  int id_ = -1;
};

/// Define-by-run reverse-mode tape over dense matrices. backward() emits
/// the adjoint computation as ordinary tape nodes, so gradients are
/// themselves differentiable (forces as coordinate gradients can feed a
/// loss whose parameter gradient is then exact).
class Graph {
 public:
  Var constant(Mat value);  ///< no gradient flows into it
  Var leaf(Mat value);      ///< parameters and differentiable inputs

  /// Reverse sweep from a 1x1 root. Adjoints are reset first; accumulation
  /// order is fixed by node id, so results are bit-reproducible.
  void backward(const Var& root);

  size_t size() const { return nodes_.size(); }

  // --- primitive ops (free-function style members) ---
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var neg(Var a);
  Var mul(Var a, Var b);  ///< elementwise
  Var matmul(Var a, Var b);
  Var scale(Var a, double s);
  Var add_scalar(Var a, double s);
  Var recip(Var a);
  Var sqrt_(Var a);
  Var exp_(Var a);
  Var sigmoid(Var a);
  Var sin_(Var a);
  Var cos_(Var a);
  Var block(Var a, int r, int c, int h, int w);
  Var pad(Var a, int rows, int cols, int at_r, int at_c);
  Var sum(Var a);  ///< 1x1
  Var transpose(Var a);

  // --- composed helpers ---
  Var silu(Var a) { return mul(a, sigmoid(a)); }
  Var rowsum(Var a);                      ///< (r x c) -> (r x 1)
  Var colsum(Var a);                      ///< (r x c) -> (1 x c)
  Var broadcast_col(Var col, int n);      ///< (r x 1) -> (r x n)
  Var broadcast_row(Var row, int n);      ///< (1 x c) -> (n x c)
  Var concat_cols(Var a, Var b);
  Var mean_all(Var a);

 private:
  enum class Op {
    Const,
    Leaf,
    Add,
    Sub,
    Neg,
    Mul,
    MatMul,
    Scale,
    AddScalar,
    Recip,
    Sqrt,
    Exp,
    Sigmoid,
    Sin,
    Cos,
    Block,
    Pad,
    Sum,
    Transpose,
  };

  struct Node {
    Op op;
    int a = -1, b = -1;
    Mat value;
    double aux = 0.0;
    int r = 0, c = 0, h = 0, w = 0;  // block/pad geometry
    int adjoint = -1;
    bool needs_grad = false;
  };

  friend class Var;

  Var emit(Node node);
  Var wrap(int id) { return Var(this, id); }
  void accumulate(int node, Var contribution);
  const Node& at(int id) const { return nodes_[id]; }

  std::vector<Node> nodes_;
};

}  // namespace frad::ad

#endif
