#pragma once

// Minimal matrix-valued reverse-mode automatic differentiation.
//
// A Tape records every operation as a node holding its value and a closure
// that pushes the node's gradient to its parents. Nodes are appended in
// topological order, so backward() is a single reverse sweep. Constants are
// nodes that never receive gradient; an op whose parents are all constants
// records no closure.

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

namespace hardneg::ad {

using Matrix = Eigen::MatrixXd;

class Tape;

class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  // Gradient of the last backward() target with respect to this node; a
  // zero matrix if none flowed here.
  Matrix grad() const;
  double scalar() const;  // value of a 1x1 node
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool valid() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* t, int id) : tape_(t), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, const Matrix& upstream)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var variable(Matrix value);
  Var constant(Matrix value);

  // Seeds d(out)/d(out) = 1 and accumulates gradients into every node that
  // requires one. out must be 1x1. Gradients from a previous call are cleared.
  void backward(const Var& out);

  std::size_t size() const { return nodes_.size(); }

  // Internal: used by the op functions below.
  bool requires_grad(const Var& v) const { return nodes_[v.id_].requires_grad; }
  const Matrix& value_of(int id) const { return nodes_[id].value; }
  Matrix grad_of(int id) const;
  void accumulate(const Var& v, const Matrix& g);
  Var record(Matrix value, std::initializer_list<Var> parents, Backward fn);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool has_grad = false;
    Backward backward;
  };
  std::vector<Node> nodes_;
};

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var scale(const Var& a, double s);
// Softmax along each row, with max subtraction.
Var row_softmax(const Var& a);
// Mean over rows: r x c -> 1 x c.
Var mean_rows(const Var& a);
Var sum(const Var& a);
Var concat_rows(const Var& top, const Var& bottom);
Var top_rows(const Var& a, Eigen::Index n);
// Cosine of two equally shaped vectors -> 1x1. Norms are floored at 1e-12.
Var cosine(const Var& a, const Var& b);
// log sum exp over all entries -> 1x1.
Var logsumexp(const Var& a);
// log sum exp of each row -> r x 1.
Var row_logsumexp(const Var& a);
// Diagonal of a square matrix -> n x 1.
Var diagonal(const Var& a);
Var element(const Var& a, Eigen::Index r, Eigen::Index c);
// Assembles 1x1 nodes into a rows x cols matrix, row-major.
Var assemble(std::span<const Var> scalars, Eigen::Index rows, Eigen::Index cols);

}  // namespace hardneg::ad
