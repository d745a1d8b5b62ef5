#include "hardneg/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "hardneg/error.hpp"

namespace hardneg::ad {

const Matrix& Var::value() const { return tape_->value_of(id_); }
Matrix Var::grad() const { return tape_->grad_of(id_); }

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw ShapeError("scalar() on a non-1x1 node");
  return v(0, 0);
}

Var Tape::variable(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, true, false, {}});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, false, false, {}});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Matrix Tape::grad_of(int id) const {
  const Node& n = nodes_[id];
  if (!n.has_grad) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::accumulate(const Var& v, const Matrix& g) {
  Node& n = nodes_[v.id_];
  if (!n.requires_grad) return;
  if (!n.has_grad) {
    n.grad = g;
    n.has_grad = true;
  } else {
    n.grad += g;
  }
}

Var Tape::record(Matrix value, std::initializer_list<Var> parents, Backward fn) {
  bool needs = false;
  for (const Var& p : parents) {
    if (p.tape_ != this) throw ShapeError("operands recorded on different tapes");
    needs = needs || nodes_[p.id_].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), {}, needs, false, needs ? std::move(fn) : Backward{}});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::backward(const Var& out) {
  if (out.tape_ != this) throw ShapeError("backward target is not on this tape");
  const Matrix& v = nodes_[out.id_].value;
  if (v.rows() != 1 || v.cols() != 1) throw ShapeError("backward target must be 1x1");
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad.resize(0, 0);
  }
  if (!nodes_[out.id_].requires_grad) return;
  nodes_[out.id_].grad = Matrix::Ones(1, 1);
  nodes_[out.id_].has_grad = true;
  for (int i = out.id_; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.has_grad || !n.backward) continue;
    const Matrix upstream = n.grad;
    n.backward(*this, upstream);
  }
}

namespace {

Tape& tape_of(const Var& a) {
  if (!a.valid()) throw ShapeError("operation on an unrecorded variable");
  return *a.tape();
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch");
  }
}

Matrix softmax_rows(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    out.row(r) = (x.row(r).array() - m).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

double lse(const Eigen::Ref<const Matrix>& x) {
  const double m = x.maxCoeff();
  return m + std::log((x.array() - m).exp().sum());
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
  Tape& t = tape_of(a);
  return t.record(a.value() * b.value(), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) tp.accumulate(a, g * b.value().transpose());
    if (tp.requires_grad(b)) tp.accumulate(b, a.value().transpose() * g);
  });
}

Var transpose(const Var& a) {
  Tape& t = tape_of(a);
  return t.record(a.value().transpose(), {a},
                  [a](Tape& tp, const Matrix& g) { tp.accumulate(a, g.transpose()); });
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Tape& t = tape_of(a);
  return t.record(a.value() + b.value(), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g);
    tp.accumulate(b, g);
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  Tape& t = tape_of(a);
  return t.record(a.value() - b.value(), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g);
    tp.accumulate(b, -g);
  });
}

Var scale(const Var& a, double s) {
  Tape& t = tape_of(a);
  return t.record(a.value() * s, {a}, [a, s](Tape& tp, const Matrix& g) { tp.accumulate(a, g * s); });
}

Var row_softmax(const Var& a) {
  Tape& t = tape_of(a);
  Matrix y = softmax_rows(a.value());
  return t.record(y, {a}, [a, y](Tape& tp, const Matrix& g) {
    // dx = y * (g - sum(g * y)) per row
    Matrix dx(y.rows(), y.cols());
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      const double dot = (g.row(r).array() * y.row(r).array()).sum();
      dx.row(r) = y.row(r).array() * (g.row(r).array() - dot);
    }
    tp.accumulate(a, dx);
  });
}

Var mean_rows(const Var& a) {
  Tape& t = tape_of(a);
  const Eigen::Index n = a.rows();
  if (n == 0) throw ShapeError("mean_rows: empty matrix");
  return t.record(a.value().colwise().mean(), {a}, [a, n](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g.replicate(n, 1) / static_cast<double>(n));
  });
}

Var sum(const Var& a) {
  Tape& t = tape_of(a);
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  const Eigen::Index r = a.rows(), c = a.cols();
  return t.record(v, {a}, [a, r, c](Tape& tp, const Matrix& g) {
    tp.accumulate(a, Matrix::Constant(r, c, g(0, 0)));
  });
}

Var concat_rows(const Var& top, const Var& bottom) {
  if (top.cols() != bottom.cols()) throw ShapeError("concat_rows: column counts differ");
  Tape& t = tape_of(top);
  Matrix v(top.rows() + bottom.rows(), top.cols());
  v << top.value(), bottom.value();
  const Eigen::Index nt = top.rows(), nb = bottom.rows();
  return t.record(std::move(v), {top, bottom}, [top, bottom, nt, nb](Tape& tp, const Matrix& g) {
    tp.accumulate(top, g.topRows(nt));
    tp.accumulate(bottom, g.bottomRows(nb));
  });
}

Var top_rows(const Var& a, Eigen::Index n) {
  if (n < 0 || n > a.rows()) throw ShapeError("top_rows: row count out of range");
  Tape& t = tape_of(a);
  const Eigen::Index r = a.rows(), c = a.cols();
  return t.record(a.value().topRows(n), {a}, [a, r, c, n](Tape& tp, const Matrix& g) {
    Matrix full = Matrix::Zero(r, c);
    full.topRows(n) = g;
    tp.accumulate(a, full);
  });
}

Var cosine(const Var& a, const Var& b) {
  require_same_shape(a, b, "cosine");
  Tape& t = tape_of(a);
  const double na = std::max(a.value().norm(), 1e-12);
  const double nb = std::max(b.value().norm(), 1e-12);
  const double dot = (a.value().array() * b.value().array()).sum();
  const double c = dot / (na * nb);
  Matrix v(1, 1);
  v(0, 0) = c;
  return t.record(v, {a, b}, [a, b, na, nb, c](Tape& tp, const Matrix& g) {
    const double s = g(0, 0);
    if (tp.requires_grad(a)) {
      tp.accumulate(a, s * (b.value() / (na * nb) - c * a.value() / (na * na)));
    }
    if (tp.requires_grad(b)) {
      tp.accumulate(b, s * (a.value() / (na * nb) - c * b.value() / (nb * nb)));
    }
  });
}

Var logsumexp(const Var& a) {
  Tape& t = tape_of(a);
  const double l = lse(a.value());
  Matrix v(1, 1);
  v(0, 0) = l;
  return t.record(v, {a}, [a, l](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g(0, 0) * (a.value().array() - l).exp().matrix());
  });
}

Var row_logsumexp(const Var& a) {
  Tape& t = tape_of(a);
  Matrix v(a.rows(), 1);
  for (Eigen::Index r = 0; r < a.rows(); ++r) v(r, 0) = lse(a.value().row(r));
  return t.record(v, {a}, [a, v](Tape& tp, const Matrix& g) {
    Matrix dx(a.rows(), a.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      dx.row(r) = g(r, 0) * (a.value().row(r).array() - v(r, 0)).exp();
    }
    tp.accumulate(a, dx);
  });
}

Var diagonal(const Var& a) {
  if (a.rows() != a.cols()) throw ShapeError("diagonal: matrix is not square");
  Tape& t = tape_of(a);
  const Eigen::Index n = a.rows();
  return t.record(a.value().diagonal(), {a}, [a, n](Tape& tp, const Matrix& g) {
    Matrix full = Matrix::Zero(n, n);
    full.diagonal() = g.col(0);
    tp.accumulate(a, full);
  });
}

Var element(const Var& a, Eigen::Index r, Eigen::Index c) {
  if (r < 0 || c < 0 || r >= a.rows() || c >= a.cols()) throw ShapeError("element: index out of range");
  Tape& t = tape_of(a);
  Matrix v(1, 1);
  v(0, 0) = a.value()(r, c);
  const Eigen::Index nr = a.rows(), nc = a.cols();
  return t.record(v, {a}, [a, r, c, nr, nc](Tape& tp, const Matrix& g) {
    Matrix full = Matrix::Zero(nr, nc);
    full(r, c) = g(0, 0);
    tp.accumulate(a, full);
  });
}

Var assemble(std::span<const Var> scalars, Eigen::Index rows, Eigen::Index cols) {
  if (scalars.empty()) throw ShapeError("assemble: no entries");
  if (static_cast<Eigen::Index>(scalars.size()) != rows * cols) {
    throw ShapeError("assemble: entry count does not match shape");
  }
  Tape& t = tape_of(scalars.front());
  Matrix v(rows, cols);
  bool needs = false;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    const Var& s = scalars[i];
    if (s.tape() != &t) throw ShapeError("assemble: operands on different tapes");
    if (s.rows() != 1 || s.cols() != 1) throw ShapeError("assemble: entries must be 1x1");
    v(static_cast<Eigen::Index>(i) / cols, static_cast<Eigen::Index>(i) % cols) = s.scalar();
    needs = needs || t.requires_grad(s);
  }
  if (!needs) return t.constant(std::move(v));
  std::vector<Var> parts(scalars.begin(), scalars.end());
  // record() takes an initializer_list of parents; route through the first
  // entry that requires a gradient so the node is marked accordingly.
  Var carrier = *std::find_if(parts.begin(), parts.end(), [&](const Var& s) { return t.requires_grad(s); });
  return t.record(std::move(v), {carrier}, [parts, cols](Tape& tp, const Matrix& g) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      Matrix gi(1, 1);
      gi(0, 0) = g(static_cast<Eigen::Index>(i) / cols, static_cast<Eigen::Index>(i) % cols);
      tp.accumulate(parts[i], gi);
    }
  });
}

}  // namespace hardneg::ad
