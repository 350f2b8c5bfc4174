#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

// Dense row-major matrices with a reverse-mode tape. Every quantity the models
// need (node embeddings, soft codes, alignment matrices, losses) is a 2-d
// matrix; scalars are 1x1.

namespace corgii::diff {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols, double fill = 0.0);
  /// Rejects a size mismatch and any non-finite entry.
  static Tensor from(int rows, int cols, std::vector<double> values);
  static Tensor scalar(double v) { return from(1, 1, {v}); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> row(int r) { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }
  std::span<const double> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
  }
  const std::vector<double>& values() const { return data_; }
  std::vector<double>& values() { return data_; }

  /// Throws std::domain_error naming `where` if any entry is NaN or infinite.
  void check_finite(const char* where) const;
  std::string shape() const;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Tape& tape() const { return *tape_; }
  int id() const { return id_; }
  const Tensor& value() const;
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }
  double item() const;

 private:
  friend class Tape;
  Var(Tape* t, int id) : tape_(t), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Records primitive applications in construction order and replays them in
/// reverse. Single-threaded; use one tape per independent example.
class Tape {
 public:
  using Backprop = std::function<void(Tape&, int self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf without gradient.
  Var constant(Tensor t);
  /// Trainable leaf bound to the address of `p`; repeated calls with the same
  /// tensor return the same node so gradients accumulate in one buffer.
  Var param(const Tensor& p);

  const Tensor& value(int id) const { return nodes_[id].value; }
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Reverse sweep from a 1x1 loss. Gradients of earlier sweeps are cleared.
  void backward(Var loss);
  /// Adjoint of a node after backward(); zeros if the node did not influence
  /// the loss.
  Tensor grad(Var v) const;
  /// Adjoint of a parameter leaf, or nullptr if `p` was never bound.
  const Tensor* param_grad(const Tensor& p) const;

  /// Appends a node. `fn` runs during backward() only when some input needs
  /// a gradient.
  Var record(Tensor value, const std::vector<Var>& inputs, Backprop fn);
  /// Adjoint of node `id` (allocated on first use). Valid inside Backprop.
  Tensor& adjoint(int id);
  /// Adjoint buffer of input `id`, or nullptr when it needs no gradient.
  Tensor* input_adjoint(int id) { return nodes_[id].needs_grad ? &adjoint(id) : nullptr; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool needs_grad = false;
    bool has_grad = false;
    Backprop backprop;
  };
  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, int> params_;
};

// Primitives. Shape mismatches throw ShapeError naming both shapes.

Var matmul(Var a, Var b);          // (r x k)(k x c)
Var matmul_nt(Var a, Var b);       // a * b^T
Var add(Var a, Var b);
Var add_row(Var a, Var row);       // row (1 x c) broadcast over every row of a
Var sub(Var a, Var b);
Var mul(Var a, Var b);             // elementwise
Var affine(Var a, double scale, double shift);
Var relu(Var a);
/// [x]_+ ; gradient is 0 wherever x <= 0.
inline Var hinge(Var a) { return relu(a); }
Var sigmoid(Var a);
Var tanh(Var a);
Var exp(Var a);
Var abs(Var a);
Var sum(Var a);                    // -> 1x1
/// Row-wise minimum (r x 1). The gradient goes to the first minimal column.
Var row_min(Var a);
/// out[i][j] = sum_d |a[i][d] - b[j][d]|.
Var pairwise_l1(Var a, Var b);
Var concat_cols(Var a, Var b);
Var concat_rows(const std::vector<Var>& parts);
Var gather_rows(Var a, std::vector<int> index);
/// out[index[e]] += a[e]; out has `rows` rows.
Var scatter_add_rows(Var a, std::vector<int> index, int rows);
/// Appends zero rows up to `rows`.
Var pad_rows(Var a, int rows);
Var slice_rows(Var a, int begin, int end);
/// x - logsumexp over each row (respectively column).
Var log_normalize_rows(Var a);
Var log_normalize_cols(Var a);

/// Sparse linear map: out[r] = sum over entries (r, k, w) of w * x[k], with x
/// a column vector (K x 1) and out (rows x 1).
struct SparseEntry {
  int row;
  int col;
  double weight;
};
Var sparse_matvec(Var x, std::vector<SparseEntry> entries, int rows);

/// Sum over all (p, n) pairs of [sign * (pos[p] - neg[n]) + margin]_+ with
/// sign = +1 when smaller values rank better (distances) and -1 when larger
/// values rank better (scores). pos and neg are column vectors.
enum class Better { Lower, Higher };
Var ranking_hinge(Var pos, Var neg, double margin, Better better);

}  // namespace corgii::diff
