#include "corgii/diff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace corgii::diff {

Tensor::Tensor(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ShapeError("negative tensor shape");
  data_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

Tensor Tensor::from(int rows, int cols, std::vector<double> values) {
  if (rows < 0 || cols < 0 || values.size() != static_cast<std::size_t>(rows) * cols) {
    throw ShapeError("tensor shape (" + std::to_string(rows) + "x" + std::to_string(cols) +
                     ") does not match " + std::to_string(values.size()) + " values");
  }
  Tensor t;
  t.rows_ = rows;
  t.cols_ = cols;
  t.data_ = std::move(values);
  t.check_finite("Tensor::from");
  return t;
}

void Tensor::check_finite(const char* where) const {
  for (double v : data_) {
    if (!std::isfinite(v)) throw std::domain_error(std::string(where) + ": non-finite value");
  }
}

std::string Tensor::shape() const { return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")"; }

const Tensor& Var::value() const { return tape_->value(id_); }

double Var::item() const {
  const Tensor& t = value();
  if (t.size() != 1) throw ShapeError("item() on non-scalar " + t.shape());
  return t.data()[0];
}

Var Tape::constant(Tensor t) {
  t.check_finite("Tape::constant");
  nodes_.push_back(Node{std::move(t), {}, false, false, {}});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::param(const Tensor& p) {
  auto it = params_.find(&p);
  if (it != params_.end()) return Var(this, it->second);
  p.check_finite("Tape::param");
  nodes_.push_back(Node{p, {}, true, false, {}});
  const int id = static_cast<int>(nodes_.size()) - 1;
  params_.emplace(&p, id);
  return Var(this, id);
}

Var Tape::record(Tensor value, const std::vector<Var>& inputs, Backprop fn) {
  value.check_finite("Tape::record");
  bool needs = false;
  for (const Var& v : inputs) {
    if (&v.tape() != this) throw std::invalid_argument("Var belongs to a different tape");
    needs = needs || nodes_[v.id()].needs_grad;
  }
  nodes_.push_back(Node{std::move(value), {}, needs, false, needs ? std::move(fn) : Backprop{}});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Tensor& Tape::adjoint(int id) {
  Node& n = nodes_[id];
  if (!n.has_grad) {
    n.grad = Tensor(n.value.rows(), n.value.cols(), 0.0);
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::backward(Var loss) {
  if (&loss.tape() != this) throw std::invalid_argument("loss belongs to a different tape");
  if (nodes_[loss.id()].value.size() != 1) {
    throw ShapeError("backward() needs a scalar loss, got " + nodes_[loss.id()].value.shape());
  }
  for (auto& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  adjoint(loss.id()).data()[0] = 1.0;
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.has_grad && n.backprop) n.backprop(*this, id);
  }
}

Tensor Tape::grad(Var v) const {
  const Node& n = nodes_[v.id()];
  return n.has_grad ? n.grad : Tensor(n.value.rows(), n.value.cols(), 0.0);
}

const Tensor* Tape::param_grad(const Tensor& p) const {
  auto it = params_.find(&p);
  if (it == params_.end()) return nullptr;
  const Node& n = nodes_[it->second];
  if (!n.has_grad) {
    static thread_local Tensor zeros;
    zeros = Tensor(n.value.rows(), n.value.cols(), 0.0);
    return &zeros;
  }
  return &n.grad;
}

namespace {

[[noreturn]] void mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": shape mismatch " + a.shape() + " vs " + b.shape());
}

void same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) mismatch(op, a, b);
}

// c += a * b, a (r x k), b (k x n)
void gemm_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const int r = a.rows(), k = a.cols(), n = b.cols();
  for (int i = 0; i < r; ++i) {
    double* ci = c.data() + static_cast<std::size_t>(i) * n;
    const double* ai = a.data() + static_cast<std::size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b.data() + static_cast<std::size_t>(p) * n;
      for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// c += a * b^T, a (r x k), b (n x k). Transposing b first keeps the inner
// loop in the vectorizable axpy form of gemm_acc.
void gemm_nt_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const int k = b.cols(), n = b.rows();
  Tensor bt(k, n);
  for (int j = 0; j < n; ++j) {
    for (int p = 0; p < k; ++p) bt(p, j) = b(j, p);
  }
  gemm_acc(a, bt, c);
}

// c += a^T * b, a (k x r), b (k x n)
void gemm_tn_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const int k = a.rows(), r = a.cols(), n = b.cols();
  for (int p = 0; p < k; ++p) {
    const double* ap = a.data() + static_cast<std::size_t>(p) * r;
    const double* bp = b.data() + static_cast<std::size_t>(p) * n;
    for (int i = 0; i < r; ++i) {
      const double av = ap[i];
      if (av == 0.0) continue;
      double* ci = c.data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

template <typename F, typename D>
Var unary(Var a, F f, D dfdx_from_xy) {
  const Tensor& x = a.value();
  Tensor y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) y.data()[i] = f(x.data()[i]);
  const int ia = a.id();
  return a.tape().record(std::move(y), {a}, [ia, dfdx_from_xy](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    const Tensor& x = t.value(ia);
    const Tensor& y = t.value(self);
    Tensor& ga = t.adjoint(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga.data()[i] += g.data()[i] * dfdx_from_xy(x.data()[i], y.data()[i]);
  });
}

}  // namespace

Var matmul(Var a, Var b) {
  const Tensor &x = a.value(), &w = b.value();
  if (x.cols() != w.rows()) mismatch("matmul", x, w);
  Tensor y(x.rows(), w.cols());
  gemm_acc(x, w, y);
  const int ia = a.id(), ib = b.id();
  return a.tape().record(std::move(y), {a, b}, [ia, ib](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    if (Tensor* ga = t.input_adjoint(ia)) gemm_nt_acc(g, t.value(ib), *ga);
    if (Tensor* gb = t.input_adjoint(ib)) gemm_tn_acc(t.value(ia), g, *gb);
  });
}

Var matmul_nt(Var a, Var b) {
  const Tensor &x = a.value(), &w = b.value();
  if (x.cols() != w.cols()) mismatch("matmul_nt", x, w);
  Tensor y(x.rows(), w.rows());
  gemm_nt_acc(x, w, y);
  const int ia = a.id(), ib = b.id();
  return a.tape().record(std::move(y), {a, b}, [ia, ib](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    if (Tensor* ga = t.input_adjoint(ia)) gemm_acc(g, t.value(ib), *ga);
    if (Tensor* gb = t.input_adjoint(ib)) gemm_tn_acc(g, t.value(ia), *gb);
  });
}

Var add(Var a, Var b) {
  const Tensor &x = a.value(), &z = b.value();
  same_shape("add", x, z);
  Tensor y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] += z.data()[i];
  const int ia = a.id(), ib = b.id();
  return a.tape().record(std::move(y), {a, b}, [ia, ib](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    for (int id : {ia, ib}) {
      if (Tensor* gi = t.input_adjoint(id)) {
        for (std::size_t i = 0; i < g.size(); ++i) gi->data()[i] += g.data()[i];
      }
    }
  });
}

Var add_row(Var a, Var row) {
  const Tensor &x = a.value(), &r = row.value();
  if (r.rows() != 1 || r.cols() != x.cols()) mismatch("add_row", x, r);
  Tensor y = x;
  for (int i = 0; i < y.rows(); ++i) {
    for (int j = 0; j < y.cols(); ++j) y(i, j) += r(0, j);
  }
  const int ia = a.id(), ir = row.id();
  return a.tape().record(std::move(y), {a, row}, [ia, ir](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    if (Tensor* ga = t.input_adjoint(ia)) {
      for (std::size_t i = 0; i < g.size(); ++i) ga->data()[i] += g.data()[i];
    }
    if (Tensor* gr = t.input_adjoint(ir)) {
      for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < g.cols(); ++j) (*gr)(0, j) += g(i, j);
      }
    }
  });
}

Var sub(Var a, Var b) {
  const Tensor &x = a.value(), &z = b.value();
  same_shape("sub", x, z);
  Tensor y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] -= z.data()[i];
  const int ia = a.id(), ib = b.id();
  return a.tape().record(std::move(y), {a, b}, [ia, ib](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    if (Tensor* ga = t.input_adjoint(ia)) {
      for (std::size_t i = 0; i < g.size(); ++i) ga->data()[i] += g.data()[i];
    }
    if (Tensor* gb = t.input_adjoint(ib)) {
      for (std::size_t i = 0; i < g.size(); ++i) gb->data()[i] -= g.data()[i];
    }
  });
}

Var mul(Var a, Var b) {
  const Tensor &x = a.value(), &z = b.value();
  same_shape("mul", x, z);
  Tensor y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] *= z.data()[i];
  const int ia = a.id(), ib = b.id();
  return a.tape().record(std::move(y), {a, b}, [ia, ib](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    if (Tensor* ga = t.input_adjoint(ia)) {
      const Tensor& z = t.value(ib);
      for (std::size_t i = 0; i < g.size(); ++i) ga->data()[i] += g.data()[i] * z.data()[i];
    }
    if (Tensor* gb = t.input_adjoint(ib)) {
      const Tensor& x = t.value(ia);
      for (std::size_t i = 0; i < g.size(); ++i) gb->data()[i] += g.data()[i] * x.data()[i];
    }
  });
}

Var affine(Var a, double scale, double shift) {
  return unary(
      a, [=](double x) { return scale * x + shift; }, [=](double, double) { return scale; });
}

Var relu(Var a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Var a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
  return unary(
      a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var exp(Var a) {
  return unary(
      a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var abs(Var a) {
  return unary(
      a, [](double x) { return std::fabs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var sum(Var a) {
  const Tensor& x = a.value();
  double s = 0.0;
  for (double v : x.values()) s += v;
  const int ia = a.id();
  return a.tape().record(Tensor::scalar(s), {a}, [ia](Tape& t, int self) {
    const double g = t.adjoint(self).data()[0];
    Tensor& ga = t.adjoint(ia);
    for (double& v : ga.values()) v += g;
  });
}

Var row_min(Var a) {
  const Tensor& x = a.value();
  if (x.cols() == 0) throw ShapeError("row_min: no columns " + x.shape());
  Tensor y(x.rows(), 1);
  std::vector<int> arg(x.rows(), 0);
  for (int i = 0; i < x.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < x.cols(); ++j) {
      if (x(i, j) < x(i, best)) best = j;
    }
    arg[i] = best;
    y(i, 0) = x(i, best);
  }
  const int ia = a.id();
  return a.tape().record(std::move(y), {a}, [ia, arg = std::move(arg)](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    Tensor& ga = t.adjoint(ia);
    for (int i = 0; i < g.rows(); ++i) ga(i, arg[i]) += g(i, 0);
  });
}

Var pairwise_l1(Var a, Var b) {
  const Tensor &x = a.value(), &z = b.value();
  if (x.cols() != z.cols()) mismatch("pairwise_l1", x, z);
  const int n = x.rows(), m = z.rows(), d = x.cols();
  Tensor y(n, m);
  for (int i = 0; i < n; ++i) {
    const double* xi = x.data() + static_cast<std::size_t>(i) * d;
    for (int j = 0; j < m; ++j) {
      const double* zj = z.data() + static_cast<std::size_t>(j) * d;
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += std::fabs(xi[k] - zj[k]);
      y(i, j) = s;
    }
  }
  const int ia = a.id(), ib = b.id();
  return a.tape().record(std::move(y), {a, b}, [ia, ib](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    const Tensor &x = t.value(ia), &z = t.value(ib);
    Tensor* ga = t.input_adjoint(ia);
    Tensor* gb = t.input_adjoint(ib);
    const int d = x.cols();
    for (int i = 0; i < x.rows(); ++i) {
      for (int j = 0; j < z.rows(); ++j) {
        const double gij = g(i, j);
        if (gij == 0.0) continue;
        for (int k = 0; k < d; ++k) {
          const double diff = x(i, k) - z(j, k);
          const double s = diff > 0.0 ? gij : (diff < 0.0 ? -gij : 0.0);
          if (ga) (*ga)(i, k) += s;
          if (gb) (*gb)(j, k) -= s;
        }
      }
    }
  });
}

Var concat_cols(Var a, Var b) {
  const Tensor &x = a.value(), &z = b.value();
  if (x.rows() != z.rows()) mismatch("concat_cols", x, z);
  const int r = x.rows(), ca = x.cols(), cb = z.cols();
  Tensor y(r, ca + cb);
  for (int i = 0; i < r; ++i) {
    std::copy(x.row(i).begin(), x.row(i).end(), y.row(i).begin());
    std::copy(z.row(i).begin(), z.row(i).end(), y.row(i).begin() + ca);
  }
  const int ia = a.id(), ib = b.id();
  return a.tape().record(std::move(y), {a, b}, [ia, ib, ca, cb](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    Tensor* ga = t.input_adjoint(ia);
    Tensor* gb = t.input_adjoint(ib);
    for (int i = 0; i < g.rows(); ++i) {
      if (ga) {
        for (int j = 0; j < ca; ++j) (*ga)(i, j) += g(i, j);
      }
      if (gb) {
        for (int j = 0; j < cb; ++j) (*gb)(i, j) += g(i, ca + j);
      }
    }
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const int c = parts[0].cols();
  int r = 0;
  for (const Var& p : parts) {
    if (p.cols() != c) mismatch("concat_rows", parts[0].value(), p.value());
    r += p.rows();
  }
  Tensor y(r, c);
  std::vector<int> ids, offsets;
  int off = 0;
  for (const Var& p : parts) {
    std::copy(p.value().values().begin(), p.value().values().end(), y.data() + static_cast<std::size_t>(off) * c);
    ids.push_back(p.id());
    offsets.push_back(off);
    off += p.rows();
  }
  return parts[0].tape().record(std::move(y), parts, [ids, offsets, c](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (Tensor* gk = t.input_adjoint(ids[k])) {
        const double* src = g.data() + static_cast<std::size_t>(offsets[k]) * c;
        for (std::size_t i = 0; i < gk->size(); ++i) gk->data()[i] += src[i];
      }
    }
  });
}

Var gather_rows(Var a, std::vector<int> index) {
  const Tensor& x = a.value();
  Tensor y(static_cast<int>(index.size()), x.cols());
  for (std::size_t e = 0; e < index.size(); ++e) {
    if (index[e] < 0 || index[e] >= x.rows()) throw ShapeError("gather_rows: index out of range for " + x.shape());
    std::copy(x.row(index[e]).begin(), x.row(index[e]).end(), y.row(static_cast<int>(e)).begin());
  }
  const int ia = a.id();
  return a.tape().record(std::move(y), {a}, [ia, index = std::move(index)](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    Tensor& ga = t.adjoint(ia);
    for (std::size_t e = 0; e < index.size(); ++e) {
      auto src = g.row(static_cast<int>(e));
      auto dst = ga.row(index[e]);
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    }
  });
}

Var scatter_add_rows(Var a, std::vector<int> index, int rows) {
  const Tensor& x = a.value();
  if (static_cast<int>(index.size()) != x.rows()) throw ShapeError("scatter_add_rows: index length vs " + x.shape());
  Tensor y(rows, x.cols());
  for (std::size_t e = 0; e < index.size(); ++e) {
    if (index[e] < 0 || index[e] >= rows) throw ShapeError("scatter_add_rows: index out of range");
    auto src = x.row(static_cast<int>(e));
    auto dst = y.row(index[e]);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
  }
  const int ia = a.id();
  return a.tape().record(std::move(y), {a}, [ia, index = std::move(index)](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    Tensor& ga = t.adjoint(ia);
    for (std::size_t e = 0; e < index.size(); ++e) {
      auto src = g.row(index[e]);
      auto dst = ga.row(static_cast<int>(e));
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    }
  });
}

Var pad_rows(Var a, int rows) {
  const Tensor& x = a.value();
  if (rows < x.rows()) throw ShapeError("pad_rows: target smaller than " + x.shape());
  Tensor y(rows, x.cols());
  std::copy(x.values().begin(), x.values().end(), y.data());
  const int ia = a.id();
  return a.tape().record(std::move(y), {a}, [ia](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    Tensor& ga = t.adjoint(ia);
    for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] += g.data()[i];
  });
}

Var slice_rows(Var a, int begin, int end) {
  const Tensor& x = a.value();
  if (begin < 0 || end > x.rows() || begin > end) throw ShapeError("slice_rows: bad range for " + x.shape());
  Tensor y(end - begin, x.cols());
  std::copy(x.data() + static_cast<std::size_t>(begin) * x.cols(), x.data() + static_cast<std::size_t>(end) * x.cols(),
            y.data());
  const int ia = a.id();
  return a.tape().record(std::move(y), {a}, [ia, begin](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    Tensor& ga = t.adjoint(ia);
    double* dst = ga.data() + static_cast<std::size_t>(begin) * ga.cols();
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g.data()[i];
  });
}

namespace {

// Shared by the row and column variants: `stride` walks within a group,
// `step` walks between groups.
Var log_normalize(Var a, bool rows) {
  const Tensor& x = a.value();
  const int groups = rows ? x.rows() : x.cols();
  const int len = rows ? x.cols() : x.rows();
  auto at = [rows](const Tensor& m, int g, int k) -> std::size_t {
    return rows ? static_cast<std::size_t>(g) * m.cols() + k : static_cast<std::size_t>(k) * m.cols() + g;
  };
  Tensor y(x.rows(), x.cols());
  for (int g = 0; g < groups; ++g) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < len; ++k) mx = std::max(mx, x.data()[at(x, g, k)]);
    double s = 0.0;
    for (int k = 0; k < len; ++k) s += std::exp(x.data()[at(x, g, k)] - mx);
    const double lse = mx + std::log(s);
    for (int k = 0; k < len; ++k) y.data()[at(x, g, k)] = x.data()[at(x, g, k)] - lse;
  }
  const int ia = a.id();
  return a.tape().record(std::move(y), {a}, [ia, rows, groups, len, at](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    const Tensor& y = t.value(self);
    Tensor& ga = t.adjoint(ia);
    for (int grp = 0; grp < groups; ++grp) {
      double gs = 0.0;
      for (int k = 0; k < len; ++k) gs += g.data()[at(g, grp, k)];
      for (int k = 0; k < len; ++k) {
        const std::size_t i = at(g, grp, k);
        ga.data()[i] += g.data()[i] - std::exp(y.data()[i]) * gs;
      }
    }
    (void)rows;
  });
}

}  // namespace

Var log_normalize_rows(Var a) { return log_normalize(a, true); }
Var log_normalize_cols(Var a) { return log_normalize(a, false); }

Var sparse_matvec(Var x, std::vector<SparseEntry> entries, int rows) {
  const Tensor& v = x.value();
  if (v.cols() != 1) throw ShapeError("sparse_matvec: x must be a column vector, got " + v.shape());
  Tensor y(rows, 1);
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= v.rows()) {
      throw ShapeError("sparse_matvec: entry out of range for " + v.shape());
    }
    y(e.row, 0) += e.weight * v(e.col, 0);
  }
  const int ix = x.id();
  return x.tape().record(std::move(y), {x}, [ix, entries = std::move(entries)](Tape& t, int self) {
    const Tensor& g = t.adjoint(self);
    Tensor& gx = t.adjoint(ix);
    for (const auto& e : entries) gx(e.col, 0) += e.weight * g(e.row, 0);
  });
}

Var ranking_hinge(Var pos, Var neg, double margin, Better better) {
  const Tensor &p = pos.value(), &n = neg.value();
  if (p.cols() != 1 || n.cols() != 1) mismatch("ranking_hinge", p, n);
  const double sign = better == Better::Lower ? 1.0 : -1.0;
  double total = 0.0;
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < n.rows(); ++j) {
      const double v = sign * (p(i, 0) - n(j, 0)) + margin;
      if (v > 0.0) total += v;
    }
  }
  const int ip = pos.id(), in = neg.id();
  return pos.tape().record(Tensor::scalar(total), {pos, neg}, [ip, in, sign, margin](Tape& t, int self) {
    const double g = t.adjoint(self).data()[0];
    const Tensor &p = t.value(ip), &n = t.value(in);
    Tensor* gp = t.input_adjoint(ip);
    Tensor* gn = t.input_adjoint(in);
    for (int i = 0; i < p.rows(); ++i) {
      for (int j = 0; j < n.rows(); ++j) {
        if (sign * (p(i, 0) - n(j, 0)) + margin > 0.0) {
          if (gp) (*gp)(i, 0) += g * sign;
          if (gn) (*gn)(j, 0) -= g * sign;
        }
      }
    }
  });
}

}  // namespace corgii::diff
