#pragma once

#include <vector>

#include "corgii/diff.hpp"
#include "corgii/rng.hpp"
#include "corgii/serial.hpp"

// Layers built from diffkit primitives, Adam, and parameter persistence.
// Every layer exposes visit(f), calling f on each parameter tensor in a fixed
// order; that order defines gradient layout and the serialized form.

namespace corgii::nn {

using diff::Tape;
using diff::Tensor;
using diff::Var;

/// Uniform in [-a, a] with a = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(int fan_in, int fan_out, Rng& rng);

/// y = x W + b with W (in x out) and b (1 x out).
struct Linear {
  Tensor w;
  Tensor b;

  Linear() = default;
  Linear(int in, int out, Rng& rng);
  int in() const { return w.rows(); }
  int out() const { return w.cols(); }
  Var operator()(Var x) const;

  template <typename F>
  void visit(F&& f) {
    f(w);
    f(b);
  }
  template <typename F>
  void visit(F&& f) const {
    f(w);
    f(b);
  }
};

/// Linear, ReLU, Linear.
struct Mlp {
  Linear first;
  Linear second;

  Mlp() = default;
  Mlp(int in, int hidden, int out, Rng& rng);
  int in() const { return first.in(); }
  int out() const { return second.out(); }
  Var operator()(Var x) const;

  template <typename F>
  void visit(F&& f) {
    first.visit(f);
    second.visit(f);
  }
  template <typename F>
  void visit(F&& f) const {
    first.visit(f);
    second.visit(f);
  }
};

/// Gated recurrent update of a state h by an input x:
///   z = sigmoid(x Wz + h Uz), r = sigmoid(x Wr + h Ur),
///   c = tanh(x Wc + (r * h) Uc), out = h + z * (c - h).
struct Gru {
  Linear xz, hz, xr, hr, xc, hc;

  Gru() = default;
  Gru(int in, int state, Rng& rng);
  Var operator()(Var x, Var h) const;

  template <typename F>
  void visit(F&& f) {
    for (Linear* l : {&xz, &hz, &xr, &hr, &xc, &hc}) l->visit(f);
  }
  template <typename F>
  void visit(F&& f) const {
    for (const Linear* l : {&xz, &hz, &xr, &hr, &xc, &hc}) l->visit(f);
  }
};

template <typename M>
std::vector<Tensor*> parameters(M& model) {
  std::vector<Tensor*> out;
  model.visit([&](Tensor& t) { out.push_back(&t); });
  return out;
}

template <typename M>
std::vector<const Tensor*> parameters(const M& model) {
  std::vector<const Tensor*> out;
  model.visit([&](const Tensor& t) { out.push_back(&t); });
  return out;
}

std::size_t parameter_count(const std::vector<const Tensor*>& params);

/// Zero buffers shaped like `params`.
std::vector<Tensor> zeros_like(const std::vector<Tensor*>& params);
/// grads[i] += adjoint of params[i] on `tape` (parameters never bound on the
/// tape contribute nothing).
void accumulate(std::vector<Tensor>& grads, const Tape& tape, const std::vector<Tensor*>& params);
void scale(std::vector<Tensor>& grads, double factor);

class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Tensor> m_, v_;
};

void write_tensor(ByteWriter& out, const Tensor& t);
Tensor read_tensor(ByteReader& in);

/// Writes every parameter of `model` in visit order.
template <typename M>
void write_params(ByteWriter& out, const M& model) {
  auto ps = parameters(model);
  out.u32(static_cast<std::uint32_t>(ps.size()));
  for (const Tensor* t : ps) write_tensor(out, *t);
}

/// Reads parameters into an already-shaped model; any shape difference
/// throws std::runtime_error.
template <typename M>
void read_params(ByteReader& in, M& model) {
  auto ps = parameters(model);
  if (in.u32() != ps.size()) throw std::runtime_error("parameter count mismatch");
  for (Tensor* t : ps) {
    Tensor v = read_tensor(in);
    if (v.rows() != t->rows() || v.cols() != t->cols()) {
      throw std::runtime_error("parameter shape mismatch: stored " + v.shape() + ", expected " + t->shape());
    }
    *t = std::move(v);
  }
}

}  // namespace corgii::nn
