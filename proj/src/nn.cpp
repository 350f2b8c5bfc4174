#include "corgii/nn.hpp"

#include <cmath>

namespace corgii::nn {

Tensor glorot_uniform(int fan_in, int fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t(fan_in, fan_out);
  for (double& v : t.values()) v = uniform_real(rng, -a, a);
  return t;
}

Linear::Linear(int in, int out, Rng& rng) : w(glorot_uniform(in, out, rng)), b(1, out, 0.0) {}

Var Linear::operator()(Var x) const {
  Tape& t = x.tape();
  return diff::add_row(diff::matmul(x, t.param(w)), t.param(b));
}

Mlp::Mlp(int in, int hidden, int out, Rng& rng) : first(in, hidden, rng), second(hidden, out, rng) {}

Var Mlp::operator()(Var x) const { return second(diff::relu(first(x))); }

Gru::Gru(int in, int state, Rng& rng)
    : xz(in, state, rng),
      hz(state, state, rng),
      xr(in, state, rng),
      hr(state, state, rng),
      xc(in, state, rng),
      hc(state, state, rng) {}

Var Gru::operator()(Var x, Var h) const {
  Var z = diff::sigmoid(diff::add(xz(x), hz(h)));
  Var r = diff::sigmoid(diff::add(xr(x), hr(h)));
  Var c = diff::tanh(diff::add(xc(x), hc(diff::mul(r, h))));
  return diff::add(h, diff::mul(z, diff::sub(c, h)));
}

std::size_t parameter_count(const std::vector<const Tensor*>& params) {
  std::size_t n = 0;
  for (const Tensor* t : params) n += t->size();
  return n;
}

std::vector<Tensor> zeros_like(const std::vector<Tensor*>& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const Tensor* p : params) out.emplace_back(p->rows(), p->cols(), 0.0);
  return out;
}

void accumulate(std::vector<Tensor>& grads, const Tape& tape, const std::vector<Tensor*>& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor* g = tape.param_grad(*params[i]);
    if (!g) continue;
    for (std::size_t k = 0; k < g->size(); ++k) grads[i].data()[k] += g->data()[k];
  }
}

void scale(std::vector<Tensor>& grads, double factor) {
  for (auto& g : grads) {
    for (double& v : g.values()) v *= factor;
  }
}

Adam::Adam(double lr, double beta1, double beta2, double eps) : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads) {
  if (grads.size() != params.size()) throw std::invalid_argument("Adam: gradient count mismatch");
  if (m_.empty()) {
    for (const Tensor* p : params) {
      m_.emplace_back(p->rows(), p->cols(), 0.0);
      v_.emplace_back(p->rows(), p->cols(), 0.0);
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double* p = params[i]->data();
    const double* g = grads[i].data();
    double* m = m_[i].data();
    double* v = v_[i].data();
    for (std::size_t k = 0; k < params[i]->size(); ++k) {
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * g[k];
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * g[k] * g[k];
      p[k] -= lr_ * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps_);
    }
  }
}

void write_tensor(ByteWriter& out, const Tensor& t) {
  out.i32(t.rows());
  out.i32(t.cols());
  for (double v : t.values()) out.f64(v);
}

Tensor read_tensor(ByteReader& in) {
  const int rows = in.i32();
  const int cols = in.i32();
  if (rows < 0 || cols < 0 || static_cast<long long>(rows) * cols > (1LL << 28)) {
    throw std::runtime_error("stored tensor has an invalid shape");
  }
  std::vector<double> values(static_cast<std::size_t>(rows) * cols);
  for (double& v : values) v = in.f64();
  return Tensor::from(rows, cols, std::move(values));
}

}  // namespace corgii::nn
