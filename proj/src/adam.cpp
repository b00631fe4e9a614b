#include "hcn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace hcn {

AdamState make_adam(const std::vector<Matrix*>& params, double lr, double weight_decay) {
  if (lr <= 0.0) throw std::invalid_argument("adam: learning rate must be positive");
  if (weight_decay < 0.0) throw std::invalid_argument("adam: weight decay must be >= 0");
  AdamState st;
  st.lr = lr;
  st.weight_decay = weight_decay;
  st.m.reserve(params.size());
  st.v.reserve(params.size());
  for (const Matrix* p : params) {
    st.m.push_back(Matrix::Zero(p->rows(), p->cols()));
    st.v.push_back(Matrix::Zero(p->rows(), p->cols()));
  }
  return st;
}

void adam_step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads,
               AdamState& st) {
  if (params.size() != grads.size() || params.size() != st.m.size())
    throw std::invalid_argument("adam_step: parameter/gradient/state counts do not match");
  st.t += 1;
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    if (grads[i].rows() != p.rows() || grads[i].cols() != p.cols())
      throw std::invalid_argument("adam_step: gradient shape does not match parameter");
    // Coupled L2: decay folds into the gradient before the moment updates.
    Matrix g = st.weight_decay != 0.0 ? Matrix(grads[i] + st.weight_decay * p) : grads[i];
    st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g;
    st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g.cwiseProduct(g);
    const Matrix m_hat = st.m[i] / bc1;
    const Matrix v_hat = st.v[i] / bc2;
    p.array() -= st.lr * m_hat.array() / (v_hat.array().sqrt() + st.eps);
  }
}

}  // namespace hcn
