#include "hcn/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hcn {

namespace {

void check_inner(Index a_cols, Index b_rows, const char* what) {
  if (a_cols != b_rows)
    throw std::invalid_argument(std::string(what) + ": inner dimensions " +
                                std::to_string(a_cols) + " and " + std::to_string(b_rows) +
                                " do not match");
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_inner(a.cols(), b.rows(), "matmul");
  return a * b;
}

Matrix spmm(const SpMat& a, const Matrix& b) {
  check_inner(a.cols(), b.rows(), "spmm");
  return a * b;
}

Matrix relu(const Matrix& a) { return a.cwiseMax(0.0); }

Matrix softmax_rows(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (Index r = 0; r < a.rows(); ++r) {
    const double mx = a.row(r).maxCoeff();
    Eigen::ArrayXd e = (a.row(r).array() - mx).exp();
    out.row(r) = (e / e.sum()).matrix();
  }
  return out;
}

LossGrad masked_cross_entropy(const Matrix& z, const std::vector<int>& labels,
                              const std::vector<Index>& mask) {
  if (mask.empty()) throw std::invalid_argument("masked_cross_entropy: empty mask");
  if (static_cast<Index>(labels.size()) != z.rows())
    throw std::invalid_argument("masked_cross_entropy: labels size does not match rows");
  const Index c = z.cols();
  LossGrad out;
  out.dz = Matrix::Zero(z.rows(), c);
  for (Index r : mask) {
    if (r < 0 || r >= z.rows())
      throw std::invalid_argument("masked_cross_entropy: mask index out of range");
    const int y = labels[r];
    if (y < 0 || y >= c)
      throw std::invalid_argument("masked_cross_entropy: label out of range on masked row");
    const double mx = z.row(r).maxCoeff();
    Eigen::ArrayXd e = (z.row(r).array() - mx).exp();
    const double s = e.sum();
    out.loss -= (z(r, y) - mx) - std::log(s);
    out.dz.row(r) = (e / s).matrix().transpose();
    out.dz(r, y) -= 1.0;
  }
  return out;
}

Matrix densify(const SpMat& a) { return Matrix(a); }

double spectral_radius_estimate(const SpMat& a, int iters) {
  if (a.rows() != a.cols()) throw std::invalid_argument("spectral_radius_estimate: not square");
  const Index n = a.rows();
  if (n == 0) return 0.0;
  Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector w = a * v;
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    lambda = v.dot(w);
    v = w / nrm;
  }
  return std::abs(lambda);
}

Matrix dropout_mask(Index rows, Index cols, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw std::invalid_argument("dropout_mask: rate must be in [0, 1)");
  Matrix m(rows, cols);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = rng.uniform() < rate ? 0.0 : keep_scale;
  return m;
}

Matrix take_rows(const Matrix& a, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows())
      throw std::invalid_argument("take_rows: index out of range");
    out.row(static_cast<Index>(i)) = a.row(rows[i]);
  }
  return out;
}

}  // namespace hcn
