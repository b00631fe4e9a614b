#pragma once

#include <vector>

#include "hcn/rng.hpp"
#include "hcn/types.hpp"

namespace hcn {

// Dimension-checked wrappers; mismatches throw std::invalid_argument instead
// of hitting Eigen's asserts.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix spmm(const SpMat& a, const Matrix& b);

Matrix relu(const Matrix& a);

// Row-wise softmax, max-shifted for stability.
Matrix softmax_rows(const Matrix& a);

struct LossGrad {
  double loss = 0.0;
  Matrix dz;
};

// Summed cross-entropy over the masked rows of the logit matrix, plus its
// gradient (softmax minus one-hot on masked rows, zero elsewhere).
LossGrad masked_cross_entropy(const Matrix& z, const std::vector<int>& labels,
                              const std::vector<Index>& mask);

Matrix densify(const SpMat& a);

// Power iteration from the all-ones vector; enough for the nonnegative
// symmetric matrices we feed it.
double spectral_radius_estimate(const SpMat& a, int iters = 200);

// Inverted-dropout factor matrix: entries are 0 with probability rate, else
// 1/(1 - rate), so the expected value of (input .* mask) matches the input.
Matrix dropout_mask(Index rows, Index cols, double rate, Rng& rng);

Matrix take_rows(const Matrix& a, const std::vector<Index>& rows);

}  // namespace hcn
