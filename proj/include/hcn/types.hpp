#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>

namespace hcn {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Row-major CSR, used for the normalized propagation matrix.
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

}  // namespace hcn
