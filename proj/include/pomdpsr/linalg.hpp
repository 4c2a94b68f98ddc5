#pragma once

#include <cstddef>
#include <vector>

namespace pomdpsr {

/// Row-major dense square matrix.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/**
 * LU factorization with partial pivoting.
 *
 * Throws SingularSystem when a pivot falls below `pivot_tol` times the largest
 * absolute entry of the input.
 */
class LuDecomposition {
  public:
    explicit LuDecomposition(DenseMatrix a, double pivot_tol = 1e-14);

    std::vector<double> solve(std::vector<double> rhs) const;

  private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

/// Solves a x = b.
std::vector<double> lu_solve(const DenseMatrix& a, const std::vector<double>& b);

}  // namespace pomdpsr
