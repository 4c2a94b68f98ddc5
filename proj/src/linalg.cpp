#include "pomdpsr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pomdpsr/errors.hpp"

namespace pomdpsr {

LuDecomposition::LuDecomposition(DenseMatrix a, double pivot_tol) : lu_(std::move(a)), perm_(lu_.size()) {
    const std::size_t n = lu_.size();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(lu_(i, j)));
    if (n > 0 && scale == 0.0) throw SingularSystem("matrix is zero");

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu_(i, k)) > std::abs(lu_(pivot, k))) pivot = i;
        }
        if (std::abs(lu_(pivot, k)) <= pivot_tol * scale) throw SingularSystem("matrix is singular to working precision");
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(pivot, j));
            std::swap(perm_[k], perm_[pivot]);
        }
        const double inv = 1.0 / lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu_(i, k) * inv;
            lu_(i, k) = f;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

std::vector<double> LuDecomposition::solve(std::vector<double> rhs) const {
    const std::size_t n = lu_.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[perm_[i]];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
        x[i] /= lu_(i, i);
    }
    return x;
}

std::vector<double> lu_solve(const DenseMatrix& a, const std::vector<double>& b) {
    return LuDecomposition(a).solve(b);
}

}  // namespace pomdpsr
