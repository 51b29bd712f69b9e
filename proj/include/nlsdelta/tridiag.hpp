#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "nlsdelta/errors.hpp"

namespace nlsdelta {

/// LU factorization of a complex tridiagonal matrix without pivoting (the
/// shifted radial Laplacians it is used for are diagonally dominant).
/// Immutable after construction; solve() is safe to call concurrently.
class TridiagonalLU {
public:
  using cplx = std::complex<double>;

  TridiagonalLU() = default;

  /// lower[j] couples row j to j-1 (lower[0] unused), upper[j] couples row j to j+1.
  TridiagonalLU(std::span<const cplx> lower, std::span<const cplx> diag, std::span<const cplx> upper)
      : upper_(upper.begin(), upper.end()), mult_(diag.size()), inv_pivot_(diag.size()) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n) fail(ErrorKind::shape, "TridiagonalLU: band length mismatch");
    for (std::size_t j = 0; j < n; ++j) {
      cplx d = diag[j];
      if (j > 0) {
        mult_[j] = lower[j] * inv_pivot_[j - 1];
        d -= mult_[j] * upper_[j - 1];
      }
      if (!(std::abs(d) > 0.0) || !std::isfinite(std::abs(d)))
        fail(ErrorKind::linear_algebra, "TridiagonalLU: zero or non-finite pivot at row " + std::to_string(j));
      inv_pivot_[j] = 1.0 / d;
    }
  }

  std::size_t size() const noexcept { return inv_pivot_.size(); }

  std::vector<cplx> solve(std::span<const cplx> rhs) const {
    const std::size_t n = inv_pivot_.size();
    if (rhs.size() != n) fail(ErrorKind::shape, "TridiagonalLU::solve: rhs length mismatch");
    std::vector<cplx> y(n);
    for (std::size_t j = 0; j < n; ++j) {
      y[j] = rhs[j];
      if (j > 0) y[j] -= mult_[j] * y[j - 1];
    }
    for (std::size_t k = n; k-- > 0;) {
      if (k + 1 < n) y[k] -= upper_[k] * y[k + 1];
      y[k] *= inv_pivot_[k];
    }
    return y;
  }

private:
  std::vector<cplx> upper_;
  std::vector<cplx> mult_;       // lower[j] / pivot[j-1]
  std::vector<cplx> inv_pivot_;
};

}  // namespace nlsdelta
