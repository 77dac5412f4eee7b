#pragma once

// Independent reference implementations used as test oracles. These stay
// deliberately naive (index loops, series summation) so they share no code
// path with the library routines they check.

#include "lrcert/kernels.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace oracles {

using lrcert::Complex;
using lrcert::Matrix;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// op placed at `position` within a chain of qubit factors.
inline Matrix kron_at(const Matrix& op, int position, int n_sites) {
  Matrix out = Matrix::Identity(1, 1);
  for (int s = 0; s < n_sites; ++s)
    out = kron(out, s == position ? op : Matrix(Matrix::Identity(2, 2)));
  return out;
}

// Scaling-and-squaring Taylor series for e^M; independent of the
// eigendecomposition route used by the library.
inline Matrix expm_taylor(const Matrix& m) {
  int squarings = 0;
  Matrix scaled = m;
  while (scaled.cwiseAbs().sum() > 0.5 && squarings < 60) {
    scaled /= 2.0;
    ++squarings;
  }
  Matrix result = Matrix::Identity(m.rows(), m.cols());
  Matrix term = Matrix::Identity(m.rows(), m.cols());
  for (int k = 1; k <= 40; ++k) {
    term = (term * scaled / static_cast<double>(k)).eval();
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = (result * result).eval();
  return result;
}

// Dense Heisenberg evolution through the Taylor propagator.
inline Matrix evolve_taylor(const Matrix& h, const Matrix& a, double t) {
  const Matrix u = expm_taylor(Complex(0, 1) * t * h);
  const Matrix u_inv = expm_taylor(Complex(0, -1) * t * h);
  return u * a * u_inv;
}

// Partial trace over the complement of `keep` for an n-qubit operator, by
// direct bit manipulation.
inline Matrix partial_trace_qubits(const Matrix& op, int n_sites,
                                   const std::vector<int>& keep) {
  const int k = static_cast<int>(keep.size());
  const auto dim_keep = static_cast<Eigen::Index>(1) << k;
  std::vector<int> rest;
  for (int s = 0; s < n_sites; ++s)
    if (std::find(keep.begin(), keep.end(), s) == keep.end()) rest.push_back(s);
  const auto dim_rest = static_cast<Eigen::Index>(1) << rest.size();

  const auto place_bits = [n_sites](const std::vector<int>& sites, Eigen::Index bits) {
    Eigen::Index out = 0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const Eigen::Index bit = (bits >> (sites.size() - 1 - i)) & 1;
      out |= bit << (n_sites - 1 - sites[i]);
    }
    return out;
  };

  Matrix out = Matrix::Zero(dim_keep, dim_keep);
  for (Eigen::Index i = 0; i < dim_keep; ++i)
    for (Eigen::Index j = 0; j < dim_keep; ++j)
      for (Eigen::Index r = 0; r < dim_rest; ++r)
        out(i, j) += op(place_bits(keep, i) | place_bits(rest, r),
                        place_bits(keep, j) | place_bits(rest, r));
  return out;
}

inline Matrix random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

inline Matrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  const Matrix m = random_complex(dim, dim, rng);
  return 0.5 * (m + m.adjoint());
}

}  // namespace oracles
