#include "lrcert/observable.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lrcert {

LocalObservable make_observable(std::vector<int> support, Matrix matrix,
                                const SiteBasis& basis) {
  if (!std::is_sorted(support.begin(), support.end()) ||
      std::adjacent_find(support.begin(), support.end()) != support.end())
    throw std::invalid_argument("LocalObservable: support must be strictly ascending");
  const std::int64_t dim = basis.space_dim(support);
  if (matrix.rows() != dim || matrix.cols() != dim)
    throw std::invalid_argument("LocalObservable: matrix is " + std::to_string(matrix.rows()) +
                                "x" + std::to_string(matrix.cols()) + " but the support spans dimension " +
                                std::to_string(dim));
  return LocalObservable{std::move(support), std::move(matrix)};
}

const Matrix& pauli_matrix(char axis) {
  static const Matrix sx = (Matrix(2, 2) << 0, 1, 1, 0).finished();
  static const Matrix sy = (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  static const Matrix sz = (Matrix(2, 2) << 1, 0, 0, -1).finished();
  switch (axis) {
    case 'x': return sx;
    case 'y': return sy;
    case 'z': return sz;
    default: throw std::invalid_argument(std::string("pauli_matrix: unknown axis '") + axis + "'");
  }
}

LocalObservable pauli_site(int site, char axis) {
  return LocalObservable{{site}, pauli_matrix(axis)};
}

LocalObservable identity_observable(std::vector<int> support, const SiteBasis& basis) {
  const std::int64_t dim = basis.space_dim(support);
  return LocalObservable{std::move(support), Matrix::Identity(dim, dim)};
}

LocalObservable embed(const LocalObservable& obs, std::span<const int> volume,
                      const SiteBasis& basis, std::int64_t dim_cap) {
  basis.space_dim(volume, dim_cap);
  if (!std::includes(volume.begin(), volume.end(), obs.support.begin(), obs.support.end()))
    throw std::invalid_argument("embed: observable support is not contained in the volume");
  if (obs.support.size() == volume.size()) return obs;
  return LocalObservable{std::vector<int>(volume.begin(), volume.end()),
                         kernels::embed(obs.matrix, obs.support, volume, basis)};
}

double operator_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (std::max(m.rows(), m.cols()) <= 64)
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
  // sqrt of the top eigenvalue of M*M; exact for the leading singular value
  // and much faster than a full SVD at ED dimensions.
  const Matrix gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double operator_norm(const LocalObservable& obs) { return operator_norm(obs.matrix); }

double hermiticity_defect(const Matrix& m) {
  return operator_norm(Matrix(m - m.adjoint()));
}

}  // namespace lrcert
