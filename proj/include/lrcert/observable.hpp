#pragma once

#include "lrcert/kernels.hpp"

#include <span>
#include <vector>

namespace lrcert {

// Operator together with the sites it acts on. The matrix lives on the tensor
// product of the support's local spaces, sites in ascending vertex order.
struct LocalObservable {
  std::vector<int> support;
  Matrix matrix;
};

// Validates the support/matrix dimension match and sorts nothing: the support
// must already be strictly ascending.
LocalObservable make_observable(std::vector<int> support, Matrix matrix,
                                const SiteBasis& basis);

const Matrix& pauli_matrix(char axis);  // 'x' | 'y' | 'z'
LocalObservable pauli_site(int site, char axis);
LocalObservable identity_observable(std::vector<int> support, const SiteBasis& basis);

// obs ⊗ identity on volume∖support.
LocalObservable embed(const LocalObservable& obs, std::span<const int> volume,
                      const SiteBasis& basis,
                      std::int64_t dim_cap = SiteBasis::kDefaultDimCap);

// Largest singular value.
double operator_norm(const Matrix& m);
double operator_norm(const LocalObservable& obs);

// ||M - M*|| in the spectral norm.
double hermiticity_defect(const Matrix& m);

}  // namespace lrcert
