#pragma once

#include "lrcert/observable.hpp"

#include <random>
#include <span>
#include <vector>

namespace lrcert {

// Spectral form of an embedded Hermitian Hamiltonian. Diagonalized once and
// reused across a grid of evolution times; the eigenbasis unitarity is
// verified at construction.
class Evolution {
 public:
  Evolution(const LocalObservable& h, const SiteBasis& basis);

  // tau_t(A) = e^{itH} A e^{-itH}; obs is embedded into the volume first.
  LocalObservable apply(const LocalObservable& obs, double t) const;
  Matrix unitary(double t) const;  // e^{itH}

  const std::vector<int>& volume() const { return volume_; }
  const SiteBasis& basis() const { return basis_; }

 private:
  std::vector<int> volume_;
  SiteBasis basis_;
  Eigen::VectorXd eigenvalues_;
  Matrix eigenvectors_;
};

LocalObservable heisenberg_evolve(const LocalObservable& obs, const LocalObservable& h,
                                  double t, const SiteBasis& basis);

// ||[tau_t(A), B]||.
double commutator_norm(const LocalObservable& a, const LocalObservable& b,
                       const Evolution& evolution, double t);

// Haar average of U* A U over unitaries on the complement of x_set, computed
// exactly as the normalized partial trace tensored with identity. The result
// is supported in x_set.
LocalObservable haar_conditional_expectation(const LocalObservable& obs,
                                             std::span<const int> x_set,
                                             std::span<const int> volume,
                                             const SiteBasis& basis);

// One density matrix per lattice site.
class ProductState {
 public:
  static ProductState all_up(const SiteBasis& basis);
  static ProductState all_down(const SiteBasis& basis);
  static ProductState maximally_mixed(const SiteBasis& basis);
  explicit ProductState(const SiteBasis& basis);

  // Unit trace within 1e-12, eigenvalues >= -1e-12.
  void set_site(int site, Matrix density);
  const Matrix& site_factor(int site) const;

  // Expectation of an observable embedded in `volume` (ascending site order).
  Complex expectation(const LocalObservable& obs) const;

 private:
  SiteBasis basis_;
  std::vector<Matrix> factors_;
};

struct Correlation {
  Complex value;     // <tau_t(AB)> - <tau_t(A)><tau_t(B)>
  double magnitude;  // |value|
};

// Requires disjoint supports, both inside the evolution volume.
Correlation dynamic_correlation(const LocalObservable& a, const LocalObservable& b,
                                const Evolution& evolution, const ProductState& omega,
                                double t);

// Haar-distributed unitary via QR of a complex Ginibre sample with the phase
// convention fixed by the R diagonal.
Matrix haar_random_unitary(Eigen::Index dim, std::mt19937_64& rng);

}  // namespace lrcert
