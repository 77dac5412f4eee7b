#include "lrcert/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>
#include <string>

namespace lrcert {

namespace {
constexpr double kHermiticityTol = 1e-12;
constexpr double kUnitarityTol = 1e-10;
constexpr double kStateTol = 1e-12;
}  // namespace

Evolution::Evolution(const LocalObservable& h, const SiteBasis& basis)
    : volume_(h.support), basis_(basis) {
  const double defect = hermiticity_defect(h.matrix);
  if (defect > kHermiticityTol)
    throw std::invalid_argument("Evolution: Hamiltonian is not Hermitian (defect " +
                                std::to_string(defect) + ")");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("Evolution: eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  const double unitarity =
      (eigenvectors_.adjoint() * eigenvectors_ - Matrix::Identity(eigenvectors_.rows(), eigenvectors_.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (unitarity > kUnitarityTol)
    throw std::runtime_error("Evolution: eigenbasis failed the unitarity check (defect " +
                             std::to_string(unitarity) + ")");
}

Matrix Evolution::unitary(double t) const {
  const Eigen::VectorXcd phases =
      (Complex(0, 1) * t * eigenvalues_.cast<Complex>()).array().exp();
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

LocalObservable Evolution::apply(const LocalObservable& obs, double t) const {
  const LocalObservable embedded = embed(obs, volume_, basis_);
  if (t == 0.0) return embedded;
  const Matrix u = unitary(t);
  return LocalObservable{volume_, u * embedded.matrix * u.adjoint()};
}

LocalObservable heisenberg_evolve(const LocalObservable& obs, const LocalObservable& h,
                                  double t, const SiteBasis& basis) {
  return Evolution(h, basis).apply(obs, t);
}

double commutator_norm(const LocalObservable& a, const LocalObservable& b,
                       const Evolution& evolution, double t) {
  const Matrix at = evolution.apply(a, t).matrix;
  const Matrix bm = embed(b, evolution.volume(), evolution.basis()).matrix;
  return operator_norm(Matrix(at * bm - bm * at));
}

LocalObservable haar_conditional_expectation(const LocalObservable& obs,
                                             std::span<const int> x_set,
                                             std::span<const int> volume,
                                             const SiteBasis& basis) {
  const LocalObservable embedded = embed(obs, volume, basis);
  std::vector<int> keep(x_set.begin(), x_set.end());
  if (keep.size() == volume.size()) return embedded;
  std::int64_t complement_dim = 1;
  for (int v : volume)
    if (!std::binary_search(keep.begin(), keep.end(), v)) complement_dim *= basis.dim(v);
  Matrix reduced = kernels::partial_trace(embedded.matrix, volume, keep, basis);
  reduced /= static_cast<double>(complement_dim);
  return LocalObservable{std::move(keep), std::move(reduced)};
}

ProductState::ProductState(const SiteBasis& basis) : basis_(basis) {
  factors_.reserve(static_cast<std::size_t>(basis.sites()));
  for (int s = 0; s < basis.sites(); ++s)
    factors_.push_back(Matrix::Identity(basis.dim(s), basis.dim(s)) /
                       static_cast<double>(basis.dim(s)));
}

ProductState ProductState::all_up(const SiteBasis& basis) {
  ProductState state(basis);
  for (int s = 0; s < basis.sites(); ++s) {
    Matrix rho = Matrix::Zero(basis.dim(s), basis.dim(s));
    rho(0, 0) = 1.0;
    state.set_site(s, std::move(rho));
  }
  return state;
}

ProductState ProductState::all_down(const SiteBasis& basis) {
  ProductState state(basis);
  for (int s = 0; s < basis.sites(); ++s) {
    const int d = basis.dim(s);
    Matrix rho = Matrix::Zero(d, d);
    rho(d - 1, d - 1) = 1.0;
    state.set_site(s, std::move(rho));
  }
  return state;
}

ProductState ProductState::maximally_mixed(const SiteBasis& basis) {
  return ProductState(basis);
}

void ProductState::set_site(int site, Matrix density) {
  if (site < 0 || site >= basis_.sites())
    throw std::invalid_argument("ProductState: site " + std::to_string(site) + " out of range");
  const int d = basis_.dim(site);
  if (density.rows() != d || density.cols() != d)
    throw std::invalid_argument("ProductState: density matrix dimension mismatch at site " +
                                std::to_string(site));
  if (std::abs(density.trace() - Complex(1.0)) > kStateTol)
    throw std::invalid_argument("ProductState: density matrix at site " + std::to_string(site) +
                                " is not unit trace");
  if (hermiticity_defect(density) > kStateTol)
    throw std::invalid_argument("ProductState: density matrix at site " + std::to_string(site) +
                                " is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(density, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kStateTol)
    throw std::invalid_argument("ProductState: density matrix at site " + std::to_string(site) +
                                " has a negative eigenvalue");
  factors_[static_cast<std::size_t>(site)] = std::move(density);
}

const Matrix& ProductState::site_factor(int site) const {
  if (site < 0 || site >= basis_.sites())
    throw std::invalid_argument("ProductState: site " + std::to_string(site) + " out of range");
  return factors_[static_cast<std::size_t>(site)];
}

Complex ProductState::expectation(const LocalObservable& obs) const {
  std::vector<Matrix> factors;
  factors.reserve(obs.support.size());
  for (int s : obs.support) factors.push_back(site_factor(s));
  return kernels::product_state_expectation(obs.matrix, factors);
}

Correlation dynamic_correlation(const LocalObservable& a, const LocalObservable& b,
                                const Evolution& evolution, const ProductState& omega,
                                double t) {
  std::vector<int> overlap;
  std::set_intersection(a.support.begin(), a.support.end(), b.support.begin(), b.support.end(),
                        std::back_inserter(overlap));
  if (!overlap.empty())
    throw std::invalid_argument("dynamic_correlation: observable supports overlap");

  const auto& vol = evolution.volume();
  const auto& basis = evolution.basis();
  const Matrix am = embed(a, vol, basis).matrix;
  const Matrix bm = embed(b, vol, basis).matrix;
  const LocalObservable ab{vol, am * bm};

  const Complex joint = omega.expectation(evolution.apply(ab, t));
  const Complex ea = omega.expectation(evolution.apply(LocalObservable{vol, am}, t));
  const Complex eb = omega.expectation(evolution.apply(LocalObservable{vol, bm}, t));
  const Complex value = joint - ea * eb;
  return Correlation{value, std::abs(value)};
}

Matrix haar_random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix z(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) z(i, j) = Complex(gauss(rng), gauss(rng));
  const Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    q.col(j) *= std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0);
  }
  return q;
}

}  // namespace lrcert
