#include "lrcert/interaction.hpp"

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace lrcert {

namespace {
constexpr double kHermiticityTol = 1e-12;
}

void Interaction::add_term(std::vector<int> support, Matrix matrix) {
  LocalObservable obs = make_observable(std::move(support), std::move(matrix), basis_);
  const double defect = hermiticity_defect(obs.matrix);
  if (defect > kHermiticityTol)
    throw std::invalid_argument("Interaction: term is not Hermitian (defect " +
                                std::to_string(defect) + ")");
  terms_.push_back(InteractionTerm{std::move(obs.support), std::move(obs.matrix), 0.0});
  terms_.back().norm = operator_norm(terms_.back().matrix);
}

Interaction Interaction::scaled(double factor) const {
  Interaction out(basis_);
  for (const auto& term : terms_) out.add_term(term.support, factor * term.matrix);
  return out;
}

double phi_a_norm(const Interaction& phi, const MetricLattice& lattice, const FFunction& f) {
  f.validate();
  const int n = lattice.size();
  // Accumulate sum_{X contains x,y} ||phi(X)|| over ordered pairs, then divide
  // by F_a(d(x,y)) and take the sup. Diagonal pairs carry the on-site terms.
  std::vector<double> pair_sum(static_cast<std::size_t>(n) * n, 0.0);
  for (const auto& term : phi.terms()) {
    for (int x : term.support) {
      if (x >= n) throw std::invalid_argument("phi_a_norm: term support outside the lattice");
      for (int y : term.support)
        pair_sum[static_cast<std::size_t>(x) * n + y] += term.norm;
    }
  }
  double best = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const double s = pair_sum[static_cast<std::size_t>(x) * n + y];
      if (s > 0.0) best = std::max(best, s / f(lattice.distance(x, y)));
    }
  return best;
}

LocalObservable build_hamiltonian(const Interaction& phi, std::span<const int> volume,
                                  std::int64_t dim_cap) {
  const std::int64_t dim = phi.basis().space_dim(volume, dim_cap);
  Matrix h = Matrix::Zero(dim, dim);
  for (const auto& term : phi.terms()) {
    if (!std::includes(volume.begin(), volume.end(), term.support.begin(), term.support.end()))
      continue;
    h += kernels::embed(term.matrix, term.support, volume, phi.basis());
  }
  return LocalObservable{std::vector<int>(volume.begin(), volume.end()), std::move(h)};
}

LocalObservable partial_hamiltonian(const Interaction& phi, std::span<const int> volume,
                                    std::span<const int> y_set, std::int64_t dim_cap) {
  const std::int64_t dim = phi.basis().space_dim(volume, dim_cap);
  Matrix h = Matrix::Zero(dim, dim);
  for (const auto& term : phi.terms()) {
    if (!std::includes(volume.begin(), volume.end(), term.support.begin(), term.support.end()))
      continue;
    const bool meets_y = std::any_of(term.support.begin(), term.support.end(), [&](int s) {
      return std::find(y_set.begin(), y_set.end(), s) != y_set.end();
    });
    if (!meets_y) continue;
    h += kernels::embed(term.matrix, term.support, volume, phi.basis());
  }
  return LocalObservable{std::vector<int>(volume.begin(), volume.end()), std::move(h)};
}

DecoupledSplit decouple(const Interaction& phi, const MetricLattice& lattice,
                        std::span<const int> x_set, std::span<const int> y_set) {
  const double separation = lattice.set_distance(x_set, y_set);
  if (!(separation > 0.0))
    throw std::invalid_argument("decouple: supports are not separated (d(X,Y) = 0)");

  std::vector<int> ball;
  for (int v = 0; v < lattice.size(); ++v) {
    double d_to_x = std::numeric_limits<double>::infinity();
    for (int x : x_set) d_to_x = std::min(d_to_x, lattice.distance(v, x));
    if (d_to_x <= separation / 2.0) ball.push_back(v);
  }
  const std::set<int> ball_set(ball.begin(), ball.end());

  DecoupledSplit split{Interaction(phi.basis()), Interaction(phi.basis()), ball};
  for (const auto& term : phi.terms()) {
    bool meets_ball = false, meets_complement = false;
    for (int s : term.support) (ball_set.count(s) ? meets_ball : meets_complement) = true;
    if (meets_ball && meets_complement)
      split.phi2.add_term(term.support, term.matrix);
    else
      split.phi1.add_term(term.support, term.matrix);
  }
  return split;
}

Interaction tfim_model(const MetricLattice& lattice, double coupling, double field) {
  Interaction phi(SiteBasis(lattice.size(), 2));
  const Matrix& sz = pauli_matrix('z');
  const Matrix& sx = pauli_matrix('x');
  const Matrix zz = Eigen::kroneckerProduct(sz, sz).eval();
  for (auto [u, v] : lattice.edges()) {
    std::vector<int> support{std::min(u, v), std::max(u, v)};
    phi.add_term(std::move(support), coupling * zz);
  }
  if (field != 0.0)
    for (int s = 0; s < lattice.size(); ++s) phi.add_term({s}, field * sx);
  return phi;
}

Interaction heisenberg_model(const MetricLattice& lattice, double coupling) {
  Interaction phi(SiteBasis(lattice.size(), 2));
  Matrix bond = Matrix::Zero(4, 4);
  for (char axis : {'x', 'y', 'z'}) {
    const Matrix& s = pauli_matrix(axis);
    bond += Eigen::kroneckerProduct(s, s);
  }
  for (auto [u, v] : lattice.edges())
    phi.add_term({std::min(u, v), std::max(u, v)}, coupling * bond);
  return phi;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      entries.push_back({m(i, j).real(), m(i, j).imag()});
  return entries;
}

Matrix matrix_from_json(const nlohmann::json& entries) {
  if (!entries.is_array())
    throw std::invalid_argument("matrix: expected a row-major array of [re, im] pairs");
  const auto total = entries.size();
  const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(total))));
  if (dim * dim != static_cast<Eigen::Index>(total))
    throw std::invalid_argument("matrix: entry count " + std::to_string(total) +
                                " is not a perfect square");
  Matrix m(dim, dim);
  Eigen::Index k = 0;
  for (const auto& e : entries) {
    double re = 0.0, im = 0.0;
    if (e.is_array() && e.size() == 2) {
      re = e[0].get<double>();
      im = e[1].get<double>();
    } else if (e.is_number()) {
      re = e.get<double>();
    } else {
      throw std::invalid_argument("matrix: entries must be numbers or [re, im] pairs");
    }
    m(k / dim, k % dim) = Complex(re, im);
    ++k;
  }
  return m;
}

nlohmann::json interaction_to_json(const Interaction& phi) {
  nlohmann::json j;
  j["sites"] = phi.basis().sites();
  nlohmann::json dims = nlohmann::json::object();
  for (int s = 0; s < phi.basis().sites(); ++s)
    if (phi.basis().dim(s) != 2) dims[std::to_string(s)] = phi.basis().dim(s);
  if (!dims.empty()) j["dims"] = dims;
  j["terms"] = nlohmann::json::array();
  for (const auto& term : phi.terms())
    j["terms"].push_back({{"support", term.support}, {"matrix", matrix_to_json(term.matrix)}});
  return j;
}

Interaction interaction_from_json(const nlohmann::json& j) {
  if (!j.contains("sites")) throw std::invalid_argument("interaction: missing \"sites\"");
  SiteBasis basis(j.at("sites").get<int>(), 2);
  if (j.contains("dims"))
    for (const auto& [key, val] : j.at("dims").items())
      basis.set_dim(std::stoi(key), val.get<int>());
  Interaction phi(basis);
  for (const auto& term : j.value("terms", nlohmann::json::array()))
    phi.add_term(term.at("support").get<std::vector<int>>(),
                 matrix_from_json(term.at("matrix")));
  return phi;
}

}  // namespace lrcert
