#pragma once

#include "lrcert/lattice.hpp"
#include "lrcert/observable.hpp"

#include <nlohmann/json_fwd.hpp>

#include <span>
#include <vector>

namespace lrcert {

struct InteractionTerm {
  std::vector<int> support;  // ascending vertex ids
  Matrix matrix;             // Hermitian, on the support's Hilbert space
  double norm = 0.0;         // largest singular value, cached at insertion
};

// Finite map from vertex subsets to Hermitian local terms.
class Interaction {
 public:
  explicit Interaction(SiteBasis basis) : basis_(std::move(basis)) {}

  // Hermiticity is enforced to 1e-12 in the spectral norm.
  void add_term(std::vector<int> support, Matrix matrix);

  const std::vector<InteractionTerm>& terms() const { return terms_; }
  const SiteBasis& basis() const { return basis_; }
  bool empty() const { return terms_.empty(); }

  Interaction scaled(double factor) const;

 private:
  SiteBasis basis_;
  std::vector<InteractionTerm> terms_;
};

// Separation of the terms across the half-distance ball around X: phi2 holds
// every term meeting both the ball and its complement, phi1 the rest.
struct DecoupledSplit {
  Interaction phi1;
  Interaction phi2;
  std::vector<int> separating_set;
};

// sup over ordered pairs (x,y), diagonal included, of
// sum over terms containing both x and y of ||phi(X)|| / F_a(d(x,y)).
double phi_a_norm(const Interaction& phi, const MetricLattice& lattice,
                  const FFunction& f);

// H = sum of the terms supported inside `volume`, each embedded into the
// volume's Hilbert space.
LocalObservable build_hamiltonian(const Interaction& phi, std::span<const int> volume,
                                  std::int64_t dim_cap = SiteBasis::kDefaultDimCap);

// Same sum restricted to terms meeting y_set.
LocalObservable partial_hamiltonian(const Interaction& phi, std::span<const int> volume,
                                    std::span<const int> y_set,
                                    std::int64_t dim_cap = SiteBasis::kDefaultDimCap);

// Requires d(x_set, y_set) > 0; the separating set is the inclusive ball
// {v : d(v, x_set) <= d(x_set, y_set)/2}.
DecoupledSplit decouple(const Interaction& phi, const MetricLattice& lattice,
                        std::span<const int> x_set, std::span<const int> y_set);

// Model presets over the lattice's edge set.
// tfim: J sz_i sz_j per edge plus h sx_i per site.
Interaction tfim_model(const MetricLattice& lattice, double coupling, double field);
// heisenberg: J (sx sx + sy sy + sz sz) per edge.
Interaction heisenberg_model(const MetricLattice& lattice, double coupling);

// Interchange format: {"sites": N, "dims": {...}, "terms": [{"support": [...],
// "matrix": [[re, im], ...] row-major}]}.
nlohmann::json interaction_to_json(const Interaction& phi);
Interaction interaction_from_json(const nlohmann::json& j);

Matrix matrix_from_json(const nlohmann::json& entries);
nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace lrcert
