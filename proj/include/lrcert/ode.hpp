#pragma once

#include "lrcert/kernels.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lrcert::ode {

// Two flavors of norm-preserving flow are verified: an anti-Hermitian
// generator acting on vectors (2-norm) and the commutator derivation
// X -> [A(t), X] acting on matrices (spectral norm).
enum class FlowKind { vector_state, commutator_state };

struct OdeProblem {
  std::string name;
  FlowKind kind = FlowKind::vector_state;
  std::function<Matrix(double)> generator;  // A(t), anti-Hermitian
  std::function<Matrix(double)> forcing;    // B(t): n x 1 vector or n x n matrix
  Matrix x0;                                // homogeneous initial value
  Matrix y0;                                // inhomogeneous initial value
  double horizon = 1.0;
  double rel_tol = 1e-9;
};

// Norm in which the flow preserves length: 2-norm for vector states,
// spectral norm for matrix states.
double state_norm(const OdeProblem& problem, const Matrix& state);

// gamma_t(x0) by adaptive Dormand-Prince integration of the homogeneous
// equation. Throws if step control fails, naming the interval.
Matrix propagate_homogeneous(const OdeProblem& problem, double t);

struct InhomogeneousSolution {
  Matrix direct;                  // integration of y' = A y + B
  Matrix variation_of_constants;  // gamma_t(y0 + integral of gamma_s^{-1} B(s))
};

InhomogeneousSolution solve_inhomogeneous(const OdeProblem& problem, double t);

// Adaptive Simpson quadrature of ||B(s)|| over [0, t].
double forcing_norm_integral(const OdeProblem& problem, double t, double tol = 1e-10);

struct OdeCheckRow {
  double t = 0.0;
  double deviation = 0.0;         // ||Y(t) - gamma_t(y0)||
  double forcing_integral = 0.0;  // integral of ||B|| over [0, t]
  double margin = 0.0;            // forcing_integral + slack - deviation
  double voc_difference = 0.0;    // direct vs variation-of-constants
  double norm_drift = 0.0;        // | ||gamma_t(x0)|| - ||x0|| |
};

struct OdeReport {
  std::string problem;
  std::vector<OdeCheckRow> rows;
  bool passed = true;
};

// Checks the perturbation bound deviation <= forcing_integral + slack at each
// grid time, plus generator anti-Hermiticity at the sampled times.
OdeReport verify_bound(const OdeProblem& problem, std::span<const double> t_grid,
                       double slack = 1e-7);

// Fixed problem suite used by the ode-check subcommand and the tests.
std::vector<OdeProblem> builtin_problems();

}  // namespace lrcert::ode
