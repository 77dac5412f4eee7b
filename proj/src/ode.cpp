#include "lrcert/ode.hpp"

#include "lrcert/observable.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lrcert::ode {

namespace {

constexpr double kAntiHermiticityTol = 1e-12;

using Stack = std::vector<Matrix>;
using StackRhs = std::function<Stack(double, const Stack&)>;

Stack axpy(const Stack& y, double h, const Stack& k) {
  Stack out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
  return out;
}

// Dormand-Prince 5(4) embedded pair with standard coefficients.
Stack rk45(const StackRhs& rhs, Stack y, double t0, double t1, double rel_tol,
           const std::string& what) {
  if (t1 == t0) return y;
  static const double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static const double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double b5[7] = {35.0 / 384,      0.0,  500.0 / 1113, 125.0 / 192,
                               -2187.0 / 6784, 11.0 / 84, 0.0};
  static const double b4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695, 393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  const double span = t1 - t0;
  double t = t0;
  double h = span / 16.0;
  const double h_min = std::abs(span) * 1e-14 + 1e-300;
  const double abs_tol = rel_tol * 1e-2;
  int rejected_in_a_row = 0;

  while (t < t1) {
    h = std::min(h, t1 - t);
    Stack k[7];
    k[0] = rhs(t, y);
    for (int stage = 1; stage < 7; ++stage) {
      Stack arg = y;
      for (int j = 0; j < stage; ++j)
        if (a[stage][j] != 0.0) arg = axpy(arg, h * a[stage][j], k[j]);
      k[stage] = rhs(t + c[stage] * h, arg);
    }
    Stack y5 = y, y4 = y;
    for (int stage = 0; stage < 7; ++stage) {
      if (b5[stage] != 0.0) y5 = axpy(y5, h * b5[stage], k[stage]);
      if (b4[stage] != 0.0) y4 = axpy(y4, h * b4[stage], k[stage]);
    }
    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double scale = abs_tol + rel_tol * std::max(y[i].norm(), y5[i].norm());
      err = std::max(err, (y5[i] - y4[i]).norm() / scale);
    }
    if (err <= 1.0) {
      t += h;
      y = std::move(y5);
      rejected_in_a_row = 0;
    } else if (++rejected_in_a_row > 60 || h <= h_min) {
      throw std::runtime_error(what + ": step control failed on [" + std::to_string(t) + ", " +
                               std::to_string(t + h) + "]");
    }
    const double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
  }
  return y;
}

Matrix apply_generator(const OdeProblem& problem, const Matrix& gen, const Matrix& state) {
  if (problem.kind == FlowKind::vector_state) return gen * state;
  return gen * state - state * gen;
}

void check_generator(const OdeProblem& problem, double t) {
  const Matrix gen = problem.generator(t);
  const double defect = (gen + gen.adjoint()).cwiseAbs().maxCoeff();
  if (defect > kAntiHermiticityTol)
    throw std::invalid_argument(problem.name + ": generator is not anti-Hermitian at t = " +
                                std::to_string(t) + " (defect " + std::to_string(defect) + ")");
}

void check_time(const OdeProblem& problem, double t) {
  if (t < 0.0 || t > problem.horizon)
    throw std::invalid_argument(problem.name + ": t = " + std::to_string(t) +
                                " outside [0, " + std::to_string(problem.horizon) + "]");
}

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double f_lo, double f_mid, double f_hi, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
  const double f_lmid = f(lmid), f_rmid = f(rmid);
  const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
  const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lmid + f_mid);
  const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rmid + f_hi);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, lo, mid, f_lo, f_lmid, f_mid, tol / 2.0, depth - 1) +
         adaptive_simpson(f, mid, hi, f_mid, f_rmid, f_hi, tol / 2.0, depth - 1);
}

}  // namespace

double state_norm(const OdeProblem& problem, const Matrix& state) {
  if (problem.kind == FlowKind::vector_state) return state.norm();
  return operator_norm(state);
}

Matrix propagate_homogeneous(const OdeProblem& problem, double t) {
  check_time(problem, t);
  check_generator(problem, 0.0);
  check_generator(problem, t);
  if (t == 0.0) return problem.x0;
  const StackRhs rhs = [&](double s, const Stack& y) {
    return Stack{apply_generator(problem, problem.generator(s), y[0])};
  };
  return rk45(rhs, Stack{problem.x0}, 0.0, t, problem.rel_tol, problem.name)[0];
}

InhomogeneousSolution solve_inhomogeneous(const OdeProblem& problem, double t) {
  check_time(problem, t);
  check_generator(problem, 0.0);
  check_generator(problem, t);
  if (t == 0.0) return InhomogeneousSolution{problem.y0, problem.y0};

  const StackRhs direct_rhs = [&](double s, const Stack& y) {
    return Stack{apply_generator(problem, problem.generator(s), y[0]) + problem.forcing(s)};
  };
  Matrix direct = rk45(direct_rhs, Stack{problem.y0}, 0.0, t, problem.rel_tol, problem.name)[0];

  // Variation of constants through the fundamental solution: propagate
  // U' = A U, W' = -W A (so W = U^{-1} with no unitarity assumption), and the
  // accumulated pullback v = integral of gamma_s^{-1}(B(s)).
  const Eigen::Index n = problem.generator(0.0).rows();
  const Matrix id = Matrix::Identity(n, n);
  const bool is_vector = problem.kind == FlowKind::vector_state;
  const StackRhs voc_rhs = [&](double s, const Stack& y) {
    const Matrix gen = problem.generator(s);
    const Matrix& u = y[0];
    const Matrix& w = y[1];
    const Matrix b = problem.forcing(s);
    Matrix pullback = is_vector ? Matrix(w * b) : Matrix(w * b * u);
    return Stack{gen * u, -w * gen, std::move(pullback)};
  };
  Stack init{id, id, Matrix::Zero(problem.y0.rows(), problem.y0.cols())};
  Stack voc = rk45(voc_rhs, std::move(init), 0.0, t, problem.rel_tol, problem.name);
  const Matrix& u = voc[0];
  const Matrix& w = voc[1];
  const Matrix shifted = problem.y0 + voc[2];
  Matrix reconstructed = is_vector ? Matrix(u * shifted) : Matrix(u * shifted * w);
  return InhomogeneousSolution{std::move(direct), std::move(reconstructed)};
}

double forcing_norm_integral(const OdeProblem& problem, double t, double tol) {
  check_time(problem, t);
  if (t == 0.0) return 0.0;
  const auto f = [&](double s) { return state_norm(problem, problem.forcing(s)); };
  const double f_lo = f(0.0), f_mid = f(0.5 * t), f_hi = f(t);
  return adaptive_simpson(f, 0.0, t, f_lo, f_mid, f_hi, tol, 48);
}

OdeReport verify_bound(const OdeProblem& problem, std::span<const double> t_grid,
                       double slack) {
  OdeReport report;
  report.problem = problem.name;
  const double x0_norm = state_norm(problem, problem.x0);
  for (double t : t_grid) {
    check_generator(problem, t);
    OdeCheckRow row;
    row.t = t;
    const Matrix hom_x = propagate_homogeneous(problem, t);
    row.norm_drift = std::abs(state_norm(problem, hom_x) - x0_norm);

    OdeProblem hom_y = problem;
    hom_y.x0 = problem.y0;
    const Matrix gamma_y0 = propagate_homogeneous(hom_y, t);

    const InhomogeneousSolution sol = solve_inhomogeneous(problem, t);
    row.deviation = state_norm(problem, sol.direct - gamma_y0);
    row.forcing_integral = forcing_norm_integral(problem, t);
    row.margin = row.forcing_integral + slack - row.deviation;
    row.voc_difference = state_norm(problem, sol.direct - sol.variation_of_constants);
    if (row.margin < 0.0) report.passed = false;
    report.rows.push_back(row);
  }
  return report;
}

std::vector<OdeProblem> builtin_problems() {
  const Matrix sx = pauli_matrix('x');
  const Matrix sy = pauli_matrix('y');
  const Matrix sz = pauli_matrix('z');
  const Complex i(0.0, 1.0);

  std::vector<OdeProblem> problems;

  {
    OdeProblem p;
    p.name = "precession_free";
    p.kind = FlowKind::vector_state;
    p.generator = [=](double) { return Matrix(i * sz); };
    p.forcing = [](double) { return Matrix::Zero(2, 1); };
    p.x0 = (Matrix(2, 1) << Complex(M_SQRT1_2, 0), Complex(0, M_SQRT1_2)).finished();
    p.y0 = p.x0;
    p.horizon = 2.0;
    problems.push_back(std::move(p));
  }
  {
    OdeProblem p;
    p.name = "constant_forcing";
    p.kind = FlowKind::vector_state;
    p.generator = [](double) { return Matrix(Matrix::Zero(2, 2)); };
    p.forcing = [](double) {
      return Matrix((Matrix(2, 1) << Complex(0.3, 0.0), Complex(-0.1, 0.2)).finished());
    };
    p.x0 = (Matrix(2, 1) << 1.0, 0.0).finished();
    p.y0 = p.x0;
    p.horizon = 2.0;
    problems.push_back(std::move(p));
  }
  {
    OdeProblem p;
    p.name = "driven_precession";
    p.kind = FlowKind::commutator_state;
    p.generator = [=](double) { return Matrix(i * sz); };
    p.forcing = [=](double) { return sx; };
    p.x0 = sx;
    p.y0 = sx;
    p.horizon = 2.0;
    problems.push_back(std::move(p));
  }
  {
    OdeProblem p;
    p.name = "time_dependent_drive";
    p.kind = FlowKind::vector_state;
    p.generator = [=](double t) { return Matrix(i * (std::cos(t) * sz + std::sin(t) * sx)); };
    p.forcing = [](double t) {
      return Matrix((Matrix(2, 1) << Complex(0.2 * std::exp(-t), 0), Complex(0, 0.1 * std::exp(-t)))
                        .finished());
    };
    p.x0 = (Matrix(2, 1) << 0.6, 0.8).finished();
    p.y0 = p.x0;
    p.horizon = 2.0;
    problems.push_back(std::move(p));
  }
  {
    OdeProblem p;
    p.name = "two_qubit_commutator";
    p.kind = FlowKind::commutator_state;
    const Matrix zz = Eigen::kroneckerProduct(sz, sz).eval();
    const Matrix x1 = Eigen::kroneckerProduct(sx, Matrix::Identity(2, 2)).eval();
    const Matrix x2 = Eigen::kroneckerProduct(Matrix::Identity(2, 2), sx).eval();
    const Matrix xz = Eigen::kroneckerProduct(sx, sz).eval();
    p.generator = [=](double) { return Matrix(i * (zz + x1 + x2)); };
    p.forcing = [=](double t) { return Matrix(0.1 * std::cos(t) * xz); };
    p.x0 = Eigen::kroneckerProduct(sz, Matrix::Identity(2, 2)).eval();
    p.y0 = p.x0;
    p.horizon = 1.5;
    problems.push_back(std::move(p));
  }
  return problems;
}

}  // namespace lrcert::ode
