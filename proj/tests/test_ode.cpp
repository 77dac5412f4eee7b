#include "lrcert/ode.hpp"

#include "lrcert/observable.hpp"
#include "oracles.hpp"
#include "testkit.hpp"

#include <cmath>

using namespace lrcert;
using testkit::check;
using testkit::check_le;
using testkit::check_near;
using testkit::check_throws;

namespace {

// Fixed-step fourth-order Runge-Kutta with a tiny step, as an integrator
// oracle independent of the adaptive library path.
Matrix rk4_fixed(const std::function<Matrix(double, const Matrix&)>& rhs, Matrix y, double t1,
                 double h = 1e-4) {
  double t = 0.0;
  while (t < t1) {
    const double step = std::min(h, t1 - t);
    const Matrix k1 = rhs(t, y);
    const Matrix k2 = rhs(t + step / 2, y + step / 2 * k1);
    const Matrix k3 = rhs(t + step / 2, y + step / 2 * k2);
    const Matrix k4 = rhs(t + step, y + step * k3);
    y += step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += step;
  }
  return y;
}

const ode::OdeProblem& find_problem(const std::vector<ode::OdeProblem>& suite,
                                    const std::string& name) {
  for (const auto& p : suite)
    if (p.name == name) return p;
  throw std::runtime_error("missing builtin problem " + name);
}

void test_homogeneous() {
  const auto suite = ode::builtin_problems();

  for (const auto& problem : suite) {
    const Matrix frozen = ode::propagate_homogeneous(problem, 0.0);
    check_near((frozen - problem.x0).cwiseAbs().maxCoeff(), 0.0, 0.0,
               problem.name + ": t=0 returns x0");
    // norm preservation along the flow
    const double base = ode::state_norm(problem, problem.x0);
    for (double t : {0.3 * problem.horizon, problem.horizon}) {
      const Matrix moved = ode::propagate_homogeneous(problem, t);
      check_near(ode::state_norm(problem, moved), base, 1e-8,
                 problem.name + ": norm preserved at t=" + std::to_string(t));
    }
  }

  // constant generator vs the matrix-exponential oracle
  const auto& precession = find_problem(suite, "precession_free");
  const Matrix gen = precession.generator(0.0);
  for (double t : {0.7, 1.9}) {
    const Matrix want = oracles::expm_taylor(t * gen) * precession.x0;
    const Matrix got = ode::propagate_homogeneous(precession, t);
    check_near((got - want).cwiseAbs().maxCoeff(), 0.0, 1e-9,
               "precession vs matrix exponential at t=" + std::to_string(t));
  }

  check_throws([&] { ode::propagate_homogeneous(precession, -0.5); },
               "negative time rejected");
  ode::OdeProblem bad = precession;
  bad.generator = [](double) { return Matrix(pauli_matrix('x')); };  // Hermitian, not anti
  check_throws([&] { ode::propagate_homogeneous(bad, 0.5); },
               "non-anti-Hermitian generator rejected");
}

void test_inhomogeneous() {
  const auto suite = ode::builtin_problems();

  // B = 0 reduces to the homogeneous flow
  {
    ode::OdeProblem free = find_problem(suite, "precession_free");
    const auto solution = ode::solve_inhomogeneous(free, 1.3);
    const Matrix hom = ode::propagate_homogeneous(free, 1.3);
    check_near((solution.direct - hom).cwiseAbs().maxCoeff(), 0.0, 1e-9,
               "zero forcing reduces to the homogeneous solution");
  }

  // A = 0 with constant B integrates to y0 + tB
  {
    const auto& constant = find_problem(suite, "constant_forcing");
    const double t = 1.7;
    const auto solution = ode::solve_inhomogeneous(constant, t);
    const Matrix want = constant.y0 + t * constant.forcing(0.0);
    check_near((solution.direct - want).cwiseAbs().maxCoeff(), 0.0, 1e-10,
               "constant forcing integrates linearly");
    check_near((solution.variation_of_constants - want).cwiseAbs().maxCoeff(), 0.0, 1e-10,
               "variation of constants agrees on the linear case");
  }

  // every builtin: direct vs variation-of-constants, and vs a fixed-step oracle
  for (const auto& problem : suite) {
    const double t = 0.8 * problem.horizon;
    const auto solution = ode::solve_inhomogeneous(problem, t);
    check_near((solution.direct - solution.variation_of_constants).cwiseAbs().maxCoeff(), 0.0,
               1e-7, problem.name + ": two integration routes agree");

    const bool vector_kind = problem.kind == ode::FlowKind::vector_state;
    const auto rhs = [&](double s, const Matrix& y) -> Matrix {
      const Matrix gen = problem.generator(s);
      Matrix out = vector_kind ? Matrix(gen * y) : Matrix(gen * y - y * gen);
      out += problem.forcing(s);
      return out;
    };
    const Matrix oracle = rk4_fixed(rhs, problem.y0, t);
    check_near((solution.direct - oracle).cwiseAbs().maxCoeff(), 0.0, 1e-7,
               problem.name + ": adaptive integrator vs fixed-step oracle");
  }
}

void test_verify_bound() {
  const auto suite = ode::builtin_problems();
  for (const auto& problem : suite) {
    std::vector<double> grid;
    for (int k = 1; k <= 6; ++k) grid.push_back(problem.horizon * k / 6.0);
    const ode::OdeReport report = ode::verify_bound(problem, grid);
    check(report.passed, problem.name + ": perturbation bound holds");
    for (const auto& row : report.rows) {
      check_le(row.deviation, row.forcing_integral + 1e-7,
               problem.name + ": bound at t=" + std::to_string(row.t));
      check_le(row.voc_difference, 1e-7, problem.name + ": VoC agreement in the report");
      check_le(row.norm_drift, 1e-8, problem.name + ": homogeneous norm drift");
    }
  }

  // the zero-generator constant-forcing case saturates the bound
  const auto& constant = find_problem(suite, "constant_forcing");
  const std::vector<double> grid{0.5, 1.0, 2.0};
  const ode::OdeReport report = ode::verify_bound(constant, grid);
  for (const auto& row : report.rows)
    check_near(row.deviation, row.forcing_integral, 1e-9,
               "saturation at t=" + std::to_string(row.t));

  // B = 0 gives zero on both sides
  const auto& free = find_problem(suite, "precession_free");
  const ode::OdeReport zero_report = ode::verify_bound(free, grid);
  for (const auto& row : zero_report.rows) {
    check_near(row.deviation, 0.0, 1e-9, "free flow has no deviation");
    check_near(row.forcing_integral, 0.0, 1e-12, "free flow has no forcing");
  }
}

}  // namespace

int main() {
  test_homogeneous();
  test_inhomogeneous();
  test_verify_bound();
  return testkit::summary("test_ode");
}
