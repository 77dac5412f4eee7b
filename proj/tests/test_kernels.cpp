#include "lrcert/kernels.hpp"

#include "oracles.hpp"
#include "testkit.hpp"

#include <numeric>
#include <random>

using namespace lrcert;
using testkit::check;
using testkit::check_near;
using testkit::check_throws;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

void test_embed_against_kron() {
  std::mt19937_64 rng(101);
  const SiteBasis basis(4, 2);
  const std::vector<int> volume{0, 1, 2, 3};

  // single-site embedding at each position matches the naive Kronecker chain
  for (int site = 0; site < 4; ++site) {
    const Matrix op = oracles::random_complex(2, 2, rng);
    const Matrix got = kernels::embed(op, std::vector<int>{site}, volume, basis);
    check_near(max_abs_diff(got, oracles::kron_at(op, site, 4)), 0.0, 1e-14,
               "embed single site " + std::to_string(site));
  }

  // non-contiguous two-site support {0, 2}: I at 1 and 3
  const Matrix op = oracles::random_complex(4, 4, rng);
  const Matrix id = Matrix::Identity(2, 2);
  Matrix expected = Matrix::Zero(16, 16);
  // build by summing elementary factors op = sum_{ij,kl} e_ij (x) e_kl over sites 0 and 2
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          Matrix e0 = Matrix::Zero(2, 2), e2 = Matrix::Zero(2, 2);
          e0(i, j) = 1.0;
          e2(k, l) = 1.0;
          expected += op(2 * i + k, 2 * j + l) *
                      oracles::kron(oracles::kron(oracles::kron(e0, id), e2), id);
        }
  const Matrix got = kernels::embed(op, std::vector<int>{0, 2}, volume, basis);
  check_near(max_abs_diff(got, expected), 0.0, 1e-13, "embed non-contiguous support");

  // embedding into its own support is the identity operation
  const Matrix same = kernels::embed(op, std::vector<int>{0, 1}, std::vector<int>{0, 1}, basis);
  check_near(max_abs_diff(same, op), 0.0, 0.0, "embed into own support");
}

void test_partial_trace_against_oracle() {
  std::mt19937_64 rng(202);
  const SiteBasis basis(3, 2);
  const std::vector<int> volume{0, 1, 2};
  const Matrix op = oracles::random_complex(8, 8, rng);

  for (const std::vector<int>& keep :
       {std::vector<int>{0}, std::vector<int>{1}, std::vector<int>{2}, std::vector<int>{0, 2}}) {
    const Matrix got = kernels::partial_trace(op, volume, keep, basis);
    const Matrix want = oracles::partial_trace_qubits(op, 3, keep);
    check_near(max_abs_diff(got, want), 0.0, 1e-13, "partial trace keep size " +
                                                        std::to_string(keep.size()));
  }

  // tracing nothing out
  const Matrix full = kernels::partial_trace(op, volume, volume, basis);
  check_near(max_abs_diff(full, op), 0.0, 0.0, "partial trace over nothing");
  // tracing everything out leaves the scalar trace
  const Matrix scalar = kernels::partial_trace(op, volume, std::vector<int>{}, basis);
  check_near(std::abs(scalar(0, 0) - op.trace()), 0.0, 1e-13, "full trace");
}

void test_product_expectation() {
  std::mt19937_64 rng(303);
  std::vector<Matrix> factors;
  Matrix rho_full = Matrix::Identity(1, 1);
  for (int s = 0; s < 3; ++s) {
    Matrix g = oracles::random_complex(2, 2, rng);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace();
    factors.push_back(rho);
    rho_full = oracles::kron(rho_full, rho);
  }
  const Matrix op = oracles::random_complex(8, 8, rng);
  const Complex got = kernels::product_state_expectation(op, factors);
  const Complex want = (rho_full * op).trace();
  check_near(std::abs(got - want), 0.0, 1e-13, "product state expectation vs dense trace");
}

void test_serial_parallel_agreement() {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 4);  // 3..6 qubits
    const SiteBasis basis(n, 2);
    std::vector<int> volume(static_cast<std::size_t>(n));
    std::iota(volume.begin(), volume.end(), 0);

    std::vector<int> subset;
    for (int s = 0; s < n; ++s)
      if (rng() % 2 == 0) subset.push_back(s);
    if (subset.empty()) subset.push_back(static_cast<int>(rng() % n));

    std::int64_t sub_dim = 1;
    for (std::size_t i = 0; i < subset.size(); ++i) sub_dim *= 2;
    const Matrix small = oracles::random_complex(sub_dim, sub_dim, rng);
    const Matrix big = oracles::random_complex(1 << n, 1 << n, rng);

    check((kernels::embed(small, subset, volume, basis).array() ==
           kernels::serial::embed(small, subset, volume, basis).array())
              .all(),
          "embed serial/parallel bitwise agreement");
    check((kernels::partial_trace(big, volume, subset, basis).array() ==
           kernels::serial::partial_trace(big, volume, subset, basis).array())
              .all(),
          "partial_trace serial/parallel bitwise agreement");

    std::vector<Matrix> factors;
    for (int s = 0; s < n; ++s) {
      Matrix g = oracles::random_complex(2, 2, rng);
      Matrix rho = g * g.adjoint();
      rho /= rho.trace();
      factors.push_back(rho);
    }
    check(kernels::product_state_expectation(big, factors) ==
              kernels::serial::product_state_expectation(big, factors),
          "product_state_expectation serial/parallel bitwise agreement");
  }
}

void test_validation() {
  const SiteBasis basis(3, 2);
  const std::vector<int> volume{0, 1, 2};
  const Matrix op = Matrix::Identity(2, 2);
  check_throws([&] { kernels::embed(op, std::vector<int>{3}, volume, basis); },
               "embed rejects support outside the volume");
  check_throws([&] { kernels::embed(op, std::vector<int>{0, 1}, volume, basis); },
               "embed rejects a dimension mismatch");
  check_throws([&] { kernels::partial_trace(op, volume, std::vector<int>{0}, basis); },
               "partial_trace rejects a dimension mismatch");
  check_throws([&] { SiteBasis(2, 2).space_dim(std::vector<int>{0, 1}, 2); },
               "space_dim enforces the cap");
}

}  // namespace

int main() {
  test_embed_against_kron();
  test_partial_trace_against_oracle();
  test_product_expectation();
  test_serial_parallel_agreement();
  test_validation();
  return testkit::summary("test_kernels");
}
