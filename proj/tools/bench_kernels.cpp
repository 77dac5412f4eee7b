// Timing comparison of the OpenMP kernels against their serial references.
// Run with OMP_NUM_THREADS set to see the scaling.

#include "lrcert/kernels.hpp"

#include <chrono>
#include <cstdio>
#include <numeric>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

using lrcert::Complex;
using lrcert::Matrix;
using lrcert::SiteBasis;

namespace {

Matrix random_matrix(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

template <class F>
double time_ms(F&& fn, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return best;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; parallel entry points run serially\n");
#endif
  std::printf("%-22s %6s %12s %12s %8s\n", "kernel", "qubits", "serial ms", "parallel ms",
              "speedup");

  std::mt19937_64 rng(12345);
  for (int qubits : {8, 10, 11}) {
    const SiteBasis basis(qubits, 2);
    std::vector<int> volume(static_cast<std::size_t>(qubits));
    std::iota(volume.begin(), volume.end(), 0);
    const std::vector<int> support{0, qubits / 2};
    const Matrix small = random_matrix(4, rng);
    const Matrix big = random_matrix(std::int64_t{1} << qubits, rng);
    std::vector<Matrix> factors;
    for (int s = 0; s < qubits; ++s) {
      Matrix rho = random_matrix(2, rng);
      rho = (rho * rho.adjoint()).eval();
      rho /= rho.trace();
      factors.push_back(rho);
    }

    const int repeats = qubits >= 11 ? 3 : 5;
    Matrix sink;
    Complex csink;

    double serial = time_ms(
        [&] { sink = lrcert::kernels::serial::embed(small, support, volume, basis); }, repeats);
    double parallel =
        time_ms([&] { sink = lrcert::kernels::embed(small, support, volume, basis); }, repeats);
    std::printf("%-22s %6d %12.3f %12.3f %8.2f\n", "embed", qubits, serial, parallel,
                serial / parallel);

    serial = time_ms(
        [&] { sink = lrcert::kernels::serial::partial_trace(big, volume, support, basis); },
        repeats);
    parallel = time_ms(
        [&] { sink = lrcert::kernels::partial_trace(big, volume, support, basis); }, repeats);
    std::printf("%-22s %6d %12.3f %12.3f %8.2f\n", "partial_trace", qubits, serial, parallel,
                serial / parallel);

    serial = time_ms(
        [&] { csink = lrcert::kernels::serial::product_state_expectation(big, factors); },
        repeats);
    parallel = time_ms(
        [&] { csink = lrcert::kernels::product_state_expectation(big, factors); }, repeats);
    std::printf("%-22s %6d %12.3f %12.3f %8.2f\n", "product_expectation", qubits, serial,
                parallel, serial / parallel);
  }
  return 0;
}
