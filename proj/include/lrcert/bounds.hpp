#pragma once

#include "lrcert/interaction.hpp"
#include "lrcert/lattice.hpp"

#include <nlohmann/json_fwd.hpp>

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace lrcert {

// Geometric and interaction constants entering the certificates, evaluated on
// one lattice at one tilt.
struct CertificateConstants {
  double a = 0.0;
  double f_norm_base = 0.0;  // ||F|| at tilt 0
  double f_norm_a = 0.0;     // ||F_a||
  double conv_a = 0.0;       // C_a
  double phi_a = 0.0;        // ||Phi||_a
};

CertificateConstants compute_constants(const Interaction& phi, const MetricLattice& lattice,
                                       const FFunction& base_profile, double a);

enum class CertificateKind {
  lr,
  lr_exp,
  localization,
  convergence,
  correlation_simple,
  correlation_tail,
};

const char* to_string(CertificateKind kind);

// Evaluated right-hand side of one inequality, with every input recorded.
struct BoundCertificate {
  CertificateKind kind = CertificateKind::lr;
  double t = 0.0;
  std::vector<int> x_set;
  std::vector<int> y_set;
  double norm_a = 0.0;
  double norm_b = 0.0;
  CertificateConstants constants;
  std::string lattice_id;
  double epsilon = std::numeric_limits<double>::quiet_NaN();  // localization only
  std::vector<int> ball;                                      // localization only
  double value = 0.0;
};

nlohmann::json certificate_to_json(const BoundCertificate& cert);

// e^{2 kappa |t|} - 1 when the supports are separated, e^{2 kappa |t|}
// otherwise, with kappa = phi_a * c_a.
double g_factor(double phi_a, double c_a, double t, bool separated);

// Integral of the separated branch: (e^{2 kappa |t|} - 1) / (2 kappa) - |t|.
double g_integral(double phi_a, double c_a, double t);

// (2 ||A|| ||B|| / C_a) g_a(t) sum_{x in X} sum_{y in Y} F_a(d(x,y)).
BoundCertificate lr_certificate(double t, std::span<const int> x_set,
                                std::span<const int> y_set, double norm_a, double norm_b,
                                const CertificateConstants& constants,
                                const MetricLattice& lattice, const FFunction& base_profile);

// (2 ||A|| ||B|| / C_a) ||F|| min(|X|,|Y|) e^{-a [d(X,Y) - (2 phi_a C_a / a) |t|]};
// requires a > 0.
BoundCertificate lr_certificate_exponential(double t, std::span<const int> x_set,
                                            std::span<const int> y_set, double norm_a,
                                            double norm_b,
                                            const CertificateConstants& constants,
                                            const MetricLattice& lattice);

struct VelocityResult {
  double v = 0.0;
  double a_star = 0.0;
};

// inf over a > 0 of 2 ||Phi||_a C_a / a: logarithmic grid scan followed by
// golden-section refinement around the best sample.
VelocityResult velocity(const Interaction& phi, const MetricLattice& lattice,
                        const FFunction& base_profile, double a_min = 1e-3,
                        double a_max = 10.0, int grid_points = 64,
                        double rel_tol = 1e-6);

// Ball B_t(eps) = {v : d(v,X) <= (2 phi_a C_a / a)|t| + eps} and the bound
// (2 ||A|| |X| / C_a) ||F|| e^{-a eps}; requires a > 0.
BoundCertificate localization_certificate(double t, double epsilon,
                                          std::span<const int> x_set, double norm_a,
                                          const CertificateConstants& constants,
                                          const MetricLattice& lattice);

// 2 ||A|| phi_a C_a (integral of g_a) |Y| sup_{z in Y} sum_{x in n\m} F_a(d(x,z));
// volumes must be nested inside the lattice with supp(A) = Y inside the
// smaller one.
BoundCertificate convergence_certificate(double t, std::span<const int> y_set, double norm_a,
                                         std::span<const int> volume_m,
                                         std::span<const int> volume_n,
                                         const CertificateConstants& constants,
                                         const MetricLattice& lattice,
                                         const FFunction& base_profile);

// 4 ||A|| ||B|| ||F|| (|X| + |Y|) G_a(t) e^{-a d(X,Y)} with
// G_a(t) = ((C_a + ||F_a||) / C_a) ||Phi||_a * integral of g_a. Does not decay
// at a = 0; reported alongside the tail form, which does.
BoundCertificate correlation_certificate_simple(double t, std::span<const int> x_set,
                                                std::span<const int> y_set, double norm_a,
                                                double norm_b,
                                                const CertificateConstants& constants,
                                                const MetricLattice& lattice);

// 4 ||A|| ||B|| G_a(t) [ sum_{x in X} sum_{y: 2d(x,y) >= d(X,Y)} F_a(d(x,y))
//                      + the symmetric term over Y ].
BoundCertificate correlation_certificate_tail(double t, std::span<const int> x_set,
                                              std::span<const int> y_set, double norm_a,
                                              double norm_b,
                                              const CertificateConstants& constants,
                                              const MetricLattice& lattice,
                                              const FFunction& base_profile);

}  // namespace lrcert
