#include "lrcert/bounds.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lrcert {

namespace {

void require_nonempty(std::span<const int> x_set, std::span<const int> y_set) {
  if (x_set.empty() || y_set.empty())
    throw std::invalid_argument("certificate: support sets must be nonempty");
}

double pair_sum(std::span<const int> x_set, std::span<const int> y_set,
                const MetricLattice& lattice, const FFunction& f) {
  double sum = 0.0;
  for (int x : x_set)
    for (int y : y_set) sum += f(lattice.distance(x, y));
  return sum;
}

}  // namespace

CertificateConstants compute_constants(const Interaction& phi, const MetricLattice& lattice,
                                       const FFunction& base_profile, double a) {
  if (!(a >= 0.0)) throw std::invalid_argument("compute_constants: tilt a must be nonnegative");
  const FFunction untilted = base_profile.tilted(0.0);
  const FFunction tilted = base_profile.tilted(a);
  CertificateConstants c;
  c.a = a;
  c.f_norm_base = f_norm(lattice, untilted);
  c.f_norm_a = f_norm(lattice, tilted);
  c.conv_a = convolution_constant(lattice, tilted);
  c.phi_a = phi_a_norm(phi, lattice, tilted);
  return c;
}

const char* to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::lr: return "lr";
    case CertificateKind::lr_exp: return "lr_exp";
    case CertificateKind::localization: return "localization";
    case CertificateKind::convergence: return "convergence";
    case CertificateKind::correlation_simple: return "correlation_simple";
    case CertificateKind::correlation_tail: return "correlation_tail";
  }
  return "unknown";
}

nlohmann::json certificate_to_json(const BoundCertificate& cert) {
  nlohmann::json j{{"kind", to_string(cert.kind)},
                   {"t", cert.t},
                   {"a", cert.constants.a},
                   {"x_set", cert.x_set},
                   {"y_set", cert.y_set},
                   {"norm_a", cert.norm_a},
                   {"norm_b", cert.norm_b},
                   {"f_norm", cert.constants.f_norm_base},
                   {"f_norm_a", cert.constants.f_norm_a},
                   {"c_a", cert.constants.conv_a},
                   {"phi_a_norm", cert.constants.phi_a},
                   {"lattice", cert.lattice_id},
                   {"value", cert.value}};
  if (!std::isnan(cert.epsilon)) {
    j["epsilon"] = cert.epsilon;
    j["ball"] = cert.ball;
  }
  return j;
}

double g_factor(double phi_a, double c_a, double t, bool separated) {
  if (!(phi_a >= 0.0) || !(c_a >= 0.0))
    throw std::invalid_argument("g_factor: constants must be nonnegative");
  const double grown = std::exp(2.0 * phi_a * c_a * std::abs(t));
  return separated ? grown - 1.0 : grown;
}

double g_integral(double phi_a, double c_a, double t) {
  const double kappa = phi_a * c_a;
  const double abs_t = std::abs(t);
  if (kappa == 0.0) return 0.0;
  return std::expm1(2.0 * kappa * abs_t) / (2.0 * kappa) - abs_t;
}

BoundCertificate lr_certificate(double t, std::span<const int> x_set,
                                std::span<const int> y_set, double norm_a, double norm_b,
                                const CertificateConstants& constants,
                                const MetricLattice& lattice, const FFunction& base_profile) {
  require_nonempty(x_set, y_set);
  if (!(constants.conv_a > 0.0))
    throw std::invalid_argument("lr_certificate: C_a must be positive");
  const bool separated = lattice.set_distance(x_set, y_set) > 0.0;
  const FFunction f = base_profile.tilted(constants.a);
  BoundCertificate cert;
  cert.kind = CertificateKind::lr;
  cert.t = t;
  cert.x_set.assign(x_set.begin(), x_set.end());
  cert.y_set.assign(y_set.begin(), y_set.end());
  cert.norm_a = norm_a;
  cert.norm_b = norm_b;
  cert.constants = constants;
  cert.lattice_id = lattice.id();
  cert.value = 2.0 * norm_a * norm_b / constants.conv_a *
               g_factor(constants.phi_a, constants.conv_a, t, separated) *
               pair_sum(x_set, y_set, lattice, f);
  return cert;
}

BoundCertificate lr_certificate_exponential(double t, std::span<const int> x_set,
                                            std::span<const int> y_set, double norm_a,
                                            double norm_b,
                                            const CertificateConstants& constants,
                                            const MetricLattice& lattice) {
  require_nonempty(x_set, y_set);
  if (!(constants.a > 0.0))
    throw std::invalid_argument("lr_certificate_exponential: requires a > 0");
  if (!(constants.conv_a > 0.0))
    throw std::invalid_argument("lr_certificate_exponential: C_a must be positive");
  const double d = lattice.set_distance(x_set, y_set);
  const double velocity_term = 2.0 * constants.phi_a * constants.conv_a / constants.a;
  BoundCertificate cert;
  cert.kind = CertificateKind::lr_exp;
  cert.t = t;
  cert.x_set.assign(x_set.begin(), x_set.end());
  cert.y_set.assign(y_set.begin(), y_set.end());
  cert.norm_a = norm_a;
  cert.norm_b = norm_b;
  cert.constants = constants;
  cert.lattice_id = lattice.id();
  cert.value = 2.0 * norm_a * norm_b / constants.conv_a * constants.f_norm_base *
               static_cast<double>(std::min(x_set.size(), y_set.size())) *
               std::exp(-constants.a * (d - velocity_term * std::abs(t)));
  return cert;
}

VelocityResult velocity(const Interaction& phi, const MetricLattice& lattice,
                        const FFunction& base_profile, double a_min, double a_max,
                        int grid_points, double rel_tol) {
  if (!(a_min > 0.0) || !(a_max > a_min) || grid_points < 3)
    throw std::invalid_argument("velocity: invalid scan parameters");

  const auto objective = [&](double a) {
    const FFunction f = base_profile.tilted(a);
    return 2.0 * phi_a_norm(phi, lattice, f) * convolution_constant(lattice, f) / a;
  };

  // Logarithmic scan to bracket the minimum.
  std::vector<double> grid(static_cast<std::size_t>(grid_points));
  const double log_lo = std::log(a_min), log_hi = std::log(a_max);
  for (int i = 0; i < grid_points; ++i)
    grid[static_cast<std::size_t>(i)] =
        std::exp(log_lo + (log_hi - log_lo) * i / (grid_points - 1));

  int best = -1;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double v = objective(grid[static_cast<std::size_t>(i)]);
    if (std::isfinite(v) && v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best < 0)
    throw std::runtime_error("velocity: objective is non-finite on the whole scan grid");

  // Golden-section refinement on the bracketing interval.
  double lo = grid[static_cast<std::size_t>(std::max(0, best - 1))];
  double hi = grid[static_cast<std::size_t>(std::min(grid_points - 1, best + 1))];
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - golden * (hi - lo);
  double d = lo + golden * (hi - lo);
  double fc = objective(c), fd = objective(d);
  while (hi - lo > rel_tol * std::max(1.0, std::abs(lo))) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - golden * (hi - lo);
      fc = objective(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + golden * (hi - lo);
      fd = objective(d);
    }
  }
  const double a_star = 0.5 * (lo + hi);
  const double v_star = objective(a_star);
  if (v_star <= best_val) return VelocityResult{v_star, a_star};
  return VelocityResult{best_val, grid[static_cast<std::size_t>(best)]};
}

BoundCertificate localization_certificate(double t, double epsilon,
                                          std::span<const int> x_set, double norm_a,
                                          const CertificateConstants& constants,
                                          const MetricLattice& lattice) {
  if (x_set.empty())
    throw std::invalid_argument("localization_certificate: support set must be nonempty");
  if (!(constants.a > 0.0))
    throw std::invalid_argument("localization_certificate: requires a > 0");
  if (!(epsilon >= 0.0))
    throw std::invalid_argument("localization_certificate: epsilon must be nonnegative");

  const double radius =
      2.0 * constants.phi_a * constants.conv_a / constants.a * std::abs(t) + epsilon;
  BoundCertificate cert;
  cert.kind = CertificateKind::localization;
  cert.t = t;
  cert.x_set.assign(x_set.begin(), x_set.end());
  cert.norm_a = norm_a;
  cert.constants = constants;
  cert.lattice_id = lattice.id();
  cert.epsilon = epsilon;
  for (int v = 0; v < lattice.size(); ++v) {
    double d_to_x = std::numeric_limits<double>::infinity();
    for (int x : x_set) d_to_x = std::min(d_to_x, lattice.distance(v, x));
    if (d_to_x <= radius) cert.ball.push_back(v);
  }
  cert.value = 2.0 * norm_a * static_cast<double>(x_set.size()) / constants.conv_a *
               constants.f_norm_base * std::exp(-constants.a * epsilon);
  return cert;
}

BoundCertificate convergence_certificate(double t, std::span<const int> y_set, double norm_a,
                                         std::span<const int> volume_m,
                                         std::span<const int> volume_n,
                                         const CertificateConstants& constants,
                                         const MetricLattice& lattice,
                                         const FFunction& base_profile) {
  if (y_set.empty())
    throw std::invalid_argument("convergence_certificate: support set must be nonempty");
  if (!std::includes(volume_n.begin(), volume_n.end(), volume_m.begin(), volume_m.end()))
    throw std::invalid_argument("convergence_certificate: volumes are not nested");
  if (!std::includes(volume_m.begin(), volume_m.end(), y_set.begin(), y_set.end()))
    throw std::invalid_argument(
        "convergence_certificate: observable support must lie in the smaller volume");
  for (int v : volume_n)
    if (v < 0 || v >= lattice.size())
      throw std::invalid_argument("convergence_certificate: volume outside the lattice");

  const FFunction f = base_profile.tilted(constants.a);
  std::vector<int> difference;
  for (int v : volume_n)
    if (!std::binary_search(volume_m.begin(), volume_m.end(), v)) difference.push_back(v);

  double sup_tail = 0.0;
  for (int z : y_set) {
    double sum = 0.0;
    for (int x : difference) sum += f(lattice.distance(x, z));
    sup_tail = std::max(sup_tail, sum);
  }

  BoundCertificate cert;
  cert.kind = CertificateKind::convergence;
  cert.t = t;
  cert.x_set.assign(difference.begin(), difference.end());
  cert.y_set.assign(y_set.begin(), y_set.end());
  cert.norm_a = norm_a;
  cert.constants = constants;
  cert.lattice_id = lattice.id();
  cert.value = 2.0 * norm_a * constants.phi_a * constants.conv_a *
               g_integral(constants.phi_a, constants.conv_a, t) *
               static_cast<double>(y_set.size()) * sup_tail;
  return cert;
}

BoundCertificate correlation_certificate_simple(double t, std::span<const int> x_set,
                                                std::span<const int> y_set, double norm_a,
                                                double norm_b,
                                                const CertificateConstants& constants,
                                                const MetricLattice& lattice) {
  require_nonempty(x_set, y_set);
  const double d = lattice.set_distance(x_set, y_set);
  if (!(d > 0.0))
    throw std::invalid_argument("correlation_certificate_simple: requires d(X,Y) > 0");
  const double g_a_t = ((constants.conv_a + constants.f_norm_a) / constants.conv_a) *
                       constants.phi_a * g_integral(constants.phi_a, constants.conv_a, t);
  BoundCertificate cert;
  cert.kind = CertificateKind::correlation_simple;
  cert.t = t;
  cert.x_set.assign(x_set.begin(), x_set.end());
  cert.y_set.assign(y_set.begin(), y_set.end());
  cert.norm_a = norm_a;
  cert.norm_b = norm_b;
  cert.constants = constants;
  cert.lattice_id = lattice.id();
  cert.value = 4.0 * norm_a * norm_b * constants.f_norm_base *
               static_cast<double>(x_set.size() + y_set.size()) * g_a_t *
               std::exp(-constants.a * d);
  return cert;
}

BoundCertificate correlation_certificate_tail(double t, std::span<const int> x_set,
                                              std::span<const int> y_set, double norm_a,
                                              double norm_b,
                                              const CertificateConstants& constants,
                                              const MetricLattice& lattice,
                                              const FFunction& base_profile) {
  require_nonempty(x_set, y_set);
  const double d = lattice.set_distance(x_set, y_set);
  if (!(d > 0.0))
    throw std::invalid_argument("correlation_certificate_tail: requires d(X,Y) > 0");
  const FFunction f = base_profile.tilted(constants.a);

  // Tail of F_a over the half-distance shell around each support point.
  const auto tail_sum = [&](std::span<const int> support) {
    double sum = 0.0;
    for (int o : support)
      for (int v = 0; v < lattice.size(); ++v)
        if (2.0 * lattice.distance(o, v) >= d) sum += f(lattice.distance(o, v));
    return sum;
  };

  const double g_a_t = ((constants.conv_a + constants.f_norm_a) / constants.conv_a) *
                       constants.phi_a * g_integral(constants.phi_a, constants.conv_a, t);
  BoundCertificate cert;
  cert.kind = CertificateKind::correlation_tail;
  cert.t = t;
  cert.x_set.assign(x_set.begin(), x_set.end());
  cert.y_set.assign(y_set.begin(), y_set.end());
  cert.norm_a = norm_a;
  cert.norm_b = norm_b;
  cert.constants = constants;
  cert.lattice_id = lattice.id();
  cert.value = 4.0 * norm_a * norm_b * g_a_t * (tail_sum(x_set) + tail_sum(y_set));
  return cert;
}

}  // namespace lrcert
