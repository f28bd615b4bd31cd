#include "nomabf/worst_case_error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace nomabf {

InnerQuadratic assemble_quadratic(int l, const ScalingSet& t,
                                  const BeamformerSet& beams,
                                  const ChannelSet& channels) {
  const int U = channels.users();
  const int N = channels.antennas();
  detail::require(l >= 0 && l < U, "assemble_quadratic: decoder index out of range");
  detail::require(beams.users() == U && t.users() == U,
                  "assemble_quadratic: size mismatch");

  const CVec& h = channels.estimates[l];
  CMat all = CMat::Zero(N, N);
  for (int i = 0; i < U; ++i) all += beams.beams[i] * beams.beams[i].adjoint();

  InnerQuadratic q{CMat::Zero(N, N), CVec::Zero(N), 0.0};
  for (int j = 0; j <= l; ++j) {
    const Complex tj = t(j, l);
    const double t2 = std::norm(tj);
    const CVec& wj = beams.beams[j];
    q.A += t2 * (all - wj * wj.adjoint());

    CMat stronger = CMat::Zero(N, N);
    double stronger_power = 0;
    for (int k = j + 1; k < U; ++k) {
      stronger += beams.beams[k] * beams.beams[k].adjoint();
      stronger_power += std::norm(h.dot(beams.beams[k]));
    }
    q.b += std::conj(tj) * wj - t2 * (stronger * h);
    q.c += 2.0 * std::real(std::conj(tj) * h.dot(wj)) -
           t2 * (stronger_power + channels.sigma2);
  }
  q.A = 0.5 * (q.A + q.A.adjoint()).eval();
  return q;
}

double inner_objective(const InnerQuadratic& q, const CVec& e) {
  return -std::real(e.dot(q.A * e)) + 2.0 * std::real(e.dot(q.b)) + q.c;
}

namespace {

struct Spectrum {
  Eigen::VectorXd values;   // eigenvalues of A, ascending
  Eigen::VectorXd weights;  // |v_k^H b|^2
  CVec coeffs;              // v_k^H b
  CMat vectors;
  double a_norm{0};
};

Spectrum spectrum(const InnerQuadratic& q) {
  const sdp::HermitianEig eig = sdp::hermitian_eig(q.A);
  Spectrum s;
  s.values = eig.values;
  s.vectors = eig.vectors;
  s.coeffs = eig.vectors.adjoint() * q.b;
  s.weights = s.coeffs.cwiseAbs2();
  s.a_norm = eig.values.cwiseAbs().maxCoeff();
  return s;
}

double singular_threshold(double lambda, double a_norm) {
  return 1e-8 * std::max(std::abs(lambda), a_norm);
}

// ||(lambda I - A)^+ b||^2 over components with lambda - a_k above `tau`.
double pinv_norm2(const Spectrum& s, double lambda, double tau) {
  double n2 = 0;
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    const double d = lambda - s.values(k);
    if (d > tau) n2 += s.weights(k) / (d * d);
  }
  return n2;
}

double dual_from_spectrum(const Spectrum& s, double c, double epsilon,
                          double lambda, double tau) {
  double v = c - lambda * epsilon * epsilon;
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    const double d = lambda - s.values(k);
    if (d > tau) v -= s.weights(k) / d;
  }
  return v;
}

// Smallest lambda >= lo with ||(lambda I - A)^{-1} b|| <= epsilon.
double solve_secular(const Spectrum& s, double epsilon, double lo, double b_norm) {
  const double a_max = s.values(s.values.size() - 1);
  const double target = epsilon * epsilon;
  double hi = std::max(lo, a_max) + b_norm / epsilon;
  auto phi = [&](double lambda) {
    double n2 = 0;
    for (Eigen::Index k = 0; k < s.values.size(); ++k) {
      const double d = lambda - s.values(k);
      if (s.weights(k) > 0) n2 += s.weights(k) / (d * d);
    }
    return n2;
  };
  // Newton on 1/||e(lambda)|| - 1/epsilon, which is nearly linear in lambda.
  double lambda = hi;
  for (int it = 0; it < 200; ++it) {
    const double n2 = phi(lambda);
    if (!(n2 > 0)) return lambda;
    if (n2 > target) lo = std::max(lo, lambda);
    else hi = std::min(hi, lambda);
    double dn2 = 0;
    for (Eigen::Index k = 0; k < s.values.size(); ++k) {
      const double d = lambda - s.values(k);
      if (s.weights(k) > 0) dn2 -= 2.0 * s.weights(k) / (d * d * d);
    }
    const double n = std::sqrt(n2);
    const double psi = 1.0 / n - 1.0 / epsilon;
    const double dpsi = -0.5 * dn2 / (n2 * n);
    double next = lambda - psi / dpsi;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - lambda) <= 1e-15 * std::max(1.0, std::abs(lambda))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

}  // namespace

DualSolution solve_dual(const InnerQuadratic& q, double epsilon,
                        const sdp::SdpOptions& options) {
  detail::require(epsilon >= 0, "solve_dual: negative radius");
  const Spectrum s = spectrum(q);
  const double a_max = s.values(s.values.size() - 1);
  DualSolution out;
  if (epsilon == 0.0) {
    out.lambda = out.sdp_lambda = std::max(a_max, 0.0);
    out.beta = out.sdp_beta = q.c;
    return out;
  }

  const int N = static_cast<int>(q.A.rows());
  // Variables: y = (lambda, beta); minimize -beta.
  sdp::SdpProblem p(2);
  p.objective(1) = -1.0;
  CMat F0 = CMat::Zero(N + 1, N + 1);
  F0.topLeftCorner(N, N) = -q.A;
  F0.topRightCorner(N, 1) = q.b;
  F0.bottomLeftCorner(1, N) = q.b.adjoint();
  F0(N, N) = q.c;
  CMat F_lambda = CMat::Zero(N + 1, N + 1);
  F_lambda.topLeftCorner(N, N).setIdentity();
  F_lambda(N, N) = -epsilon * epsilon;
  CMat F_beta = CMat::Zero(N + 1, N + 1);
  F_beta(N, N) = -1.0;
  p.add_hermitian_block(F0, {{0, F_lambda}, {1, F_beta}});
  p.add_nonnegative(0);

  const sdp::SdpSolution sol = sdp::solve_sdp(p, options);
  out.sdp_iterations = sol.iterations;
  out.status = sol.status;
  if (sol.status != SolverStatus::Optimal) return out;
  out.sdp_lambda = sol.y(0);
  out.sdp_beta = sol.y(1);

  // Refinement: the dual optimum is the smallest feasible lambda >= max(a_max, 0)
  // with ||e(lambda)|| <= epsilon (or the boundary itself in the hard case).
  const double lo = std::max(a_max, 0.0);
  const double tau = singular_threshold(lo, s.a_norm);
  const double b_norm = q.b.norm();
  bool top_component = false;
  for (Eigen::Index k = 0; k < s.values.size(); ++k)
    if (lo - s.values(k) <= tau && s.weights(k) > 1e-16 * b_norm * b_norm)
      top_component = true;

  double lambda = lo;
  if (top_component || pinv_norm2(s, lo, tau) > epsilon * epsilon)
    lambda = solve_secular(s, epsilon, lo, b_norm);
  out.lambda = lambda;
  out.beta = dual_from_spectrum(s, q.c, epsilon, lambda,
                                singular_threshold(lambda, s.a_norm));

  if (std::abs(out.beta - out.sdp_beta) > 1e-5 * (1.0 + std::abs(out.beta)))
    out.status = SolverStatus::NumericalFailure;
  return out;
}

double dual_value(const InnerQuadratic& q, double epsilon, double lambda) {
  detail::require(lambda >= 0, "dual_value: negative multiplier");
  const Spectrum s = spectrum(q);
  const double tau = singular_threshold(lambda, s.a_norm);
  const double minus_inf = -std::numeric_limits<double>::infinity();
  const double b_norm = q.b.norm();
  // Range test ||M M^+ b - b||: the part of b in the near-null space of M.
  double outside_range2 = 0;
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    const double d = lambda - s.values(k);
    if (d < -tau) return minus_inf;
    if (d <= tau) outside_range2 += s.weights(k);
  }
  if (std::sqrt(outside_range2) > 1e-8 * b_norm) return minus_inf;
  return dual_from_spectrum(s, q.c, epsilon, lambda, tau);
}

ErrorRecovery recover_error(const InnerQuadratic& q, double epsilon, double lambda) {
  detail::require(epsilon >= 0, "recover_error: negative radius");
  const int N = static_cast<int>(q.A.rows());
  ErrorRecovery out;
  if (epsilon == 0.0) {
    out.error = CVec::Zero(N);
    return out;
  }
  const Spectrum s = spectrum(q);
  const double tau = singular_threshold(lambda, s.a_norm);

  CVec e = CVec::Zero(N);
  int null_index = -1;
  double smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    const double d = lambda - s.values(k);
    if (d < -1e-7) out.status = SolverStatus::NumericalFailure;
    if (d > tau) {
      e -= (s.coeffs(k) / d) * s.vectors.col(k);
    } else if (d < smallest) {
      smallest = d;
      null_index = static_cast<int>(k);
    }
  }

  const double n = e.norm();
  if (n > epsilon + 1e-6) out.status = SolverStatus::NumericalFailure;
  if (n > epsilon) e *= epsilon / n;

  if (null_index >= 0 && lambda > tau) {
    out.hard_case = true;
    const double pad2 = epsilon * epsilon - e.squaredNorm();
    if (pad2 > 0) e += std::sqrt(pad2) * s.vectors.col(null_index);
  }
  const double final_norm = e.norm();
  if (final_norm > epsilon) e *= epsilon / final_norm;
  out.error = std::move(e);
  return out;
}

BruteForceResult brute_force_worst_error(const InnerQuadratic& q, double epsilon,
                                         int samples, std::uint64_t seed) {
  const int N = static_cast<int>(q.A.rows());
  detail::require(N <= 2, "brute_force_worst_error: at most 2 antennas");
  detail::require(samples >= 20, "brute_force_worst_error: too few samples");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;

  BruteForceResult best{CVec::Zero(N), q.c};
  if (epsilon == 0.0) return best;
  // Each sampled direction d is optimized exactly over its phase orbit and
  // radius: with e = r u d, |u| = 1, the best phase makes Re(u* d^H b) equal
  // -|d^H b|, leaving f = c - r^2 d^H A d - 2 r |d^H b| on 0 <= r <= epsilon.
  for (int i = 0; i < samples; ++i) {
    CVec d(N);
    for (int k = 0; k < N; ++k) d(k) = Complex(gauss(rng), gauss(rng));
    d /= d.norm();
    const Complex db = d.dot(q.b);
    const double a = -std::real(d.dot(q.A * d));
    const double g = -std::abs(db);
    double r = epsilon;
    if (a > 0) r = std::clamp(-g / a, 0.0, epsilon);
    const double v = q.c + r * r * a + 2 * r * g;
    if (v < best.value) {
      const Complex u = std::abs(db) > 0 ? -db / std::abs(db) : Complex(1.0);
      best = {r * u * d, v};
    }
  }
  return best;
}

}  // namespace nomabf
