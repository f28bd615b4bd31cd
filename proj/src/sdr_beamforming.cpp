#include "nomabf/sdr_beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nomabf/sampling.hpp"

namespace nomabf {

namespace {

// (k, l) of the off-diagonal pair behind coordinate index `pair`.
std::pair<int, int> pair_entry(int n, int pair) {
  for (int k = 0; k < n; ++k) {
    const int row_len = n - k - 1;
    if (pair < row_len) return {k, k + 1 + pair};
    pair -= row_len;
  }
  return {-1, -1};
}

// Re tr(M B_i) for every coordinate basis matrix B_i.
Eigen::VectorXd trace_coefficients(const CMat& M) {
  const int n = static_cast<int>(M.rows());
  Eigen::VectorXd out(n * n);
  for (int i = 0; i < n * n; ++i)
    out(i) = std::real((M * hermitian_basis(n, i)).trace());
  return out;
}

}  // namespace

CMat hermitian_basis(int n, int coordinate) {
  detail::require(coordinate >= 0 && coordinate < n * n, "hermitian_basis: bad index");
  CMat B = CMat::Zero(n, n);
  if (coordinate < n) {
    B(coordinate, coordinate) = 1.0;
    return B;
  }
  const int off = coordinate - n;
  const auto [k, l] = pair_entry(n, off / 2);
  if (off % 2 == 0) {
    B(k, l) = 1.0;
    B(l, k) = 1.0;
  } else {
    B(k, l) = Complex(0, 1);
    B(l, k) = Complex(0, -1);
  }
  return B;
}

CMat hermitian_from_coords(const Eigen::Ref<const Eigen::VectorXd>& coords, int n) {
  detail::require(coords.size() == n * n, "hermitian_from_coords: size");
  CMat W = CMat::Zero(n, n);
  for (int k = 0; k < n; ++k) W(k, k) = coords(k);
  for (int p = 0; p < n * (n - 1) / 2; ++p) {
    const auto [k, l] = pair_entry(n, p);
    W(k, l) = Complex(coords(n + 2 * p), coords(n + 2 * p + 1));
    W(l, k) = std::conj(W(k, l));
  }
  return W;
}

std::vector<CMat> SdrProblem::matrices(const Eigen::VectorXd& y) const {
  const int n2 = antennas * antennas;
  std::vector<CMat> out;
  out.reserve(users);
  for (int u = 0; u < users; ++u)
    out.push_back(power_unit * hermitian_from_coords(y.segment(u * n2, n2), antennas));
  return out;
}

SdrProblem assemble_sdr(const ChannelSet& channels, const ErrorSet& errors,
                        const QosTargets& targets) {
  const int U = channels.users();
  const int N = channels.antennas();
  check_shapes(channels, errors, BeamformerSet::zeros(N, U));
  detail::require(targets.users() == U, "assemble_sdr: target size mismatch");
  const int n2 = N * N;

  SdrProblem out;
  out.users = U;
  out.antennas = N;
  const double gamma_max = *std::max_element(targets.gamma.begin(), targets.gamma.end());
  detail::require(gamma_max > 0, "assemble_sdr: targets must be positive");
  out.power_unit = gamma_max * channels.sigma2;
  out.sdp = sdp::SdpProblem(U * n2);
  for (int u = 0; u < U; ++u)
    for (int k = 0; k < N; ++k) out.sdp.objective(u * n2 + k) = 1.0;

  for (int u = 0; u < U; ++u) {
    std::vector<std::pair<int, CMat>> terms;
    for (int i = 0; i < n2; ++i) terms.emplace_back(u * n2 + i, hermitian_basis(N, i));
    out.sdp.add_hermitian_block(CMat::Zero(N, N), terms);
  }

  for (int u = 0; u < U; ++u) {
    const double gamma = targets.gamma[u];
    for (int l = u; l < U; ++l) {
      const CVec& e = errors.errors[l];
      const CVec h = channels.estimates[l] + e;
      const Eigen::VectorXd hc = trace_coefficients(h * h.adjoint());
      const Eigen::VectorXd ec = trace_coefficients(e * e.adjoint());
      // Row divided by gamma sigma^2 so the solver's absolute feasibility
      // tolerance is a relative SINR tolerance.
      const double scale = out.power_unit / (gamma * channels.sigma2);
      std::vector<std::pair<int, double>> coeffs;
      for (int v = 0; v < U; ++v) {
        for (int i = 0; i < n2; ++i) {
          double a = 0;
          if (v == u) a = hc(i);
          else if (v < u) a = -gamma * ec(i);
          else a = -gamma * hc(i);
          coeffs.emplace_back(v * n2 + i, scale * a);
        }
      }
      out.sdp.add_linear_inequality(-1.0, coeffs);
      out.rows.push_back({u, l});
    }
  }
  return out;
}

CVec canonical_phase(const CVec& w) {
  if (w.size() == 0) return w;
  Eigen::Index idx = 0;
  w.cwiseAbs().maxCoeff(&idx);
  const double mag = std::abs(w(idx));
  if (mag == 0.0) return w;
  return w * (std::conj(w(idx)) / mag);
}

RankOneExtraction extract_rank_one(const CMat& W, double ratio_threshold) {
  const sdp::HermitianEig eig = sdp::hermitian_eig(W);
  const Eigen::Index n = eig.values.size();
  const double l1 = eig.values(n - 1);
  const double l2 = n >= 2 ? eig.values(n - 2) : 0.0;
  RankOneExtraction out;
  out.w = canonical_phase(std::sqrt(std::max(l1, 0.0)) * eig.vectors.col(n - 1));
  out.is_rank_one = l1 <= 1e-12 || std::max(l2, 0.0) / l1 <= ratio_threshold;
  return out;
}

namespace {

// Smallest s with s * q_row >= gamma sigma^2 for every row, or +inf.
double common_scaling(const BeamformerSet& beams, const ChannelSet& channels,
                      const ErrorSet& errors, const QosTargets& targets) {
  const int U = channels.users();
  double s = 0;
  for (int u = 0; u < U; ++u) {
    for (int l = u; l < U; ++l) {
      const CVec& e = errors.errors[l];
      const CVec h = channels.estimates[l] + e;
      double interference = 0;
      for (int m = 0; m < u; ++m) interference += std::norm(e.dot(beams.beams[m]));
      for (int k = u + 1; k < U; ++k) interference += std::norm(h.dot(beams.beams[k]));
      const double q =
          std::norm(h.dot(beams.beams[u])) - targets.gamma[u] * interference;
      if (!(q > 0)) return std::numeric_limits<double>::infinity();
      s = std::max(s, targets.gamma[u] * channels.sigma2 / q);
    }
  }
  return s;
}

constexpr double kMaxRestoreScaling = 1e-3;

double power_of(const BeamformerSet& beams) {
  double p = 0;
  for (const auto& w : beams.beams) p += w.squaredNorm();
  return p;
}

}  // namespace

RandomizationResult randomize(const std::vector<CMat>& W, const ChannelSet& channels,
                              const ErrorSet& errors, const QosTargets& targets,
                              int n_trials, double ratio_threshold, std::uint64_t seed) {
  const int U = static_cast<int>(W.size());
  const int N = channels.antennas();
  RandomizationResult out;
  out.beams = BeamformerSet::zeros(N, U);

  bool all_rank_one = true;
  BeamformerSet extracted = BeamformerSet::zeros(N, U);
  for (int u = 0; u < U; ++u) {
    const RankOneExtraction r = extract_rank_one(W[u], ratio_threshold);
    extracted.beams[u] = r.w;
    all_rank_one = all_rank_one && r.is_rank_one;
  }
  if (all_rank_one) {
    out.beams = extracted;
    out.success = true;
    out.power = power_of(extracted);
    return out;
  }
  if (n_trials <= 0) return out;

  std::vector<CMat> roots;
  roots.reserve(U);
  for (const auto& Wu : W) {
    const sdp::HermitianEig eig = sdp::hermitian_eig(Wu);
    const Eigen::VectorXd sq = eig.values.cwiseMax(0.0).cwiseSqrt();
    roots.push_back(eig.vectors * sq.asDiagonal() * eig.vectors.adjoint());
  }

  Rng rng = make_rng({seed, 0x5eed});
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  double best = std::numeric_limits<double>::infinity();
  BeamformerSet candidate = BeamformerSet::zeros(N, U);
  for (int trial = 0; trial < n_trials; ++trial) {
    for (int u = 0; u < U; ++u) {
      CVec z(N);
      for (int k = 0; k < N; ++k) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        z(k) = Complex(re, im);
      }
      candidate.beams[u] = roots[u] * z;
    }
    const double s = common_scaling(candidate, channels, errors, targets);
    if (!std::isfinite(s)) continue;
    const double p = s * power_of(candidate);
    if (p < best) {
      best = p;
      out.beams = candidate;
      for (auto& w : out.beams.beams) w = canonical_phase(std::sqrt(s) * w);
      out.success = true;
      out.power = p;
    }
  }
  return out;
}

SdrResult solve_power_min(const ChannelSet& channels, const ErrorSet& errors,
                          const QosTargets& targets, const SdrOptions& options) {
  const SdrProblem problem = assemble_sdr(channels, errors, targets);
  const sdp::SdpSolution sol = sdp::solve_sdp(problem.sdp, options.sdp);
  SdrResult out;
  out.status = sol.status;
  out.sdp_iterations = sol.iterations;
  const int U = problem.users;
  const int N = problem.antennas;
  out.beams = BeamformerSet::zeros(N, U);
  if (sol.status != SolverStatus::Optimal) return out;

  out.W = problem.matrices(sol.y);
  out.total_power = 0;
  for (const auto& W : out.W) out.total_power += std::real(W.trace());
  out.rank_one.resize(U);
  for (int u = 0; u < U; ++u) {
    const RankOneExtraction r = extract_rank_one(out.W[u], options.rank_one_threshold);
    out.beams.beams[u] = r.w;
    out.rank_one[u] = r.is_rank_one;
  }
  if (out.all_rank_one()) {
    // Dropping the trailing eigenvalues loses O(tol) of each signal term;
    // restore the constraints with the common power scaling.
    const double s = common_scaling(out.beams, channels, errors, targets);
    if (s > 1.0 && s < 1.0 + kMaxRestoreScaling)
      for (auto& w : out.beams.beams) w *= std::sqrt(s);
  } else {
    out.used_randomization = true;
    const RandomizationResult r =
        randomize(out.W, channels, errors, targets, options.randomization_trials,
                  options.rank_one_threshold, options.seed);
    out.randomization_succeeded = r.success;
    if (r.success) out.beams = r.beams;
  }
  out.beam_power = power_of(out.beams);
  return out;
}

}  // namespace nomabf
