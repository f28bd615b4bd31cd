#pragma once

#include <cstdint>
#include <vector>

#include "nomabf/core_model.hpp"
#include "nomabf/sdp.hpp"

namespace nomabf {

// Hermitian n x n matrices are parametrized by n^2 real coordinates: the n
// diagonal entries, then (Re, Im) of every upper off-diagonal entry (k < l)
// in row-major order.
CMat hermitian_basis(int n, int coordinate);
CMat hermitian_from_coords(const Eigen::Ref<const Eigen::VectorXd>& coords, int n);

// Layout of the assembled relaxation:
//   variables: coordinates of W_u / power_unit, power_unit = max Gamma sigma^2,
//              which keeps the objective O(1); user u occupies [u n^2, (u+1) n^2)
//   blocks 0..U-1: W_u >= 0 (embedded)
//   blocks U..: one 1x1 SINR row per (u, l), u ascending then l ascending,
//               scaled to tr(H W_u)/(Gamma_u sigma^2) - ... - 1 >= 0
struct SdrRow {
  int user;
  int decoder;
};

struct SdrProblem {
  sdp::SdpProblem sdp;
  int users{0};
  int antennas{0};
  double power_unit{1};
  std::vector<SdrRow> rows;

  // W_u in mW from a solver point.
  [[nodiscard]] std::vector<CMat> matrices(const Eigen::VectorXd& y) const;
};

SdrProblem assemble_sdr(const ChannelSet& channels, const ErrorSet& errors,
                        const QosTargets& targets);

struct RankOneExtraction {
  CVec w;
  bool is_rank_one{false};
};

// Principal eigenvector scaled by sqrt(lambda_1), with its largest-magnitude
// entry rotated to the nonnegative real axis.
RankOneExtraction extract_rank_one(const CMat& W, double ratio_threshold = 1e-4);

// Rotates the largest-magnitude entry of w onto the nonnegative real axis.
CVec canonical_phase(const CVec& w);

struct RandomizationResult {
  BeamformerSet beams;
  bool success{false};
  double power{0};
};

// Gaussian randomization with a common power rescaling per candidate.
RandomizationResult randomize(const std::vector<CMat>& W, const ChannelSet& channels,
                              const ErrorSet& errors, const QosTargets& targets,
                              int n_trials, double ratio_threshold = 1e-4,
                              std::uint64_t seed = 0);

struct SdrOptions {
  sdp::SdpOptions sdp;
  double rank_one_threshold{1e-4};
  int randomization_trials{1000};
  std::uint64_t seed{0};
};

struct SdrResult {
  std::vector<CMat> W;
  BeamformerSet beams;
  double total_power{0};  // sum_u tr(W_u), the relaxation optimum
  double beam_power{0};   // sum_u ||w_u||^2 of the returned beams
  std::vector<bool> rank_one;
  bool used_randomization{false};
  bool randomization_succeeded{false};
  SolverStatus status{SolverStatus::NumericalFailure};
  int sdp_iterations{0};

  [[nodiscard]] bool all_rank_one() const {
    for (bool r : rank_one)
      if (!r) return false;
    return !rank_one.empty();
  }
};

SdrResult solve_power_min(const ChannelSet& channels, const ErrorSet& errors,
                          const QosTargets& targets, const SdrOptions& options = {});

}  // namespace nomabf
