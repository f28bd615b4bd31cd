#pragma once

#include <cstdint>

#include "nomabf/quadratic_transform.hpp"
#include "nomabf/sdp.hpp"

namespace nomabf {

// Inner problem for decoder l: minimize -e^H A e + 2 Re(e^H b) + c over
// the ball ||e|| <= epsilon. Its value is the quadratic-transformed sum of
// SINRs of every stream decoded at l.
struct InnerQuadratic {
  CMat A;
  CVec b;
  double c{0};
};

InnerQuadratic assemble_quadratic(int l, const ScalingSet& t,
                                  const BeamformerSet& beams,
                                  const ChannelSet& channels);

double inner_objective(const InnerQuadratic& q, const CVec& e);

struct DualSolution {
  double lambda{0};
  double beta{0};
  SolverStatus status{SolverStatus::Optimal};
  // Raw interior-point output, before refinement on the secular equation.
  double sdp_lambda{0};
  double sdp_beta{0};
  int sdp_iterations{0};
};

// Maximizes beta over [[lambda I - A, b], [b^H, c - lambda eps^2 - beta]] >= 0,
// lambda >= 0, then refines lambda on the one-dimensional dual.
DualSolution solve_dual(const InnerQuadratic& q, double epsilon,
                        const sdp::SdpOptions& options = {});

// Lagrange dual function; -infinity outside its domain.
double dual_value(const InnerQuadratic& q, double epsilon, double lambda);

struct ErrorRecovery {
  CVec error;
  SolverStatus status{SolverStatus::Optimal};
  bool hard_case{false};
};

// e = -(lambda I - A)^{-1} b, completed with a null-space component when
// lambda I - A is singular.
ErrorRecovery recover_error(const InnerQuadratic& q, double epsilon, double lambda);

struct BruteForceResult {
  CVec error;
  double value{0};
};

// Sampling oracle over the closed ball, for N_t <= 2.
BruteForceResult brute_force_worst_error(const InnerQuadratic& q, double epsilon,
                                         int samples, std::uint64_t seed = 1);

}  // namespace nomabf
