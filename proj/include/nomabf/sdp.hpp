#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nomabf/types.hpp"

namespace nomabf::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// One linear matrix inequality F_0 + sum_i y_i F_i >= 0. Only variables
// with a nonzero coefficient matrix are listed in `terms`.
struct LmiBlock {
  MatrixXd constant;
  std::vector<std::pair<int, MatrixXd>> terms;

  [[nodiscard]] int size() const { return static_cast<int>(constant.rows()); }
  [[nodiscard]] MatrixXd value(const VectorXd& y) const;
};

// minimize c^T y  subject to  every block's LMI.
struct SdpProblem {
  int num_vars{0};
  VectorXd objective;
  std::vector<LmiBlock> blocks;

  SdpProblem() = default;
  explicit SdpProblem(int m) : num_vars(m), objective(VectorXd::Zero(m)) {}

  // y_i >= 0, as a 1x1 block.
  void add_nonnegative(int var);
  // Scalar inequality constant + sum coeff_i y_i >= 0, as a 1x1 block.
  void add_linear_inequality(double constant,
                             const std::vector<std::pair<int, double>>& coeffs);
  // Complex Hermitian LMI, added through its real symmetric embedding.
  void add_hermitian_block(const CMat& constant,
                           const std::vector<std::pair<int, CMat>>& terms);

  // Throws std::invalid_argument on inconsistent dimensions or asymmetry.
  void validate() const;
};

struct SdpOptions {
  double tol{1e-7};
  int max_iter{200};
  // Run the phase-I / big-M classification when the main solve fails.
  bool classify_failures{true};
};

struct SdpSolution {
  VectorXd y;
  double objective_value{0};
  SolverStatus status{SolverStatus::NumericalFailure};
  double duality_gap{0};
  double primal_infeasibility{0};
  int iterations{0};
};

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

// Smallest eigenvalue over all blocks at y.
double min_block_eigenvalue(const SdpProblem& problem, const VectorXd& y);

// [[Re H, -Im H], [Im H, Re H]]
MatrixXd embed_hermitian(const CMat& H);

struct HermitianEig {
  VectorXd values;  // ascending
  CMat vectors;     // orthonormal columns
};

HermitianEig hermitian_eig(const CMat& H);

// Plain-text dump: dimensions first, then every matrix row-major.
void write_problem(std::ostream& os, const SdpProblem& problem);

}  // namespace nomabf::sdp
