#include "nomabf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace nomabf::sdp {

MatrixXd LmiBlock::value(const VectorXd& y) const {
  MatrixXd out = constant;
  for (const auto& [var, F] : terms) out += y(var) * F;
  return out;
}

void SdpProblem::add_nonnegative(int var) {
  add_linear_inequality(0.0, {{var, 1.0}});
}

void SdpProblem::add_linear_inequality(
    double constant, const std::vector<std::pair<int, double>>& coeffs) {
  LmiBlock block;
  block.constant = MatrixXd::Constant(1, 1, constant);
  for (const auto& [var, a] : coeffs) {
    if (a != 0.0) block.terms.emplace_back(var, MatrixXd::Constant(1, 1, a));
  }
  blocks.push_back(std::move(block));
}

void SdpProblem::add_hermitian_block(
    const CMat& constant, const std::vector<std::pair<int, CMat>>& terms) {
  LmiBlock block;
  block.constant = embed_hermitian(constant);
  for (const auto& [var, F] : terms) {
    if (F.cwiseAbs().maxCoeff() != 0.0)
      block.terms.emplace_back(var, embed_hermitian(F));
  }
  blocks.push_back(std::move(block));
}

void SdpProblem::validate() const {
  detail::require(num_vars >= 1, "SdpProblem: no variables");
  detail::require(objective.size() == num_vars, "SdpProblem: objective size");
  auto symmetric = [](const MatrixXd& M) {
    const double scale = 1.0 + M.cwiseAbs().maxCoeff();
    return (M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
  };
  for (const auto& b : blocks) {
    const int n = b.size();
    detail::require(n >= 1 && b.constant.cols() == n, "SdpProblem: block shape");
    detail::require(symmetric(b.constant), "SdpProblem: F0 not symmetric");
    for (const auto& [var, F] : b.terms) {
      detail::require(var >= 0 && var < num_vars, "SdpProblem: variable index");
      detail::require(F.rows() == n && F.cols() == n, "SdpProblem: term shape");
      detail::require(symmetric(F), "SdpProblem: F_i not symmetric");
    }
  }
}

namespace {

using Blocks = std::vector<MatrixXd>;

double inner(const Blocks& a, const Blocks& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k].array() * b[k].array()).sum();
  return s;
}

// Largest alpha with M + alpha dM still positive semidefinite (capped).
double max_step(const MatrixXd& M, const MatrixXd& dM) {
  constexpr double kCap = 1e30;
  Eigen::LLT<MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) return 0.0;
  const MatrixXd Linv_dM =
      llt.matrixL().solve(dM);
  const MatrixXd T = llt.matrixL().solve(Linv_dM.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (T + T.transpose()),
                                             Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0) return kCap;
  return std::min(kCap, -1.0 / lmin);
}

double max_step(const Blocks& M, const Blocks& dM) {
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < M.size(); ++k) a = std::min(a, max_step(M[k], dM[k]));
  return a;
}

constexpr int kStallIterations = 10;

class InteriorPoint {
 public:
  InteriorPoint(const SdpProblem& p, const SdpOptions& opt) : p_(p), opt_(opt) {}

  SdpSolution solve() {
    const int m = p_.num_vars;
    const int K = static_cast<int>(p_.blocks.size());
    n_total_ = 0;
    for (const auto& b : p_.blocks) n_total_ += b.size();

    const double c_norm = p_.objective.norm();
    X_.resize(K);
    S_.resize(K);
    for (int k = 0; k < K; ++k) {
      const auto& b = p_.blocks[k];
      const double n = b.size();
      double xi = std::max(10.0, std::sqrt(n));
      double eta = std::max({10.0, std::sqrt(n), b.constant.norm()});
      for (const auto& [var, F] : b.terms) {
        const double fn = F.norm();
        xi = std::max(xi, std::sqrt(n) * (1.0 + std::abs(p_.objective(var))) / (1.0 + fn));
        eta = std::max(eta, fn);
      }
      X_[k] = xi * MatrixXd::Identity(b.size(), b.size());
      S_[k] = eta * MatrixXd::Identity(b.size(), b.size());
    }
    y_ = VectorXd::Zero(m);

    SdpSolution sol;
    sol.status = SolverStatus::MaxIterations;
    double best_merit = std::numeric_limits<double>::infinity();
    int best_iter = 0;
    for (int iter = 0; iter <= opt_.max_iter; ++iter) {
      sol.iterations = iter;
      const Blocks Rd = dual_residual();
      const VectorXd rp = p_.objective - apply_A(X_);
      const double gap = inner(X_, S_);
      const double pobj = p_.objective.dot(y_);
      double dobj = 0;
      for (int k = 0; k < K; ++k) dobj -= (p_.blocks[k].constant.array() * X_[k].array()).sum();
      const double pinf = rp.norm() / (1.0 + c_norm);
      double dinf = 0;
      for (int k = 0; k < K; ++k)
        dinf = std::max(dinf, Rd[k].norm() / (1.0 + p_.blocks[k].constant.norm()));
      const double scale = 1.0 + std::abs(pobj);

      sol.duality_gap = std::max(gap, std::abs(pobj - dobj));
      sol.primal_infeasibility = dinf;
      if (pinf <= opt_.tol && dinf <= opt_.tol && gap <= opt_.tol * scale &&
          std::abs(pobj - dobj) <= opt_.tol * scale) {
        sol.status = SolverStatus::Optimal;
        break;
      }
      if (iter == opt_.max_iter) break;

      // Residuals that stop shrinking mean the attainable accuracy is reached.
      const double merit = std::max({pinf, dinf, gap / scale, std::abs(pobj - dobj) / scale});
      if (merit < 0.5 * best_merit) {
        best_merit = merit;
        best_iter = iter;
      } else if (iter - best_iter >= kStallIterations) {
        sol.status = SolverStatus::NumericalFailure;
        break;
      }

      double x_norm = 0, s_norm = 0;
      for (int k = 0; k < K; ++k) {
        x_norm = std::max(x_norm, X_[k].norm());
        s_norm = std::max(s_norm, S_[k].norm());
      }
      if (!std::isfinite(x_norm) || !std::isfinite(s_norm) || x_norm > 1e13 ||
          y_.cwiseAbs().maxCoeff() > 1e13) {
        sol.status = SolverStatus::NumericalFailure;
        break;
      }

      if (!factorize()) {
        sol.status = SolverStatus::NumericalFailure;
        break;
      }
      const double mu = gap / n_total_;

      // Predictor.
      Blocks Rc(K);
      for (int k = 0; k < K; ++k) Rc[k] = -X_[k] * S_[k];
      Direction pred = direction(Rc, Rd, rp);
      if (!pred.ok) {
        sol.status = SolverStatus::NumericalFailure;
        break;
      }
      const double ap = std::min(1.0, max_step(X_, pred.dX));
      const double ad = std::min(1.0, max_step(S_, pred.dS));
      double mu_aff = 0;
      for (int k = 0; k < K; ++k)
        mu_aff += ((X_[k] + ap * pred.dX[k]).array() * (S_[k] + ad * pred.dS[k]).array()).sum();
      mu_aff /= n_total_;
      double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3);
      sigma = std::clamp(sigma, 0.0, 1.0);

      // Corrector.
      for (int k = 0; k < K; ++k) {
        Rc[k] = sigma * mu * MatrixXd::Identity(X_[k].rows(), X_[k].cols()) -
                X_[k] * S_[k] - pred.dX[k] * pred.dS[k];
      }
      Direction corr = direction(Rc, Rd, rp);
      if (!corr.ok) {
        sol.status = SolverStatus::NumericalFailure;
        break;
      }
      const double amax_p = max_step(X_, corr.dX);
      const double amax_d = max_step(S_, corr.dS);
      const double gamma = 0.9 + 0.09 * std::min({1.0, amax_p, amax_d});
      const double step_p = std::min(1.0, gamma * amax_p);
      const double step_d = std::min(1.0, gamma * amax_d);
      if (step_p < 1e-12 && step_d < 1e-12) {
        sol.status = SolverStatus::NumericalFailure;
        break;
      }
      for (int k = 0; k < K; ++k) {
        X_[k] += step_p * corr.dX[k];
        S_[k] += step_d * corr.dS[k];
        X_[k] = 0.5 * (X_[k] + X_[k].transpose()).eval();
        S_[k] = 0.5 * (S_[k] + S_[k].transpose()).eval();
      }
      y_ += step_d * corr.dy;
    }

    sol.y = y_;
    sol.objective_value = p_.objective.dot(y_);
    if (sol.status == SolverStatus::Optimal) {
      for (const auto& b : p_.blocks) {
        const MatrixXd F = b.value(y_);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(F, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) < -1e-7 * (1.0 + b.constant.norm())) {
          sol.status = SolverStatus::NumericalFailure;
          break;
        }
      }
    }
    return sol;
  }

 private:
  struct Direction {
    Blocks dX, dS;
    VectorXd dy;
    bool ok{false};
  };

  VectorXd apply_A(const Blocks& X) const {
    VectorXd out = VectorXd::Zero(p_.num_vars);
    for (std::size_t k = 0; k < p_.blocks.size(); ++k)
      for (const auto& [var, F] : p_.blocks[k].terms)
        out(var) += (F.array() * X[k].array()).sum();
    return out;
  }

  Blocks apply_At(const VectorXd& dy) const {
    Blocks out(p_.blocks.size());
    for (std::size_t k = 0; k < p_.blocks.size(); ++k) {
      const auto& b = p_.blocks[k];
      out[k] = MatrixXd::Zero(b.size(), b.size());
      for (const auto& [var, F] : b.terms) out[k] += dy(var) * F;
    }
    return out;
  }

  Blocks dual_residual() const {
    Blocks Rd(p_.blocks.size());
    for (std::size_t k = 0; k < p_.blocks.size(); ++k)
      Rd[k] = p_.blocks[k].value(y_) - S_[k];
    return Rd;
  }

  // S^{-1} per block and the Schur complement M_ij = tr(F_i X F_j S^{-1}).
  bool factorize() {
    const int m = p_.num_vars;
    const std::size_t K = p_.blocks.size();
    Sinv_.resize(K);
    MatrixXd M = MatrixXd::Zero(m, m);
    for (std::size_t k = 0; k < K; ++k) {
      const auto& b = p_.blocks[k];
      Eigen::LLT<MatrixXd> llt(S_[k]);
      if (llt.info() != Eigen::Success) return false;
      Sinv_[k] = llt.solve(MatrixXd::Identity(b.size(), b.size()));
      for (const auto& [j, Fj] : b.terms) {
        const MatrixXd B = X_[k] * Fj * Sinv_[k];
        for (const auto& [i, Fi] : b.terms) M(i, j) += (Fi.array() * B.array()).sum();
      }
    }
    M = 0.5 * (M + M.transpose()).eval();
    schur_ = M;
    lu_.compute(M);
    return schur_.allFinite();
  }

  Direction direction(const Blocks& Rc, const Blocks& Rd, const VectorXd& rp) const {
    const std::size_t K = p_.blocks.size();
    Direction d;
    Blocks G(K);
    for (std::size_t k = 0; k < K; ++k) G[k] = (Rc[k] - X_[k] * Rd[k]) * Sinv_[k];
    const VectorXd rhs = apply_A(G) - rp;
    d.dy = lu_.solve(rhs);
    if (!d.dy.allFinite()) return d;
    d.dS = apply_At(d.dy);
    d.dX.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      d.dS[k] += Rd[k];
      const MatrixXd dX = (Rc[k] - X_[k] * d.dS[k]) * Sinv_[k];
      d.dX[k] = 0.5 * (dX + dX.transpose());
    }
    d.ok = true;
    return d;
  }

  const SdpProblem& p_;
  const SdpOptions& opt_;
  int n_total_{0};
  Blocks X_, S_, Sinv_;
  VectorXd y_;
  MatrixXd schur_;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

double data_scale(const SdpProblem& p) {
  double s = 1.0;
  if (p.objective.size() > 0) s = std::max(s, p.objective.cwiseAbs().maxCoeff());
  for (const auto& b : p.blocks) s = std::max(s, b.constant.cwiseAbs().maxCoeff());
  return s;
}

void add_box(SdpProblem& p, int vars, double bound) {
  for (int i = 0; i < vars; ++i) {
    p.add_linear_inequality(bound, {{i, 1.0}});
    p.add_linear_inequality(bound, {{i, -1.0}});
  }
}

// Decides why the main solve failed: min s s.t. F(y) + s I >= 0, boxed.
SdpSolution classify(const SdpProblem& problem, const SdpOptions& options,
                     SdpSolution failed) {
  const int m = problem.num_vars;
  const double big_m = 1e4 * data_scale(problem);
  SdpOptions inner = options;
  inner.classify_failures = false;

  SdpProblem phase1(m + 1);
  phase1.objective(m) = 1.0;
  for (const auto& b : problem.blocks) {
    LmiBlock nb = b;
    nb.terms.emplace_back(m, MatrixXd::Identity(b.size(), b.size()));
    phase1.blocks.push_back(std::move(nb));
  }
  phase1.add_linear_inequality(1.0, {{m, 1.0}});
  add_box(phase1, m, big_m);
  const SdpSolution p1 = InteriorPoint(phase1, inner).solve();
  if (p1.status != SolverStatus::Optimal) return failed;
  if (p1.objective_value > 10 * options.tol * data_scale(problem)) {
    failed.status = SolverStatus::Infeasible;
    return failed;
  }

  SdpProblem boxed = problem;
  add_box(boxed, m, big_m);
  SdpSolution b = InteriorPoint(boxed, inner).solve();
  if (b.status != SolverStatus::Optimal) return failed;
  if (b.y.cwiseAbs().maxCoeff() > 0.5 * big_m) {
    b.status = SolverStatus::Unbounded;
    return b;
  }
  b.objective_value = problem.objective.dot(b.y);
  b.iterations += failed.iterations;
  return b;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  detail::require(options.tol > 0 && options.max_iter > 0, "solve_sdp: bad options");
  SdpSolution sol = InteriorPoint(problem, options).solve();
  if (sol.status != SolverStatus::Optimal && options.classify_failures)
    sol = classify(problem, options, std::move(sol));
  return sol;
}

double min_block_eigenvalue(const SdpProblem& problem, const VectorXd& y) {
  double lmin = std::numeric_limits<double>::infinity();
  for (const auto& b : problem.blocks) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(b.value(y), Eigen::EigenvaluesOnly);
    lmin = std::min(lmin, es.eigenvalues()(0));
  }
  return lmin;
}

MatrixXd embed_hermitian(const CMat& H) {
  detail::require(H.rows() == H.cols(), "embed_hermitian: not square");
  const double scale = 1.0 + H.cwiseAbs().maxCoeff();
  detail::require((H - H.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
                  "embed_hermitian: input not Hermitian");
  const Eigen::Index n = H.rows();
  MatrixXd out(2 * n, 2 * n);
  const MatrixXd re = 0.5 * (H + H.adjoint()).real();
  const MatrixXd im = 0.5 * (H + H.adjoint()).imag();
  out << re, -im, im, re;
  return out;
}

HermitianEig hermitian_eig(const CMat& H) {
  detail::require(H.rows() == H.cols(), "hermitian_eig: not square");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (H + H.adjoint()));
  return {es.eigenvalues(), es.eigenvectors()};
}

void write_problem(std::ostream& os, const SdpProblem& problem) {
  os.precision(17);
  os << "sdp " << problem.num_vars << ' ' << problem.blocks.size() << '\n';
  os << "objective";
  for (Eigen::Index i = 0; i < problem.objective.size(); ++i) os << ' ' << problem.objective(i);
  os << '\n';
  auto dump = [&os](const MatrixXd& M) {
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
      for (Eigen::Index c = 0; c < M.cols(); ++c) os << (c ? " " : "") << M(r, c);
      os << '\n';
    }
  };
  for (std::size_t k = 0; k < problem.blocks.size(); ++k) {
    const auto& b = problem.blocks[k];
    os << "block " << k << ' ' << b.size() << ' ' << b.terms.size() << '\n';
    os << "F0\n";
    dump(b.constant);
    for (const auto& [var, F] : b.terms) {
      os << "F " << var << '\n';
      dump(F);
    }
  }
}

}  // namespace nomabf::sdp
