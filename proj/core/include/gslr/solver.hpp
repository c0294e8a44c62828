#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gslr/grid.hpp"
#include "gslr/lifting.hpp"
#include "gslr/sampling.hpp"

namespace gslr {

/// Which components are reconstructed: both (GSLR), only the piecewise-constant
/// one (first-order SLA) or only the piecewise-linear one (second-order SLA).
enum class Mode
{
  gslr,
  sla1,
  sla2
};

std::string to_string(Mode m);
Mode mode_from_string(const std::string &s);

/// Solver for the weighted least-squares step of each outer iteration.
enum class InnerSolver
{
  cg,  // preconditioned conjugate gradients on the normal equations
  admm // variable splitting with pointwise closed-form updates
};

std::string to_string(InnerSolver s);
InnerSolver inner_solver_from_string(const std::string &s);

struct EpsilonSchedule
{
  double eps0 = 1.0;
  double eta = 2.0;
  double floor = 0.0;
};

/// eps(n) = max(eps0 / eta^n, floor).
double epsilon_schedule(int n, const EpsilonSchedule &schedule);

struct ReconConfig
{
  double lambda1 = 1e-6;
  double lambda2 = 1e-6;
  double p = 0.0;
  SupportSet filter1 = filter_support(7, 7);
  SupportSet filter2 = filter_support(7, 7);
  /// Absolute eps0. Non-positive selects eps0_scale times the largest
  /// eigenvalue of the Gram matrix of the zero-filled data, per component.
  double eps0 = 0.0;
  double eps0_scale = 1e-2;
  double eps_eta = 2.0;
  /// floor = eps_floor_scale * eps0; 1 freezes eps.
  double eps_floor_scale = 1e-9;
  int outer_iters = 30;
  int inner_iters = 50;
  InnerSolver inner = InnerSolver::cg;
  /// ADMM penalties, relative to the mean of the current spectrum mask.
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  Mode mode = Mode::gslr;
  /// Scale b to unit max modulus before solving (results are scaled back).
  bool normalize = true;

  bool has_first() const { return mode != Mode::sla2; }
  bool has_second() const { return mode != Mode::sla1; }
  void validate() const;
};

/// IRLS weights of one component for one outer iteration.
struct ComponentWeights
{
  int order = 1;
  SpectrumMask spectrum;     // circulant part, drives the ADMM y update
  LiftedQuadratic quadratic; // exact lifted quadratic form
};

ComponentWeights component_weights(const KArray &rho, int order, const SupportSet &filt, double p, double eps);

///
/// y = (c + gamma (q + F^* M rho)) / (S + gamma), pointwise on every channel.
/// c is the border correction (zero under the pure circulant model).
///
KArray subproblem_y(const KArray &q, const KArray &fmr, const SpectrumMask &s, double gamma,
                    const KArray *correction = nullptr);

///
/// Pointwise k-space solve of
///   (A^*A + gamma lambda M^*M) rho = gamma lambda M^* F (y - q) + A^*b - A^*A other.
/// Entries with a zero denominator (unsampled, zero weight) are set to 0.
///
KArray subproblem_rho(const KArray &b, const Mask &mask, const KArray &other, const KArray &y, const KArray &q,
                      int order, double lambda, double gamma);

/// Both components' rho updates solved together.
struct RhoPair
{
  KArray rho1;
  KArray rho2;
};

///
/// Pointwise 2x2 k-space solve of the joint rho step
///   [A^*A + g1 M1^*M1, A^*A; A^*A, A^*A + g2 M2^*M2] [rho1; rho2]
///     = [A^*b + g1 M1^* F (y1 - q1); A^*b + g2 M2^* F (y2 - q2)],   gi = gamma_i lambda_i.
/// Where the system is singular (DC, sampled or not) the sampled sum is kept
/// and rho2 stays at rho2_prev.
///
RhoPair subproblem_rho_pair(const KArray &b, const Mask &mask, const KArray &y1, const KArray &q1, int order1,
                            double lambda1, double gamma1, const KArray &y2, const KArray &q2, int order2,
                            double lambda2, double gamma2, const KArray &rho2_prev);

///
/// S y - F^* N F y per channel. The circulant penalty y^* S y counts lifting
/// rows that wrap around the grid border; subtracting them, linearized at y,
/// turns the y update into a majorize-minimize step on the exact penalty.
///
KArray border_correction(const KArray &y, const ComponentWeights &w);

struct InnerResult
{
  KArray rho1;
  KArray rho2;
  /// Weighted least-squares objective after each iteration.
  std::vector<double> objective;
  int iterations = 0;
  /// CG: relative normal-equation residual. ADMM: relative split residual.
  double residual = 0.0;
};

///
/// |A(rho1 + rho2) - b|^2 + lambda1 sum_c (w_c rho1)^* N1 (w_c rho1) + lambda2 (same for rho2),
/// the quadratic majorizer minimized by the inner solvers. A null weight
/// pointer drops that term.
///
double weighted_ls_objective(const KArray &rho1, const KArray &rho2, const KArray &b, const Mask &mask,
                             const ComponentWeights *w1, const ComponentWeights *w2, const ReconConfig &cfg);

/// Jointly minimizes the weighted least-squares objective over the components
/// with non-null weights; the others stay at their warm-start value.
InnerResult cg_least_squares(const KArray &b, const Mask &mask, const ComponentWeights *w1, const ComponentWeights *w2,
                             const ReconConfig &cfg, const KArray &rho1_init, const KArray &rho2_init);

/// ADMM on the split y_c = F^* w_c rho. Returns the best iterate seen,
/// including the warm start.
InnerResult admm_least_squares(const KArray &b, const Mask &mask, const ComponentWeights *w1,
                               const ComponentWeights *w2, const ReconConfig &cfg, const KArray &rho1_init,
                               const KArray &rho2_init);

/// |mask o (rho1 + rho2) - b|^2 + lambda1 P(G1 + eps1) + lambda2 P(G2 + eps2), with P the
/// smoothed Schatten penalty of the exact liftings. Inactive components contribute nothing.
double objective_value(const KArray &rho1, const KArray &rho2, const KArray &b, const Mask &mask,
                       const ReconConfig &cfg, double eps1, double eps2);

struct IterationRecord
{
  double objective = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  int inner_iterations = 0;
  double inner_residual = 0.0;
};

struct ReconResult
{
  KArray rho1_hat;
  KArray rho2_hat;
  KArray rho_hat; // rho1_hat + rho2_hat
  KArray rho1;
  KArray rho2;
  KArray rho;
  /// Entry 0 is the initial point; entry n the state after outer iteration n.
  /// Objectives are in normalized units (b scaled by 1 / data_scale).
  std::vector<IterationRecord> history;
  double data_scale = 1.0;
  std::optional<double> snr;
};

/// Outer IRLS loop: weights from the exact Gram matrices, then a weighted
/// least-squares solve warm-started from the previous iterate.
ReconResult irls_reconstruct(const KArray &b, const Mask &mask, const ReconConfig &cfg,
                             const KArray *truth_hat = nullptr);

} // namespace gslr
