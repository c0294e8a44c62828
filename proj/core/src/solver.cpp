#include "gslr/solver.hpp"

#include <cmath>

#include "gslr/fft.hpp"

namespace gslr {

std::string to_string(Mode m)
{
  switch (m) {
  case Mode::gslr: return "gslr";
  case Mode::sla1: return "sla1";
  case Mode::sla2: return "sla2";
  }
  return "gslr";
}

Mode mode_from_string(const std::string &s)
{
  if (s == "gslr" || s == "GSLR")
    return Mode::gslr;
  if (s == "sla1" || s == "SLA1")
    return Mode::sla1;
  if (s == "sla2" || s == "SLA2")
    return Mode::sla2;
  throw ContractError("unknown mode '" + s + "' (expected gslr, sla1 or sla2)");
}

std::string to_string(InnerSolver s) { return s == InnerSolver::admm ? "admm" : "cg"; }

InnerSolver inner_solver_from_string(const std::string &s)
{
  if (s == "cg")
    return InnerSolver::cg;
  if (s == "admm")
    return InnerSolver::admm;
  throw ContractError("unknown inner solver '" + s + "' (expected cg or admm)");
}

double epsilon_schedule(int n, const EpsilonSchedule &schedule)
{
  detail::require(n >= 0, "epsilon_schedule: iteration index must be non-negative");
  return std::max(schedule.eps0 / std::pow(schedule.eta, n), schedule.floor);
}

void ReconConfig::validate() const
{
  detail::require(lambda1 >= 0.0 && lambda2 >= 0.0, "lambda1 and lambda2 must be non-negative");
  detail::require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  detail::require(filter1.fx >= 1 && filter1.fy >= 1 && filter2.fx >= 1 && filter2.fy >= 1,
                  "filter supports must be non-empty");
  detail::require(eps0_scale > 0.0, "eps0_scale must be positive");
  detail::require(eps_eta > 1.0, "eps_eta must exceed 1");
  detail::require(eps_floor_scale >= 0.0, "eps_floor_scale must be non-negative");
  detail::require(outer_iters >= 1 && inner_iters >= 1, "iteration counts must be positive");
  detail::require(gamma1 > 0.0 && gamma2 > 0.0, "gamma1 and gamma2 must be positive");
}

ComponentWeights component_weights(const KArray &rho, int order, const SupportSet &filt, double p, double eps)
{
  const FilterBank bank = weight_sqrt_columns(gram_matrix(rho, order, filt, true), rho.grid, filt, p, eps);
  return ComponentWeights{order, filter_spectrum_mask(bank), lifted_quadratic(bank)};
}

KArray subproblem_y(const KArray &q, const KArray &fmr, const SpectrumMask &s, double gamma, const KArray *correction)
{
  detail::require(q.same_shape(fmr), "subproblem_y: q and F*M rho shapes differ");
  detail::require(s.grid == q.grid, "subproblem_y: spectrum mask grid mismatch");
  detail::require(gamma > 0.0, "subproblem_y: gamma must be positive");
  if (correction)
    detail::require(correction->same_shape(q), "subproblem_y: correction shape mismatch");
  KArray y(q.grid, q.channels);
  const Eigen::ArrayXd denom = s.values + gamma;
  for (int c = 0; c < q.channels; ++c) {
    Eigen::ArrayXcd num = gamma * (q.channel(c) + fmr.channel(c));
    if (correction)
      num += correction->channel(c);
    y.channel(c) = num / denom;
  }
  return y;
}

KArray subproblem_rho(const KArray &b, const Mask &mask, const KArray &other, const KArray &y, const KArray &q,
                      int order, double lambda, double gamma)
{
  detail::require(b.channels == 1 && other.same_shape(b), "subproblem_rho: b and other must be matching single-channel arrays");
  detail::require(mask.grid == b.grid, "subproblem_rho: mask grid mismatch");
  detail::require(y.same_shape(q) && y.grid == b.grid, "subproblem_rho: y and q shapes differ");
  const double gl = gamma * lambda;
  detail::require(gl >= 0.0, "subproblem_rho: gamma * lambda must be non-negative");

  const Eigen::ArrayXd a = mask.diagonal();
  const Eigen::ArrayXd w = derivative_gram_diagonal(b.grid, order);
  Eigen::ArrayXcd rhs = a * (b.channel(0) - other.channel(0));
  if (gl > 0.0) {
    KArray d = y;
    d.data -= q.data;
    rhs += gl * apply_derivative_weights(fft2_unitary(d), order, true).channel(0);
  }
  const Eigen::ArrayXd denom = a + gl * w;

  KArray rho(b.grid, 1);
  for (Eigen::Index i = 0; i < rho.data.size(); ++i) {
    if (denom(i) > 0.0)
      rho.data(i) = rhs(i) / denom(i);
    else if (a(i) > 0.0)
      throw SolverError("subproblem_rho: zero denominator at a sampled location");
  }
  return rho;
}

RhoPair subproblem_rho_pair(const KArray &b, const Mask &mask, const KArray &y1, const KArray &q1, int order1,
                            double lambda1, double gamma1, const KArray &y2, const KArray &q2, int order2,
                            double lambda2, double gamma2, const KArray &rho2_prev)
{
  detail::require(b.channels == 1 && rho2_prev.same_shape(b), "subproblem_rho_pair: b and rho2_prev must be matching single-channel arrays");
  detail::require(mask.grid == b.grid, "subproblem_rho_pair: mask grid mismatch");
  detail::require(y1.same_shape(q1) && y1.grid == b.grid && y2.same_shape(q2) && y2.grid == b.grid,
                  "subproblem_rho_pair: y and q shapes differ");
  const double gl1 = gamma1 * lambda1;
  const double gl2 = gamma2 * lambda2;
  detail::require(gl1 >= 0.0 && gl2 >= 0.0, "subproblem_rho_pair: gamma * lambda must be non-negative");

  const Eigen::ArrayXd a = mask.diagonal();
  const Eigen::ArrayXd u1 = gl1 * derivative_gram_diagonal(b.grid, order1);
  const Eigen::ArrayXd u2 = gl2 * derivative_gram_diagonal(b.grid, order2);
  const Eigen::ArrayXcd ab = a * b.channel(0);
  auto pull = [&](const KArray &y, const KArray &q, int order, double gl) {
    Eigen::ArrayXcd r = ab;
    if (gl > 0.0) {
      KArray d = y;
      d.data -= q.data;
      r += gl * apply_derivative_weights(fft2_unitary(d), order, true).channel(0);
    }
    return r;
  };
  const Eigen::ArrayXcd r1 = pull(y1, q1, order1, gl1);
  const Eigen::ArrayXcd r2 = pull(y2, q2, order2, gl2);

  RhoPair out{KArray(b.grid, 1), KArray(b.grid, 1)};
  for (Eigen::Index i = 0; i < ab.size(); ++i) {
    const double det = a(i) * (u1(i) + u2(i)) + u1(i) * u2(i);
    if (det > 0.0) {
      out.rho1.data(i) = ((a(i) + u2(i)) * r1(i) - a(i) * r2(i)) / det;
      out.rho2.data(i) = ((a(i) + u1(i)) * r2(i) - a(i) * r1(i)) / det;
    } else if (a(i) > 0.0) {
      out.rho2.data(i) = rho2_prev.data(i);
      out.rho1.data(i) = r1(i) / a(i) - rho2_prev.data(i);
    } else {
      out.rho1.data(i) = u1(i) > 0.0 ? r1(i) / u1(i) : 0.0;
      out.rho2.data(i) = u2(i) > 0.0 ? r2(i) / u2(i) : 0.0;
    }
  }
  return out;
}

KArray border_correction(const KArray &y, const ComponentWeights &w)
{
  detail::require(y.grid == w.quadratic.grid, "border_correction: grid mismatch");
  KArray out(y.grid, y.channels);
  KArray one(y.grid, 1);
  for (int c = 0; c < y.channels; ++c) {
    one.data = y.channel(c);
    KArray k = fft2_unitary(one);
    k.data = w.quadratic.apply(k.data);
    out.channel(c) = w.spectrum.values * y.channel(c) - ifft2_unitary(k).data;
  }
  return out;
}

namespace {

KArray spatial_derivatives(const KArray &rho, int order)
{
  return ifft2_unitary(apply_derivative_weights(rho, order));
}

double data_misfit(const KArray &rho1, const KArray &rho2, const KArray &b, const Mask &mask)
{
  const Eigen::ArrayXd a = mask.diagonal();
  return (a * (rho1.channel(0) + rho2.channel(0)) - b.channel(0)).abs2().sum();
}

// sum_c (w_c x)^* N (w_c x)
double penalty_energy(const Eigen::ArrayXcd &x, const ComponentWeights &w)
{
  double acc = 0.0;
  for (const Eigen::ArrayXd &wc : derivative_weights(w.quadratic.grid, w.order)) {
    const Eigen::ArrayXcd u = wc * x;
    acc += (u.conjugate() * w.quadratic.apply(u)).sum().real();
  }
  return acc;
}

// sum_c w_c N (w_c x)
Eigen::ArrayXcd penalty_normal(const Eigen::ArrayXcd &x, const std::vector<Eigen::ArrayXd> &weights,
                               const ComponentWeights &w)
{
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(x.size());
  for (const Eigen::ArrayXd &wc : weights)
    out += wc * w.quadratic.apply(wc * x);
  return out;
}

double relative_residual(const KArray &fmr, const KArray &y)
{
  const double ny = y.norm();
  const double r = (fmr.data - y.data).abs2().sum();
  return ny > 0.0 ? std::sqrt(r) / ny : std::sqrt(r);
}

double admm_penalty(double gamma, const ComponentWeights *w)
{
  const double m = w ? w->spectrum.values.mean() : 0.0;
  return m > 0.0 ? gamma * m : gamma;
}

} // namespace

double weighted_ls_objective(const KArray &rho1, const KArray &rho2, const KArray &b, const Mask &mask,
                             const ComponentWeights *w1, const ComponentWeights *w2, const ReconConfig &cfg)
{
  double obj = data_misfit(rho1, rho2, b, mask);
  if (w1 && cfg.lambda1 > 0.0)
    obj += cfg.lambda1 * penalty_energy(rho1.data, *w1);
  if (w2 && cfg.lambda2 > 0.0)
    obj += cfg.lambda2 * penalty_energy(rho2.data, *w2);
  return obj;
}

InnerResult cg_least_squares(const KArray &b, const Mask &mask, const ComponentWeights *w1, const ComponentWeights *w2,
                             const ReconConfig &cfg, const KArray &rho1_init, const KArray &rho2_init)
{
  detail::require(b.channels == 1, "cg_least_squares: b must have one channel");
  detail::require(rho1_init.same_shape(b) && rho2_init.same_shape(b), "cg_least_squares: warm start shape mismatch");
  detail::require(mask.grid == b.grid, "cg_least_squares: mask grid mismatch");

  InnerResult res;
  res.rho1 = rho1_init;
  res.rho2 = rho2_init;
  if (!w1 && !w2)
    return res;

  const auto n = static_cast<Eigen::Index>(b.grid.size());
  const Eigen::ArrayXd a = mask.diagonal();
  const std::vector<Eigen::ArrayXd> d1 = w1 ? derivative_weights(b.grid, w1->order) : std::vector<Eigen::ArrayXd>{};
  const std::vector<Eigen::ArrayXd> d2 = w2 ? derivative_weights(b.grid, w2->order) : std::vector<Eigen::ArrayXd>{};

  // Unknowns are the active components stacked; a frozen component moves to
  // the right-hand side.
  Eigen::ArrayXcd frozen = Eigen::ArrayXcd::Zero(n);
  if (!w1)
    frozen += rho1_init.data;
  if (!w2)
    frozen += rho2_init.data;
  const Eigen::ArrayXcd rhs_c = a * (b.channel(0) - frozen);
  const Eigen::ArrayXcd zero = Eigen::ArrayXcd::Zero(n);
  const Eigen::ArrayXcd rhs1 = w1 ? rhs_c : zero;
  const Eigen::ArrayXcd rhs2 = w2 ? rhs_c : zero;

  auto apply = [&](const Eigen::ArrayXcd &u1, const Eigen::ArrayXcd &u2, Eigen::ArrayXcd &o1, Eigen::ArrayXcd &o2) {
    Eigen::ArrayXcd sum = Eigen::ArrayXcd::Zero(n);
    if (w1)
      sum += u1;
    if (w2)
      sum += u2;
    const Eigen::ArrayXcd data = a * sum;
    o1 = w1 ? Eigen::ArrayXcd(data + cfg.lambda1 * penalty_normal(u1, d1, *w1)) : zero;
    o2 = w2 ? Eigen::ArrayXcd(data + cfg.lambda2 * penalty_normal(u2, d2, *w2)) : zero;
  };
  auto jacobi = [&](const ComponentWeights *w, const std::vector<Eigen::ArrayXd> &d, double lambda) {
    Eigen::ArrayXd diag = a;
    if (w)
      for (const Eigen::ArrayXd &wc : d)
        diag += lambda * wc.square() * w->quadratic.diagonal().real();
    else
      diag.setZero();
    return Eigen::ArrayXd((diag > 0.0).select(diag.inverse(), 0.0));
  };
  const Eigen::ArrayXd p1 = jacobi(w1, d1, cfg.lambda1);
  const Eigen::ArrayXd p2 = jacobi(w2, d2, cfg.lambda2);
  auto dot = [](const Eigen::ArrayXcd &x, const Eigen::ArrayXcd &y) { return (x.conjugate() * y).sum().real(); };

  Eigen::ArrayXcd x1 = w1 ? rho1_init.data : zero;
  Eigen::ArrayXcd x2 = w2 ? rho2_init.data : zero;
  Eigen::ArrayXcd o1, o2;
  apply(x1, x2, o1, o2);
  Eigen::ArrayXcd r1 = rhs1 - o1;
  Eigen::ArrayXcd r2 = rhs2 - o2;
  Eigen::ArrayXcd z1 = p1 * r1;
  Eigen::ArrayXcd z2 = p2 * r2;
  Eigen::ArrayXcd s1 = z1;
  Eigen::ArrayXcd s2 = z2;
  double rz = dot(r1, z1) + dot(r2, z2);
  const double rhs_norm = std::sqrt(rhs1.abs2().sum() + rhs2.abs2().sum());
  const double tol = 1e-12 * (rhs_norm > 0.0 ? rhs_norm : 1.0);
  const double c0 = rhs_c.abs2().sum();
  // J(x) = x^* K x - 2 Re x^* f + c0 = -Re x^* (f + r) + c0 with r = f - K x.
  auto objective = [&] { return c0 - dot(x1, rhs1 + r1) - dot(x2, rhs2 + r2); };

  double rnorm = std::sqrt(r1.abs2().sum() + r2.abs2().sum());
  int it = 0;
  for (; it < cfg.inner_iters && rnorm > tol && rz > 0.0; ++it) {
    apply(s1, s2, o1, o2);
    const double curv = dot(s1, o1) + dot(s2, o2);
    if (!(curv > 0.0))
      break;
    const double alpha = rz / curv;
    x1 += alpha * s1;
    x2 += alpha * s2;
    r1 -= alpha * o1;
    r2 -= alpha * o2;
    z1 = p1 * r1;
    z2 = p2 * r2;
    const double rz_next = dot(r1, z1) + dot(r2, z2);
    s1 = z1 + (rz_next / rz) * s1;
    s2 = z2 + (rz_next / rz) * s2;
    rz = rz_next;
    rnorm = std::sqrt(r1.abs2().sum() + r2.abs2().sum());
    const double obj = objective();
    if (!std::isfinite(obj))
      throw SolverError("cg_least_squares: non-finite objective at iteration " + std::to_string(it));
    res.objective.push_back(obj);
  }
  res.iterations = it;
  res.residual = rhs_norm > 0.0 ? rnorm / rhs_norm : rnorm;
  if (w1)
    res.rho1.data = x1;
  if (w2)
    res.rho2.data = x2;
  return res;
}

InnerResult admm_least_squares(const KArray &b, const Mask &mask, const ComponentWeights *w1,
                               const ComponentWeights *w2, const ReconConfig &cfg, const KArray &rho1_init,
                               const KArray &rho2_init)
{
  detail::require(b.channels == 1, "admm_least_squares: b must have one channel");
  detail::require(rho1_init.same_shape(b) && rho2_init.same_shape(b), "admm_least_squares: warm start shape mismatch");

  InnerResult res;
  res.rho1 = rho1_init;
  res.rho2 = rho2_init;
  KArray rho1 = rho1_init;
  KArray rho2 = rho2_init;

  KArray fmr1, fmr2, y1, y2, q1, q2;
  if (w1) {
    fmr1 = spatial_derivatives(rho1, w1->order);
    y1 = fmr1;
    q1 = KArray(b.grid, fmr1.channels);
  }
  if (w2) {
    fmr2 = spatial_derivatives(rho2, w2->order);
    y2 = fmr2;
    q2 = KArray(b.grid, fmr2.channels);
  }
  const double g1 = admm_penalty(cfg.gamma1, w1);
  const double g2 = admm_penalty(cfg.gamma2, w2);

  const double obj0 = weighted_ls_objective(rho1, rho2, b, mask, w1, w2, cfg);
  const double floor = 1e-12 * (b.data.abs2().sum() + 1.0);
  double best = obj0;

  for (int it = 0; it < cfg.inner_iters; ++it) {
    if (w1) {
      const KArray c = border_correction(y1, *w1);
      y1 = subproblem_y(q1, fmr1, w1->spectrum, g1, &c);
    }
    if (w2) {
      const KArray c = border_correction(y2, *w2);
      y2 = subproblem_y(q2, fmr2, w2->spectrum, g2, &c);
    }
    // Both active: one joint pointwise solve, so the split between the
    // components is not left to slow alternation through the data term.
    if (w1 && w2) {
      RhoPair r = subproblem_rho_pair(b, mask, y1, q1, w1->order, cfg.lambda1, g1, y2, q2, w2->order, cfg.lambda2,
                                      g2, rho2);
      rho1 = std::move(r.rho1);
      rho2 = std::move(r.rho2);
    } else if (w1) {
      rho1 = subproblem_rho(b, mask, rho2, y1, q1, w1->order, cfg.lambda1, g1);
    } else {
      rho2 = subproblem_rho(b, mask, rho1, y2, q2, w2->order, cfg.lambda2, g2);
    }
    if (w1) {
      fmr1 = spatial_derivatives(rho1, w1->order);
      q1.data += fmr1.data - y1.data;
    }
    if (w2) {
      fmr2 = spatial_derivatives(rho2, w2->order);
      q2.data += fmr2.data - y2.data;
    }
    const double obj = weighted_ls_objective(rho1, rho2, b, mask, w1, w2, cfg);
    if (!std::isfinite(obj) || (obj > 10.0 * obj0 && obj > floor))
      throw SolverError("admm_least_squares: diverged at iteration " + std::to_string(it) + " (objective " +
                        std::to_string(obj) + ", initial " + std::to_string(obj0) + ")");
    res.objective.push_back(obj);
    if (obj < best) {
      best = obj;
      res.rho1 = rho1;
      res.rho2 = rho2;
    }
  }
  res.iterations = cfg.inner_iters;
  if (w1)
    res.residual = std::max(res.residual, relative_residual(fmr1, y1));
  if (w2)
    res.residual = std::max(res.residual, relative_residual(fmr2, y2));
  return res;
}

namespace {

double lifting_penalty(const KArray &rho, int order, const SupportSet &filt, double p, double eps)
{
  const Eigen::MatrixXcd g = gram_matrix(rho, order, filt, true);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g, Eigen::EigenvaluesOnly);
  return smoothed_schatten(eig.eigenvalues(), p, eps);
}

} // namespace

double objective_value(const KArray &rho1, const KArray &rho2, const KArray &b, const Mask &mask,
                       const ReconConfig &cfg, double eps1, double eps2)
{
  double obj = data_misfit(rho1, rho2, b, mask);
  if (cfg.has_first() && cfg.lambda1 > 0.0)
    obj += cfg.lambda1 * lifting_penalty(rho1, 1, cfg.filter1, cfg.p, eps1);
  if (cfg.has_second() && cfg.lambda2 > 0.0)
    obj += cfg.lambda2 * lifting_penalty(rho2, 2, cfg.filter2, cfg.p, eps2);
  return obj;
}

ReconResult irls_reconstruct(const KArray &b, const Mask &mask, const ReconConfig &cfg, const KArray *truth_hat)
{
  cfg.validate();
  detail::require(b.channels == 1, "irls_reconstruct: b must have one channel (reconstruct coils separately)");
  detail::require(mask.grid == b.grid, "irls_reconstruct: mask grid mismatch");
  detail::require(b.all_finite(), "irls_reconstruct: measurements contain non-finite values");
  if (cfg.has_first())
    (void)valid_index_set(b.grid, cfg.filter1);
  if (cfg.has_second())
    (void)valid_index_set(b.grid, cfg.filter2);

  ReconResult out;
  double scale = 1.0;
  if (cfg.normalize) {
    const double m = b.data.abs().maxCoeff();
    if (m > 0.0)
      scale = m;
  }
  out.data_scale = scale;
  KArray bn = apply_mask(b, mask);
  bn.data /= scale;

  // rho^(0) = A^* b, held entirely by the first active component.
  KArray rho1(b.grid, 1), rho2(b.grid, 1);
  (cfg.has_first() ? rho1 : rho2) = bn;

  auto make_schedule = [&](int order, const SupportSet &filt) {
    double eps0 = cfg.eps0;
    if (eps0 <= 0.0) {
      const Eigen::MatrixXcd g = gram_matrix(bn, order, filt, true);
      const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(g, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
      eps0 = lmax > 0.0 ? cfg.eps0_scale * lmax : cfg.eps0_scale;
    }
    return EpsilonSchedule{eps0, cfg.eps_eta, cfg.eps_floor_scale * eps0};
  };
  const EpsilonSchedule sched1 = cfg.has_first() ? make_schedule(1, cfg.filter1) : EpsilonSchedule{};
  const EpsilonSchedule sched2 = cfg.has_second() ? make_schedule(2, cfg.filter2) : EpsilonSchedule{};

  {
    IterationRecord rec;
    rec.eps1 = epsilon_schedule(0, sched1);
    rec.eps2 = epsilon_schedule(0, sched2);
    rec.objective = objective_value(rho1, rho2, bn, mask, cfg, rec.eps1, rec.eps2);
    out.history.push_back(rec);
  }

  for (int n = 0; n < cfg.outer_iters; ++n) {
    IterationRecord rec;
    rec.eps1 = epsilon_schedule(n, sched1);
    rec.eps2 = epsilon_schedule(n, sched2);

    std::optional<ComponentWeights> w1, w2;
    if (cfg.has_first())
      w1 = component_weights(rho1, 1, cfg.filter1, cfg.p, rec.eps1);
    if (cfg.has_second())
      w2 = component_weights(rho2, 2, cfg.filter2, cfg.p, rec.eps2);

    const ComponentWeights *pw1 = w1 ? &*w1 : nullptr;
    const ComponentWeights *pw2 = w2 ? &*w2 : nullptr;
    InnerResult step = cfg.inner == InnerSolver::cg ? cg_least_squares(bn, mask, pw1, pw2, cfg, rho1, rho2)
                                                    : admm_least_squares(bn, mask, pw1, pw2, cfg, rho1, rho2);
    rho1 = std::move(step.rho1);
    rho2 = std::move(step.rho2);
    if (!rho1.all_finite() || !rho2.all_finite())
      throw SolverError("irls_reconstruct: non-finite iterate at outer iteration " + std::to_string(n));

    rec.inner_iterations = step.iterations;
    rec.inner_residual = step.residual;
    rec.objective = objective_value(rho1, rho2, bn, mask, cfg, rec.eps1, rec.eps2);
    out.history.push_back(rec);
  }

  rho1.data *= scale;
  rho2.data *= scale;
  out.rho1_hat = std::move(rho1);
  out.rho2_hat = std::move(rho2);
  out.rho_hat = out.rho1_hat;
  out.rho_hat.data += out.rho2_hat.data;
  out.rho1 = ifft2_unitary(out.rho1_hat);
  out.rho2 = ifft2_unitary(out.rho2_hat);
  out.rho = ifft2_unitary(out.rho_hat);
  if (truth_hat) {
    detail::require(truth_hat->same_shape(b), "irls_reconstruct: truth shape mismatch");
    out.snr = snr_db(out.rho, ifft2_unitary(*truth_hat));
  }
  return out;
}

} // namespace gslr
