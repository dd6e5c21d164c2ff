#include "cipimex/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cipimex/errors.hpp"

namespace cipimex {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::bdf2: return "bdf2";
    case Scheme::cn: return "cn";
    case Scheme::ab2: return "ab2";
    case Scheme::ab3: return "ab3";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "bdf2") return Scheme::bdf2;
  if (s == "cn") return Scheme::cn;
  if (s == "ab2") return Scheme::ab2;
  if (s == "ab3") return Scheme::ab3;
  throw InvalidArgument("unknown scheme '" + s + "'");
}

void SchemeConfig::validate() const {
  if (degree < 1 || degree > 3) throw InvalidArgument("degree must be 1, 2 or 3");
  if (!(courant > 0.0)) throw InvalidArgument("Courant number must be positive");
  if (!(final_time > 0.0)) throw InvalidArgument("final time must be positive");
  if (gamma < 0.0 || eps_cross < 0.0) throw InvalidArgument("stabilization parameters must be non-negative");
  if (mu < 0.0) throw InvalidArgument("mu must be non-negative");
  if ((scheme == Scheme::ab2 || scheme == Scheme::ab3) && mu != 0.0) {
    throw InvalidArgument(to_string(scheme) + " requires mu = 0");
  }
}

std::pair<double, double> default_parameters(Scheme scheme, int degree) {
  switch (scheme) {
    case Scheme::bdf2:
      if (degree == 1) return {0.15, 0.01};
      if (degree == 2) return {0.05, 0.005};
      break;
    case Scheme::cn:
    case Scheme::ab2:
      if (degree == 1) return {0.3, 0.01};
      if (degree == 2) return {0.1, 0.005};
      break;
    case Scheme::ab3:
      if (degree == 2) return {0.025, 0.001};
      if (degree == 3) return {0.025, 0.0003};
      break;
  }
  throw InvalidArgument("no default parameters for " + to_string(scheme) + " with degree " + std::to_string(degree));
}

TimeStep select_timestep(const SchemeConfig& config, double h_max, double beta_inf, double final_time) {
  if (!(h_max > 0.0)) throw InvalidArgument("select_timestep: h must be positive");
  if (!(final_time > 0.0)) throw InvalidArgument("select_timestep: T must be positive");
  double raw;
  if (config.degree == 1) {
    raw = config.courant * h_max / (beta_inf + 1.0);
  } else {
    raw = config.courant * std::pow(h_max, 4.0 / 3.0) / std::pow(std::max(beta_inf, 1.0), 4.0 / 3.0);
  }
  // guard against T / raw landing a rounding error above an integer
  const double ratio = final_time / raw;
  auto n = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
  n = std::max<std::size_t>(n, 1);
  return {final_time / static_cast<double>(n), n};
}

void History::push(Vector v) {
  if (!entries_.empty() && v.size() != entries_.front().size()) {
    throw DimensionMismatch("History::push: length differs from stored states");
  }
  entries_.push_front(std::move(v));
  if (entries_.size() > 3) entries_.pop_back();
  ++count_;
}

std::array<double, 3> extrapolation_weights(Extrapolation kind) {
  switch (kind) {
    case Extrapolation::tilde: return {2.0, -1.0, 0.0};
    case Extrapolation::hat: return {1.5, -0.5, 0.0};
    case Extrapolation::ab3: return {23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0};
  }
  return {1.0, 0.0, 0.0};
}

Vector bdf2_difference(const History& history, std::span<const double> v_new, double tau) {
  if (history.size() < 2) throw InvalidArgument("bdf2_difference: needs two history levels");
  const Vector& v0 = history[0];
  const Vector& v1 = history[1];
  if (v_new.size() != v0.size()) throw DimensionMismatch("bdf2_difference: length");
  Vector d(v0.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (3.0 * v_new[i] - 4.0 * v0[i] + v1[i]) / (2.0 * tau);
  return d;
}

Vector extrapolate(const History& history, Extrapolation kind) {
  const std::size_t needed = kind == Extrapolation::ab3 ? 3 : 2;
  if (history.size() < needed) throw InvalidArgument("extrapolate: insufficient history");
  const auto w = extrapolation_weights(kind);
  Vector out(history[0].size(), 0.0);
  for (std::size_t k = 0; k < needed; ++k) axpy(w[k], history[k], out);
  return out;
}

SpatialOperators assemble_operators(const FeSpace& space, const SchemeConfig& config, const VelocityField& beta,
                                    double t) {
  SpatialOperators ops;
  ops.mass = assemble_mass(space);
  ops.diffusion = assemble_diffusion(space, config.mu);
  ops.convection = assemble_convection(space, beta, t);
  ops.cip = assemble_cip(space, beta, StabParams{config.gamma, config.eps_cross}, t);
  ops.streamline = assemble_streamline(space, beta, t);
  if (config.bc_mode == BcMode::weak_inflow) {
    ops.inflow = assemble_weak_inflow(space, beta, [](double, double, double) { return 0.0; }, t).matrix;
  }
  return ops;
}

namespace {

// sum_k w[k] * v_k(entry k from the newest); empty vectors count as zero
template <class Get>
Vector combine(std::size_t n, const std::array<double, 3>& w, std::size_t levels, Get get) {
  Vector out(n, 0.0);
  for (std::size_t k = 0; k < levels; ++k) {
    const Vector& v = get(k);
    if (w[k] != 0.0 && !v.empty()) axpy(w[k], v, out);
  }
  return out;
}

Extrapolation explicit_kind(Scheme s) {
  switch (s) {
    case Scheme::bdf2: return Extrapolation::tilde;
    case Scheme::cn:
    case Scheme::ab2: return Extrapolation::hat;
    case Scheme::ab3: return Extrapolation::ab3;
  }
  return Extrapolation::tilde;
}

}  // namespace

TimeStepper::TimeStepper(std::shared_ptr<const FeSpace> space, SchemeConfig config, TransportProblem problem,
                         double tau, CgOptions cg)
    : space_(std::move(space)), config_(config), problem_(std::move(problem)), tau_(tau), cg_(cg) {
  config_.validate();
  if (config_.degree != space_->degree()) throw InvalidArgument("TimeStepper: config degree differs from space");
  if (!(tau_ > 0.0)) throw InvalidArgument("TimeStepper: tau must be positive");
  if (config_.bc_mode == BcMode::strong && !space_->constrained()) {
    throw InvalidArgument("TimeStepper: strong boundary conditions need a constrained space");
  }
  if (config_.bc_mode != BcMode::strong && space_->constrained()) {
    throw InvalidArgument("TimeStepper: constrained space requires strong boundary conditions");
  }
  gamma_ = config_.effective_gamma();
  weak_ = config_.bc_mode == BcMode::weak_inflow;
  ops_ = assemble_operators(*space_, config_, problem_.beta, 0.0);
  build_implicit();
}

void TimeStepper::build_implicit() {
  const double m = config_.scheme == Scheme::bdf2 ? 1.5 / tau_ : 1.0 / tau_;
  const double a = config_.scheme == Scheme::bdf2 ? 1.0 : 0.5;
  SparseMatrix K = config_.mu > 0.0 ? linear_combination(m, ops_.mass, a, ops_.diffusion)
                                    : linear_combination(m, ops_.mass, 0.0, ops_.mass);
  if (space_->constrained()) {
    implicit_dirichlet_.emplace(std::move(K), space_->boundary_dofs());
    mass_dirichlet_.emplace(ops_.mass, space_->boundary_dofs());
  } else {
    implicit_ = std::move(K);
    implicit_inv_diag_ = implicit_.diagonal_entries();
    for (double& d : implicit_inv_diag_) d = 1.0 / d;
    mass_inv_diag_ = ops_.mass.diagonal_entries();
    for (double& d : mass_inv_diag_) d = 1.0 / d;
  }
}

void TimeStepper::refresh_operators(double t) {
  ops_.convection = assemble_convection(*space_, problem_.beta, t);
  ops_.cip = assemble_cip(*space_, problem_.beta, StabParams{config_.gamma, config_.eps_cross}, t);
  ops_.streamline = assemble_streamline(*space_, problem_.beta, t);
  if (weak_) ops_.inflow = assemble_weak_inflow(*space_, problem_.beta, [](double, double, double) { return 0.0; }, t).matrix;
  for (auto& e : entries_) {
    e.Cu = ops_.convection * e.u;
    if (gamma_ > 0.0) e.Su = ops_.cip * e.u;
    if (!problem_.source) e.Gu = ops_.streamline * e.u;
    if (weak_) e.Bu = ops_.inflow * e.u;
  }
}

Vector TimeStepper::boundary_values(double t) const {
  Vector g(space_->num_dofs(), 0.0);
  if (!space_->constrained() || !problem_.boundary) return g;
  const auto& c = space_->dof_coords();
  for (std::size_t d : space_->boundary_dofs()) g[d] = problem_.boundary(c[d].x, c[d].y, t);
  return g;
}

TimeStepper::Entry TimeStepper::make_entry(Vector u, double t) const {
  if (u.size() != space_->num_dofs()) throw DimensionMismatch("TimeStepper: state length");
  Entry e;
  e.t = t;
  e.Mu = ops_.mass * u;
  e.Cu = ops_.convection * u;
  if (gamma_ > 0.0) e.Su = ops_.cip * u;
  if (!problem_.source) e.Gu = ops_.streamline * u;
  if (config_.mu > 0.0) e.Au = ops_.diffusion * u;
  if (weak_) {
    e.Bu = ops_.inflow * u;
    if (problem_.boundary) e.load = assemble_inflow_load(*space_, problem_.beta, problem_.boundary, t);
  }
  if (problem_.source) e.source = assemble_source(*space_, problem_.source, t);
  e.u = std::move(u);
  return e;
}

void TimeStepper::push(Vector u, double t) {
  entries_.push_back(make_entry(std::move(u), t));
  if (entries_.size() > 3) entries_.pop_front();
}

double TimeStepper::l2_norm(std::span<const double> u) const {
  return std::sqrt(std::max(0.0, ops_.mass.quadratic_form(u)));
}

const Vector& TimeStepper::advance() {
  const std::size_t needed = startup_levels();
  if (entries_.size() < needed) throw InvalidArgument("TimeStepper::advance: insufficient history");
  const std::size_t n = space_->num_dofs();
  const std::size_t levels = entries_.size();
  const auto at = [this](std::size_t k) -> const Entry& { return entries_[entries_.size() - 1 - k]; };
  const Entry& e0 = at(0);
  const Entry& e1 = at(1);
  const double t_new = e0.t + tau_;

  const Extrapolation kind = explicit_kind(config_.scheme);
  if (problem_.beta.time_dependent) {
    refresh_operators(config_.scheme == Scheme::bdf2 ? t_new : e0.t + 0.5 * tau_);
  }
  const auto w = extrapolation_weights(kind);

  // explicit part: (C + B + gamma S) v* - b*
  Vector rhs = combine(n, w, levels, [&](std::size_t k) -> const Vector& { return at(k).Cu; });
  if (weak_) axpy(1.0, combine(n, w, levels, [&](std::size_t k) -> const Vector& { return at(k).Bu; }), rhs);
  if (gamma_ > 0.0) axpy(gamma_, combine(n, w, levels, [&](std::size_t k) -> const Vector& { return at(k).Su; }), rhs);
  for (double& v : rhs) v = -v;
  if (weak_ && problem_.boundary) {
    axpy(1.0, combine(n, w, levels, [&](std::size_t k) -> const Vector& { return at(k).load; }), rhs);
  }
  if (problem_.source) {
    if (config_.scheme == Scheme::bdf2) {
      axpy(1.0, assemble_source(*space_, problem_.source, t_new), rhs);
    } else {
      axpy(1.0, combine(n, w, levels, [&](std::size_t k) -> const Vector& { return at(k).source; }), rhs);
    }
  }

  if (config_.scheme == Scheme::bdf2) {
    axpy(2.0 / tau_, e0.Mu, rhs);
    axpy(-0.5 / tau_, e1.Mu, rhs);
  } else {
    axpy(1.0 / tau_, e0.Mu, rhs);
    if (config_.mu > 0.0) axpy(-0.5, e0.Au, rhs);
  }

  Vector guess(n);
  for (std::size_t i = 0; i < n; ++i) guess[i] = 2.0 * e0.u[i] - e1.u[i];
  CgResult sol;
  if (implicit_dirichlet_) {
    const Vector fixed = boundary_values(t_new);
    for (std::size_t d : space_->boundary_dofs()) guess[d] = fixed[d];
    sol = cg_solve(implicit_dirichlet_->matrix(), implicit_dirichlet_->rhs(rhs, fixed),
                   implicit_dirichlet_->inverse_diagonal(), cg_, guess);
  } else {
    sol = cg_solve(implicit_, rhs, implicit_inv_diag_, cg_, guess);
  }
  iterations_ = sol.iterations;

  Entry e = make_entry(std::move(sol.x), t_new);

  // diagnostics for the new level
  record_ = StepRecord{};
  record_.time = t_new;
  record_.l2 = std::sqrt(std::max(0.0, dot(e.u, e.Mu)));
  record_.energy_sq = (gamma_ > 0.0 ? gamma_ * dot(e.u, e.Su) : 0.0) + (config_.mu > 0.0 ? dot(e.u, e.Au) : 0.0);
  {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = e.u[i] - 2.0 * e0.u[i] + e1.u[i];
      const double md = e.Mu[i] - 2.0 * e0.Mu[i] + e1.Mu[i];
      s += d * md;
    }
    record_.jump_sq = std::max(0.0, s);
  }
  if (!problem_.source) {
    // r = discrete time derivative, v = extrapolated state; |r + beta.grad v|^2 = r'Mr + 2 r'Cv + v'Gv
    std::array<double, 3> c;  // weights of (u^{n+1}, u^n, u^{n-1})
    if (config_.scheme == Scheme::bdf2) {
      c = {1.5 / tau_, -2.0 / tau_, 0.5 / tau_};
    } else {
      c = {1.0 / tau_, -1.0 / tau_, 0.0};
    }
    Vector r(n), Mr(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = c[0] * e.u[i] + c[1] * e0.u[i] + c[2] * e1.u[i];
      Mr[i] = c[0] * e.Mu[i] + c[1] * e0.Mu[i] + c[2] * e1.Mu[i];
    }
    const Vector v = combine(n, w, levels, [&](std::size_t k) -> const Vector& { return at(k).u; });
    const Vector Cv = combine(n, w, levels, [&](std::size_t k) -> const Vector& { return at(k).Cu; });
    const Vector Gv = combine(n, w, levels, [&](std::size_t k) -> const Vector& { return at(k).Gu; });
    record_.material_sq = std::max(0.0, dot(r, Mr) + 2.0 * dot(r, Cv) + dot(v, Gv));
  } else {
    record_.material_sq = std::numeric_limits<double>::quiet_NaN();
  }

  entries_.push_back(std::move(e));
  if (entries_.size() > 3) entries_.pop_front();
  return entries_.back().u;
}

Vector TimeStepper::solve_mass(std::span<const double> rhs, std::span<const double> fixed) const {
  CgOptions opt = cg_;
  opt.max_iter = std::max<std::size_t>(opt.max_iter, 1000);
  if (mass_dirichlet_) {
    return cg_solve(mass_dirichlet_->matrix(), mass_dirichlet_->rhs(rhs, fixed), mass_dirichlet_->inverse_diagonal(),
                    opt)
        .x;
  }
  return cg_solve(ops_.mass, rhs, mass_inv_diag_, opt).x;
}

Vector TimeStepper::midpoint_step(std::span<const double> u, double t) const {
  const std::size_t n = space_->num_dofs();
  const Vector zero(n, 0.0);
  const auto rate = [&](std::span<const double> v, double s) {
    Vector r = ops_.convection * v;
    if (weak_) axpy(1.0, ops_.inflow * v, r);
    if (gamma_ > 0.0) axpy(gamma_, ops_.cip * v, r);
    if (config_.mu > 0.0) axpy(1.0, ops_.diffusion * v, r);
    for (double& x : r) x = -x;
    if (weak_ && problem_.boundary) axpy(1.0, assemble_inflow_load(*space_, problem_.beta, problem_.boundary, s), r);
    if (problem_.source) axpy(1.0, assemble_source(*space_, problem_.source, s), r);
    return solve_mass(r, zero);
  };
  Vector half(u.begin(), u.end());
  axpy(0.5 * tau_, rate(u, t), half);
  Vector out(u.begin(), u.end());
  axpy(tau_, rate(half, t + 0.5 * tau_), out);
  if (space_->constrained()) {
    const Vector g = boundary_values(t + tau_);
    for (std::size_t d : space_->boundary_dofs()) out[d] = g[d];
  }
  return out;
}

std::vector<Vector> initialize_history(const TimeStepper& stepper, StartMode mode) {
  const auto space = stepper.space_ptr();
  const auto& problem = stepper.problem();
  if (!problem.solution) throw InvalidArgument("initialize_history: no initial data");
  const std::size_t levels = stepper.startup_levels();
  const double tau = stepper.tau();
  const auto project_at = [&](double t) {
    std::optional<ScalarFunction> dirichlet;
    if (space->constrained() && problem.boundary) {
      dirichlet = [&problem, t](double x, double y) { return problem.boundary(x, y, t); };
    }
    return l2_project(space, [&problem, t](double x, double y) { return problem.solution(x, y, t); }, dirichlet)
        .values;
  };
  std::vector<Vector> out;
  if (mode == StartMode::exact) {
    for (std::size_t i = 0; i < levels; ++i) out.push_back(project_at(static_cast<double>(i) * tau));
  } else {
    out.push_back(project_at(0.0));
    for (std::size_t i = 1; i < levels; ++i) {
      out.push_back(stepper.midpoint_step(out.back(), static_cast<double>(i - 1) * tau));
    }
  }
  return out;
}

SimulationResult run_simulation(const SchemeConfig& config, std::shared_ptr<const FeSpace> space,
                                const TransportProblem& problem, StartMode start) {
  config.validate();
  const double h = mesh_statistics(space->mesh()).h_max;
  const TimeStep step = select_timestep(config, h, problem.beta.inf_norm, config.final_time);

  TimeStepper stepper(space, config, problem, step.tau);
  SimulationResult result;
  result.step = step;

  const std::vector<Vector> init = initialize_history(stepper, start);
  const std::size_t startup = std::min(init.size(), step.steps + 1);
  for (std::size_t i = 0; i < startup; ++i) {
    const double l2 = stepper.l2_norm(init[i]);
    if (i == 0) result.initial_l2 = l2;
    result.max_l2 = std::max(result.max_l2, l2);
    stepper.push(init[i], static_cast<double>(i) * step.tau);
  }

  double material = 0.0;
  double dissipation = 0.0;
  for (std::size_t k = startup; k <= step.steps; ++k) {
    try {
      stepper.advance();
    } catch (const std::exception& e) {
      throw StepFailure(e.what(), k);
    }
    StepRecord rec = stepper.last_record();
    rec.step = k;
    material += step.tau * rec.material_sq;
    dissipation += step.tau * rec.energy_sq + 0.25 * rec.jump_sq;
    result.max_l2 = std::max(result.max_l2, rec.l2);
    if (!std::isfinite(rec.l2)) throw StepFailure("solution is not finite", k);
    result.records.push_back(rec);
  }
  result.material_derivative = problem.source ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(material);
  result.dissipation = dissipation;
  result.final_state = FieldVector(space, stepper.current());
  return result;
}

}  // namespace cipimex
