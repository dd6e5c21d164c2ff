#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cipimex/assembly.hpp"
#include "cipimex/cg.hpp"
#include "cipimex/dirichlet.hpp"
#include "cipimex/fem_space.hpp"

namespace cipimex {

enum class Scheme { bdf2, cn, ab2, ab3 };
enum class BcMode { strong, weak_inflow, none };
enum class StartMode { exact, rk2 };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct SchemeConfig {
  Scheme scheme = Scheme::bdf2;
  int degree = 1;
  double gamma = 0.0;
  double eps_cross = 0.0;
  double courant = 0.1;
  double mu = 0.0;
  double final_time = 1.0;
  BcMode bc_mode = BcMode::strong;
  bool stabilized = true;

  /// gamma, or 0 when stabilization is switched off
  double effective_gamma() const { return stabilized ? gamma : 0.0; }
  /// Throws InvalidArgument on inconsistent settings.
  void validate() const;
};

/// Default (Co, gamma) for a scheme/degree pair; throws InvalidArgument for
/// combinations without tabulated values.
std::pair<double, double> default_parameters(Scheme scheme, int degree);

struct TimeStep {
  double tau = 0.0;
  std::size_t steps = 0;
};

/// Raw step Co h / (|beta| + 1) for p = 1 and Co h^{4/3} / max(|beta|, 1)^{4/3}
/// for p >= 2, then shortened so that an integer number of steps reaches T.
TimeStep select_timestep(const SchemeConfig& config, double h_max, double beta_inf, double final_time);

/// The last (up to) three states; h[0] = v^n, h[1] = v^{n-1}, h[2] = v^{n-2}.
class History {
public:
  void push(Vector v);
  std::size_t size() const { return entries_.size(); }
  const Vector& operator[](std::size_t k) const { return entries_.at(k); }
  /// Time index n of the newest entry.
  std::size_t index() const { return count_ == 0 ? 0 : count_ - 1; }

private:
  std::deque<Vector> entries_;
  std::size_t count_ = 0;
};

enum class Extrapolation { tilde, hat, ab3 };

/// Weights applied to (v^n, v^{n-1}, v^{n-2}).
std::array<double, 3> extrapolation_weights(Extrapolation kind);

/// (3 v^{n+1} - 4 v^n + v^{n-1}) / (2 tau)
Vector bdf2_difference(const History& history, std::span<const double> v_new, double tau);

Vector extrapolate(const History& history, Extrapolation kind);

/// Problem data. `boundary` is the inflow trace g for weak inflow and the
/// Dirichlet value for constrained spaces (zero when empty); `source` is f
/// (zero when empty); `solution` is the exact solution or, for problems
/// without one, the initial data (t ignored).
struct TransportProblem {
  VelocityField beta;
  TimeFunction source;
  TimeFunction boundary;
  TimeFunction solution;
};

struct SpatialOperators {
  SparseMatrix mass;
  SparseMatrix diffusion;   // mu-scaled
  SparseMatrix convection;
  SparseMatrix cip;         // without gamma
  SparseMatrix streamline;
  SparseMatrix inflow;      // empty unless weak inflow
};

SpatialOperators assemble_operators(const FeSpace& space, const SchemeConfig& config, const VelocityField& beta,
                                    double t);

/// Per-step quantities. l2 and the squares are for the new state u^{n+1}.
struct StepRecord {
  std::size_t step = 0;  // n + 1
  double time = 0.0;
  double l2 = 0.0;
  double energy_sq = 0.0;    // gamma |u|_s^2 + |mu^{1/2} grad u|^2
  double jump_sq = 0.0;      // ||u^{n+1} - tilde u^{n+1}||^2
  double material_sq = 0.0;  // squared L2 norm of the discrete material derivative
};

/// Advances one of the four IMEX schemes. The convection, inflow and CIP
/// terms act on the extrapolated state; M, A and the implicit matrix are
/// fixed for the run and products with stored states are cached.
class TimeStepper {
public:
  TimeStepper(std::shared_ptr<const FeSpace> space, SchemeConfig config, TransportProblem problem, double tau,
              CgOptions cg = {});

  /// States needed before the first step (2, or 3 for AB3).
  std::size_t startup_levels() const { return config_.scheme == Scheme::ab3 ? 3 : 2; }

  /// Appends the state at time t as the newest history level.
  void push(Vector u, double t);

  /// Computes, stores and returns u^{n+1}.
  const Vector& advance();

  const Vector& current() const { return entries_.back().u; }
  double time() const { return entries_.back().t; }
  std::size_t levels() const { return entries_.size(); }
  double tau() const { return tau_; }
  const StepRecord& last_record() const { return record_; }
  std::size_t last_iterations() const { return iterations_; }

  const SpatialOperators& operators() const { return ops_; }
  const FeSpace& space() const { return *space_; }
  std::shared_ptr<const FeSpace> space_ptr() const { return space_; }
  const SchemeConfig& config() const { return config_; }
  const TransportProblem& problem() const { return problem_; }

  /// L2 norm of a state, (u' M u)^{1/2}.
  double l2_norm(std::span<const double> u) const;

  /// Explicit midpoint step with all terms explicit (used for startup).
  Vector midpoint_step(std::span<const double> u, double t) const;

  /// Values imposed at the boundary DOFs of a constrained space at time t.
  Vector boundary_values(double t) const;

private:
  struct Entry {
    double t = 0.0;
    Vector u, Mu, Cu, Su, Gu, Bu, Au, load, source;
  };

  Entry make_entry(Vector u, double t) const;
  void build_implicit();
  void refresh_operators(double t);
  Vector solve_mass(std::span<const double> rhs, std::span<const double> fixed) const;

  std::shared_ptr<const FeSpace> space_;
  SchemeConfig config_;
  TransportProblem problem_;
  double tau_;
  CgOptions cg_;
  double gamma_;
  bool weak_;
  SpatialOperators ops_;
  std::optional<DirichletSystem> implicit_dirichlet_;
  SparseMatrix implicit_;
  Vector implicit_inv_diag_;
  std::optional<DirichletSystem> mass_dirichlet_;
  Vector mass_inv_diag_;
  std::deque<Entry> entries_;
  StepRecord record_;
  std::size_t iterations_ = 0;
};

/// Startup levels u^0 .. u^{s-1}: exact mode projects the solution at t_i;
/// rk2 mode projects the initial data and advances with explicit midpoint steps.
std::vector<Vector> initialize_history(const TimeStepper& stepper, StartMode mode);

struct SimulationResult {
  FieldVector final_state;
  TimeStep step;
  std::vector<StepRecord> records;
  double initial_l2 = 0.0;
  double max_l2 = 0.0;            // over all levels including startup
  double material_derivative = 0.0;
  double dissipation = 0.0;       // tau sum E^2 + 1/4 sum ||u - tilde u||^2
};

/// Runs to config.final_time with tau from select_timestep(h_max of the mesh).
/// The material-derivative functional is only defined for f = 0; it is NaN
/// when a source is present. Step errors are rethrown as StepFailure.
SimulationResult run_simulation(const SchemeConfig& config, std::shared_ptr<const FeSpace> space,
                                const TransportProblem& problem, StartMode start = StartMode::exact);

}  // namespace cipimex
