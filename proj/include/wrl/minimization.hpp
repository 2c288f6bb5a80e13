#pragma once

// Total energy E_gamma = P_psi + gamma V and experiments on it: minimization
// over the side-translation class, threshold search in gamma, mass scaling,
// splitting into far-apart Wulff shapes, and a rigidity diagnostic.

#include <wrl/anisotropy.hpp>
#include <wrl/riesz.hpp>
#include <wrl/variation.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wrl {

struct EnergyReport {
  double gamma = 0.0;
  double perimeter_term = 0.0;
  EnergyValue nonlocal_term;
  double total = 0.0;
};

EnergyReport total_energy(const Polygon& e, const Tension& t, double gamma, const RieszParams& p,
                          const QuadratureSpec& q = {});

struct MassScaling {
  double lhs = 0.0;  // E_gamma(E)
  double rhs = 0.0;  // m^(1/2) [P(E~) + gamma m^(3/2 - alpha/2) V(E~)], E~ = m^(-1/2) E
  double rel_err = 0.0;
};

/// Uses m = |E|.
MassScaling mass_scaling_check(const Polygon& e, const Tension& t, double gamma,
                               const RieszParams& p, const QuadratureSpec& q = {});

struct MinimizeOptions {
  int starts = 10;
  int max_iters = 200;
  double tol = 1e-6;  // on the projected-gradient infinity norm
  std::uint64_t seed = 42;
  Eigen::Index compensating = -1;
};

struct StartRecord {
  Eigen::VectorXd start;
  Eigen::VectorXd d_star;  // modulo translations
  double total = 0.0;
  double sup_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct MinimizationResult {
  VariationVector d_star;  // best start, translation component removed
  EnergyReport energy_at_dstar;
  EnergyReport energy_at_zero;
  bool converged = false;
  int iterations = 0;
  std::vector<StartRecord> starts;
};

/// Full variation with its translation part d_k = nu_k . x0 removed by least squares.
Eigen::VectorXd remove_translation(const Polygon& p, const Eigen::VectorXd& d);

/// Projected BFGS over d_partial in the box (-eps, eps)^(n-1), multi-start
/// (zero plus starts - 1 uniform in (-eps/2, eps/2)^(n-1)). The gradient is
/// assembled from side averages of the potential.
MinimizationResult minimize_over_class(const Polygon& p, const Tension& t, double gamma, double epsilon,
                                       const RieszParams& rp, const QuadratureSpec& q = {},
                                       const MinimizeOptions& opts = {});

struct ThresholdOptions {
  double gamma_max = 100.0;
  double predicate_tol = 1e-4;
  double rel_width = 0.02;  // stop when hi - lo <= rel_width * hi
  int max_bisections = 40;
  MinimizeOptions minimize;
};

struct ThresholdEstimate {
  double gamma_hat = 0.0;
  double lower = 0.0;  // predicate holds
  double upper = 0.0;  // predicate fails
  int evaluations = 0;
  bool found = true;  // false: the predicate still holds at gamma_max
};

/// Bisection (geometric once positive) on gamma for |d_star(gamma)|_inf < tol.
/// When the predicate still holds at gamma_max the estimate is returned with
/// found = false (the NoTransitionFound outcome).
ThresholdEstimate gamma_threshold_estimate(const Polygon& p, const Tension& t, double epsilon,
                                           const RieszParams& rp, const QuadratureSpec& q = {},
                                           const ThresholdOptions& opts = {});

struct RigidityReport {
  std::vector<Eigen::Index> gamma_aligned_sides;  // normals in the Wulff normal set
  std::vector<Eigen::Index> free_sides;
  double potential_spread = 0.0;  // max - min of v_E along the free sides
  double v0_estimate = 0.0;       // length-weighted mean of v_E on the free sides
  int samples_per_side = 0;
};

RigidityReport rigidity_diagnostic(const Polygon& e, const Tension& t, const RieszParams& p,
                                   const QuadratureSpec& q = {}, double angular_tol = 1e-6,
                                   int samples_per_side = 16);

struct SplitComparison {
  double single_energy = 0.0;
  double split_energy = 0.0;
  std::string winner;  // "single", "split" or "tie"
};

/// Unit-mass Wulff shape against far-apart Wulff shapes of masses m_i
/// (cross interactions dropped), via E(m W_1) = m^(1/2) P_1 + gamma m^((4-alpha)/2) V_1.
SplitComparison split_comparison(const Tension& t, double gamma, const std::vector<double>& fractions,
                                 const RieszParams& p, const QuadratureSpec& q = {});

struct SearchOptions {
  int starts = 8;
  int max_evaluations = 400;
  double initial_step = 0.05;
  double min_step = 1e-7;
  double report_tol = 1e-6;
  bool free_normals = false;
  std::uint64_t seed = 42;
  std::optional<Polygon> seed_polygon;  // default: regular n-gon of unit area
};

struct SearchCandidate {
  Polygon polygon;
  double residual = 0.0;
  bool is_member = false;
  std::vector<double> history;  // residual after each accepted step, starting point first
  int evaluations = 0;
};

struct SearchResult {
  std::vector<SearchCandidate> runs;        // one per start, in start order
  std::vector<SearchCandidate> candidates;  // runs with residual below report_tol
};

/// Compass search on the criticality residual over unit-area n-gons (side
/// offsets, optionally normal angles); only strict decreases are accepted.
/// Start 0 is the seed polygon itself.
SearchResult search_noncritical(int n, const RieszParams& p, const QuadratureSpec& q,
                                                const SearchOptions& opts = {});

}  // namespace wrl
