#pragma once

// Numerical checks: RK4 trajectories, solution residuals on grids, and
// solution-level verification of point transformations.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "clin/eqdsl.hpp"
#include "clin/symexpr.hpp"

namespace clin {

struct Trajectory {
  std::vector<double> x;
  std::vector<std::array<double, 4>> states;  // f, g, f', g'
  double step = 0.0;
  std::string method = "rk4";
  bool truncated = false;
};

/// Classical fixed-step RK4 on [a, b]. First-order systems use (f, g) and
/// record the slopes in the derivative slots. Stops at the first
/// non-finite evaluation and flags the trajectory truncated.
Trajectory rk4_integrate(const SystemSpec& sys, const std::array<double, 4>& init, double a, double b, double step,
                         const Bindings& extra = {});

struct ExcludedPoint {
  std::vector<double> at;
  std::string reason;
};

struct ResidualReport {
  std::string grid;
  std::vector<std::string> labels;
  std::vector<double> max_residual;  // one per label
  std::vector<ExcludedPoint> excluded;
  std::vector<std::string> notes;
  int points = 0;  // retained
  double tolerance = 0.0;
  bool pass = false;

  double max() const;
};

struct Grid1D {
  double a = 0.0;
  double b = 1.0;
  int n = 101;
};

struct Box {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  int n = 21;  // nodes per side
};

/// Points whose evaluation hits a denominator below this are excluded.
inline constexpr double kSingularityFloor = 1e-8;

ResidualReport residual_ode(const SystemSpec& sys, const Solution& sol, const Grid1D& grid, double tol = 1e-8,
                            const Bindings& extra = {});
ResidualReport residual_pde(const SystemSpec& sys, const Solution& sol, const Box& box, double tol = 1e-9,
                            const Bindings& extra = {});

enum class TargetKind { FreeParticle, Constant, Linear };

struct OdeTarget {
  TargetKind kind = TargetKind::FreeParticle;
  std::optional<SystemSpec> system;  // Linear only
};

/// Maps every trajectory node through `map` and checks the image against
/// the target: collinearity via second divided differences (free
/// particle), constancy of the dependent components, or finite-difference
/// residuals of a linear target system.
ResidualReport verify_transformation_ode(const SystemSpec& source, const PointTransformation& map,
                                         const OdeTarget& target, const Trajectory& traj, double tol = 1e-6,
                                         const Bindings& extra = {});

struct PlanarMap {
  Expr X, Y;
  std::string x = "x", y = "y";
};

/// Damped Newton per target, warm-started from the previous solution.
std::vector<std::array<double, 2>> newton_invert(const PlanarMap& map, const std::vector<std::array<double, 2>>& targets,
                                                 std::array<double, 2> seed, double tol = 1e-13, int max_iter = 50);

/// Source solution pushed through the map, inverted on a grid inside the
/// image, and checked against the target by fourth-order differences at two
/// spacings.
ResidualReport verify_transformation_pde(const SystemSpec& source, const PointTransformation& map,
                                         const SystemSpec& target, const Solution& sol, const Box& box,
                                         double tol = 1e-6, const Bindings& extra = {});

/// Weights for derivatives 0..m at z0 from arbitrary (possibly complex) nodes.
std::vector<std::vector<Complex>> fornberg_weights(Complex z0, const std::vector<Complex>& nodes, int m);

}  // namespace clin
