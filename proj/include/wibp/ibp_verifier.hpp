#pragma once

// Two-sided numerical checks of the Gaussian integration-by-parts formula
// for convex sets, of its vector-measure form and of the gauge-gradient
// formula on the boundary graphs.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wibp/convex_body.hpp"
#include "wibp/estimate.hpp"
#include "wibp/gaussian_space.hpp"
#include "wibp/graph_decomposition.hpp"
#include "wibp/surface_measure.hpp"

namespace wibp {

enum class Verdict { pass, fail, inconclusive };
std::string_view verdict_name(Verdict v);

struct VerificationReport {
  std::string name;
  EstimateWithError lhs;
  EstimateWithError rhs;
  double abs_diff = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::inconclusive;
  nlohmann::json metadata = nlohmann::json::object();
};

/// Inconclusive when tol > 0.25 max(|lhs|, |rhs|, 0.01); otherwise pass iff
/// diff <= tol.
Verdict decide(double lhs, double rhs, double diff, double tol);

/// Report with tolerance 3 (SE_lhs + SE_rhs), or `fixed_tol` when given.
VerificationReport make_report(std::string name, const EstimateWithError& lhs, const EstimateWithError& rhs,
                               std::optional<double> fixed_tol = std::nullopt);

/// Samples drawn for the acceptance pre-flight and the minimum acceptance.
inline constexpr std::size_t kPreflightSamples = 10000;
inline constexpr double kMinAcceptance = 1e-3;

/// Monte Carlo estimate of int_Omega (d_k psi - psi <k, x>) dgamma by
/// rejection: the mean over all draws of the adjoint derivative times the
/// indicator. MassError when the pre-flight acceptance is below 1e-3.
EstimateWithError lhs_volume_integral(const ConvexBody& body, const TestFunction& psi, const Direction& k,
                                      const GaussianModel& model, std::size_t samples, std::uint64_t seed);

enum class RhsRoute {
  graph_normal,    // psi [nu_f, k] on the upper graph minus psi [nu_g, k] on the lower graph
  gauge_gradient,  // psi d_k p / |grad p| with the finite-difference gauge gradient
};

/// int_{boundary} psi d_k p / |grad p| dS over the finite graphs of `pair`.
/// DirectionError when the vertical mass along the pair's direction exceeds
/// 0.01 (skipped when check_vertical is false).
EstimateWithError rhs_surface_integral(const ConvexBody& body, const GraphPair& pair, const TestFunction& psi,
                                       const Direction& k, const GaussianModel& model, const Budget& budget,
                                       std::uint64_t seed, RhsRoute route = RhsRoute::graph_normal,
                                       bool check_vertical = true);

struct IbpConfig {
  std::size_t samples = 1000000;  // left-hand side draws
  Budget budget;                  // right-hand side
  std::uint64_t seed = 1;
  std::optional<Direction> pinned_h;
  std::vector<Direction> candidates;  // empty: coordinate axes plus random directions
  std::optional<double> fixed_tolerance;
  RhsRoute route = RhsRoute::graph_normal;
};

VerificationReport verify_ibp(const ConvexBody& body, const TestFunction& psi, const Direction& k,
                              const GaussianModel& model, const IbpConfig& config);

struct GradientCheck {
  BoundaryClass cls = BoundaryClass::vertical;
  double denominator = 0.0;
  Vec formula;   // gauge gradient from the graph
  Vec fd;        // finite-difference gauge gradient
  double relative_error = 0.0;
  double normal_error = 0.0;  // |formula / |formula| -+ nu|
};

/// Compares the graph formula for the gauge gradient with finite differences
/// at a boundary point x. CaseError for a vertical point, DegeneracyError
/// when the denominator is below 1e-8.
GradientCheck gradient_formula_check(const ConvexBody& body, const GraphPair& pair, const Vec& x,
                                     double tol = 1e-12);

/// int_Omega d*_k phi dgamma against -int phi d[D 1_Omega, k], the vector
/// measure being -nu_f S on the upper graph plus nu_g S on the lower graph.
/// The two graph terms are reported in the metadata.
VerificationReport vector_measure_check(const ConvexBody& body, const GraphPair& pair, const TestFunction& phi,
                                        const Direction& k, const GaussianModel& model, const Budget& budget,
                                        std::size_t samples, std::uint64_t seed);

}  // namespace wibp
