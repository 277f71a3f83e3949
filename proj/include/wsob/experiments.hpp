#pragma once

#include "wsob/covering.hpp"
#include "wsob/norms.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wsob {

struct ExperimentReport {
  std::string experiment;
  nlohmann::json manifold = nlohmann::json::object();
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json summary = nlohmann::json::object();
  nlohmann::json extra = nlohmann::json::object();  // merged at top level
  bool passed = true;
  std::optional<double> runtime_ms;

  /// Appends {"field_id", "lhs", "rhs", "ratio"} plus any extra keys.
  nlohmann::json& add_row(const std::string& id, double lhs, double rhs,
                          const nlohmann::json& extra = nlohmann::json::object());
  nlohmann::json to_json() const;
  std::string dump(int indent = 2) const;
};

nlohmann::json manifold_json(const Manifold& M);

struct NamedField {
  std::string id;
  FormField field;
  Vec center;
};

enum class SuiteShape { localized, slab, mixed };

struct SuiteOptions {
  int count = 20;
  int degree = 0;
  double scale = 1.0;         // multiplies every support width
  double width = 0.15;        // base half-width as a fraction of the region extent
  SuiteShape shape = SuiteShape::localized;
  int slab_axis = 1;          // axis a slab bump is constant along
  std::uint64_t seed = 0;
};

/// Random compactly supported bump fields (coefficients amp * poly * bump)
/// with centers spread over `region`; supports stay inside it.
std::vector<NamedField> bump_suite(int n, const Box& region, const SuiteOptions& opt);

/// Bumps whose supports are ellipsoids of normalized radius kappa R(x) at x.
std::vector<NamedField> adapted_suite(const Manifold& M, const RadiusField& field, const std::vector<Vec>& centers,
                                      int degree, double kappa, std::uint64_t seed);

/// Random centers whose adapted supports (normalized radius kappa R) stay in the window.
std::vector<Vec> adapted_centers(const Manifold& M, const RadiusField& field, int count, double kappa,
                                 std::uint64_t seed);

/// Bumps supported inside an admissible ball.
std::vector<NamedField> ball_suite(const AdmissibleBall& ball, int count, int degree, double width,
                                   std::uint64_t seed, const std::string& prefix = "b");

ExperimentReport check_euclidean_scaling(int n, double r, const std::vector<double>& radii, int suite_size,
                                         std::uint64_t seed, int nodes = kBallNodes);

/// Per ball, C = ||u||_{L^s(B)} / ||u||_{W^{1,r}(B)} (the R^-2 factor removed);
/// passes when every C is finite and max/min over balls <= spread.
ExperimentReport check_ball_embedding(const Manifold& M, const std::vector<AdmissibleBall>& balls, double r,
                                      int degree, int suite_size, std::uint64_t seed, double spread = 4.0,
                                      int nodes = kBallNodes);

struct EmbeddingOptions {
  int suite_size = 20;
  SuiteShape shape = SuiteShape::mixed;
  double width = 0.08;
  double scale_ratio = 2.0;                 // second suite support scale
  std::vector<double> depths;               // slab depth family (axis 0), empty to skip
  double depth_halfwidth = 0.4;
  double stability_factor = 5.0;
  std::uint64_t seed = 0;
  int nodes = kWindowNodes;
  bool weighted = true;                     // false replaces both weights by 1
};

ExperimentReport run_embedding_experiment(const Manifold& M, const SobolevParams& params, const RadiusField& field,
                                          int cls, const EmbeddingOptions& opt);

struct GaffneyGrid {
  int C = 0;
  int c = 0;
  bool found = false;
};

/// Smallest C + c (then smallest C) on {1..64}^2 with lhs <= C a + c b for all rows.
GaffneyGrid gaffney_grid_search(const std::vector<double>& lhs, const std::vector<double>& a,
                                const std::vector<double>& b, int max = 64);

ExperimentReport run_gaffney_local(const Manifold& M, const std::vector<AdmissibleBall>& balls, double r,
                                   int suite_per_ball, int degree, std::uint64_t seed, int nodes = kBallNodes);

ExperimentReport run_gaffney_global(const Manifold& M, const RadiusField& field,
                                    const std::vector<NamedField>& suite, double r, double bound_factor = 10.0,
                                    int nodes = kWindowNodes);

ExperimentReport check_kato(const Manifold& M, const std::vector<NamedField>& suite, int m, int points_per_field,
                            std::uint64_t seed, double max_rate = 1e-3);

ExperimentReport curvature_report(const Manifold& M, int samples, std::uint64_t seed);

ExperimentReport cover_report(const Manifold& M, const RadiusField& field, const CoverOptions& opt);

/// CSV rows x1..xn,R0,R1 over the field grid.
std::string radius_csv(const RadiusField& f0, const RadiusField& f1);

}  // namespace wsob
