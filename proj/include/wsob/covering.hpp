#pragma once

#include "wsob/admissible.hpp"

#include <map>
#include <vector>

namespace wsob {

/// Riemannian length of the coordinate segment x -> y (3-point Gauss rule);
/// periodic axes use the short way round.
double chart_distance(const Manifold& M, const Vec& x, const Vec& y);

/// T = ((1+eps)/(1-eps))^{n/2} 100^n and T1 = 2^n T.
double overlap_bound(int n, double eps);
double overlap_bound_full(int n, double eps);

struct Covering {
  std::vector<Vec> centers;
  std::vector<double> base_radii;  // r(x) = R_eps(x) / 10
  double dilation = 5.0;
  int cls = 0;
  double epsilon = 0.1;
  Box region;
  Vec candidate_pitch;  // coordinate pitch per axis
  Vec probe_pitch;
  std::size_t candidates = 0;
  std::size_t probes_checked = 0;

  std::size_t size() const { return centers.size(); }
  double radius(std::size_t i) const { return 10.0 * base_radii[i]; }
  double dilated(std::size_t i) const { return dilation * base_radii[i]; }
};

struct CoverOptions {
  double grid_pitch = 0.0;        // in metric units; 0 means min r / 2
  int probe_refine = 4;           // probe pitch = candidate pitch / probe_refine
  std::size_t max_candidates = 4'000'000;
  bool verify = true;
};

/// Greedy Vitali selection over the candidates (radius descending, then
/// lexicographic), base balls tested disjoint with a (1+eps) safety factor.
Covering vitali_cover(const Manifold& M, const RadiusField& field, const std::vector<Vec>& candidates,
                      const Box& region);
/// Candidates on a regular grid over M.cover_window(); coverage verified on a
/// finer probe grid, throwing "grid too coarse" on an uncovered probe.
Covering vitali_cover(const Manifold& M, const RadiusField& field, const CoverOptions& opt = {});

/// Probe grid over a box with the given coordinate pitch.
std::vector<Vec> grid_points(const Box& b, const Vec& pitch);

/// Throws NumericalError naming the first probe outside every dilated ball.
void verify_coverage(const Manifold& M, const Covering& cover, const std::vector<Vec>& probes);

struct OverlapStats {
  std::size_t probes = 0;
  int max_base = 0;
  int max_dilated = 0;
  int max_full = 0;
  double mean_dilated = 0.0;
  double mean_full = 0.0;
  std::map<int, std::size_t> histogram;  // dilated-ball counts
  double T = 0.0;
  double T1 = 0.0;
  std::size_t uncovered = 0;
  bool ok() const { return max_dilated <= T && max_full <= T1 && uncovered == 0; }
};

OverlapStats overlap_stats(const Manifold& M, const Covering& cover, const std::vector<Vec>& probes);

/// Exact pairwise check of the base-ball disjointness rule.
bool base_balls_disjoint(const Manifold& M, const Covering& cover);

}  // namespace wsob
