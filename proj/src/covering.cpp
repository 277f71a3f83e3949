#include "wsob/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace wsob {

namespace {

Vec wrapped_delta(const ChartDomain& dom, const Vec& x, const Vec& y) {
  Vec d = y - x;
  for (int i = 0; i < d.size(); ++i)
    if (dom.periodic(i)) {
      double P = dom.period[i];
      d[i] -= P * std::round(d[i] / P);
    }
  return d;
}

}  // namespace

double chart_distance(const Manifold& M, const Vec& x, const Vec& y) {
  const Chart& c = M.window_chart();
  Vec d = wrapped_delta(c.domain, x, y);
  if (d.isZero(0.0)) return 0.0;
  static const double t[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
  static const double w[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += w[k] * std::sqrt(d.dot(c.metric(Vec(x + t[k] * d)) * d));
  return s;
}

double overlap_bound(int n, double eps) {
  return std::pow((1 + eps) / (1 - eps), n / 2.0) * std::pow(100.0, n);
}

double overlap_bound_full(int n, double eps) { return overlap_bound(n, eps) * std::pow(2.0, n); }

namespace {

// Coordinate half-extent, per unit metric radius, of small balls around x.
Vec unit_reach(const Manifold& M, const Vec& x, double eps) {
  Mat gi = M.metric(x).inverse();
  Vec r(M.dim());
  for (int i = 0; i < M.dim(); ++i) r[i] = std::sqrt(gi(i, i)) * 1.05 / std::sqrt(1 - eps);
  return r;
}

struct CellKey {
  std::array<long, kMaxDim> c{};
  bool operator==(const CellKey& o) const { return c == o.c; }
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (long v : k.c) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

class BucketIndex {
 public:
  BucketIndex(const Vec& origin, const Vec& cell) : origin_(origin), cell_(cell) {}

  CellKey key(const Vec& x) const {
    CellKey k;
    for (int i = 0; i < x.size(); ++i) k.c[i] = static_cast<long>(std::floor((x[i] - origin_[i]) / cell_[i]));
    return k;
  }
  void insert(const Vec& x, std::size_t id) { cells_[key(x)].push_back(id); }

  template <class F>
  void near(const Vec& x, F&& f) const {
    const int n = static_cast<int>(x.size());
    CellKey base = key(x);
    int total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    for (int m = 0; m < total; ++m) {
      CellKey k = base;
      int r = m;
      for (int i = 0; i < n; ++i) {
        k.c[i] += r % 3 - 1;
        r /= 3;
      }
      auto it = cells_.find(k);
      if (it == cells_.end()) continue;
      for (std::size_t id : it->second) f(id);
    }
  }

 private:
  Vec origin_, cell_;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

void check_no_wrap(const Manifold& M, const Box& region) {
  const ChartDomain& dom = M.window_chart().domain;
  for (int i = 0; i < region.dim(); ++i)
    if (dom.periodic(i) && region.hi[i] - region.lo[i] > 0.5 * dom.period[i])
      throw ParameterError("cover region must span at most half the period of a periodic axis");
}

std::string fmt_point(const Vec& x) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

// Index over the covering centers sized for balls of metric radius scale * r.
struct CoverIndex {
  BucketIndex index;
  std::vector<Vec> reach;  // per center, coordinate reach per unit radius

  CoverIndex(const Manifold& M, const Covering& cv, double scale)
      : index(cv.region.lo, cell_size(M, cv, scale)) {
    for (std::size_t i = 0; i < cv.size(); ++i) {
      reach.push_back(unit_reach(M, cv.centers[i], cv.epsilon));
      index.insert(cv.centers[i], i);
    }
  }

  static Vec cell_size(const Manifold& M, const Covering& cv, double scale) {
    Vec c = Vec::Constant(M.dim(), 1e-12);
    for (std::size_t i = 0; i < cv.size(); ++i)
      c = c.cwiseMax(unit_reach(M, cv.centers[i], cv.epsilon) * scale * cv.base_radii[i]);
    return c;
  }
};

}  // namespace

std::vector<Vec> grid_points(const Box& b, const Vec& pitch) {
  const int n = b.dim();
  std::vector<int> cnt(n);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    double w = b.hi[i] - b.lo[i];
    cnt[i] = w <= 0 ? 1 : static_cast<int>(std::ceil(w / pitch[i] - 1e-9)) + 1;
    total *= static_cast<std::size_t>(cnt[i]);
  }
  std::vector<Vec> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    Vec x(n);
    for (int a = n - 1; a >= 0; --a) {
      int k = static_cast<int>(r % cnt[a]);
      r /= cnt[a];
      x[a] = cnt[a] == 1 ? b.center()[a] : b.lo[a] + (b.hi[a] - b.lo[a]) * k / (cnt[a] - 1);
    }
    out.push_back(x);
  }
  return out;
}

Covering vitali_cover(const Manifold& M, const RadiusField& field, const std::vector<Vec>& candidates,
                      const Box& region) {
  check_no_wrap(M, region);
  Covering cv;
  cv.cls = field.cls();
  cv.epsilon = field.epsilon();
  cv.region = region;
  cv.candidates = candidates.size();
  if (candidates.empty()) return cv;
  const double eps = cv.epsilon;
  std::vector<double> r(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) r[i] = field.at(candidates[i]) / 10.0;
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (r[a] != r[b]) return r[a] > r[b];
    const Vec &x = candidates[a], &y = candidates[b];
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
  });
  const double rmax = *std::max_element(r.begin(), r.end());
  Vec cell = Vec::Constant(M.dim(), 1e-12);
  for (const Vec& x : candidates) cell = cell.cwiseMax(unit_reach(M, x, eps) * 2 * (1 + eps) * rmax);
  BucketIndex idx(region.lo, cell);
  for (std::size_t o : order) {
    const Vec& x = candidates[o];
    bool free = true;
    idx.near(x, [&](std::size_t j) {
      if (!free) return;
      if (chart_distance(M, x, cv.centers[j]) < (1 + eps) * (r[o] + cv.base_radii[j])) free = false;
    });
    if (!free) continue;
    idx.insert(x, cv.centers.size());
    cv.centers.push_back(x);
    cv.base_radii.push_back(r[o]);
  }
  return cv;
}

void verify_coverage(const Manifold& M, const Covering& cover, const std::vector<Vec>& probes) {
  CoverIndex ci(M, cover, cover.dilation);
  for (const Vec& p : probes) {
    bool hit = false;
    ci.index.near(p, [&](std::size_t j) {
      if (!hit && chart_distance(M, cover.centers[j], p) <= cover.dilated(j)) hit = true;
    });
    if (!hit) throw NumericalError("grid too coarse: probe " + fmt_point(p) + " is not covered");
  }
}

Covering vitali_cover(const Manifold& M, const RadiusField& field, const CoverOptions& opt) {
  const Box& region = M.cover_window();
  const int n = M.dim();
  double rmin = kInf;
  Vec gmax = Vec::Zero(n);
  // metric scale over the region: field nodes inside it plus its corners
  std::vector<Vec> sample;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (region.contains(field.node(i))) sample.push_back(field.node(i));
  for (unsigned c = 0; c < (1u << n); ++c) {
    Vec y(n);
    for (int a = 0; a < n; ++a) y[a] = (c >> a & 1u) ? region.hi[a] : region.lo[a];
    sample.push_back(y);
  }
  for (const Vec& y : sample) {
    rmin = std::min(rmin, field.at(y) / 10.0);
    Mat g = M.metric(y);
    for (int a = 0; a < n; ++a) gmax[a] = std::max(gmax[a], std::sqrt(g(a, a)));
  }
  double pitch = opt.grid_pitch > 0 ? opt.grid_pitch : rmin / 2;
  if (pitch > rmin / 2 * (1 + 1e-12))
    throw ParameterError("grid pitch must not exceed min r(x)/2 = " + std::to_string(rmin / 2));
  Vec cp(n);
  double count = 1;
  for (int a = 0; a < n; ++a) {
    cp[a] = pitch / gmax[a];
    count *= std::ceil((region.hi[a] - region.lo[a]) / cp[a]) + 1;
  }
  if (count > static_cast<double>(opt.max_candidates))
    throw ParameterError("cover region needs " + std::to_string(static_cast<long long>(count)) +
                         " candidates; shrink the cover window");
  Covering cv = vitali_cover(M, field, grid_points(region, cp), region);
  cv.candidate_pitch = cp;
  cv.probe_pitch = cp / opt.probe_refine;
  if (opt.verify) {
    auto probes = grid_points(region, cv.probe_pitch);
    verify_coverage(M, cv, probes);
    cv.probes_checked = probes.size();
  }
  return cv;
}

OverlapStats overlap_stats(const Manifold& M, const Covering& cover, const std::vector<Vec>& probes) {
  OverlapStats st;
  const int n = M.dim();
  st.T = overlap_bound(n, cover.epsilon);
  st.T1 = overlap_bound_full(n, cover.epsilon);
  st.probes = probes.size();
  CoverIndex ci(M, cover, 10.0);
  double sd = 0, sf = 0;
  for (const Vec& p : probes) {
    int b = 0, d = 0, f = 0;
    ci.index.near(p, [&](std::size_t j) {
      Vec dx = (p - cover.centers[j]).cwiseAbs();
      for (int a = 0; a < n; ++a)
        if (!M.window_chart().domain.periodic(a) && dx[a] > ci.reach[j][a] * cover.radius(j)) return;
      double dist = chart_distance(M, cover.centers[j], p);
      b += dist <= cover.base_radii[j];
      d += dist <= cover.dilated(j);
      f += dist <= cover.radius(j);
    });
    st.max_base = std::max(st.max_base, b);
    st.max_dilated = std::max(st.max_dilated, d);
    st.max_full = std::max(st.max_full, f);
    st.uncovered += d == 0;
    st.histogram[d]++;
    sd += d;
    sf += f;
  }
  if (!probes.empty()) {
    st.mean_dilated = sd / probes.size();
    st.mean_full = sf / probes.size();
  }
  return st;
}

bool base_balls_disjoint(const Manifold& M, const Covering& cover) {
  for (std::size_t i = 0; i < cover.size(); ++i)
    for (std::size_t j = i + 1; j < cover.size(); ++j)
      if (chart_distance(M, cover.centers[i], cover.centers[j]) <
          (1 + cover.epsilon) * (cover.base_radii[i] + cover.base_radii[j]))
        return false;
  return true;
}

}  // namespace wsob
