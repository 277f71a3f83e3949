#include "wsob/ball.hpp"

namespace wsob {

NormalizedFrame NormalizedFrame::at(const Manifold& M, const Vec& c) {
  Mat g = M.metric(c);
  return NormalizedFrame{c, sym_sqrt(g), sym_inv_sqrt(g)};
}

double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

BallSampler::BallSampler(int n, int k) : n_(n), k_(k) {
  static constexpr int primes[] = {2, 3, 5, 7};
  pts_.push_back(Vec::Zero(n));
  for (int i = 0; i < n; ++i)
    for (double s : {-1.0, 1.0}) {
      Vec e = Vec::Zero(n);
      e[i] = s;
      pts_.push_back(e);
    }
  const std::size_t want = std::size_t{1} << k;
  std::size_t got = 0;
  for (std::uint64_t idx = 1; got < want; ++idx) {
    Vec z(n);
    for (int i = 0; i < n; ++i) z[i] = 2.0 * halton(idx, primes[i]) - 1.0;
    if (z.squaredNorm() >= 1.0) continue;
    pts_.push_back(z);
    ++got;
  }
}

}  // namespace wsob
