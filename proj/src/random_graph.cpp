#include "mixer/random_graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mixer/errors.hpp"
#include "mixer/stats.hpp"
#include "mixer/union_find.hpp"

namespace mixer {
namespace {

// Decodes pair index k (colex order: (0,1)=0, (0,2)=1, (1,2)=2, ...) into
// an edge (i, j) with i < j. j = max{t : t(t-1)/2 <= k}; the float seed is
// corrected by integer steps so the decode is exact for k < 2^63.
inline std::pair<std::uint64_t, std::uint64_t> decode_pair(std::uint64_t k) {
  auto tri = [](std::uint64_t t) { return t * (t - 1) / 2; };
  std::uint64_t j = static_cast<std::uint64_t>(
      (1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
  while (j >= 1 && tri(j) > k) --j;
  while (tri(j + 1) <= k) ++j;
  return {k - tri(j), j};
}

// Calls visit(i, j) for each present edge of G(m, p); geometric jumps over
// absent pair indices give O(1 + p*C(m,2)) expected visits.
template <class Visit>
void for_each_er_edge(std::uint64_t m, double p, Rng& rng, Visit&& visit) {
  if (m < 2 || p <= 0.0) return;
  const std::uint64_t pairs = m * (m - 1) / 2;
  if (p >= 1.0) {
    for (std::uint64_t k = 0; k < pairs; ++k) {
      const auto [i, j] = decode_pair(k);
      visit(i, j);
    }
    return;
  }
  const double log1mp = std::log1p(-p);
  std::uint64_t k = 0;
  bool first = true;
  while (true) {
    const double u = 1.0 - rng.unit();  // in (0, 1]
    const double jump = std::floor(std::log(u) / log1mp) + 1.0;
    if (jump > static_cast<double>(pairs)) break;  // beyond the index range
    const auto step = static_cast<std::uint64_t>(jump);
    k = first ? step - 1 : k + step;
    first = false;
    if (k >= pairs) break;
    const auto [i, j] = decode_pair(k);
    visit(i, j);
  }
}

}  // namespace

ComponentMultiset make_multiset(std::vector<std::uint64_t> sizes) {
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  ComponentMultiset out;
  out.total = 0;
  for (auto s : sizes) out.total += s;
  out.sizes = std::move(sizes);
  return out;
}

ComponentStats component_stats(const ComponentMultiset& cm) {
  ComponentStats st;
  st.total = cm.total;
  for (std::size_t i = 0; i < cm.sizes.size(); ++i) {
    const std::uint64_t s = cm.sizes[i];
    st.R2 += s * s;
    st.R3 += s * s * s;
    if (s == 1) ++st.I1;
  }
  if (!cm.sizes.empty()) {
    st.L1 = cm.sizes[0];
    st.R2_minus = st.R2 - st.L1 * st.L1;
    st.R3_minus = st.R3 - st.L1 * st.L1 * st.L1;
    if (cm.sizes.size() > 1) st.L2 = cm.sizes[1];
  }
  return st;
}

ComponentMultiset sample_er_components(std::uint64_t m, double p, Rng& rng) {
  if (m == 0) return {};
  if (p < 0.0 || p > 1.0 || !std::isfinite(p))
    throw DomainError("sample_er_components: p outside [0,1]");
  UnionFind uf(m);
  for_each_er_edge(m, p, rng,
                   [&](std::uint64_t i, std::uint64_t j) { uf.unite(i, j); });
  ComponentMultiset out;
  out.sizes = uf.component_sizes();
  out.total = m;
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_er_edges(
    std::uint64_t m, double p, Rng& rng) {
  if (p < 0.0 || p > 1.0 || !std::isfinite(p))
    throw DomainError("sample_er_edges: p outside [0,1]");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for_each_er_edge(m, p, rng, [&](std::uint64_t i, std::uint64_t j) {
    edges.emplace_back(static_cast<std::uint32_t>(i),
                       static_cast<std::uint32_t>(j));
  });
  return edges;
}

MeanStderr mc_r2_density(std::uint64_t m, double p, std::uint64_t replicas,
                         Rng& rng) {
  if (m == 0 || replicas == 0)
    throw DomainError("mc_r2_density: m and replicas must be positive");
  const bool supercritical = static_cast<double>(m) * p > 1.0;
  Welford acc;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    const auto st = component_stats(sample_er_components(m, p, rng));
    const auto num = supercritical ? st.R2_minus : st.R2;
    acc.add(static_cast<double>(num) / static_cast<double>(m));
  }
  return {acc.mean(), acc.stderr_mean()};
}

ComponentMultiset survivors_after_rounds(const ComponentMultiset& cm,
                                         std::uint64_t rounds, double q,
                                         Rng& rng) {
  if (!(q > 1.0)) throw DomainError("survivors_after_rounds: requires q > 1");
  const double keep = std::pow(1.0 - 1.0 / q, static_cast<double>(rounds));
  std::vector<std::uint64_t> kept;
  kept.reserve(cm.sizes.size());
  for (auto s : cm.sizes)
    if (rng.bernoulli(keep)) kept.push_back(s);
  return make_multiset(std::move(kept));
}

}  // namespace mixer
