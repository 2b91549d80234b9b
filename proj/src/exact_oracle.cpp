#include "mixer/exact_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mixer/union_find.hpp"

namespace mixer {
namespace {

using Key = std::vector<std::uint64_t>;
using Dist = std::map<Key, double>;

void partitions_rec(std::uint64_t remaining, std::uint64_t cap, Key& cur,
                    std::vector<Key>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  for (std::uint64_t part = std::min(cap, remaining); part >= 1; --part) {
    cur.push_back(part);
    partitions_rec(remaining - part, part, cur, out);
    cur.pop_back();
  }
}

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t m) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 1; j < m; ++j)
    for (std::size_t i = 0; i < j; ++i) out.emplace_back(i, j);
  return out;
}

// Enumerates the 2^C(m,2) edge sets; weight(edges, components) returns the
// unnormalized mass added to that component partition.
template <class Weight>
Dist enumerate_graphs(std::size_t m, Weight&& weight) {
  Dist dist;
  if (m == 0) {
    dist[Key{}] = 1.0;
    return dist;
  }
  const auto pairs = all_pairs(m);
  const std::uint64_t masks = 1ULL << pairs.size();
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    UnionFind uf(m);
    for (std::size_t e = 0; e < pairs.size(); ++e)
      if (mask >> e & 1) uf.unite(pairs[e].first, pairs[e].second);
    Key sizes = uf.component_sizes();
    const double w =
        weight(static_cast<std::uint64_t>(std::popcount(mask)), sizes.size());
    dist[std::move(sizes)] += w;
  }
  return dist;
}

ExactDistribution normalize(const Dist& dist) {
  ExactDistribution out;
  double total = 0.0;
  for (const auto& [key, w] : dist) total += w;
  for (const auto& [key, w] : dist) {
    out.support.push_back(key);
    out.probs.push_back(w / total);
  }
  return out;
}

Dist er_components_map(std::size_t m, double p) {
  if (p < 0.0 || p > 1.0) throw DomainError("er components: p outside [0,1]");
  const double pairs =
      static_cast<double>(m) * (static_cast<double>(m) - 1.0) / 2.0;
  return enumerate_graphs(m, [&](std::uint64_t edges, std::size_t) {
    return std::pow(p, static_cast<double>(edges)) *
           std::pow(1.0 - p, pairs - static_cast<double>(edges));
  });
}

void counts_rec(std::size_t coord, std::size_t q, std::uint64_t remaining,
                Key& cur, std::vector<Key>& out) {
  if (coord + 1 == q) {
    cur.push_back(remaining);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::uint64_t c = 0; c <= remaining; ++c) {
    cur.push_back(c);
    counts_rec(coord + 1, q, remaining - c, cur, out);
    cur.pop_back();
  }
}

bool colex_less(const Key& a, const Key& b) {
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

double log_potts_weight(const Key& counts, std::uint64_t n, double beta) {
  double lw = std::lgamma(static_cast<double>(n) + 1.0);
  for (auto c : counts) {
    const double cd = static_cast<double>(c);
    lw -= std::lgamma(cd + 1.0);
    lw += beta / static_cast<double>(n) * cd * (cd - 1.0) / 2.0;
  }
  return lw;
}

// Heat-bath row: probability the state moves from counts a by recoloring a
// k-vertex to j. With self-exclusion, the resampled vertex's own color
// contributes count-1 to its weight.
double glauber_move_prob(const Key& a, std::uint64_t n, double beta,
                         std::size_t k, std::size_t j, bool self_exclusion) {
  const double bn = beta / static_cast<double>(n);
  double total = 0.0;
  double wj = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    const double c = static_cast<double>(a[l]) -
                     (self_exclusion && l == k ? 1.0 : 0.0);
    const double w = std::exp(bn * c);
    total += w;
    if (l == j) wj = w;
  }
  return static_cast<double>(a[k]) / static_cast<double>(n) * wj / total;
}

}  // namespace

std::vector<Key> partitions_of(std::uint64_t n) {
  std::vector<Key> out;
  Key cur;
  partitions_rec(n, n, cur, out);
  std::sort(out.begin(), out.end());
  return out;
}

ExactDistribution er_exact_components(std::size_t m, double p) {
  if (m > 7) throw SizeError("er_exact_components: m > 7");
  return normalize(er_components_map(m, p));
}

ExactDistribution rc_exact_stationary(std::size_t n, double p, double q) {
  if (n == 0 || n > 6) throw SizeError("rc_exact_stationary: need 1 <= n <= 6");
  if (p < 0.0 || p > 1.0)
    throw DomainError("rc_exact_stationary: p outside [0,1]");
  if (!(q > 0.0)) throw DomainError("rc_exact_stationary: q must be positive");
  const double pairs =
      static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
  return normalize(
      enumerate_graphs(n, [&](std::uint64_t edges, std::size_t comps) {
        return std::pow(p, static_cast<double>(edges)) *
               std::pow(1.0 - p, pairs - static_cast<double>(edges)) *
               std::pow(q, static_cast<double>(comps));
      }));
}

ExactKernel cm_exact_kernel(std::size_t n, double beta, double q) {
  if (n == 0 || n > 5) throw SizeError("cm_exact_kernel: need 1 <= n <= 5");
  if (!(q > 1.0)) throw DomainError("cm_exact_kernel: requires q > 1");
  const double p = std::min(1.0, beta / static_cast<double>(n));
  ExactKernel out;
  out.states = partitions_of(n);
  // Component laws of G(A, p) for every possible activated size.
  std::vector<ExactDistribution> er(n + 1);
  for (std::size_t a = 0; a <= n; ++a)
    er[a] = normalize(er_components_map(a, p));
  for (const auto& state : out.states) {
    std::vector<double> row(out.states.size(), 0.0);
    const std::size_t m = state.size();
    for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
      double p_act = 1.0;
      std::uint64_t active = 0;
      Key inactive;
      for (std::size_t i = 0; i < m; ++i) {
        if (mask >> i & 1) {
          p_act *= 1.0 / q;
          active += state[i];
        } else {
          p_act *= 1.0 - 1.0 / q;
          inactive.push_back(state[i]);
        }
      }
      const auto& fresh = er[active];
      for (std::size_t f = 0; f < fresh.support.size(); ++f) {
        Key next = inactive;
        next.insert(next.end(), fresh.support[f].begin(),
                    fresh.support[f].end());
        std::sort(next.begin(), next.end(), std::greater<>());
        row[state_index(out.states, next)] += p_act * fresh.probs[f];
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

ExactKernel sw_exact_kernel(std::size_t n, double beta, double q) {
  if (n == 0 || n > 5) throw SizeError("sw_exact_kernel: need 1 <= n <= 5");
  const auto qi = static_cast<std::size_t>(std::llround(q));
  if (std::abs(q - static_cast<double>(qi)) > 1e-9 || qi < 2)
    throw TypeError("sw_exact_kernel: q must be an integer >= 2");
  const double p = std::min(1.0, beta / static_cast<double>(n));
  ExactKernel out;
  out.states = partitions_of(n);
  std::vector<ExactDistribution> er(n + 1);
  for (std::size_t a = 0; a <= n; ++a)
    er[a] = normalize(er_components_map(a, p));
  for (const auto& state : out.states) {
    std::vector<double> row(out.states.size(), 0.0);
    const std::size_t m = state.size();
    std::vector<std::size_t> color(m, 0);
    const double p_coloring =
        std::pow(1.0 / static_cast<double>(qi), static_cast<double>(m));
    while (true) {
      std::vector<std::uint64_t> class_size(qi, 0);
      for (std::size_t i = 0; i < m; ++i) class_size[color[i]] += state[i];
      // Convolve the fresh component laws of the color classes.
      Dist acc;
      acc[Key{}] = 1.0;
      for (std::size_t c = 0; c < qi; ++c) {
        const auto& fresh = er[class_size[c]];
        Dist next;
        for (const auto& [partial, pr] : acc)
          for (std::size_t f = 0; f < fresh.support.size(); ++f) {
            Key key = partial;
            key.insert(key.end(), fresh.support[f].begin(),
                       fresh.support[f].end());
            std::sort(key.begin(), key.end(), std::greater<>());
            next[std::move(key)] += pr * fresh.probs[f];
          }
        acc = std::move(next);
      }
      for (const auto& [key, pr] : acc)
        row[state_index(out.states, key)] += p_coloring * pr;
      // Next coloring in base q.
      std::size_t i = 0;
      while (i < m && ++color[i] == qi) color[i++] = 0;
      if (i == m) break;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

double stationarity_residual(const ExactKernel& kernel,
                             const ExactDistribution& mu) {
  // mu is indexed by sorted-ascending partitions, kernel states likewise.
  std::vector<double> image(kernel.states.size(), 0.0);
  std::vector<double> mu_probs(kernel.states.size(), 0.0);
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    Key desc = mu.support[i];
    std::sort(desc.begin(), desc.end(), std::greater<>());
    mu_probs[state_index(kernel.states, desc)] += mu.probs[i];
  }
  for (std::size_t i = 0; i < kernel.states.size(); ++i)
    for (std::size_t j = 0; j < kernel.states.size(); ++j)
      image[j] += mu_probs[i] * kernel.rows[i][j];
  double res = 0.0;
  for (std::size_t j = 0; j < kernel.states.size(); ++j)
    res += std::abs(image[j] - mu_probs[j]);
  return res;
}

}  // namespace

double cm_exact_kernel_check(std::size_t n, double beta, double q) {
  const auto kernel = cm_exact_kernel(n, beta, q);
  const auto mu =
      rc_exact_stationary(n, std::min(1.0, beta / static_cast<double>(n)), q);
  return stationarity_residual(kernel, mu);
}

double sw_exact_kernel_check(std::size_t n, double beta, double q) {
  const auto kernel = sw_exact_kernel(n, beta, q);
  const auto mu =
      rc_exact_stationary(n, std::min(1.0, beta / static_cast<double>(n)), q);
  return stationarity_residual(kernel, mu);
}

ExactDistribution potts_counts_stationary(std::size_t n, std::size_t q,
                                          double beta) {
  if (n == 0 || q < 2)
    throw DomainError("potts_counts_stationary: need n >= 1, q >= 2");
  double support_size = 1.0;
  for (std::size_t i = 1; i < q; ++i)
    support_size *= (static_cast<double>(n) + static_cast<double>(i)) /
                    static_cast<double>(i);
  if (support_size > 50000.0)
    throw SizeError("potts_counts_stationary: support exceeds 50000 states");
  std::vector<Key> keys;
  Key cur;
  counts_rec(0, q, n, cur, keys);
  std::sort(keys.begin(), keys.end(), colex_less);
  std::vector<double> logw(keys.size());
  double max_lw = -1e300;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    logw[i] = log_potts_weight(keys[i], n, beta);
    max_lw = std::max(max_lw, logw[i]);
  }
  ExactDistribution out;
  out.support = std::move(keys);
  out.probs.resize(out.support.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.probs.size(); ++i) {
    out.probs[i] = std::exp(logw[i] - max_lw);
    total += out.probs[i];
  }
  for (auto& p : out.probs) p /= total;
  return out;
}

double glauber_balance_check(std::size_t n, std::size_t q, double beta,
                             bool self_exclusion) {
  const auto pi = potts_counts_stationary(n, q, beta);
  std::map<Key, std::size_t> index;
  for (std::size_t i = 0; i < pi.support.size(); ++i) index[pi.support[i]] = i;
  double worst = 0.0;
  for (std::size_t i = 0; i < pi.support.size(); ++i) {
    const Key& a = pi.support[i];
    for (std::size_t k = 0; k < q; ++k) {
      if (a[k] == 0) continue;
      for (std::size_t j = 0; j < q; ++j) {
        if (j == k) continue;
        Key b = a;
        --b[k];
        ++b[j];
        const std::size_t bi = index.at(b);
        const double fwd =
            pi.probs[i] * glauber_move_prob(a, n, beta, k, j, self_exclusion);
        const double bwd =
            pi.probs[bi] * glauber_move_prob(b, n, beta, j, k, self_exclusion);
        worst = std::max(worst, std::abs(fwd - bwd));
      }
    }
  }
  return worst;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw DomainError("tv_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

std::vector<double> kernel_power_distribution(const ExactKernel& kernel,
                                              std::size_t start_index,
                                              std::uint64_t t) {
  std::vector<double> mu(kernel.states.size(), 0.0);
  mu[start_index] = 1.0;
  std::vector<double> next(mu.size());
  for (std::uint64_t step = 0; step < t; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mu[i] == 0.0) continue;
      for (std::size_t j = 0; j < mu.size(); ++j)
        next[j] += mu[i] * kernel.rows[i][j];
    }
    std::swap(mu, next);
  }
  return mu;
}

std::size_t state_index(const std::vector<Key>& states, const Key& key) {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == key) return i;
  throw DomainError("state_index: unknown state key");
}

}  // namespace mixer
