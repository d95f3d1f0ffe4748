//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "mpulab/error.hpp"
#include "mpulab/layout.hpp"

namespace mpulab::layout {
namespace {

constexpr unsigned kPermBits = 6;
constexpr unsigned kMaxIterations = 100;

struct Point {
  std::array<double, kPermBits> perms{};
  double position = 0.0;  // section midpoint, normalized to [0, 1]
};

double distance(const Point& a, const Point& b) {
  double d = 0.0;
  for (unsigned i = 0; i < kPermBits; ++i) d += std::abs(a.perms[i] - b.perms[i]);
  return d + kAddressGapWeight * std::abs(a.position - b.position);
}

// Uniform double in [0, 1) from the raw engine output, which is fully
// specified by the standard (distribution objects are not).
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<Point> make_points(std::span<const SectionDescriptor> sections) {
  std::uint64_t lo = sections.front().range.base;
  std::uint64_t hi = sections.front().range.end();
  for (const auto& s : sections) {
    lo = std::min(lo, s.range.base);
    hi = std::max(hi, s.range.end());
  }
  const double span = static_cast<double>(hi - lo);
  std::vector<Point> points;
  for (const auto& s : sections) {
    Point p;
    const auto packed = s.perms.packed();
    for (unsigned i = 0; i < kPermBits; ++i) p.perms[i] = (packed >> i) & 1U ? 1.0 : 0.0;
    const double mid = static_cast<double>(s.range.base - lo) + static_cast<double>(s.range.size) / 2;
    p.position = span > 0 ? mid / span : 0.0;
    points.push_back(p);
  }
  return points;
}

// One k-means++ seeded Lloyd run. Returns a cluster label per point; labels
// are dense from 0.
std::vector<unsigned> kmeans(const std::vector<Point>& points, unsigned k, std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<Point> centers;
  centers.push_back(points[static_cast<std::size_t>(uniform(rng) * static_cast<double>(n))]);
  while (centers.size() < k) {
    std::vector<double> weight(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, distance(points[i], c));
      weight[i] = best * best;
      total += weight[i];
    }
    if (total <= 0.0) break;  // every point already sits on a center
    double target = uniform(rng) * total;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (target < weight[i]) {
        pick = i;
        break;
      }
      target -= weight[i];
    }
    centers.push_back(points[pick]);
  }

  std::vector<unsigned> label(n, 0);
  for (unsigned iter = 0; iter < kMaxIterations; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < n; ++i) {
      unsigned best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (unsigned c = 0; c < centers.size(); ++c) {
        const double d = distance(points[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (label[i] != best) changed = true;
      label[i] = best;
    }
    if (!changed) break;
    std::vector<Point> sum(centers.size());
    std::vector<double> count(centers.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (unsigned b = 0; b < kPermBits; ++b) sum[label[i]].perms[b] += points[i].perms[b];
      sum[label[i]].position += points[i].position;
      count[label[i]] += 1.0;
    }
    for (unsigned c = 0; c < centers.size(); ++c) {
      if (count[c] == 0.0) continue;  // empty clusters keep their center
      for (unsigned b = 0; b < kPermBits; ++b) centers[c].perms[b] = sum[c].perms[b] / count[c];
      centers[c].position = sum[c].position / count[c];
    }
  }

  // Relabel densely in order of first appearance.
  std::vector<int> remap(centers.size(), -1);
  unsigned next = 0;
  for (auto& l : label) {
    if (remap[l] < 0) remap[l] = static_cast<int>(next++);
    l = static_cast<unsigned>(remap[l]);
  }
  return label;
}

std::vector<Cluster> build_clusters(std::span<const SectionDescriptor> sections,
                                    const std::vector<unsigned>& label) {
  const unsigned count = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
  std::vector<Cluster> clusters(count);
  std::vector<bool> seen(count, false);
  for (std::size_t i = 0; i < sections.size(); ++i) {
    auto& c = clusters[label[i]];
    const auto& s = sections[i];
    c.members.push_back(s.id);
    if (!seen[label[i]]) {
      c.range = s.range;
      c.perms = s.perms;
      seen[label[i]] = true;
    } else {
      const auto lo = std::min(c.range.base, s.range.base);
      const auto hi = std::max(c.range.end(), s.range.end());
      c.range = {lo, hi - lo};
      c.perms = c.perms | s.perms;
    }
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return a.range.base < b.range.base;
  });
  return clusters;
}

}  // namespace

std::uint64_t over_grant_score(std::span<const SectionDescriptor> sections,
                               std::span<const Cluster> clusters) {
  std::uint64_t score = 0;
  for (const auto& s : sections) {
    for (const auto& c : clusters) {
      if (std::find(c.members.begin(), c.members.end(), s.id) == c.members.end()) continue;
      const auto extra_priv = c.perms.privileged.minus(s.perms.privileged).count();
      const auto extra_user = c.perms.unprivileged.minus(s.perms.unprivileged).count();
      score += s.range.size * static_cast<std::uint64_t>(extra_priv + extra_user);
      break;
    }
  }
  return score;
}

std::vector<Cluster> cluster_sections(std::span<const SectionDescriptor> sections,
                                      unsigned max_regions) {
  if (max_regions < 1) throw Error(Errc::InvalidArgument, "max_regions must be at least 1");
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (!sections[i].range.valid()) {
      throw Error(Errc::InvalidArgument, "section '" + sections[i].id + "' has an invalid range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (sections[i].id == sections[j].id) {
        throw Error(Errc::InvalidArgument, "duplicate section id '" + sections[i].id + "'");
      }
      if (sections[i].range.overlaps(sections[j].range)) {
        throw Error(Errc::InvalidArgument,
                    "sections '" + sections[j].id + "' and '" + sections[i].id + "' overlap");
      }
    }
  }
  if (sections.empty()) return {};

  const auto n = static_cast<unsigned>(sections.size());
  const auto points = make_points(sections);

  std::vector<Cluster> best;
  std::uint64_t best_score = 0;
  auto consider = [&](std::vector<Cluster> candidate) {
    const auto score = over_grant_score(sections, candidate);
    if (best.empty() || score < best_score ||
        (score == best_score && candidate.size() < best.size())) {
      best = std::move(candidate);
      best_score = score;
    }
  };

  // The candidate pool for k clusters contains every pool for fewer, so the
  // kept score never rises as max_regions grows.
  const unsigned k_max = std::max(1U, std::min(max_regions, n - 1));
  for (unsigned k = 1; k <= k_max; ++k) {
    for (unsigned restart = 0; restart < kClusterRestarts; ++restart) {
      std::mt19937_64 rng(kClusterSeed + 1000ULL * k + restart);
      consider(build_clusters(sections, kmeans(points, k, rng)));
    }
  }
  if (max_regions >= n) {
    std::vector<unsigned> singletons(n);
    for (unsigned i = 0; i < n; ++i) singletons[i] = i;
    consider(build_clusters(sections, singletons));
  }
  return best;
}

}  // namespace mpulab::layout
