// Copyright 2026 The Incidents Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Independent reference implementations. These avoid the library code paths
// on purpose: plain loops, textbook formulas, no shared helpers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "incidents/random.hpp"

namespace incidents::oracle {

// -[y log p + (1 - y) log(1 - p)] with p = 1 / (1 + e^-x), summed.
inline double textbook_bce(const std::vector<double>& logits, const std::vector<double>& targets) {
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-logits[i]));
    total += -(targets[i] * std::log(p) + (1.0 - targets[i]) * std::log(1.0 - p));
  }
  return total;
}

// Central difference of f along coordinate i.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double h) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = f(x);
  x[i] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

// |a - n| / max(|a|, |n|); 0 when both are below 1e-12.
inline double relative_error(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale < 1e-12) return 0.0;
  return std::abs(analytic - numeric) / scale;
}

struct Scored {
  double score;
  bool positive;
  std::size_t key;
};

/// Mean over positives of precision at the positive's rank, with each
/// precision recounted from scratch over the prefix. Ranking is by
/// descending score, then ascending key. Returns -1 without positives.
inline double prefix_precision_ap(std::vector<Scored> items) {
  std::sort(items.begin(), items.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.key < b.key;
  });
  double sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (!items[k].positive) continue;
    std::size_t hits = 0;
    for (std::size_t j = 0; j <= k; ++j) hits += items[j].positive ? 1 : 0;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    ++positives;
  }
  return positives == 0 ? -1.0 : sum / static_cast<double>(positives);
}

/// Connected components of the "distance <= radius" graph by BFS over an
/// explicit adjacency matrix. Returns, for each node, the smallest id in its
/// component.
inline std::vector<std::string> bfs_representatives(
    const std::vector<std::string>& ids,
    const std::function<double(std::size_t, std::size_t)>& distance, double radius) {
  const std::size_t n = ids.size();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && distance(i, j) <= radius) adj[i][j] = 1;
    }
  }
  std::vector<int> component(n, -1);
  std::vector<std::string> smallest;
  for (std::size_t s = 0; s < n; ++s) {
    if (component[s] >= 0) continue;
    const int c = static_cast<int>(smallest.size());
    smallest.push_back(ids[s]);
    std::deque<std::size_t> queue{s};
    component[s] = c;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      smallest[c] = std::min(smallest[c], ids[u]);
      for (std::size_t v = 0; v < n; ++v) {
        if (adj[u][v] && component[v] < 0) {
          component[v] = c;
          queue.push_back(v);
        }
      }
    }
  }
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = smallest[component[i]];
  return out;
}

// Direct summation of sum_{d=e}^{e+w} N_d / sum_{d=e-w}^{e} N_d over a
// plain vector, e being an index.
inline double rti_sum(const std::vector<double>& counts, std::size_t e, std::size_t w) {
  double after = 0.0, before = 0.0;
  for (std::size_t d = e; d <= e + w; ++d) after += counts[d];
  for (std::size_t d = e - w; d <= e; ++d) before += counts[d];
  return after / before;
}

}  // namespace incidents::oracle
