// Copyright 2026 The patland Authors
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

// Brute-force reference implementations shared by the unit and acceptance
// tests. Nothing here calls into the library code it is used to check.

#ifndef PATLAND_TESTS_ORACLES_HPP_
#define PATLAND_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "patland/corpus.hpp"

namespace oracle {

using patland::PatentRecord;

inline std::string subclass_of(const std::string& code) { return code.substr(0, 4); }

// Small random corpus: ids P00.., codes drawn from a tiny pool so that
// sharing is common, a few dangling citations, a handful of families.
inline std::vector<PatentRecord> random_corpus(std::mt19937_64& gen, std::size_t n) {
  static const char* kCodes[] = {"A01B1/02", "A01B1/04", "A01B3/10", "B60K6/20", "E05D5/02",
                                 "E05D7/04", "G06N3/08", "G06N20/00", "H01M10/05", "G06F17/30"};
  std::uniform_int_distribution<int> ncodes(0, 2), ncites(0, 4), code(0, 9), fam(0, 5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PatentRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].patent_id = (i < 10 ? "P0" : "P") + std::to_string(i);
    out[i].title = "t";
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> codes;
    for (int c = ncodes(gen); c > 0; --c) codes.insert(kCodes[code(gen)]);
    out[i].cpc_codes.assign(codes.begin(), codes.end());
    std::set<std::string> cites;
    if (n > 1) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (int c = ncites(gen); c > 0; --c) {
        const std::size_t j = pick(gen);
        if (j != i) cites.insert(out[j].patent_id);
      }
    }
    if (u(gen) < 0.1) cites.insert("X" + std::to_string(i));  // dangling
    out[i].citations.assign(cites.begin(), cites.end());
    if (u(gen) < 0.4) out[i].family_id = "F" + std::to_string(fam(gen));
  }
  return out;
}

inline const PatentRecord* find(const std::vector<PatentRecord>& records, const std::string& id) {
  for (const auto& r : records)
    if (r.patent_id == id) return &r;
  return nullptr;
}

inline std::set<std::string> l1(const std::vector<PatentRecord>& records, const std::set<std::string>& seeds,
                                bool subclass_level = false) {
  std::set<std::string> out;
  for (const auto& p : records) {
    bool in = seeds.count(p.patent_id) > 0;
    for (const auto& s : seeds) {
      const PatentRecord* sr = find(records, s);
      if (!sr) continue;
      for (const auto& c : sr->citations) in = in || c == p.patent_id;
      for (const auto& a : sr->cpc_codes)
        for (const auto& b : p.cpc_codes)
          in = in || (subclass_level ? subclass_of(a) == subclass_of(b) : a == b);
    }
    if (in) out.insert(p.patent_id);
  }
  return out;
}

inline std::set<std::string> l2(const std::vector<PatentRecord>& records, const std::set<std::string>& l1set) {
  std::set<std::string> out = l1set;
  for (const auto& p : records) {
    if (p.family_id.empty()) continue;
    for (const auto& q : l1set) {
      const PatentRecord* qr = find(records, q);
      if (qr && qr->family_id == p.family_id) out.insert(p.patent_id);
    }
  }
  return out;
}

inline std::set<std::string> subclasses(const PatentRecord& r) {
  std::set<std::string> out;
  for (const auto& c : r.cpc_codes) out.insert(subclass_of(c));
  return out;
}

// k=1: per cited document, each distinct subclass once. k=2: every
// directed two-step path contributes the cross product of subclasses.
inline std::map<std::string, std::uint64_t> khop(const std::vector<PatentRecord>& records, const std::string& id,
                                                 int k) {
  std::map<std::string, std::uint64_t> out;
  const PatentRecord* p = find(records, id);
  const std::set<std::string> first(p->citations.begin(), p->citations.end());
  for (const auto& c : first) {
    const PatentRecord* q = find(records, c);
    if (!q) continue;
    if (k == 1) {
      for (const auto& s : subclasses(*q)) ++out[s];
      continue;
    }
    const std::set<std::string> second(q->citations.begin(), q->citations.end());
    for (const auto& d : second) {
      const PatentRecord* r = find(records, d);
      if (!r) continue;
      for (const auto& x : subclasses(*q))
        for (const auto& y : subclasses(*r)) ++out[x + "-" + y];
    }
  }
  return out;
}

// Dual of the soft-margin SVM, max sum(a) - 1/2 a'Qa over 0 <= a <= C and
// y'a = 0, solved by accelerated projected gradient ascent. Projection onto
// the feasible set bisects on the multiplier of the equality constraint.
inline std::vector<double> project_box_hyperplane(const std::vector<double>& v, const std::vector<int>& y, double c) {
  auto at = [&](double mu) {
    std::vector<double> a(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::clamp(v[i] - mu * y[i], 0.0, c);
    return a;
  };
  auto g = [&](double mu) {
    const auto a = at(mu);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += y[i] * a[i];
    return s;
  };
  double lo = -1.0, hi = 1.0;
  while (g(lo) < 0) lo *= 2;
  while (g(hi) > 0) hi *= 2;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return at(0.5 * (lo + hi));
}

inline double dual_objective(const std::vector<std::vector<double>>& q, const std::vector<double>& a) {
  double lin = 0, quad = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    lin += a[i];
    for (std::size_t j = 0; j < a.size(); ++j) quad += a[i] * q[i][j] * a[j];
  }
  return lin - 0.5 * quad;
}

inline double qp_dual_optimum(const std::vector<std::vector<double>>& kernel, const std::vector<int>& y, double c,
                              int iterations = 5000) {
  const std::size_t n = y.size();
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  double lipschitz = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < n; ++j) {
      q[i][j] = y[i] * y[j] * kernel[i][j];
      row += std::abs(q[i][j]);
    }
    lipschitz = std::max(lipschitz, row);
  }
  const double step = 1.0 / std::max(lipschitz, 1e-12);
  std::vector<double> a(n, 0.0), z = a;
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      double grad = 1.0;
      for (std::size_t j = 0; j < n; ++j) grad -= q[i][j] * z[j];
      v[i] = z[i] + step * grad;
    }
    const auto next = project_box_hyperplane(v, y, c);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t i = 0; i < n; ++i) z[i] = next[i] + (t - 1.0) / t_next * (next[i] - a[i]);
    a = next;
    t = t_next;
  }
  return dual_objective(q, a);
}

// Cohen's kappa straight from the 2x2 counts.
inline double kappa(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  const double po = (a + d) / n;
  const double pe = ((a + b) / n) * ((a + c) / n) + ((c + d) / n) * ((b + d) / n);
  if (pe >= 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

}  // namespace oracle

#endif  // PATLAND_TESTS_ORACLES_HPP_
