#include "mcsle/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcsle/errors.hpp"

namespace mcsle {

ModelParams derived_parameters(double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    throw InvalidParameter("kappa must be positive and finite, got " + std::to_string(kappa));
  }
  if (kappa >= 8.0) {
    throw InvalidParameter("kappa must be below 8 (beta = 8/kappa > 1), got " +
                           std::to_string(kappa));
  }
  ModelParams p;
  p.kappa = kappa;
  p.beta = 8.0 / kappa;
  p.b = (6.0 - kappa) / (2.0 * kappa);
  p.c = (6.0 - kappa) * (3.0 * kappa - 8.0) / (2.0 * kappa);
  return p;
}

void require_multichordal(const ModelParams& params) {
  if (!(params.kappa > 0.0 && params.kappa <= 4.0)) {
    throw InvalidParameter("multichordal operations require kappa in (0, 4], got " +
                           std::to_string(params.kappa));
  }
}

double arm_exponent(int n, double kappa) { return n * (4.0 * n + 4.0 - kappa) / kappa; }

double dyson_exponent(std::size_t p, double kappa) {
  const double pp = static_cast<double>(p);
  return pp * (4.0 * pp - 4.0 + kappa) / kappa;
}

double kac_weight(int s, double kappa) { return s * (s + 2.0) / kappa - s / 2.0; }

Exponents exponents(int n, double kappa) {
  if (n < 1) throw InvalidParameter("n must be >= 1");
  derived_parameters(kappa);  // validation only
  Exponents e;
  e.n = n;
  e.kappa = kappa;
  e.arm = arm_exponent(n, kappa);
  e.lambda_p = dyson_exponent(static_cast<std::size_t>(2 * n), kappa);
  e.lambda_prime_2n = n * (12.0 * n - 12.0 + 3.0 * kappa) / kappa;
  return e;
}

bool is_strictly_increasing(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) return false;
    if (i > 0 && !(x[i - 1] < x[i])) return false;
  }
  return true;
}

double min_gap(std::span<const double> x) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < x.size(); ++i) g = std::min(g, x[i] - x[i - 1]);
  return g;
}

BoundaryConfig::BoundaryConfig(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidConfig("boundary configuration needs at least one point");
  if (!is_strictly_increasing(points_)) {
    throw InvalidConfig("boundary points must be finite and strictly increasing");
  }
}

BoundaryConfig::BoundaryConfig(std::initializer_list<double> points)
    : BoundaryConfig(std::vector<double>(points)) {}

double BoundaryConfig::min_gap() const { return mcsle::min_gap(points_); }

double BoundaryConfig::diameter() const {
  return points_.empty() ? 0.0 : points_.back() - points_.front();
}

LinkPattern::LinkPattern(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
  for (auto& [a, b] : pairs_) {
    if (a > b) std::swap(a, b);
  }
  std::sort(pairs_.begin(), pairs_.end());
  const int m = 2 * static_cast<int>(pairs_.size());
  std::vector<int> seen(static_cast<std::size_t>(m + 1), 0);
  for (const auto& [a, b] : pairs_) {
    if (a < 1 || b > m || a == b) throw InvalidInput("link pattern index out of range");
    if (++seen[static_cast<std::size_t>(a)] > 1 || ++seen[static_cast<std::size_t>(b)] > 1) {
      throw InvalidInput("link pattern index used twice");
    }
  }
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    for (std::size_t j = 0; j < pairs_.size(); ++j) {
      const auto [a, b] = pairs_[i];
      const auto [c, d] = pairs_[j];
      if (a < c && c < b && b < d) throw InvalidInput("link pattern is not planar");
    }
  }
}

int LinkPattern::partner(int index) const {
  for (const auto& [a, b] : pairs_) {
    if (a == index) return b;
    if (b == index) return a;
  }
  throw InvalidParameter("index not in link pattern");
}

std::string LinkPattern::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (i) os << ',';
    os << '{' << pairs_[i].first << ',' << pairs_[i].second << '}';
  }
  os << '}';
  return os.str();
}

namespace {

// Matchings of the consecutive block [lo, hi]; lo pairs with an index at odd distance
// so both the inside and the outside blocks have even length.
void matchings(int lo, int hi, std::vector<std::vector<LinkPattern::Pair>>& out) {
  if (lo > hi) {
    out.emplace_back();
    return;
  }
  for (int m = lo + 1; m <= hi; m += 2) {
    std::vector<std::vector<LinkPattern::Pair>> inner;
    std::vector<std::vector<LinkPattern::Pair>> outer;
    matchings(lo + 1, m - 1, inner);
    matchings(m + 1, hi, outer);
    for (const auto& in : inner) {
      for (const auto& ot : outer) {
        std::vector<LinkPattern::Pair> v;
        v.reserve(1 + in.size() + ot.size());
        v.emplace_back(lo, m);
        v.insert(v.end(), in.begin(), in.end());
        v.insert(v.end(), ot.begin(), ot.end());
        out.push_back(std::move(v));
      }
    }
  }
}

}  // namespace

std::vector<LinkPattern> enumerate_link_patterns(int n) {
  if (n < 1 || n > 12) throw InvalidParameter("link patterns are enumerated for 1 <= n <= 12");
  std::vector<std::vector<LinkPattern::Pair>> raw;
  matchings(1, 2 * n, raw);
  std::vector<LinkPattern> out;
  out.reserve(raw.size());
  for (auto& r : raw) {
    std::sort(r.begin(), r.end());
    out.emplace_back(std::move(r));
  }
  std::sort(out.begin(), out.end());
  return out;
}

unsigned long long catalan(int n) {
  if (n < 0 || n > 30) throw InvalidParameter("catalan(n) supports 0 <= n <= 30");
  unsigned long long c = 1;
  for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

}  // namespace mcsle
