#include "guidewave/core/refractive_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>

#include "guidewave/core/errors.hpp"

namespace guidewave {

namespace {

std::string index_name(int j, int l) {
  return "(" + std::to_string(j) + ", " + std::to_string(l) + ")";
}

}  // namespace

RefractiveIndex::RefractiveIndex(CellSpec cell, std::vector<FourierCoefficient> table, Point origin)
    : cell_(cell), table_(std::move(table)), origin_(origin) {
  cell_.validate();
  std::map<std::pair<int, int>, cplx> lookup;
  for (const auto& c : table_) {
    if (c.l < 0) throw ConfigError("qhat: negative cosine index l in entry " + index_name(c.j, c.l));
    if (!lookup.emplace(std::make_pair(c.j, c.l), c.value).second) {
      throw ConfigError("qhat: duplicate entry " + index_name(c.j, c.l));
    }
    band_j_ = std::max(band_j_, std::abs(c.j));
    band_l_ = std::max(band_l_, c.l);
  }
  // q must be real: qhat(-j, l) = conj(qhat(j, l)).
  for (const auto& [key, value] : lookup) {
    const auto mirror = lookup.find({-key.first, key.second});
    const cplx expected = std::conj(value);
    const cplx found = mirror == lookup.end() ? cplx(0.0) : mirror->second;
    if (std::abs(found - expected) > 1e-12 * (1.0 + std::abs(value))) {
      throw ConfigError("qhat: realness violated, entry " + index_name(-key.first, key.second) +
                        " must be the conjugate of entry " + index_name(key.first, key.second));
    }
  }
  std::sort(table_.begin(), table_.end(), [](const auto& a, const auto& b) {
    return a.j != b.j ? a.j < b.j : a.l < b.l;
  });
}

RefractiveIndex RefractiveIndex::constant(double c, CellSpec cell, Point origin) {
  return RefractiveIndex(cell, {{0, 0, cplx(c, 0.0)}}, origin);
}

cplx RefractiveIndex::qhat(int j, int l) const {
  const int m = std::abs(l);
  for (const auto& c : table_) {
    if (c.j == j && c.l == m) return c.value;
  }
  return 0.0;
}

cplx RefractiveIndex::eval_sum(const Point& local) const {
  cplx sum = 0.0;
  for (const auto& c : table_) {
    const double phase = 2.0 * kPi * c.j * local.x() / cell_.L;
    sum += c.value * std::exp(cplx(0.0, phase)) * std::cos(kPi * c.l * local.y() / cell_.H);
  }
  return sum;
}

double RefractiveIndex::eval_periodic(const Point& x) const {
  if (table_.empty()) return 0.0;
  Point local = x - origin_;
  local.x() -= cell_.L * std::floor(local.x() / cell_.L);
  return eval_sum(local).real();
}

double RefractiveIndex::eval(const Point& x) const {
  double value = eval_periodic(x);
  if (perturbation_ && perturbation_->support.contains(x)) value += perturbation_->fn(x);
  return value;
}

double RefractiveIndex::sup_norm(int samples) const {
  double best = 0.0;
  for (int a = 0; a < samples; ++a) {
    for (int b = 0; b <= samples; ++b) {
      const Point local(cell_.L * a / samples, cell_.H * b / samples);
      best = std::max(best, std::abs(eval_sum(local).real()));
    }
  }
  return best;
}

double RefractiveIndex::min_value(int samples) const {
  double best = table_.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (int a = 0; a < samples && !table_.empty(); ++a) {
    for (int b = 0; b <= samples; ++b) {
      const Point local(cell_.L * a / samples, cell_.H * b / samples);
      best = std::min(best, eval_sum(local).real());
    }
  }
  return best;
}

std::uint64_t RefractiveIndex::fingerprint() const {
  char buf[160];
  std::string text;
  std::snprintf(buf, sizeof buf, "cell %.17g %.17g;", cell_.L, cell_.H);
  text += buf;
  for (const auto& c : table_) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g;", c.j, c.l, c.value.real(), c.value.imag());
    text += buf;
  }
  // 64-bit FNV-1a: stable across runs and platforms, unlike std::hash.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

double eval_refractive_index(const RefractiveIndex& q, const Point& x) {
  if (q.table().empty()) return q.eval(x);
  Point local = x - q.origin();
  local.x() -= q.cell().L * std::floor(local.x() / q.cell().L);
  cplx sum = 0.0;
  for (const auto& c : q.table()) {
    sum += c.value * std::exp(cplx(0.0, 2.0 * kPi * c.j * local.x() / q.cell().L)) *
           std::cos(kPi * c.l * local.y() / q.cell().H);
  }
  if (std::abs(sum.imag()) > 1e-12 * (1.0 + std::abs(sum))) {
    throw ConfigError("refractive index has a non-real value at a sample point");
  }
  return q.eval(x);
}

}  // namespace guidewave
