#include "fhops/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace fhops {

void SpaceParams::validate() const {
  require_pre(m >= 1, "torus dimension m must be >= 1");
  require_pre(n >= 1, "real dimension n must be >= 1");
  require_pre(std::isfinite(sigma) && sigma >= 1.0, "sigma must be >= 1");
  require_pre(std::isfinite(mu) && mu >= 0.5, "mu must be >= 1/2");
}

bool mode_less(const ModeIndex& a, const ModeIndex& b) {
  if (a.tau != b.tau)
    return std::lexicographical_compare(a.tau.begin(), a.tau.end(),
                                        b.tau.begin(), b.tau.end());
  return a.j < b.j;
}

std::string mode_to_string(const ModeIndex& mode) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < mode.tau.size(); ++i) {
    if (i) out << ",";
    out << mode.tau[i];
  }
  out << "; " << mode.j << ")";
  return out.str();
}

void Bounds::validate(int m) const {
  require_pre(static_cast<int>(tauMax.size()) == m,
              "tauMax must have one entry per torus axis");
  for (long long t : tauMax) require_pre(t >= 0, "tauMax entries must be >= 0");
  require_pre(jMax >= 0, "jMax must be >= 0");
}

bool Bounds::contains(const ModeIndex& mode) const {
  if (mode.tau.size() != tauMax.size()) return false;
  for (std::size_t i = 0; i < tauMax.size(); ++i)
    if (mode.tau[i] < -tauMax[i] || mode.tau[i] > tauMax[i]) return false;
  return mode.j >= 0 && mode.j <= jMax;
}

std::int64_t Bounds::mode_count() const {
  const std::int64_t cap = std::numeric_limits<std::int64_t>::max();
  std::int64_t count = jMax >= cap - 1 ? cap : jMax + 1;
  for (long long t : tauMax) {
    std::int64_t width = t >= (cap - 1) / 2 ? cap : 2 * t + 1;
    if (count > cap / width) return cap;
    count *= width;
  }
  return count;
}

double weight(const SpaceParams& params, const ModeIndex& mode) {
  double sq = 0.0;
  for (long long t : mode.tau) {
    double td = static_cast<double>(t);
    sq += td * td;
  }
  double tauPart = std::pow(std::sqrt(sq), 1.0 / params.sigma);
  double jPart = std::pow(static_cast<double>(mode.j) + 1.0,
                          1.0 / (2.0 * params.n * params.mu));
  return tauPart + jPart;
}

double max_weight(const SpaceParams& params, const Bounds& bounds) {
  ModeIndex corner;
  corner.tau = bounds.tauMax;
  corner.j = bounds.jMax;
  return weight(params, corner);
}

SpectralField::SpectralField(SpaceParams params, Bounds bounds)
    : params_(std::move(params)), bounds_(std::move(bounds)) {
  params_.validate();
  bounds_.validate(params_.m);
}

void SpectralField::accumulate(const ModeIndex& mode,
                               std::complex<double> value) {
  require_pre(bounds_.contains(mode),
              "mode " + mode_to_string(mode) + " lies outside the field box");
  entries_.push_back({mode, value});
  finalized_ = false;
}

void SpectralField::finalize() {
  std::sort(entries_.begin(), entries_.end(),
            [](const FieldEntry& a, const FieldEntry& b) {
              return mode_less(a.mode, b.mode);
            });
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries_.size();) {
    FieldEntry merged = entries_[i];
    std::size_t k = i + 1;
    while (k < entries_.size() && entries_[k].mode == merged.mode) {
      merged.a += entries_[k].a;
      ++k;
    }
    entries_[out++] = merged;
    i = k;
  }
  entries_.resize(out);
  finalized_ = true;
}

std::complex<double> SpectralField::at(const ModeIndex& mode) const {
  require_pre(finalized_, "field read before finalize()");
  auto it = std::lower_bound(entries_.begin(), entries_.end(), mode,
                             [](const FieldEntry& e, const ModeIndex& m) {
                               return mode_less(e.mode, m);
                             });
  if (it != entries_.end() && it->mode == mode) return it->a;
  return {0.0, 0.0};
}

double SpectralField::max_abs() const {
  double best = 0.0;
  for (const FieldEntry& e : entries_) best = std::max(best, std::abs(e.a));
  return best;
}

void SpectralField::drop_exact_zeros() {
  entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                [](const FieldEntry& e) {
                                  return e.a.real() == 0.0 && e.a.imag() == 0.0;
                                }),
                 entries_.end());
}

std::vector<std::vector<std::size_t>> group_by_weight(
    std::span<const double> weights, int shellCount) {
  require_pre(shellCount >= 1, "shellCount must be >= 1");
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return weights[a] < weights[b];
                   });

  std::vector<std::vector<std::size_t>> shells;
  const std::size_t total = order.size();
  std::size_t pos = 0;
  for (int s = 1; s <= shellCount && pos < total; ++s) {
    std::size_t target = total * static_cast<std::size_t>(s) /
                         static_cast<std::size_t>(shellCount);
    std::vector<std::size_t> shell;
    while (pos < target) shell.push_back(order[pos++]);
    // Never split a run of equal weights across two shells.
    while (pos < total && !shell.empty() &&
           weights[order[pos]] == weights[shell.back()])
      shell.push_back(order[pos++]);
    if (!shell.empty()) shells.push_back(std::move(shell));
  }
  return shells;
}

std::vector<std::vector<ModeIndex>> enumerate_shells(const SpaceParams& params,
                                                     const Bounds& bounds,
                                                     int shellCount) {
  params.validate();
  bounds.validate(params.m);
  std::int64_t count = bounds.mode_count();
  require_pre(count <= (std::int64_t{1} << 26),
              "shell enumeration box is too large to materialize");

  std::vector<ModeIndex> modes;
  modes.reserve(static_cast<std::size_t>(count));
  ModeIndex mode;
  mode.tau.assign(params.m, 0);
  for (int i = 0; i < params.m; ++i) mode.tau[i] = -bounds.tauMax[i];
  for (;;) {
    for (long long j = 0; j <= bounds.jMax; ++j) {
      mode.j = j;
      modes.push_back(mode);
    }
    int axis = params.m - 1;
    while (axis >= 0 && mode.tau[axis] == bounds.tauMax[axis]) {
      mode.tau[axis] = -bounds.tauMax[axis];
      --axis;
    }
    if (axis < 0) break;
    ++mode.tau[axis];
  }

  std::vector<double> weights(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i)
    weights[i] = weight(params, modes[i]);

  auto indexShells = group_by_weight(weights, shellCount);
  std::vector<std::vector<ModeIndex>> out;
  out.reserve(indexShells.size());
  for (const auto& shell : indexShells) {
    std::vector<ModeIndex> group;
    group.reserve(shell.size());
    for (std::size_t idx : shell) group.push_back(modes[idx]);
    out.push_back(std::move(group));
  }
  return out;
}

}  // namespace fhops
