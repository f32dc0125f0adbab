#pragma once

// Mode bookkeeping for functions on T^m x R^n expanded in a mixed basis:
// Fourier modes e^{i tau.t} in the torus variables and an eigenfunction
// sequence h_j in the real variables. A mode is the pair (tau, j) with
// tau in Z^m and j >= 0. The anisotropic weight attached to a mode is
//
//     w(tau, j) = |tau|_2^(1/sigma) + (j+1)^(1/(2 n mu)),
//
// with sigma >= 1 and mu >= 1/2 describing the Gevrey scale in t and the
// Gelfand-Shilov scale in x. The index j is 0-based; the weight shifts it
// by one so the smallest mode weight is exactly 1.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fhops/errors.hpp"

namespace fhops {

struct SpaceParams {
  int m = 1;           // torus dimension, >= 1
  int n = 1;           // real dimension, >= 1
  double sigma = 1.0;  // >= 1
  double mu = 0.5;     // >= 1/2

  void validate() const;
};

struct ModeIndex {
  std::vector<long long> tau;  // size m
  long long j = 0;             // >= 0

  bool operator==(const ModeIndex& o) const { return tau == o.tau && j == o.j; }
};

// Lexicographic on (tau_1, ..., tau_m, j). Canonical storage and CSV order.
bool mode_less(const ModeIndex& a, const ModeIndex& b);

std::string mode_to_string(const ModeIndex& mode);

// Rectangular truncation: |tau_i| <= tauMax[i] per axis, 0 <= j <= jMax.
struct Bounds {
  std::vector<long long> tauMax;  // size m, entries >= 0
  long long jMax = 0;             // >= 0

  void validate(int m) const;
  bool contains(const ModeIndex& mode) const;
  // Number of modes in the box; saturates at INT64_MAX.
  std::int64_t mode_count() const;
};

double weight(const SpaceParams& params, const ModeIndex& mode);

// Largest and smallest weight attained on the box (closed form, no
// enumeration). The minimum is always weight((0,...,0), 0) = 1.
double max_weight(const SpaceParams& params, const Bounds& bounds);

struct FieldEntry {
  ModeIndex mode;
  std::complex<double> a;
};

// Sparse coefficient field over a truncation box. Entries are kept sorted in
// canonical mode order with unique modes; absent modes are zero.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(SpaceParams params, Bounds bounds);

  const SpaceParams& params() const { return params_; }
  const Bounds& bounds() const { return bounds_; }
  const std::vector<FieldEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Stages an entry; call finalize() before reading. Modes outside the box
  // are a contract violation. Duplicate modes accumulate.
  void accumulate(const ModeIndex& mode, std::complex<double> value);
  void finalize();

  std::complex<double> at(const ModeIndex& mode) const;

  // max |a| over stored entries (0 for an empty field).
  double max_abs() const;
  // Drops entries that are exactly 0.0 + 0.0i.
  void drop_exact_zeros();

 private:
  SpaceParams params_;
  Bounds bounds_;
  std::vector<FieldEntry> entries_;
  bool finalized_ = true;
};

// Groups every mode of the box by weight into at most shellCount contiguous
// ranges of near-equal population. Equal weights never split across shells,
// so fewer than shellCount groups can come back. Walking the returned lists
// in order visits weights nondecreasingly.
std::vector<std::vector<ModeIndex>> enumerate_shells(const SpaceParams& params,
                                                     const Bounds& bounds,
                                                     int shellCount);

// Same grouping applied to an explicit weight multiset; returns, for each
// shell, the indices into `weights` it contains. Used for per-entry shell
// statistics on sparse fields.
std::vector<std::vector<std::size_t>> group_by_weight(
    std::span<const double> weights, int shellCount);

}  // namespace fhops
