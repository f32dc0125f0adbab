#pragma once

// Serialization: CSV field/profile artifacts, JSON configs and verdict
// payloads. Doubles are printed with the shortest round-trip representation
// (std::to_chars), so writing and re-reading a finite field is bit-exact
// and the bytes produced are independent of locale, platform defaults, and
// thread count.

#include <nlohmann/json.hpp>

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "fhops/diagnostics.hpp"
#include "fhops/liouville.hpp"
#include "fhops/normal_form.hpp"
#include "fhops/solver.hpp"
#include "fhops/space.hpp"
#include "fhops/symbols.hpp"

namespace fhops::io {

using nlohmann::json;

std::string format_double(double v);  // shortest round-trip text

// ----- spectral fields --------------------------------------------------
// CSV columns: tau_1,...,tau_m,j,re,im; rows in canonical mode order. The
// sidecar <path>.meta.json carries SpaceParams and Bounds.
void write_field_csv(const SpectralField& field, const std::string& csvPath);
SpectralField read_field_csv(const std::string& csvPath);

// ----- data vectors -----------------------------------------------------
// manifest JSON: {"components": ["f_1.csv", ...]} with paths relative to
// the manifest file.
void write_data_vector(const DataVector& F, const std::string& manifestPath,
                       const std::string& stem);
DataVector read_data_vector(const std::string& manifestPath);

// ----- configs ----------------------------------------------------------
SpaceParams space_from_json(const json& j);
json space_to_json(const SpaceParams& p);

EigenProvider eigen_from_json(const json& j, const std::string& baseDir);
json eigen_to_json(const EigenProvider& p);

// System config sections: "space", "eigen", "operators". Polynomial
// coefficients and couplings accept numbers, "p/q" strings (kept exact), or
// {"re": ..., "im": ...} objects.
SystemSpec system_from_json(const json& j, const std::string& baseDir);
SystemSpec load_system(const std::string& path);
json system_to_json(const SystemSpec& spec);

// Sections "space", "eigen", "coefficients" (trig or samples per axis).
TimeCoefficientSet coefficient_set_from_json(const json& j,
                                             const std::string& baseDir);
TimeCoefficientSet load_coefficient_set(const std::string& path);

// Custom eigenvalue table: CSV "j,lambda" plus JSON metadata {"M":..,"n":..}
// at <csv>.meta.json; exact rational lambdas accepted as "p/q" strings.
EigenProvider load_custom_eigen(const std::string& csvPath);

// ----- results ----------------------------------------------------------
json mode_to_json(const ModeIndex& mode);
json decay_to_json(const DecayProfile& profile);
json verdict_to_json(const VerdictReport& report);
json admissibility_to_json(const AdmissibilityReport& report);
json liouville_to_json(const LiouvilleVerdict& verdict);
json convergents_to_json(const std::vector<ConvergentBounds>& bounds);

// Two-column profile artifact: "R,epsHat" rows.
void write_profile_csv(const DiophantineProfile& profile,
                       const std::string& path);

// Serialize with a trailing newline; all doubles shortest round-trip.
std::string dump_json(const json& j);
void write_json(const json& j, const std::string& path);
json read_json_file(const std::string& path);

}  // namespace fhops::io
