#pragma once

#include "rf/coefficients.hpp"
#include "rf/mub.hpp"
#include "rf/report.hpp"
#include "rf/sic.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rf::io {

inline constexpr int kSchemaVersion = 1;

// Malformed or out-of-contract input: unknown schema version, missing or
// ill-typed fields, inconsistent dimensions.  The CLI maps this (and plain
// file errors) to its usage/IO exit code.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One family member.  A zero-length state or 0x0 operator means absent; at
// least one of the two must be present.  coefficients, when nonempty, holds
// the (2j+1)^2 expansion components in flat (k,q) order.
struct FamilyMember {
    std::string label;
    Eigen::VectorXcd state;
    Eigen::MatrixXcd op;
    std::vector<Complex> coefficients;
};

// How a sic-kind family was produced; absent (present = false) for built or
// hand-assembled families.
struct SearchProvenance {
    bool present = false;
    bool covariant = true;
    bool converged = false;
    double residual = 0.0;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
    int restarts = 0;
    int max_iterations = 0;
    Eigen::VectorXcd fiducial;  // empty unless the family is a fiducial orbit
};

// On-disk unit: a labelled list of states/operators on one spin space.
// Serialized as JSON with complex numbers as [re, im] pairs, the angular
// momentum as {"two_j": n}, canonical key order, and shortest round-trip
// float formatting, so write -> read -> write is byte-identical.
struct FamilyFile {
    int schema_version = kSchemaVersion;
    std::string kind = "generic";  // "sic" | "mub" | "generic"
    int two_j = 0;
    std::vector<FamilyMember> members;
    SearchProvenance provenance;
    std::string construction;                    // mub families: how built
    std::map<std::string, std::string> extras;   // free-form string metadata

    int d() const { return two_j + 1; }
};

// Converters.  The sic direction records the orbit structure (fiducial,
// covariant flag) and search outcome; config, when given, fills the budget
// fields.  Reading recomputes the candidate residual (and from it the
// converged flag, against the stored tolerance) from the states rather than
// trusting the stored values, so edited files are judged by their content.
FamilyFile family_from_sic(const sic::SicCandidate& cand,
                           const sic::SearchConfig* config = nullptr);
sic::SicCandidate sic_from_family(const FamilyFile& family);
FamilyFile family_from_mub(const mub::MubSet& set);
mub::MubSet mub_from_family(const FamilyFile& family);

// Attaches expansion coefficients member-by-member (sizes must match).
void attach_coefficients(FamilyFile& family,
                         const std::vector<TensorCoefficients>& coefficients);

std::string family_to_string(const FamilyFile& family);
FamilyFile family_from_string(const std::string& text);

// write_family serializes canonically and writes atomically (temp file in
// the target directory, then rename).  read_family throws SchemaError on
// malformed content and std::runtime_error on file errors.
void write_family(const FamilyFile& family, const std::string& path);
FamilyFile read_family(const std::string& path);

// Report rendering: command echo, one entry per check, overall verdict,
// wall time.  Same canonical-JSON conventions as the family schema.
std::string report_to_string(const CheckReport& report, const std::string& command,
                             double wall_time_s);

void write_text(const std::string& text, const std::string& path);

}  // namespace rf::io
