#include "rf/family_io.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

namespace rf::io {

namespace {

using ordered_json = nlohmann::ordered_json;

void expect(bool ok, const std::string& message) {
    if (!ok) throw SchemaError(message);
}

ordered_json complex_to_json(const Complex& z) {
    return ordered_json::array({z.real(), z.imag()});
}

Complex complex_from_json(const ordered_json& j, const std::string& where) {
    expect(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
           where + ": complex values are [re, im] number pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

ordered_json vector_to_json(const Eigen::VectorXcd& v) {
    ordered_json out = ordered_json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

Eigen::VectorXcd vector_from_json(const ordered_json& j, const std::string& where) {
    expect(j.is_array(), where + ": expected an array");
    Eigen::VectorXcd v(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<int>(i)) = complex_from_json(j[i], where);
    return v;
}

ordered_json matrix_to_json(const Eigen::MatrixXcd& m) {
    ordered_json out = ordered_json::array();
    for (int r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::MatrixXcd matrix_from_json(const ordered_json& j, const std::string& where) {
    expect(j.is_array() && !j.empty(), where + ": expected a nonempty array of rows");
    const int rows = static_cast<int>(j.size());
    expect(j[0].is_array(), where + ": expected an array of rows");
    const int cols = static_cast<int>(j[0].size());
    Eigen::MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        expect(j[r].is_array() && static_cast<int>(j[r].size()) == cols,
               where + ": ragged matrix rows");
        for (int c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c], where);
    }
    return m;
}

ordered_json member_to_json(const FamilyMember& member) {
    ordered_json out;
    out["label"] = member.label;
    if (member.state.size() > 0) out["state"] = vector_to_json(member.state);
    if (member.op.rows() > 0) out["operator"] = matrix_to_json(member.op);
    if (!member.coefficients.empty()) {
        ordered_json c = ordered_json::array();
        for (const Complex& z : member.coefficients) c.push_back(complex_to_json(z));
        out["coefficients"] = std::move(c);
    }
    return out;
}

FamilyMember member_from_json(const ordered_json& j, int d, std::size_t index) {
    const std::string where = "members[" + std::to_string(index) + "]";
    expect(j.is_object(), where + ": expected an object");
    FamilyMember member;
    for (const auto& [key, value] : j.items()) {
        if (key == "label") {
            expect(value.is_string(), where + ".label: expected a string");
            member.label = value.get<std::string>();
        } else if (key == "state") {
            member.state = vector_from_json(value, where + ".state");
            expect(static_cast<int>(member.state.size()) == d,
                   where + ".state: length must be 2j+1");
        } else if (key == "operator") {
            member.op = matrix_from_json(value, where + ".operator");
            expect(member.op.rows() == d && member.op.cols() == d,
                   where + ".operator: must be (2j+1) x (2j+1)");
        } else if (key == "coefficients") {
            expect(value.is_array() &&
                       static_cast<int>(value.size()) == d * d,
                   where + ".coefficients: length must be (2j+1)^2");
            member.coefficients.reserve(value.size());
            for (const auto& z : value)
                member.coefficients.push_back(
                    complex_from_json(z, where + ".coefficients"));
        } else {
            throw SchemaError(where + ": unknown key \"" + key + "\"");
        }
    }
    expect(member.state.size() > 0 || member.op.rows() > 0,
           where + ": needs a state vector or an operator matrix");
    return member;
}

ordered_json metadata_to_json(const FamilyFile& family) {
    ordered_json meta = ordered_json::object();
    if (family.provenance.present) {
        const auto& p = family.provenance;
        meta["provenance"] = p.covariant ? "fiducial-orbit" : "explicit";
        meta["converged"] = p.converged;
        meta["residual"] = p.residual;
        meta["tolerance"] = p.tolerance;
        meta["seed"] = p.seed;
        meta["restarts"] = p.restarts;
        meta["max_iterations"] = p.max_iterations;
        if (p.fiducial.size() > 0) meta["fiducial"] = vector_to_json(p.fiducial);
    }
    if (!family.construction.empty()) meta["construction"] = family.construction;
    for (const auto& [key, value] : family.extras) meta[key] = value;
    return meta;
}

void metadata_from_json(const ordered_json& meta, FamilyFile& family) {
    expect(meta.is_object(), "metadata: expected an object");
    auto& p = family.provenance;
    for (const auto& [key, value] : meta.items()) {
        if (key == "provenance") {
            expect(value.is_string() && (value == "fiducial-orbit" || value == "explicit"),
                   "metadata.provenance: \"fiducial-orbit\" or \"explicit\"");
            p.present = true;
            p.covariant = value == "fiducial-orbit";
        } else if (key == "converged") {
            expect(value.is_boolean(), "metadata.converged: expected a boolean");
            p.converged = value.get<bool>();
        } else if (key == "residual") {
            expect(value.is_number(), "metadata.residual: expected a number");
            p.residual = value.get<double>();
        } else if (key == "tolerance") {
            expect(value.is_number(), "metadata.tolerance: expected a number");
            p.tolerance = value.get<double>();
        } else if (key == "seed") {
            expect(value.is_number_unsigned() || value.is_number_integer(),
                   "metadata.seed: expected an integer");
            p.seed = value.get<std::uint64_t>();
        } else if (key == "restarts") {
            expect(value.is_number_integer(), "metadata.restarts: expected an integer");
            p.restarts = value.get<int>();
        } else if (key == "max_iterations") {
            expect(value.is_number_integer(),
                   "metadata.max_iterations: expected an integer");
            p.max_iterations = value.get<int>();
        } else if (key == "fiducial") {
            p.fiducial = vector_from_json(value, "metadata.fiducial");
            expect(static_cast<int>(p.fiducial.size()) == family.d(),
                   "metadata.fiducial: length must be 2j+1");
        } else if (key == "construction") {
            expect(value.is_string(), "metadata.construction: expected a string");
            family.construction = value.get<std::string>();
        } else {
            expect(value.is_string(),
                   "metadata." + key + ": free-form metadata values must be strings");
            family.extras[key] = value.get<std::string>();
        }
    }
}

double recompute_residual(const std::vector<Eigen::VectorXcd>& states, int d) {
    const double c = 1.0 / (d + 1);
    double worst = 0.0;
    for (std::size_t x = 0; x < states.size(); ++x)
        for (std::size_t y = x + 1; y < states.size(); ++y)
            worst = std::max(worst,
                             std::abs(std::norm(states[x].dot(states[y])) - c));
    return worst;
}

}  // namespace

FamilyFile family_from_sic(const sic::SicCandidate& cand,
                           const sic::SearchConfig* config) {
    FamilyFile family;
    family.kind = "sic";
    family.two_j = cand.two_j;
    family.members.reserve(cand.states.size());
    for (std::size_t x = 0; x < cand.states.size(); ++x) {
        FamilyMember member;
        member.label = "x=" + std::to_string(x);
        member.state = cand.states[x];
        family.members.push_back(std::move(member));
    }
    auto& p = family.provenance;
    p.present = true;
    p.covariant = cand.covariant;
    p.converged = cand.converged;
    p.residual = cand.residual;
    if (cand.covariant) p.fiducial = cand.fiducial;
    if (config) {
        p.tolerance = config->tolerance;
        p.seed = config->seed;
        p.restarts = config->restarts;
        p.max_iterations = config->max_iterations;
    }
    return family;
}

sic::SicCandidate sic_from_family(const FamilyFile& family) {
    expect(family.kind == "sic", "family kind is \"" + family.kind + "\", not \"sic\"");
    const int d = family.d();
    expect(static_cast<int>(family.members.size()) == d * d,
           "sic family must hold exactly d^2 members");
    sic::SicCandidate cand;
    cand.two_j = family.two_j;
    cand.states.reserve(family.members.size());
    for (std::size_t x = 0; x < family.members.size(); ++x) {
        expect(family.members[x].state.size() > 0,
               "members[" + std::to_string(x) + "]: sic members need state vectors");
        cand.states.push_back(family.members[x].state);
    }
    cand.covariant = family.provenance.present && family.provenance.covariant;
    cand.fiducial = family.provenance.fiducial;
    cand.residual = recompute_residual(cand.states, d);
    const double tol =
        family.provenance.tolerance > 0.0 ? family.provenance.tolerance : 1e-8;
    cand.converged = cand.residual < tol;
    return cand;
}

FamilyFile family_from_mub(const mub::MubSet& set) {
    FamilyFile family;
    family.kind = "mub";
    family.two_j = set.two_j;
    family.construction = "explicit-prime";
    const int d = set.d();
    for (int a = 0; a < set.basis_count(); ++a) {
        for (int alpha = 0; alpha < d; ++alpha) {
            FamilyMember member;
            member.label = "a=" + std::to_string(a) + " alpha=" + std::to_string(alpha);
            member.state = set.vector(a, alpha);
            family.members.push_back(std::move(member));
        }
    }
    return family;
}

mub::MubSet mub_from_family(const FamilyFile& family) {
    expect(family.kind == "mub", "family kind is \"" + family.kind + "\", not \"mub\"");
    const int d = family.d();
    const int n = static_cast<int>(family.members.size());
    expect(n > 0 && n % d == 0, "mub family size must be a multiple of d");
    mub::MubSet set;
    set.two_j = family.two_j;
    set.bases.resize(n / d, Eigen::MatrixXcd(d, d));
    for (int x = 0; x < n; ++x) {
        expect(family.members[x].state.size() > 0,
               "members[" + std::to_string(x) + "]: mub members need state vectors");
        set.bases[x / d].col(x % d) = family.members[x].state;
    }
    return set;
}

void attach_coefficients(FamilyFile& family,
                         const std::vector<TensorCoefficients>& coefficients) {
    if (coefficients.size() != family.members.size())
        throw std::invalid_argument("attach_coefficients: one set per member");
    const int n = family.d() * family.d();
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        if (coefficients[i].size() != n)
            throw std::invalid_argument("attach_coefficients: component count mismatch");
        family.members[i].coefficients = coefficients[i].raw();
    }
}

std::string family_to_string(const FamilyFile& family) {
    ordered_json out;
    out["schema_version"] = family.schema_version;
    out["kind"] = family.kind;
    out["j"] = ordered_json{{"two_j", family.two_j}};
    ordered_json members = ordered_json::array();
    for (const auto& member : family.members) members.push_back(member_to_json(member));
    out["members"] = std::move(members);
    out["metadata"] = metadata_to_json(family);
    return out.dump(2) + "\n";
}

FamilyFile family_from_string(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("not valid JSON: ") + e.what());
    }
    expect(j.is_object(), "top level: expected an object");
    FamilyFile family;
    bool saw_version = false, saw_kind = false, saw_j = false, saw_members = false;
    ordered_json members_json, metadata_json = ordered_json::object();
    for (const auto& [key, value] : j.items()) {
        if (key == "schema_version") {
            expect(value.is_number_integer(), "schema_version: expected an integer");
            family.schema_version = value.get<int>();
            expect(family.schema_version == kSchemaVersion,
                   "schema_version " + std::to_string(family.schema_version) +
                       " is not supported (this build reads version " +
                       std::to_string(kSchemaVersion) + ")");
            saw_version = true;
        } else if (key == "kind") {
            expect(value.is_string(), "kind: expected a string");
            family.kind = value.get<std::string>();
            expect(family.kind == "sic" || family.kind == "mub" ||
                       family.kind == "generic",
                   "kind: \"sic\", \"mub\", or \"generic\"");
            saw_kind = true;
        } else if (key == "j") {
            expect(value.is_object() && value.contains("two_j") &&
                       value["two_j"].is_number_integer(),
                   "j: expected {\"two_j\": n}");
            family.two_j = value["two_j"].get<int>();
            expect(family.two_j >= 0, "j.two_j: must be nonnegative");
            saw_j = true;
        } else if (key == "members") {
            expect(value.is_array(), "members: expected an array");
            members_json = value;
            saw_members = true;
        } else if (key == "metadata") {
            metadata_json = value;
        } else {
            throw SchemaError("top level: unknown key \"" + key + "\"");
        }
    }
    expect(saw_version, "missing schema_version");
    expect(saw_kind, "missing kind");
    expect(saw_j, "missing j");
    expect(saw_members, "missing members");
    family.members.reserve(members_json.size());
    for (std::size_t i = 0; i < members_json.size(); ++i)
        family.members.push_back(member_from_json(members_json[i], family.d(), i));
    metadata_from_json(metadata_json, family);
    return family;
}

void write_family(const FamilyFile& family, const std::string& path) {
    write_text(family_to_string(family), path);
}

FamilyFile read_family(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return family_from_string(buffer.str());
    } catch (const SchemaError& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

std::string report_to_string(const CheckReport& report, const std::string& command,
                             double wall_time_s) {
    ordered_json out;
    out["schema_version"] = kSchemaVersion;
    out["command"] = command;
    ordered_json entries = ordered_json::array();
    for (const auto& e : report.entries) {
        ordered_json entry;
        entry["name"] = e.name;
        entry["relation"] = e.relation;
        entry["pass"] = e.pass;
        entry["residual"] = e.residual;
        entry["tolerance"] = e.tolerance;
        if (!e.detail.empty()) entry["detail"] = e.detail;
        entries.push_back(std::move(entry));
    }
    out["entries"] = std::move(entries);
    out["overall_pass"] = report.all_pass();
    out["wall_time_s"] = wall_time_s;
    return out.dump(2) + "\n";
}

void write_text(const std::string& text, const std::string& path) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot move " + tmp.string() + " into place: " +
                                 ec.message());
    }
}

}  // namespace rf::io
