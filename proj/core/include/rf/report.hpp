#pragma once

#include <string>
#include <vector>

namespace rf {

// One verified relation: machine name, human-readable relation, measured
// residual against its tolerance, and an optional localization of a failure
// (which pair, which index) in detail.
struct CheckEntry {
    std::string name;
    std::string relation;
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckEntry> entries;

    void add(std::string name, std::string relation, double residual,
             double tolerance, std::string detail = {}) {
        CheckEntry e;
        e.name = std::move(name);
        e.relation = std::move(relation);
        e.residual = residual;
        e.tolerance = tolerance;
        e.pass = residual <= tolerance;
        e.detail = std::move(detail);
        entries.push_back(std::move(e));
    }

    void merge(const CheckReport& other) {
        entries.insert(entries.end(), other.entries.begin(), other.entries.end());
    }

    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }

    double max_residual() const {
        double m = 0.0;
        for (const auto& e : entries)
            if (e.residual > m) m = e.residual;
        return m;
    }

    const CheckEntry* find(const std::string& name) const {
        for (const auto& e : entries)
            if (e.name == name) return &e;
        return nullptr;
    }
};

}  // namespace rf
