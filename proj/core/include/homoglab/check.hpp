#pragma once

// Desk-scale invariant suites behind `homoglab check`.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "homoglab/torus_spectral.hpp"

namespace homoglab::check {

enum class Suite { cell, fibre, evolution, norms, all };

Suite parse_suite(const std::string& name);
const char* to_string(Suite suite);

struct Entry {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Options {
    /// Replaces the default 2 + sin(2 pi y) in the cell suite.
    std::optional<torus::CoefficientCell> coefficient;
    unsigned long long seed = 20240601;
};

/// Runs the suites and reports one Entry per invariant; exceptions inside an
/// invariant are recorded as failures carrying the error message.
std::vector<Entry> run(Suite suite, const Options& options = {});

/// One status line per entry; returns true when everything passed.
bool print(const std::vector<Entry>& entries, std::ostream& out);

} // namespace homoglab::check
