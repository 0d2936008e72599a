#pragma once

#include <stdexcept>
#include <string>

namespace isinglab {

// Enumeration or geometry request exceeds a configured cap.
struct CapError : std::runtime_error {
    explicit CapError(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input (config values, spec structs that violate their invariants).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Config file syntax / unknown key, carries position info.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line, int col)
        : std::runtime_error(what + " (line " + std::to_string(line) + ", col " +
                             std::to_string(col) + ")"),
          line(line), col(col) {}
    int line;
    int col;
};

// A constrained ensemble admits no configuration at all.
struct EmptyEnsembleError : std::runtime_error {
    explicit EmptyEnsembleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isinglab
