#pragma once

#include <stdexcept>
#include <string>

namespace bsv {

/// Invalid or inconsistent scenario configuration. The message carries the
/// offending field path (e.g. "segment[1].length_mm").
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical tolerance was violated (harmonic truncation loss, factorization
/// residual, oracle truncation sensitivity, resolution failure, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace bsv
