#pragma once

#include <stdexcept>
#include <string>

namespace dcm {

/// Malformed or semantically invalid input document (model spec, stance,
/// catalog, survey, config). Carries a human-readable location when known.
class SpecError : public std::runtime_error {
  public:
    explicit SpecError(const std::string& msg) : std::runtime_error(msg) {}
    SpecError(const std::string& file, const std::string& msg)
        : std::runtime_error(file + ": " + msg) {}
};

/// Operation called with arguments that violate its preconditions
/// (uncompiled tree, unknown id, out-of-range value, boundary input).
class InvalidArgument : public std::runtime_error {
  public:
    explicit InvalidArgument(const std::string& msg)
        : std::runtime_error(msg) {}
};

/// Problem size guard tripped (e.g. brute-force enumeration over too many
/// latent nodes).
class SizeError : public std::runtime_error {
  public:
    explicit SizeError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace dcm
