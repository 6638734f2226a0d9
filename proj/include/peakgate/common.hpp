#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace peakgate {

using State = std::vector<double>;

/// Absolute tolerance used by strict comparisons (set membership,
/// domination checks). Overridable per call.
inline constexpr double kDefaultTol = 1e-12;

/// A sequence term or orbit coordinate evaluated to a non-finite value.
class NonFiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The certificate pair failed to dominate the sequence it was paired with.
class DominationViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The solve loop hit its iteration guard before the pair proved useful.
class GuardExceeded : public std::runtime_error {
public:
    GuardExceeded(const std::string& what, std::size_t guard)
        : std::runtime_error(what), guard_(guard) {}
    std::size_t guard() const { return guard_; }

private:
    std::size_t guard_;
};

/// A certificate ingredient violates its construction hypothesis
/// (beta outside (0,1), inverse out of validated range, ...).
class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace peakgate
