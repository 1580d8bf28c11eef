// errors.hpp — exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace ffst {

// Eigensolver breakdown, Krylov non-convergence, lost norm, and similar.
struct NumericFailure : std::runtime_error {
    explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

// The two best resonance candidates are too close to single one out.
struct DegenerateResonance : std::runtime_error {
    explicit DegenerateResonance(const std::string& what) : std::runtime_error(what) {}
};

// The chosen mode does not couple to one (or both) chain ends.
struct DarkMode : std::runtime_error {
    explicit DarkMode(const std::string& what) : std::runtime_error(what) {}
};

// An off-resonant mode collides with the resonant one; perturbative sums diverge.
struct ResonanceCollision : std::runtime_error {
    explicit ResonanceCollision(const std::string& what) : std::runtime_error(what) {}
};

// Requested full-Hilbert-space system exceeds the configured site cap.
struct SizeCapExceeded : std::runtime_error {
    explicit SizeCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Config-file syntax or semantics problem; message carries a line number where known.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ffst
