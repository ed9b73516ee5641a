/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_ERRORS_HPP
#define DETLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace detlab {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A pivot fell below the singularity threshold during elimination,
/// or a normal-equations matrix lost rank (degenerate channel draw).
struct SingularMatrix : Error {
    using Error::Error;
};

/// Input matrix failed the Hermitian symmetry check.
struct NonHermitian : Error {
    using Error::Error;
};

/// Exhaustive detection would have to enumerate more candidates than
/// the configured bit budget allows.
struct SearchSpaceTooLarge : Error {
    using Error::Error;
};

/// Bit/symbol sequence length incompatible with the requested mapping.
struct LengthMismatch : Error {
    using Error::Error;
};

/// Channel impulse response longer than cyclic prefix + 1.
struct CpTooShort : Error {
    using Error::Error;
};

/// Adaptive weights grew past the sanity bound; numerical breakdown.
struct DivergedState : Error {
    using Error::Error;
};

/// Illegal simulation configuration (detector/antenna combination etc).
struct ConfigError : Error {
    using Error::Error;
};

/// Config text could not be parsed (syntax error, unknown key).
struct ParseError : Error {
    using Error::Error;
};

/// Config parsed but a value violates a constraint.
struct ValidationError : Error {
    using Error::Error;
};

/// A BER target is not bracketed by the points of a sweep curve.
struct TargetNotBracketed : Error {
    using Error::Error;
};

/// File system failure, reported with the offending path.
struct IoError : Error {
    using Error::Error;
};

} // namespace detlab

#endif // DETLAB_ERRORS_HPP
