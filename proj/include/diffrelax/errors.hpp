#ifndef DIFFRELAX_ERRORS_HPP
#define DIFFRELAX_ERRORS_HPP

// ===========================================================================
//  errors.hpp -- exception types shared by all diffrelax modules.
//
//  Every failure mode of the library maps to one of these types so callers
//  can distinguish "bad input" from "numerical breakdown" without parsing
//  message strings.
// ===========================================================================

#include <stdexcept>
#include <string>

namespace diffrelax {

/// Base class for all diffrelax exceptions.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested scheme name is not a builtin.
class UnknownScheme : public Error {
public:
    explicit UnknownScheme(const std::string& msg) : Error(msg) {}
};

/// Tableau implicit matrix is neither invertible nor of the
/// zero-first-row (CK) form.
class DegenerateTableau : public Error {
public:
    explicit DegenerateTableau(const std::string& msg) : Error(msg) {}
};

/// Operation requires a stiffly accurate implicit part (b^T = e_s^T A).
class NotStifflyAccurate : public Error {
public:
    explicit NotStifflyAccurate(const std::string& msg) : Error(msg) {}
};

/// A small dense matrix turned out singular during a tableau computation.
class SingularMatrix : public Error {
public:
    explicit SingularMatrix(const std::string& msg) : Error(msg) {}
};

/// A banded stage/system solve hit a zero (or effectively zero) pivot.
class SingularBandedMatrix : public Error {
public:
    explicit SingularBandedMatrix(const std::string& msg) : Error(msg) {}
};

/// Newton iteration for a nonlinear implicit stage failed to converge.
class NewtonDivergence : public Error {
public:
    explicit NewtonDivergence(const std::string& msg) : Error(msg) {}
};

/// Time-stepping produced non-finite values or a divergent state norm.
class NonFiniteState : public Error {
public:
    explicit NonFiniteState(const std::string& msg) : Error(msg) {}
};

/// Grid has fewer cells than the requested stencil needs.
class GridTooSmall : public Error {
public:
    explicit GridTooSmall(const std::string& msg) : Error(msg) {}
};

/// A uniform-spacing stencil was asked to straddle a segment break.
class NonUniformStencil : public Error {
public:
    explicit NonUniformStencil(const std::string& msg) : Error(msg) {}
};

/// A mode-parameter denominator vanished.
class ZeroDenominator : public Error {
public:
    explicit ZeroDenominator(const std::string& msg) : Error(msg) {}
};

/// Array lengths disagree.
class ShapeMismatch : public Error {
public:
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

/// Bad or missing configuration key.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace diffrelax

#endif // DIFFRELAX_ERRORS_HPP
