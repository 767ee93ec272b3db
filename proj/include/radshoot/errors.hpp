#pragma once

#include <stdexcept>
#include <string>

namespace radshoot {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- expression language ---------------------------------------------------

struct SyntaxError : Error {
    std::size_t position;  // byte offset into the source text
    SyntaxError(std::size_t pos, const std::string& what)
        : Error("syntax error at position " + std::to_string(pos) + ": " + what),
          position(pos) {}
};

struct UnknownIdentifier : Error {
    std::string name;
    explicit UnknownIdentifier(std::string ident)
        : Error("unknown identifier '" + ident + "'"), name(std::move(ident)) {}
};

// Evaluation left the domain: fractional power of a negative base, division
// by zero, or a state component below the clamp tolerance.
struct DomainError : Error {
    using Error::Error;
};

// --- system construction ----------------------------------------------------

struct UnknownSystem : Error {
    explicit UnknownSystem(const std::string& name)
        : Error("unknown system '" + name + "'") {}
};

struct MissingParam : Error {
    explicit MissingParam(const std::string& name)
        : Error("missing parameter '" + name + "'") {}
};

struct InvalidInput : Error {
    using Error::Error;
};

struct InvalidBoundaryPoint : Error {
    using Error::Error;
};

// --- integration / maps ------------------------------------------------------

struct BlowupError : Error {
    double r_stop;
    explicit BlowupError(double r)
        : Error("solution norm exceeded the blow-up threshold at r = " + std::to_string(r)),
          r_stop(r) {}
};

struct IntegrationError : Error {
    using Error::Error;
};

struct NotAWallHit : Error {
    using Error::Error;
};

// --- degree / search ---------------------------------------------------------

struct GridTooCoarse : Error {
    using Error::Error;
};

struct TargetOnBoundaryImage : Error {
    using Error::Error;
};

struct NoSwitchFound : Error {
    using Error::Error;
};

// --- identities ---------------------------------------------------------------

struct QuadratureFailure : Error {
    double error_estimate;
    QuadratureFailure(double est, const std::string& what)
        : Error(what), error_estimate(est) {}
};

struct NotADirichletSolution : Error {
    using Error::Error;
};

struct UnsupportedSystem : Error {
    using Error::Error;
};

// --- config --------------------------------------------------------------------

struct ParseError : Error {
    int line;
    ParseError(int line_no, const std::string& what)
        : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

struct ValidationError : Error {
    std::string key;  // dotted path, e.g. "system.kind"
    ValidationError(std::string key_path, const std::string& what)
        : Error("config key '" + key_path + "': " + what), key(std::move(key_path)) {}
};

}  // namespace radshoot
