#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sefm {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or truncated image payload. Carries the byte offset at which
// decoding failed.
class DecodeError : public Error {
public:
    DecodeError(const std::string& msg, std::size_t offset)
        : Error(msg + " (byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Malformed text input. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Input too small / too large for the requested operation.
class SizeError : public Error {
public:
    using Error::Error;
};

// Coordinate outside the valid domain.
class RangeError : public Error {
public:
    using Error::Error;
};

// Wrong number of inputs (too few correspondences, mismatched lengths).
class ArityError : public Error {
public:
    using Error::Error;
};

// Geometrically degenerate configuration (rank-deficient system, point at
// the epipole, zero baseline).
class DegeneracyError : public Error {
public:
    using Error::Error;
};

// RANSAC could not find a model with enough consensus.
class RobustFitError : public Error {
public:
    using Error::Error;
};

// No essential-matrix candidate passed the cheirality test.
class DecompositionError : public Error {
public:
    using Error::Error;
};

// Triangulated point at infinity or otherwise unrecoverable.
class TriangulationError : public Error {
public:
    using Error::Error;
};

// Invalid scene geometry (plane behind camera, texture not covering a view).
class GeometryError : public Error {
public:
    using Error::Error;
};

// Bad configuration key or value.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Pipeline-stage failure. Carries the stage name so diagnostics can say
// where the run stopped.
class PipelineError : public Error {
public:
    PipelineError(const std::string& stage, const std::string& msg)
        : Error("[" + stage + "] " + msg), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace sefm
