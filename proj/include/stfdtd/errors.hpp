#pragma once

#include <stdexcept>
#include <string>

namespace stfdtd {

/// Scenario text could not be parsed. Line and column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// A named constraint on a scenario, grid or material map is violated.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A field value became NaN or infinite; the run is unstable.
class NonFiniteField : public std::runtime_error {
public:
    explicit NonFiniteField(long step)
        : std::runtime_error("non-finite field at step " + std::to_string(step)),
          step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

/// Transition bands of two interfaces intersect in some row.
class OverlappingTransitionRegions : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SourceInTransitionRegion : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scattered and incident envelopes cannot be separated at a probe.
class PulseOverlap : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Luminal or grazing parameters make an oracle denominator vanish.
class DegenerateDenominator : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EvanescentTransmission : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The evaluation point lies beyond the Rindler horizon of the accelerated frame.
class HorizonCrossed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace stfdtd
