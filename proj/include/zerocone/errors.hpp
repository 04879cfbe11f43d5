#pragma once

#include <stdexcept>
#include <string>

namespace zerocone {

// Bad arguments or violated preconditions detectable from the inputs alone.
class InvalidInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A matrix failed a rank requirement (rank-deficient means, non-surjective
// cumulative weights, no invertible block, ...).
class RankError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A cumulative chain does not correspond to any layerwise network.
class InconsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A constructor could not complete (retries exhausted, infeasible cone, ...).
class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A generator could not produce a dataset satisfying its own contract.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or schema-violating JSON input.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace zerocone
