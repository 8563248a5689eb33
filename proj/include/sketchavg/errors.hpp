#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sketchavg {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

// Factorization found fewer independent columns than requested.
class RankDeficient : public Error {
public:
    RankDeficient(const std::string& msg, std::size_t detected_rank)
        : Error(msg), detected_rank(detected_rank) {}
    std::size_t detected_rank;
};

class NotPowerOfTwo : public Error {
public:
    using Error::Error;
};

// Bad sketch description (unknown kind, inconsistent sizes, ...).
class InvalidSpec : public Error {
public:
    using Error::Error;
};

// materialize() refused to build an explicit matrix this large.
class TooLarge : public Error {
public:
    using Error::Error;
};

// A worker kept drawing rank-deficient sketches past the retry budget.
class PersistentRankDeficiency : public Error {
public:
    using Error::Error;
};

// Straggler policy can never be satisfied (e.g. min_k > q).
class PolicyUnsatisfiable : public Error {
public:
    using Error::Error;
};

// Closed-form prediction requested outside its regime of validity.
class RegimeViolation : public Error {
public:
    using Error::Error;
};

// Bias bound needs leverage information that was not supplied.
class MissingCoherence : public Error {
public:
    using Error::Error;
};

class InvalidBeta : public Error {
public:
    using Error::Error;
};

class InvalidDelta : public Error {
public:
    using Error::Error;
};

// The n/d >= (3 + 2 beta/eps) B0^2/sigma0^2 requirement fails.
class ConditionUnsatisfied : public Error {
public:
    using Error::Error;
};

// Private sketch size bound came out at or below d+1.
class SketchTooSmall : public Error {
public:
    SketchTooSmall(const std::string& msg, std::size_t bound, std::size_t needed)
        : Error(msg), bound(bound), needed(needed) {}
    std::size_t bound;   // largest admissible m
    std::size_t needed;  // smallest m the estimator theory accepts
};

// File could not be read/written/parsed.
class IoError : public Error {
public:
    using Error::Error;
};

// Experiment configuration file is malformed.
class InvalidConfig : public Error {
public:
    using Error::Error;
};

}  // namespace sketchavg
