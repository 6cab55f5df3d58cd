#pragma once

#include <stdexcept>
#include <string>

namespace hetrain {

/// Base class for every toolkit error.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid HE parameter set (ct_size != ring_dim/2, slot size mismatch, ...).
class ParamError : public Error {
public:
    using Error::Error;
};

/// Key fingerprint does not match the ciphertext or the peer key.
class KeyMismatchError : public Error {
public:
    using Error::Error;
};

/// Input does not fit the available slots / segment budget.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Operands belong to incompatible parameter sets.
class IncompatibleError : public Error {
public:
    using Error::Error;
};

/// Multiplicative level budget exhausted; a bootstrap is required first.
class LevelExhaustedError : public Error {
public:
    using Error::Error;
};

/// Malformed binary payload (bad magic, version, truncation).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Packed layout inconsistent with the requested operation.
class LayoutError : public Error {
public:
    using Error::Error;
};

/// Text input (CSV, config) could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input violates the declared schema (unknown label, column count, ...).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Stratified sampling cannot be satisfied by the data.
class SamplingError : public Error {
public:
    using Error::Error;
};

/// Dataset cannot be split as requested.
class PartitionError : public Error {
public:
    using Error::Error;
};

/// Master/worker protocol violation.
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// A peer did not respond before the round deadline.
class TimeoutError : public Error {
public:
    using Error::Error;
};

/// Filesystem / socket failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace hetrain
