#pragma once

#include <stdexcept>
#include <string>

namespace vaidman {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// State vector or density matrix violates its invariants (size, finiteness, normalization).
class StateError : public Error {
  public:
    using Error::Error;
};

/// Measurement basis is malformed (e.g. a Lambda basis without an angle).
class BasisError : public Error {
  public:
    using Error::Error;
};

class QubitIndexError : public Error {
  public:
    using Error::Error;
};

/// Invalid operation parameter (bad n, empty grid, unknown family, ...).
class ParameterError : public Error {
  public:
    using Error::Error;
};

/// Numerical sanity bound violated (e.g. a three-tangle well below zero).
class NumericalError : public Error {
  public:
    using Error::Error;
};

class TransportError : public Error {
  public:
    using Error::Error;
};

class HandshakeError : public TransportError {
  public:
    using TransportError::TransportError;
};

class VersionMismatchError : public HandshakeError {
  public:
    using HandshakeError::HandshakeError;
};

class TimeoutError : public TransportError {
  public:
    using TransportError::TransportError;
};

/// Truncated, oversize, or otherwise unparseable frame.
class FrameError : public TransportError {
  public:
    using TransportError::TransportError;
};

class UnsupportedMessageError : public FrameError {
  public:
    using FrameError::FrameError;
};

/// Peer went away (EOF on a socket, closed in-process queue).
class ConnectionClosed : public TransportError {
  public:
    using TransportError::TransportError;
};

/// A peer sent a well-formed message the protocol state machine did not expect.
class ProtocolError : public TransportError {
  public:
    using TransportError::TransportError;
};

}  // namespace vaidman
