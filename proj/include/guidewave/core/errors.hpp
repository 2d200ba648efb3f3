#pragma once

#include <stdexcept>
#include <string>

namespace guidewave {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (configuration, tables, geometry).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Dense eigensolver failure on the linearized pencil.
class EigensolverError : public Error {
 public:
  using Error::Error;
};

// A propagating cluster with vanishing energy flux: the wavenumber sits at a cut-off.
class StandingWaveError : public Error {
 public:
  using Error::Error;
};

// The Fourier truncation is too coarse to resolve the requested part of the spectrum.
class SpectralTruncationError : public Error {
 public:
  using Error::Error;
};

// Gram matrix of interface mode traces is not numerically positive definite.
class GramError : public Error {
 public:
  using Error::Error;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

// The assembled system could not be factorized.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

// Two fields or a field and a reference live on different domains.
class DomainMismatchError : public Error {
 public:
  using Error::Error;
};

// The absorbing buffer of the reference solver is too short.
class InsufficientDecayError : public Error {
 public:
  using Error::Error;
};

}  // namespace guidewave
