#pragma once

#include <stdexcept>
#include <string>

namespace textchar {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// core metrics
class DegenerateCluster : public Error { public: using Error::Error; };
class TooFewSamples : public Error { public: using Error::Error; };
class InvalidCluster : public Error { public: using Error::Error; };

// simulation
class EmptyResult : public Error { public: using Error::Error; };
class InvalidSpec : public Error { public: using Error::Error; };

// ingestion
class ParseError : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class NonFiniteValue : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class EmptySequence : public Error { public: using Error::Error; };
class DuplicateId : public Error { public: using Error::Error; };

// analysis
class InconsistentClassSize : public Error { public: using Error::Error; };
class EmptyClass : public Error { public: using Error::Error; };
class DegenerateInput : public Error { public: using Error::Error; };
class JoinMismatch : public Error { public: using Error::Error; };

}  // namespace textchar
