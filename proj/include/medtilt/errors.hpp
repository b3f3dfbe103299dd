#pragma once

#include <stdexcept>
#include <string>

namespace medtilt {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// numerics
class NonFiniteIntegrand : public Error { public: using Error::Error; };
class BracketInvalid : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };

// measure construction
class MeasureError : public Error { public: using Error::Error; };
class InvalidParameter : public MeasureError { public: using MeasureError::MeasureError; };
class NotNormalizable : public MeasureError { public: using MeasureError::MeasureError; };
class NegativeDensity : public MeasureError { public: using MeasureError::MeasureError; };
class TailViolation : public MeasureError { public: using MeasureError::MeasureError; };
class TableFormatError : public MeasureError { public: using MeasureError::MeasureError; };

// diagnostics / convolution
class UnknownDiagnostic : public Error { public: using Error::Error; };
class WindowTooNarrow : public Error { public: using Error::Error; };

// front end
class ConfigParse : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

} // namespace medtilt
