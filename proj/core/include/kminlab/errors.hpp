#pragma once

#include <stdexcept>
#include <string>

namespace kminlab {

// Base for all kminlab error conditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public Error { public: using Error::Error; };
class ResolutionError : public Error { public: using Error::Error; };
class EmptyDomain : public Error { public: using Error::Error; };
class DisconnectedDomain : public Error { public: using Error::Error; };
class WellOutsideClosure : public Error { public: using Error::Error; };
class AmbiguousBoundary : public Error { public: using Error::Error; };
class GridMismatch : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class ZeroField : public Error { public: using Error::Error; };
class IllPosed : public Error { public: using Error::Error; };
class StepUnderflow : public Error { public: using Error::Error; };
class RegimeMismatch : public Error { public: using Error::Error; };
class DegenerateFit : public Error { public: using Error::Error; };
class BracketFailure : public Error { public: using Error::Error; };
class TrialOutsideDomain : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

}  // namespace kminlab
