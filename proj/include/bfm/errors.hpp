#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bfm {

// Every failure the library can raise. Geometry and simulation faults abort a
// run; Parse/Validation faults reject a scenario before any integration step.
enum class Fault {
  NearZeroVector,
  AgentCollision,
  NotSymmetric,
  TooFewLeaders,
  TooFewNeighbors,
  ForwardReference,
  DuplicateEdge,
  SelfLoop,
  BadVertex,
  CycleFound,
  ParallelBearings,
  CollinearNeighbors,
  SingularSystem,
  DegenerateScaling,
  ObstacleCoincidence,
  NonFiniteState,
  ProfileExhausted,
  GainBoundViolated,
  ParseError,
  ValidationError,
  IoError,
};

inline const char* fault_name(Fault f) {
  switch (f) {
    case Fault::NearZeroVector: return "NearZeroVector";
    case Fault::AgentCollision: return "AgentCollision";
    case Fault::NotSymmetric: return "NotSymmetric";
    case Fault::TooFewLeaders: return "TooFewLeaders";
    case Fault::TooFewNeighbors: return "TooFewNeighbors";
    case Fault::ForwardReference: return "ForwardReference";
    case Fault::DuplicateEdge: return "DuplicateEdge";
    case Fault::SelfLoop: return "SelfLoop";
    case Fault::BadVertex: return "BadVertex";
    case Fault::CycleFound: return "CycleFound";
    case Fault::ParallelBearings: return "ParallelBearings";
    case Fault::CollinearNeighbors: return "CollinearNeighbors";
    case Fault::SingularSystem: return "SingularSystem";
    case Fault::DegenerateScaling: return "DegenerateScaling";
    case Fault::ObstacleCoincidence: return "ObstacleCoincidence";
    case Fault::NonFiniteState: return "NonFiniteState";
    case Fault::ProfileExhausted: return "ProfileExhausted";
    case Fault::GainBoundViolated: return "GainBoundViolated";
    case Fault::ParseError: return "ParseError";
    case Fault::ValidationError: return "ValidationError";
    case Fault::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Fault fault, const std::string& message)
      : std::runtime_error(std::string(fault_name(fault)) + ": " + message),
        fault_(fault) {}

  Fault fault() const { return fault_; }

 private:
  Fault fault_;
};

// One validation finding; a config is rejected with the full list, not just
// the first problem encountered.
struct Violation {
  Fault fault;
  std::string message;
};

class ValidationFailure : public Error {
 public:
  explicit ValidationFailure(std::vector<Violation> violations)
      : Error(Fault::ValidationError, join(violations)),
        violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<Violation>& vs) {
    std::string out;
    for (const auto& v : vs) {
      if (!out.empty()) out += "; ";
      out += fault_name(v.fault);
      out += ": ";
      out += v.message;
    }
    return out.empty() ? std::string("no violations listed") : out;
  }

  std::vector<Violation> violations_;
};

}  // namespace bfm
