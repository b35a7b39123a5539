#pragma once
#include <stdexcept>
#include <string>

namespace hillres {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// integrator could not reach the requested tolerance
struct StepFailure : Error { using Error::Error; };
struct RootBracketFailure : Error { using Error::Error; };
struct BranchAmbiguity : Error { using Error::Error; };
struct PoleAtMu : Error { using Error::Error; };
struct DegenerateGap : Error { using Error::Error; };
struct ClassificationAmbiguous : Error { using Error::Error; };
struct ContourThroughZero : Error { using Error::Error; };
struct OnGapEdge : Error { using Error::Error; };
struct NotABoundState : Error { using Error::Error; };
struct NotEdgeCase : Error { using Error::Error; };
struct Inconclusive : Error { using Error::Error; };
struct MeshTooCoarse : Error { using Error::Error; };
struct WindowTouchesBand : Error { using Error::Error; };

struct ConfigError : Error {
    std::string path;
    ConfigError(std::string p, const std::string& what)
        : Error(p + ": " + what), path(std::move(p)) {}
};

}  // namespace hillres
