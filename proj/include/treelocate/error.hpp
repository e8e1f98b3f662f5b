#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace treelocate {

enum class ErrorKind {
    // tree construction and queries
    Disconnected,
    CycleDetected,
    SelfLoop,
    DuplicateEdge,
    NodeOutOfRange,
    NTooSmall,
    // delay models and special functions
    InvalidParameter,
    NegativeArgument,
    NonpositiveArgument,
    EmptyRates,
    // simulation and observation
    EmptyObservers,
    ObserversCoverAllNodes,
    IncompleteObservation,
    // reduction
    TiedMinimum,
    NotAStar,
    // transforms
    CandidateIsObserver,
    UnsupportedDelayModel,
    DegenerateTime,
    DimensionMismatch,
    NoSamples,
    // estimation
    EmptyCandidates,
    // harness
    ConfigInvalid,
    NotEnoughLeaves,
    FileNotFound,
    MalformedNetworkFile,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can dispatch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace treelocate
