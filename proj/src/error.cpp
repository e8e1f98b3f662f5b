#include "treelocate/error.hpp"

namespace treelocate {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::NodeOutOfRange: return "NodeOutOfRange";
    case ErrorKind::NTooSmall: return "NTooSmall";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::NegativeArgument: return "NegativeArgument";
    case ErrorKind::NonpositiveArgument: return "NonpositiveArgument";
    case ErrorKind::EmptyRates: return "EmptyRates";
    case ErrorKind::EmptyObservers: return "EmptyObservers";
    case ErrorKind::ObserversCoverAllNodes: return "ObserversCoverAllNodes";
    case ErrorKind::IncompleteObservation: return "IncompleteObservation";
    case ErrorKind::TiedMinimum: return "TiedMinimum";
    case ErrorKind::NotAStar: return "NotAStar";
    case ErrorKind::CandidateIsObserver: return "CandidateIsObserver";
    case ErrorKind::UnsupportedDelayModel: return "UnsupportedDelayModel";
    case ErrorKind::DegenerateTime: return "DegenerateTime";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoSamples: return "NoSamples";
    case ErrorKind::EmptyCandidates: return "EmptyCandidates";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::NotEnoughLeaves: return "NotEnoughLeaves";
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::MalformedNetworkFile: return "MalformedNetworkFile";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what)
    , kind_(kind)
{
}

} // namespace treelocate
