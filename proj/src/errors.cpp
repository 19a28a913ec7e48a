#include "vnlab/errors.hpp"

namespace vnlab {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NotNormal: return "NotNormal";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::SpectrumHit: return "SpectrumHit";
        case ErrorKind::BadWeights: return "BadWeights";
        case ErrorKind::BadPermutation: return "BadPermutation";
        case ErrorKind::NotMember: return "NotMember";
        case ErrorKind::BadPartition: return "BadPartition";
        case ErrorKind::ClampExceeded: return "ClampExceeded";
        case ErrorKind::NotAffiliated: return "NotAffiliated";
        case ErrorKind::BadControl: return "BadControl";
        case ErrorKind::QuadratureDiverged: return "QuadratureDiverged";
        case ErrorKind::BadCutoff: return "BadCutoff";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace vnlab
