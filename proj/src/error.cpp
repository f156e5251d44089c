#include "cremona/error.hpp"

namespace cremona {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPrimeCharacteristic: return "NonPrimeCharacteristic";
        case ErrorCode::UnsupportedSize: return "UnsupportedSize";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::MixedFields: return "MixedFields";
        case ErrorCode::NotASubfield: return "NotASubfield";
        case ErrorCode::EvenCharacteristic: return "EvenCharacteristic";
        case ErrorCode::OddCharacteristic: return "OddCharacteristic";
        case ErrorCode::NotANonSquare: return "NotANonSquare";
        case ErrorCode::TableTooLarge: return "TableTooLarge";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::NotABijection: return "NotABijection";
        case ErrorCode::InvalidTransition: return "InvalidTransition";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidParameters: return "InvalidParameters";
        case ErrorCode::NoDegenerateRationalFiber: return "NoDegenerateRationalFiber";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NotTwoPowerOrder: return "NotTwoPowerOrder";
        case ErrorCode::ZeroBranchPolynomial: return "ZeroBranchPolynomial";
        case ErrorCode::SingularSurface: return "SingularSurface";
        case ErrorCode::InvolutionDoesNotPreserveSurface: return "InvolutionDoesNotPreserveSurface";
        case ErrorCode::CollinearOrbit: return "CollinearOrbit";
        case ErrorCode::NotDegreeThree: return "NotDegreeThree";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

}  // namespace cremona
