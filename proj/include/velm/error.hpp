#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace velm {

enum class ErrorCode {
  InvalidArgument,
  // sequence-core
  PositionOutOfRange,
  WildtypeMismatch,
  GeneMismatch,
  EmptyMaskSet,
  EmptyVariant,
  DuplicatePosition,
  UnscorablePosition,
  EmptySequence,
  // variant-parser
  InvalidResidue,
  MalformedHeader,
  DuplicateGeneId,
  UnrecognizedNotation,
  UnknownResidueName,
  SynonymousVariant,
  StopGainNotation,
  FrameshiftNotation,
  IndelNotation,
  // ingest
  MissingColumn,
  UnknownGene,
  // likelihood-backend
  SequenceTooLong,
  BackendUnavailable,
  ProtocolError,
  NonNormalizedReply,
  Timeout,
  EmptyCorpus,
  RaggedCorpus,
  NonPositivePseudocount,
  MalformedProfile,
  // eval-harness
  DegenerateClasses,
  NoQualifyingGenes,
  // io
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PositionOutOfRange: return "PositionOutOfRange";
    case ErrorCode::WildtypeMismatch: return "WildtypeMismatch";
    case ErrorCode::GeneMismatch: return "GeneMismatch";
    case ErrorCode::EmptyMaskSet: return "EmptyMaskSet";
    case ErrorCode::EmptyVariant: return "EmptyVariant";
    case ErrorCode::DuplicatePosition: return "DuplicatePosition";
    case ErrorCode::UnscorablePosition: return "UnscorablePosition";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::InvalidResidue: return "InvalidResidue";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::DuplicateGeneId: return "DuplicateGeneId";
    case ErrorCode::UnrecognizedNotation: return "UnrecognizedNotation";
    case ErrorCode::UnknownResidueName: return "UnknownResidueName";
    case ErrorCode::SynonymousVariant: return "SynonymousVariant";
    case ErrorCode::StopGainNotation: return "StopGainNotation";
    case ErrorCode::FrameshiftNotation: return "FrameshiftNotation";
    case ErrorCode::IndelNotation: return "IndelNotation";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnknownGene: return "UnknownGene";
    case ErrorCode::SequenceTooLong: return "SequenceTooLong";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::NonNormalizedReply: return "NonNormalizedReply";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::RaggedCorpus: return "RaggedCorpus";
    case ErrorCode::NonPositivePseudocount: return "NonPositivePseudocount";
    case ErrorCode::MalformedProfile: return "MalformedProfile";
    case ErrorCode::DegenerateClasses: return "DegenerateClasses";
    case ErrorCode::NoQualifyingGenes: return "NoQualifyingGenes";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// True for failures that originate in a likelihood backend rather than in
/// the caller's input.
inline bool is_backend_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::BackendUnavailable:
    case ErrorCode::ProtocolError:
    case ErrorCode::NonNormalizedReply:
    case ErrorCode::Timeout:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace velm
