#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oocheck {

// Stable error codes surfaced across the library, the CLI and the service.
enum class Errc {
  ProviderUnavailable,
  MalformedResponse,
  ImageUnreadable,
  StoreIO,
  DimensionMismatch,
  ZeroVector,
  EmptyText,
  UnscoredCandidate,
  EmptyAllowlist,
  ParseFailure,
  SchemaViolation,
  ConfidenceOutOfRange,
  UnknownLabel,
  DatasetMalformed,
  DuplicateId,
  MissingPrediction,
  ConfigInvalid,
  ReportIO,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

private:
  Errc code_;
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::ProviderUnavailable: return "EProviderUnavailable";
    case Errc::MalformedResponse: return "EMalformedResponse";
    case Errc::ImageUnreadable: return "EImageUnreadable";
    case Errc::StoreIO: return "EStoreIO";
    case Errc::DimensionMismatch: return "EDimensionMismatch";
    case Errc::ZeroVector: return "EZeroVector";
    case Errc::EmptyText: return "EEmptyText";
    case Errc::UnscoredCandidate: return "EUnscoredCandidate";
    case Errc::EmptyAllowlist: return "EEmptyAllowlist";
    case Errc::ParseFailure: return "EParseFailure";
    case Errc::SchemaViolation: return "ESchemaViolation";
    case Errc::ConfidenceOutOfRange: return "EConfidenceOutOfRange";
    case Errc::UnknownLabel: return "EUnknownLabel";
    case Errc::DatasetMalformed: return "EDatasetMalformed";
    case Errc::DuplicateId: return "EDuplicateId";
    case Errc::MissingPrediction: return "EMissingPrediction";
    case Errc::ConfigInvalid: return "EConfigInvalid";
    case Errc::ReportIO: return "EReportIO";
  }
  return "EUnknown";
}

}  // namespace oocheck
