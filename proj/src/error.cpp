#include "mathseed/error.hpp"

namespace mathseed {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidUtf8: return "InvalidUtf8";
    case ErrorKind::UnknownCommand: return "UnknownCommand";
    case ErrorKind::UnsupportedSymbol: return "UnsupportedSymbol";
    case ErrorKind::UnbalancedGroup: return "UnbalancedGroup";
    case ErrorKind::DanglingScript: return "DanglingScript";
    case ErrorKind::DoubleScript: return "DoubleScript";
    case ErrorKind::MissingArgument: return "MissingArgument";
    case ErrorKind::EmptyGroup: return "EmptyGroup";
    case ErrorKind::EmptyMath: return "EmptyMath";
    case ErrorKind::UnterminatedMath: return "UnterminatedMath";
    case ErrorKind::NestedMath: return "NestedMath";
    case ErrorKind::StrayDelimiter: return "StrayDelimiter";
    case ErrorKind::MissingGlyph: return "MissingGlyph";
    case ErrorKind::BoxTooWide: return "BoxTooWide";
    case ErrorKind::ContentOverflow: return "ContentOverflow";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::PngDecode: return "PngDecode";
    case ErrorKind::MissingSuffix: return "MissingSuffix";
    case ErrorKind::UnexpectedSuffix: return "UnexpectedSuffix";
    case ErrorKind::EmptyQuestion: return "EmptyQuestion";
    case ErrorKind::InvalidRecord: return "InvalidRecord";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::SourceExhausted: return "SourceExhausted";
    case ErrorKind::Io: return "Io";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RowMismatch: return "RowMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::StepOutOfRange: return "StepOutOfRange";
    case ErrorKind::InvalidWeights: return "InvalidWeights";
    case ErrorKind::MissingReference: return "MissingReference";
    case ErrorKind::TooFewRuns: return "TooFewRuns";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& message,
                           std::optional<std::size_t> offset, std::optional<std::size_t> segment) {
  std::string out(to_string(kind));
  if (segment) out += " in segment " + std::to_string(*segment);
  if (offset) out += " at offset " + std::to_string(*offset);
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, std::string message, std::optional<std::size_t> offset,
             std::optional<std::size_t> segment)
    : std::runtime_error(format_message(kind, message, offset, segment)),
      kind_(kind),
      offset_(offset),
      segment_(segment),
      detail_(std::move(message)) {}

}  // namespace mathseed
