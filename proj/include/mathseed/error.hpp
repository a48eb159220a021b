#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mathseed {

enum class ErrorKind {
  // latex
  InvalidUtf8,
  UnknownCommand,
  UnsupportedSymbol,
  UnbalancedGroup,
  DanglingScript,
  DoubleScript,
  MissingArgument,
  EmptyGroup,
  EmptyMath,
  UnterminatedMath,
  NestedMath,
  StrayDelimiter,
  // layout / raster
  MissingGlyph,
  BoxTooWide,
  ContentOverflow,
  InvalidConfig,
  PngDecode,
  // prompt
  MissingSuffix,
  UnexpectedSuffix,
  EmptyQuestion,
  // dataset
  InvalidRecord,
  DuplicateId,
  SourceExhausted,
  Io,
  // fusion
  DimensionMismatch,
  RowMismatch,
  ShapeMismatch,
  NonFiniteLoss,
  StepOutOfRange,
  InvalidWeights,
  // eval
  MissingReference,
  TooFewRuns,
};

std::string_view to_string(ErrorKind kind);

// Every failure in the library surfaces as this exception. Parse errors carry
// the byte offset into the source they were produced from; document-level
// math errors also carry the index of the segment that failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::optional<std::size_t> offset = std::nullopt,
        std::optional<std::size_t> segment = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }
  std::optional<std::size_t> segment() const noexcept { return segment_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> offset_;
  std::optional<std::size_t> segment_;
  std::string detail_;
};

}  // namespace mathseed
