#pragma once

#include <stdexcept>
#include <string>

namespace ctcws {

enum class ErrorCode {
  kDuplicateToken,
  kEmptyInput,
  kMagicMismatch,
  kTruncated,
  kInvalidValue,
  kNotNormalized,
  kUnsegmentable,
  kDuplicateTranscription,
  kDimensionMismatch,
  kOverlappingWords,
  kVocabularyMismatch,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

// All data and contract failures in the library surface as this exception.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ctcws
