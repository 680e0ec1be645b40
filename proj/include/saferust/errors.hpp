#pragma once

#include <stdexcept>
#include <string>

namespace saferust {

// Base of every domain error. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SAFERUST_DEFINE_ERROR(Name, Base) \
  class Name : public Base {              \
   public:                                \
    using Base::Base;                     \
  }

SAFERUST_DEFINE_ERROR(PreconditionError, Error);
SAFERUST_DEFINE_ERROR(ConfigError, Error);

// segmenter
SAFERUST_DEFINE_ERROR(UnbalancedSource, Error);
SAFERUST_DEFINE_ERROR(GapDetected, Error);

// knowledge base
SAFERUST_DEFINE_ERROR(InvalidChunkConfig, Error);
SAFERUST_DEFINE_ERROR(DimensionMismatch, Error);
SAFERUST_DEFINE_ERROR(ZeroVector, Error);
SAFERUST_DEFINE_ERROR(EmptyIndex, Error);
SAFERUST_DEFINE_ERROR(IndexFormatError, Error);

// llm client
SAFERUST_DEFINE_ERROR(ProviderError, Error);
SAFERUST_DEFINE_ERROR(RateLimited, ProviderError);
SAFERUST_DEFINE_ERROR(EmptyResponse, ProviderError);
SAFERUST_DEFINE_ERROR(SelfReportParseError, Error);

// verifier
SAFERUST_DEFINE_ERROR(ToolchainMissing, Error);
SAFERUST_DEFINE_ERROR(CompilerCrash, Error);
SAFERUST_DEFINE_ERROR(UnbalancedBraces, Error);

// report
SAFERUST_DEFINE_ERROR(UnsupportedFormat, Error);
SAFERUST_DEFINE_ERROR(MalformedFixture, Error);

#undef SAFERUST_DEFINE_ERROR

}  // namespace saferust
