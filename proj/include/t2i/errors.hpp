// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace t2i {

/// Broad failure class, used by the CLI to pick an exit code.
enum class ErrorClass {
  Validation,  // bad input, config or contract violation (exit 1)
  Runtime,     // I/O, numerics, transport (exit 2)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }
  int exit_code() const noexcept { return cls_ == ErrorClass::Validation ? 1 : 2; }

 private:
  ErrorClass cls_;
};

#define T2I_DEFINE_ERROR(Name, Cls, prefix)                                   \
  class Name : public Error {                                                 \
   public:                                                                    \
    explicit Name(const std::string& what) : Error(ErrorClass::Cls, prefix + what) {} \
  };

T2I_DEFINE_ERROR(ArgumentError, Validation, std::string("argument error: "))
T2I_DEFINE_ERROR(ParseError, Validation, std::string("parse error: "))
T2I_DEFINE_ERROR(ValidationError, Validation, std::string("validation error: "))
T2I_DEFINE_ERROR(ConfigError, Validation, std::string("configuration error: "))
T2I_DEFINE_ERROR(GeometryError, Validation, std::string("geometry error: "))
T2I_DEFINE_ERROR(CurationError, Validation, std::string("curation error: "))
T2I_DEFINE_ERROR(IoError, Runtime, std::string("I/O error: "))
T2I_DEFINE_ERROR(NumericError, Runtime, std::string("numeric error: "))
T2I_DEFINE_ERROR(TrainingError, Runtime, std::string("training error: "))
T2I_DEFINE_ERROR(SamplingError, Runtime, std::string("sampling error: "))
T2I_DEFINE_ERROR(TransportError, Runtime, std::string("transport error: "))

#undef T2I_DEFINE_ERROR

/// Non-2xx reply from the captioning endpoint.
class EndpointError : public Error {
 public:
  EndpointError(int status, const std::string& message)
      : Error(ErrorClass::Runtime,
              "endpoint error: HTTP " + std::to_string(status) + ": " + message),
        status_(status),
        message_(message) {}
  int status() const noexcept { return status_; }
  const std::string& message() const noexcept { return message_; }

 private:
  int status_;
  std::string message_;
};

}  // namespace t2i
