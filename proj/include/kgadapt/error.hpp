// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kgadapt {

/// Base of every domain error raised by the library. `error_class()` is the
/// stable name the CLI prints (e.g. "ObjectiveDataMismatch").
class Error : public std::runtime_error {
 public:
  Error(std::string error_class, const std::string& message)
      : std::runtime_error(message), error_class_(std::move(error_class)) {}

  const std::string& error_class() const noexcept { return error_class_; }

  /// One-line remediation shown by the CLI under the error message.
  virtual std::string hint() const { return {}; }

 private:
  std::string error_class_;
};

class IngestError : public Error {
 public:
  enum class Kind { Transport, Parse, Io, Encoding };

  IngestError(Kind kind, const std::string& message)
      : Error(kind_name(kind), message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }
  std::string hint() const override;

  static std::string kind_name(Kind kind);

 private:
  Kind kind_;
};

/// Thrown for a structurally invalid ConceptNet edge record. Expected
/// filtering (unknown relation, empty label) is reported as a Skip instead.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error("ParseError", message) {}
};

class PipelineError : public Error {
 public:
  enum class Kind { EmptyCorpus, NoTargets, InvalidConfig, Format };

  PipelineError(Kind kind, const std::string& message)
      : Error(kind_name(kind), message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }
  std::string hint() const override;

  static std::string kind_name(Kind kind);

 private:
  Kind kind_;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message) : Error("ShapeError", message) {}
};

class NoSupervisedPositions : public Error {
 public:
  NoSupervisedPositions()
      : Error("NoSupervisedPositions",
              "cross_entropy: every label is IGNORE, nothing to average") {}
};

class ModelError : public Error {
 public:
  enum class Kind { FusionArity, SeqLen, ConfigMismatch, FormatError };

  ModelError(Kind kind, const std::string& message)
      : Error(kind_name(kind), message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }
  std::string hint() const override;

  static std::string kind_name(Kind kind);

 private:
  Kind kind_;
};

class TrainError : public Error {
 public:
  enum class Kind { ObjectiveDataMismatch, LabelSpace, InvalidConfig, FreezeViolation };

  TrainError(Kind kind, const std::string& message)
      : Error(kind_name(kind), message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }
  std::string hint() const override;

  static std::string kind_name(Kind kind);

 private:
  Kind kind_;
};

class EvalError : public Error {
 public:
  enum class Kind { Alignment, TagAlphabet, Format, ConfigMismatch };

  EvalError(Kind kind, const std::string& message)
      : Error(kind_name(kind), message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }
  std::string hint() const override;

  static std::string kind_name(Kind kind);

 private:
  Kind kind_;
};

}  // namespace kgadapt
