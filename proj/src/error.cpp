// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/error.hpp"

namespace kgadapt {

std::string IngestError::kind_name(Kind kind) {
  switch (kind) {
    case Kind::Transport: return "IngestError::Transport";
    case Kind::Parse: return "IngestError::Parse";
    case Kind::Io: return "IngestError::Io";
    case Kind::Encoding: return "IngestError::Encoding";
  }
  return "IngestError";
}

std::string IngestError::hint() const {
  switch (kind_) {
    case Kind::Transport: return "check network access or pass --fixture <dir> to read recorded pages";
    case Kind::Parse: return "the page is not valid ConceptNet JSON; re-record the fixture";
    case Kind::Io: return "check that the output directory exists and is writable";
    case Kind::Encoding: return "re-encode the input file as UTF-8";
  }
  return {};
}

std::string PipelineError::kind_name(Kind kind) {
  switch (kind) {
    case Kind::EmptyCorpus: return "EmptyCorpus";
    case Kind::NoTargets: return "NoTargets";
    case Kind::InvalidConfig: return "InvalidMaskingConfig";
    case Kind::Format: return "PipelineError::Format";
  }
  return "PipelineError";
}

std::string PipelineError::hint() const {
  switch (kind_) {
    case Kind::EmptyCorpus: return "supply at least one nonempty sentence";
    case Kind::NoTargets: return "targeted masking needs span-annotated (verbalized triple) sentences";
    case Kind::InvalidConfig: return "replacement fractions must sum to 1 and probabilities lie in (0,1)";
    case Kind::Format: return "the vocabulary file must be a JSON array of tokens in id order";
  }
  return {};
}

std::string ModelError::kind_name(Kind kind) {
  switch (kind) {
    case Kind::FusionArity: return "FusionArity";
    case Kind::SeqLen: return "SeqLen";
    case Kind::ConfigMismatch: return "ConfigMismatch";
    case Kind::FormatError: return "FormatError";
  }
  return "ModelError";
}

std::string ModelError::hint() const {
  switch (kind_) {
    case Kind::FusionArity: return "fusion needs at least two language adapters";
    case Kind::SeqLen: return "truncate the input or raise max_seq_len";
    case Kind::ConfigMismatch: return "load checkpoints trained against the same encoder config";
    case Kind::FormatError: return "the checkpoint file is truncated or was not written by kgadapt";
  }
  return {};
}

std::string TrainError::kind_name(Kind kind) {
  switch (kind) {
    case Kind::ObjectiveDataMismatch: return "ObjectiveDataMismatch";
    case Kind::LabelSpace: return "LabelSpace";
    case Kind::InvalidConfig: return "InvalidTrainConfig";
    case Kind::FreezeViolation: return "FreezeViolation";
  }
  return "TrainError";
}

std::string TrainError::hint() const {
  switch (kind_) {
    case Kind::ObjectiveDataMismatch: return "use --objective mlm|flm for plain text, or a verbalized ConceptNet corpus for tlm";
    case Kind::LabelSpace: return "the head's output size must equal the dataset's label count";
    case Kind::InvalidConfig: return "lr, batch size and step budget must be positive";
    case Kind::FreezeViolation: return "a frozen component changed during training; this is a bug";
  }
  return {};
}

std::string EvalError::kind_name(Kind kind) {
  switch (kind) {
    case Kind::Alignment: return "EvalError::Alignment";
    case Kind::TagAlphabet: return "EvalError::TagAlphabet";
    case Kind::Format: return "EvalError::Format";
    case Kind::ConfigMismatch: return "ConfigMismatch";
  }
  return "EvalError";
}

std::string EvalError::hint() const {
  switch (kind_) {
    case Kind::Alignment: return "predictions and gold labels must have equal lengths";
    case Kind::TagAlphabet: return "tags must be O, B-<TYPE> or I-<TYPE>";
    case Kind::Format: return "SA data is JSONL {\"text\",\"label\"}; NER data is token<TAB>tag lines";
    case Kind::ConfigMismatch: return "evaluate with the dataset the head was trained on";
  }
  return {};
}

}  // namespace kgadapt
