#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace phishpond {

enum class Errc {
  // url_core
  EmptyInput,
  MalformedHost,
  UnsupportedForm,
  SingleLabelHost,
  // configuration and data files
  InvalidData,
  InvalidConfig,
  // game_engine
  InsufficientCorpus,
  SessionFinished,
  BadAction,
  // psychometrics
  OutOfRangeItem,
  EmptyGroup,
  InsufficientData,
  ZeroTotalVariance,
  IndexOutOfRange,
  // study_stats
  DegenerateVariance,
  ConstantInput,
  RankDeficient,
  Underdetermined,
  RowMismatch,
  SingularCorrelation,
  // study_store
  LengthMismatch,
  EmptyCondition,
  ParseError,
  DuplicateId,
  UnknownSession,
  CorruptLog,
  IoError,
  // service
  OutOfOrder,
  NotFound,
};

std::string_view to_string(Errc code);

// Every failure in the library is reported as an Error carrying one code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::size_t line = 0);

  Errc code() const noexcept { return code_; }
  // 1-based line for ParseError raised while reading a file, 0 otherwise.
  std::size_t line() const noexcept { return line_; }

 private:
  Errc code_;
  std::size_t line_;
};

}  // namespace phishpond
