#include "phishpond/error.hpp"

namespace phishpond {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MalformedHost: return "MalformedHost";
    case Errc::UnsupportedForm: return "UnsupportedForm";
    case Errc::SingleLabelHost: return "SingleLabelHost";
    case Errc::InvalidData: return "InvalidData";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InsufficientCorpus: return "InsufficientCorpus";
    case Errc::SessionFinished: return "SessionFinished";
    case Errc::BadAction: return "BadAction";
    case Errc::OutOfRangeItem: return "OutOfRangeItem";
    case Errc::EmptyGroup: return "EmptyGroup";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::ZeroTotalVariance: return "ZeroTotalVariance";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::ConstantInput: return "ConstantInput";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::Underdetermined: return "Underdetermined";
    case Errc::RowMismatch: return "RowMismatch";
    case Errc::SingularCorrelation: return "SingularCorrelation";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyCondition: return "EmptyCondition";
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::CorruptLog: return "CorruptLog";
    case Errc::IoError: return "IoError";
    case Errc::OutOfOrder: return "OutOfOrder";
    case Errc::NotFound: return "NotFound";
  }
  return "Unknown";
}

namespace {

std::string format_message(Errc code, const std::string& message, std::size_t line) {
  std::string out(to_string(code));
  if (line != 0) out += " (line " + std::to_string(line) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(Errc code, const std::string& message, std::size_t line)
    : std::runtime_error(format_message(code, message, line)), code_(code), line_(line) {}

}  // namespace phishpond
