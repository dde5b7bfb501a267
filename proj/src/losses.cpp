#include "expsel/losses.hpp"

#include <string>

#include "expsel/error.hpp"

namespace expsel {

ExpectileIndex::ExpectileIndex(double tau) : tau_(tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "expectile index must lie in (0, 1), got " + std::to_string(tau));
  }
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DegenerateSplit: return "DegenerateSplit";
    case ErrorKind::TooManySubsets: return "TooManySubsets";
    case ErrorKind::AllSubsetsFailed: return "AllSubsetsFailed";
    case ErrorKind::DegenerateResiduals: return "DegenerateResiduals";
    case ErrorKind::AllReplicationsFailed: return "AllReplicationsFailed";
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace expsel
