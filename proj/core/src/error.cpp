#include "dppls/error.hpp"

namespace dppls {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::EmptyDesign: return "empty-design";
    case ErrorKind::UnsupportedOrder: return "unsupported-order";
    case ErrorKind::NotADensity: return "not-a-density";
    case ErrorKind::NegativeDensity: return "negative-density";
    case ErrorKind::DegeneratePoint: return "degenerate-point";
    case ErrorKind::SamplerFailure: return "sampler-failure";
    case ErrorKind::UnderdeterminedDesign: return "underdetermined-design";
    case ErrorKind::ConditioningFailure: return "conditioning-failure";
    case ErrorKind::SingularDesign: return "singular-design";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::EmptyAggregate: return "empty-aggregate";
  }
  return "unknown";
}

bool Error::is_validation() const noexcept {
  switch (kind_) {
    case ErrorKind::Validation:
    case ErrorKind::EmptyDesign:
    case ErrorKind::UnsupportedOrder:
    case ErrorKind::UnderdeterminedDesign:
    case ErrorKind::Domain:
    case ErrorKind::EmptyAggregate:
      return true;
    default:
      return false;
  }
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace dppls
