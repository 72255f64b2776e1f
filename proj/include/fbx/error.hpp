#pragma once

#include <stdexcept>

namespace fbx {

/// Thrown when an argument lies outside the mathematical domain of an
/// operation (non-positive power, probability outside (0,1), a quantile
/// argument that leaves (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace fbx
