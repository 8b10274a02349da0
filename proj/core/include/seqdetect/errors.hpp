// Error taxonomy shared by all modules.
//
// - std::invalid_argument   : malformed inputs (bad flags, bad parameters).
// - InfeasibleError         : the mathematical problem has no solution
//                             (empty alternative class, radius too small for
//                             a bandwidth rule, ...).
// - NumericalError          : a solver or estimator failed to converge or
//                             produced a non-finite value.
//
// The CLI maps these to exit codes 1 / 2 / 3 respectively.
#pragma once

#include <stdexcept>
#include <string>

namespace seqdetect {

class InfeasibleError final : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError final : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace seqdetect
