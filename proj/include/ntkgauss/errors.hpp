#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ntkgauss {

/// Base of the library's error taxonomy. Every failure carries a stable
/// machine-readable code so the CLI can emit structured error records.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

struct InvalidMatrix : Error {
  explicit InvalidMatrix(const std::string& m) : Error("InvalidMatrix", m) {}
};

struct InvalidTime : Error {
  explicit InvalidTime(const std::string& m) : Error("InvalidTime", m) {}
};

struct NotPSD : Error {
  explicit NotPSD(const std::string& m) : Error("NotPSD", m) {}
};

struct InvalidShape : Error {
  explicit InvalidShape(const std::string& m) : Error("InvalidShape", m) {}
};

struct DivergedTraining : Error {
  DivergedTraining(const std::string& m, long step)
      : Error("DivergedTraining", m), step(step) {}
  long step;
};

struct DivergedFlow : Error {
  explicit DivergedFlow(const std::string& m) : Error("DivergedFlow", m) {}
};

struct InvalidCovariance : Error {
  explicit InvalidCovariance(const std::string& m)
      : Error("InvalidCovariance", m) {}
};

struct KernelDegenerate : Error {
  KernelDegenerate(const std::string& m, double min_eig)
      : Error("KernelDegenerate", m), min_eig(min_eig) {}
  double min_eig;
};

struct UnequalSupport : Error {
  explicit UnequalSupport(const std::string& m) : Error("UnequalSupport", m) {}
};

struct EmptyDist : Error {
  explicit EmptyDist(const std::string& m) : Error("EmptyDist", m) {}
};

struct TooLarge : Error {
  explicit TooLarge(const std::string& m) : Error("TooLarge", m) {}
};

struct InvalidR : Error {
  explicit InvalidR(const std::string& m) : Error("InvalidR", m) {}
};

struct NormAuditFailed : Error {
  NormAuditFailed(const std::string& m, std::string constant)
      : Error("NormAuditFailed", m), constant(std::move(constant)) {}
  std::string constant;
};

struct InvalidFitInput : Error {
  explicit InvalidFitInput(const std::string& m) : Error("InvalidFitInput", m) {}
};

struct TooFewPoints : Error {
  explicit TooFewPoints(const std::string& m) : Error("TooFewPoints", m) {}
};

struct UndersampledError : Error {
  explicit UndersampledError(const std::string& m)
      : Error("UndersampledError", m) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("ConfigError", m) {}
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& m)
      : Error("InvalidArgument", m) {}
};

}  // namespace ntkgauss
