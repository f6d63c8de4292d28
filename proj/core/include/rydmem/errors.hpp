#pragma once

#include <stdexcept>
#include <string>

namespace rydmem {

/// Invalid or inconsistent configuration. Carries the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A density matrix or field left its physical domain during integration.
class InvariantError : public std::runtime_error {
 public:
  InvariantError(const std::string& message, long step, double time_ns, double z_um = -1.0)
      : std::runtime_error(message), step_(step), time_(time_ns), z_(z_um) {}

  long step() const noexcept { return step_; }
  double time_ns() const noexcept { return time_; }
  /// Negative when the breach is not tied to a medium cell.
  double z_um() const noexcept { return z_; }

 private:
  long step_;
  double time_;
  double z_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rydmem
