#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace iotscan {

/** \brief Root of every exception thrown by the library. */
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside a function's mathematical domain (e.g. a channel index).
class DomainError : public Error
{
public:
  using Error::Error;
};

/// Malformed call parameters (empty channel list, bad dwell time, ...).
class ParameterError : public Error
{
public:
  using Error::Error;
};

/// Clock regression or other misuse of a simulated environment.
class SimulationError : public Error
{
public:
  using Error::Error;
};

/// Probe requested on a channel whose protocol has no broadcast probe.
class UnsupportedProbe : public Error
{
public:
  using Error::Error;
};

/// Scenario validation failure. The field path names the offending entry.
class ScenarioError : public Error
{
public:
  ScenarioError (std::string fieldPath, const std::string& message)
    : Error (fieldPath.empty () ? message : fieldPath + ": " + message),
      m_fieldPath (std::move (fieldPath))
  {
  }

  const std::string& field_path () const noexcept { return m_fieldPath; }

private:
  std::string m_fieldPath;
};

/**
 * \brief Frame encode/decode failure.
 *
 * The offset is the byte position at which the problem was detected: the end
 * of the input for truncation, the start of the check field for checksum
 * mismatches, the offending header byte for unsupported type codes.
 */
class FrameError : public Error
{
public:
  enum class Kind
  {
    Truncated,
    Checksum,
    Unsupported,
    Encode,
  };

  FrameError (Kind kind, std::size_t offset, const std::string& message)
    : Error (message),
      m_kind (kind),
      m_offset (offset)
  {
  }

  Kind kind () const noexcept { return m_kind; }
  std::size_t offset () const noexcept { return m_offset; }

private:
  Kind m_kind;
  std::size_t m_offset;
};

/// Failure inside the analytic discovery-time model.
class ModelError : public Error
{
public:
  enum class Kind
  {
    DeltaTooCoarse, ///< Pr(two or more arrivals per step) above threshold.
    Degenerate,     ///< A denominator of the order-statistic sum is <= 0.
    Capacity,       ///< Too many devices for exhaustive subset enumeration.
    Unsupported,    ///< No analytic model for the requested algorithm.
  };

  ModelError (Kind kind, const std::string& message)
    : Error (message),
      m_kind (kind)
  {
  }

  Kind kind () const noexcept { return m_kind; }

private:
  Kind m_kind;
};

} // namespace iotscan
