// Error types shared by the scenario parser, the simulator, and the CLI.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace popaware {

// Malformed scenario text.  Carries the position so the CLI can print
// path:line diagnostics.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::string path, std::size_t line, const std::string& message)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + message),
          path_(std::move(path)),
          line_(line) {}

    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }

  private:
    std::string path_;
    std::size_t line_;
};

// Well-formed input that violates a semantic constraint (unknown node,
// zero-rate flow, out-of-range knob, ...).
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& message)
        : std::runtime_error(message) {}
};

}  // namespace popaware
