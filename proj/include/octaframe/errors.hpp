#pragma once

#include <stdexcept>
#include <string>

namespace octaframe
{

/// Precondition violated by a caller-supplied argument.
class ArgumentError : public std::invalid_argument
{
public:
  explicit ArgumentError(const std::string &what) : std::invalid_argument(what) {}
};

/// Field values too rough (or too far from the manifold) to classify a loop.
class ClassificationError : public std::runtime_error
{
public:
  explicit ClassificationError(const std::string &what) : std::runtime_error(what) {}
};

} // namespace octaframe
