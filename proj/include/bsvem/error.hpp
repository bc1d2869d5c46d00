#pragma once

#include "bsvem/types.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsvem {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller-supplied parameters outside an operation's preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DegenerateQuery : public Error {
 public:
  using Error::Error;
};

class ProjectionFailure : public Error {
 public:
  ProjectionFailure(const std::string& what, Point query) : Error(what), query_(std::move(query)) {}
  const Point& query() const { return query_; }

 private:
  Point query_;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class MeshGenerationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : IoError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class FormatError : public IoError {
 public:
  using IoError::IoError;
};

class DegenerateElement : public Error {
 public:
  DegenerateElement(const std::string& what, std::vector<Index> elements)
      : Error(what), elements_(std::move(elements)) {}
  const std::vector<Index>& elements() const { return elements_; }

 private:
  std::vector<Index> elements_;
};

class DegenerateEdge : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class KineticsError : public Error {
 public:
  KineticsError(const std::string& what, Index node) : Error(what), node_(node) {}
  Index node() const { return node_; }

 private:
  Index node_;
};

class InsufficientLevels : public Error {
 public:
  using Error::Error;
};

}  // namespace bsvem
