#pragma once

#include <stdexcept>
#include <string>

namespace splitlab {

// Base class for everything this library throws on contract violations.
class SplitlabError : public std::runtime_error {
  public:
    explicit SplitlabError(const std::string& msg) : std::runtime_error(msg) {}
};

class NonStochasticError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

class NotDoeblinError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

class NotStationaryError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

class IndexOverflowError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

class UnsortedIndicesError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

class UnsupportedModelError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

class NotTwoLinearError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

class TooLargeError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

class DegenerateSigmaError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

class NotDegenerateError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

class InvalidObservableError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

class ConfigError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

class IoError : public SplitlabError {
  public:
    using SplitlabError::SplitlabError;
};

} // namespace splitlab
