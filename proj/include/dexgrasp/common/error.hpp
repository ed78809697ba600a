#pragma once

#include <stdexcept>
#include <string>

namespace dexgrasp {

/// Base of every error raised by the library. `stage()` names the module
/// that failed so the pipeline can report where a run stopped.
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

class EncodingError : public Error {
public:
    explicit EncodingError(const std::string& what) : Error("encode", what) {}
};

class RetrievalError : public Error {
public:
    explicit RetrievalError(const std::string& what) : Error("retrieve", what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error("data", what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error("parse", what) {}
};

class ModelError : public Error {
public:
    explicit ModelError(const std::string& what) : Error("model", what) {}
};

class TrainingError : public Error {
public:
    explicit TrainingError(const std::string& what) : Error("train", what) {}
};

class KinematicsError : public Error {
public:
    explicit KinematicsError(const std::string& what) : Error("kinematics", what) {}
};

class FitError : public Error {
public:
    explicit FitError(const std::string& what) : Error("fit", what) {}
};

class PlanError : public Error {
public:
    explicit PlanError(const std::string& what) : Error("plan", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

}  // namespace dexgrasp
