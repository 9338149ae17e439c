#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace flowcurl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A distribution or operator parameter lies outside its legal range.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Vector/matrix dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise unusable input data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed descriptor, config file, or binary artifact.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Adam refused a step; parameters and moments are untouched.
class OptimizerError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class SolverDivergence : public Error {
 public:
  SolverDivergence(std::size_t step, std::size_t row)
      : Error("euler solver diverged at step " + std::to_string(step) + ", row " +
              std::to_string(row)),
        step_(step),
        row_(row) {}
  std::size_t step() const noexcept { return step_; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t step_;
  std::size_t row_;
};

/// Training produced a non-finite loss or gradient.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(std::uint64_t step, std::size_t t_bin, double param_norm, const std::string& why)
      : Error("training diverged at step " + std::to_string(step) + " (t-bin " +
              std::to_string(t_bin) + ", |theta| = " + std::to_string(param_norm) + "): " + why),
        step_(step),
        t_bin_(t_bin),
        param_norm_(param_norm) {}
  std::uint64_t step() const noexcept { return step_; }
  std::size_t t_bin() const noexcept { return t_bin_; }
  double param_norm() const noexcept { return param_norm_; }

 private:
  std::uint64_t step_;
  std::size_t t_bin_;
  double param_norm_;
};

}  // namespace flowcurl
