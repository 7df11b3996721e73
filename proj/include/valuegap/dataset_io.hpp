#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "valuegap/dataset.hpp"
#include "valuegap/errors.hpp"

namespace valuegap {

// Transition files are CSV. The first line declares the state kind:
//
//   real-vector,<d>
//   tabular-index,<d>,<N_1>,…,<N_d>
//
// and every following line is one triple: d state entries, the reward, then d
// next-state entries.
struct LoadedDataset {
  TransitionDataset data;
  std::vector<int> sizes;  // tabular only
};

class DatasetParseError : public ValidationError {
 public:
  DatasetParseError(long line, const std::string& message)
      : ValidationError("line " + std::to_string(line) + ": " + message), line_(line) {}

  long line() const { return line_; }

 private:
  long line_;
};

LoadedDataset read_dataset_csv(std::istream& in);
LoadedDataset read_dataset_csv(const std::filesystem::path& path);

void write_dataset_csv(std::ostream& out, const TransitionDataset& data,
                       const std::vector<int>& sizes = {});
void write_dataset_csv(const std::filesystem::path& path, const TransitionDataset& data,
                       const std::vector<int>& sizes = {});

}  // namespace valuegap
