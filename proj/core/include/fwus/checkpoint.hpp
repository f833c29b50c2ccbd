#pragma once

#include <filesystem>
#include <iosfwd>

#include "fwus/lstm.hpp"

namespace fwus {

inline constexpr int kCheckpointVersion = 1;

// Self-describing JSON: format tag, version, dimensions, named parameter
// arrays (row-major), normalization statistics and calibrated margin.
void save_checkpoint(const LstmModel& model, std::ostream& out);
void save_checkpoint(const LstmModel& model, const std::filesystem::path& path);
LstmModel load_checkpoint(std::istream& in);
LstmModel load_checkpoint(const std::filesystem::path& path);

}  // namespace fwus
