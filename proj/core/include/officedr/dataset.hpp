#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "officedr/replay_buffer.hpp"
#include "officedr/sim_env.hpp"

namespace officedr {

/// One stored transition plus the context needed to recompute its reward.
struct DatasetRecord {
  Transition transition;
  ResponseKind variant = ResponseKind::Linear;
  Hourly demand;  // realized office demand for the step
  double d_hat = 0.0;
  double lambda = 0.0;
};

struct DatasetHeader {
  std::uint32_t version = 1;
  std::uint32_t obs_dim = 0;
  std::uint32_t action_dim = 0;
  std::uint64_t total = 0;
  std::array<std::uint64_t, 4> variant_counts{};  // ResponseKind order
  Hourly grid;                                    // action_dim entries

  std::size_t record_bytes() const;
};

/// Versioned record stream: "ODDS" header followed by fixed-width
/// little-endian records. Counts are patched into the header on close().
class DatasetWriter {
 public:
  DatasetWriter(const std::filesystem::path& path, std::uint32_t obs_dim, std::uint32_t action_dim,
                const Hourly& grid);
  ~DatasetWriter();
  DatasetWriter(const DatasetWriter&) = delete;
  DatasetWriter& operator=(const DatasetWriter&) = delete;

  void write(const DatasetRecord& record);
  void close();
  const DatasetHeader& header() const { return header_; }

 private:
  void write_header();

  std::ofstream out_;
  DatasetHeader header_;
  bool closed_ = false;
};

class DatasetReader {
 public:
  explicit DatasetReader(const std::filesystem::path& path);

  const DatasetHeader& header() const { return header_; }
  /// Returns false after the last record.
  bool next(DatasetRecord& record);

 private:
  std::ifstream in_;
  DatasetHeader header_;
  std::uint64_t read_ = 0;
};

std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path);
DatasetHeader read_dataset_header(const std::filesystem::path& path);

}  // namespace officedr
