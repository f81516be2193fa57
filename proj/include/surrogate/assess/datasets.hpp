#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>

#include "surrogate/assess/arat.hpp"
#include "surrogate/telemetry/rollup.hpp"

namespace surrogate {

/// Column layouts of the exported tables.
///   S1: one row per participant (scores, self-care, pointing throughput)
///   S2: one row per ARAT item per participant
///   S3: one row per labelled task of an in-home session
enum class Dataset { s1, s2, s3 };

std::string_view to_string(Dataset d);
const std::vector<std::string>& columns(Dataset d);

class SchemaMismatch : public std::runtime_error {
 public:
  SchemaMismatch(std::vector<std::string> missing, std::vector<std::string> unexpected);
  const std::vector<std::string>& missing() const { return missing_; }
  const std::vector<std::string>& unexpected() const { return unexpected_; }

 private:
  std::vector<std::string> missing_, unexpected_;
};

/// Throws SchemaMismatch with the column diff unless `header` has exactly the
/// dataset's columns in order.
void check_columns(Dataset d, const std::vector<std::string>& header);

struct ParticipantRow {
  std::string participant;
  std::optional<int> arat_without;
  std::optional<int> arat_with;
  std::optional<bool> selfcare_success;
  std::optional<double> selfcare_seconds;
  std::optional<double> fitts_throughput;
};

using CsvRow = std::vector<std::string>;

std::vector<CsvRow> s1_rows(const std::vector<ParticipantRow>& participants);
std::vector<CsvRow> s2_rows(const std::string& participant, const AratScoreSheet& sheet);
std::vector<CsvRow> s3_rows(const std::string& session, const Rollup& rollup);

/// RFC 4180 quoting; the header comes first, then the rows.
void write_csv(std::ostream& out, Dataset d, const std::vector<CsvRow>& rows);
void write_csv(const std::filesystem::path& path, Dataset d, const std::vector<CsvRow>& rows);

std::vector<CsvRow> read_csv(std::istream& in);
/// Reads a table and checks its header against the dataset.
std::vector<CsvRow> read_dataset(const std::filesystem::path& path, Dataset d);

}  // namespace surrogate
