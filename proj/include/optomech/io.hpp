#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "optomech/delayline.hpp"
#include "optomech/spectral.hpp"

namespace optomech {

namespace schema {
inline constexpr std::string_view budget = "optomech.budget/1";
inline constexpr std::string_view calibration = "optomech.calibration/1";
inline constexpr std::string_view record = "optomech.record/1";
inline constexpr std::string_view fringe_sweep = "optomech.fringe_sweep/1";
}  // namespace schema

// Shortest decimal that round-trips to the same double ("nan", "inf" for
// non-finite values).
std::string format_number(double value);

// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// CSV with a schema line first:
//   # schema: <name>/<version>
//   col_a,col_b,...
//   1.5,2,...
struct CsvTable {
    std::string schema;
    std::vector<std::string> columns;
    Eigen::MatrixXd data;  // rows x columns

    Eigen::Index column(std::string_view name) const;  // throws IoError when absent
};

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text, std::string_view expected_schema, const std::string& source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path, std::string_view expected_schema);

// Two-channel detector record sampled on a uniform clock.
struct TwoChannelRecord {
    Eigen::ArrayXd t_s;
    Eigen::ArrayXd ch1_v;
    Eigen::ArrayXd ch2_v;

    static TwoChannelRecord from_series(const TimeSeries& ch1, const TimeSeries& ch2);
    // Splits into (ch1, ch2); sample rate from the mean spacing of t_s.
    std::pair<TimeSeries, TimeSeries> to_series() const;
};

// Binary layout: 16-byte magic, then (t, ch1, ch2) triples of little-endian
// IEEE-754 float64, interleaved per sample.
inline constexpr char kRecordMagic[17] = "OPTOMECH-2CH-V1\n";

enum class RecordFormat { csv, binary };

void write_record(const std::filesystem::path& path, const TwoChannelRecord& record, RecordFormat format);
std::string encode_record(const TwoChannelRecord& record, RecordFormat format);
// Format detected from the magic; CSV otherwise.
TwoChannelRecord read_record(const std::filesystem::path& path);

void write_fringe_sweep(const std::filesystem::path& path, const FringeSweep& sweep);
FringeSweep read_fringe_sweep(const std::filesystem::path& path);

}  // namespace optomech
