#include "optomech/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "optomech/errors.hpp"

namespace optomech {

namespace fs = std::filesystem;

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr std::string_view kSchemaPrefix = "# schema: ";

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view s, const std::string& where) {
    s = trim(s);
    if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError(where + ": not a number: '" + std::string(s) + "'");
    return value;
}

}  // namespace

Eigen::Index CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<Eigen::Index>(i);
    throw IoError("CSV (" + schema + ") has no column '" + std::string(name) + "'");
}

std::string to_csv(const CsvTable& table) {
    if (static_cast<std::size_t>(table.data.cols()) != table.columns.size())
        throw ValidationError("CSV column count does not match data");
    std::string out;
    out.reserve(static_cast<std::size_t>(table.data.size()) * 24 + 128);
    out += kSchemaPrefix;
    out += table.schema;
    out += '\n';
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        if (j) out += ',';
        out += table.columns[j];
    }
    out += '\n';
    for (Eigen::Index i = 0; i < table.data.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.data.cols(); ++j) {
            if (j) out += ',';
            out += format_number(table.data(i, j));
        }
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(std::string_view text, std::string_view expected_schema, const std::string& source) {
    std::vector<std::string_view> lines;
    for (std::string_view line : split(text, '\n')) {
        line = trim(line);
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty() || lines.front().substr(0, kSchemaPrefix.size()) != kSchemaPrefix)
        throw IoError(source + ": missing '# schema: " + std::string(expected_schema) + "' header line");
    CsvTable table;
    table.schema = std::string(trim(lines.front().substr(kSchemaPrefix.size())));
    if (table.schema != expected_schema)
        throw IoError(source + ": schema '" + table.schema + "' does not match expected '" +
                      std::string(expected_schema) + "'");
    if (lines.size() < 2) throw IoError(source + ": missing column header");
    for (std::string_view col : split(lines[1], ',')) table.columns.emplace_back(trim(col));

    const auto rows = static_cast<Eigen::Index>(lines.size() - 2);
    const auto cols = static_cast<Eigen::Index>(table.columns.size());
    table.data.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto fields = split(lines[static_cast<std::size_t>(i + 2)], ',');
        const std::string where = source + " line " + std::to_string(i + 3);
        if (static_cast<Eigen::Index>(fields.size()) != cols)
            throw IoError(where + ": expected " + std::to_string(cols) + " fields, got " +
                          std::to_string(fields.size()));
        for (Eigen::Index j = 0; j < cols; ++j) table.data(i, j) = parse_number(fields[static_cast<std::size_t>(j)], where);
    }
    return table;
}

CsvTable read_csv(const fs::path& path, std::string_view expected_schema) {
    return parse_csv(read_file(path), expected_schema, path.string());
}

// ---------------------------------------------------------------------------
// Two-channel records

TwoChannelRecord TwoChannelRecord::from_series(const TimeSeries& ch1, const TimeSeries& ch2) {
    if (ch1.samples.size() != ch2.samples.size() || ch1.sample_rate_hz != ch2.sample_rate_hz)
        throw ValidationError("record channels differ in length or sample rate");
    if (!(ch1.sample_rate_hz > 0)) throw ValidationError("record sample rate must be > 0");
    const Eigen::Index n = ch1.samples.size();
    TwoChannelRecord rec;
    rec.t_s = Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) / ch1.sample_rate_hz;
    rec.ch1_v = ch1.samples;
    rec.ch2_v = ch2.samples;
    return rec;
}

std::pair<TimeSeries, TimeSeries> TwoChannelRecord::to_series() const {
    const Eigen::Index n = t_s.size();
    if (n < 2 || ch1_v.size() != n || ch2_v.size() != n)
        throw IoError("record needs at least 2 samples with equal channel lengths");
    const double dt = (t_s[n - 1] - t_s[0]) / static_cast<double>(n - 1);
    if (!(dt > 0)) throw IoError("record time stamps must increase");
    const double fs = 1.0 / dt;
    return {TimeSeries{ch1_v, fs, "ch1"}, TimeSeries{ch2_v, fs, "ch2"}};
}

namespace {

void put_le(std::string& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
        out += static_cast<char>(bits & 0xFFu);
        bits >>= 8;
    }
}

double get_le(const char* p) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(p[b]);
    return std::bit_cast<double>(bits);
}

}  // namespace

std::string encode_record(const TwoChannelRecord& rec, RecordFormat format) {
    const Eigen::Index n = rec.t_s.size();
    if (rec.ch1_v.size() != n || rec.ch2_v.size() != n) throw ValidationError("record channel lengths differ");
    if (format == RecordFormat::csv) {
        CsvTable table{std::string(schema::record), {"t_s", "ch1_V", "ch2_V"}, Eigen::MatrixXd(n, 3)};
        table.data.col(0) = rec.t_s.matrix();
        table.data.col(1) = rec.ch1_v.matrix();
        table.data.col(2) = rec.ch2_v.matrix();
        return to_csv(table);
    }
    std::string out(kRecordMagic, 16);
    out.reserve(16 + static_cast<std::size_t>(n) * 24);
    for (Eigen::Index i = 0; i < n; ++i) {
        put_le(out, rec.t_s[i]);
        put_le(out, rec.ch1_v[i]);
        put_le(out, rec.ch2_v[i]);
    }
    return out;
}

void write_record(const fs::path& path, const TwoChannelRecord& rec, RecordFormat format) {
    write_file_atomic(path, encode_record(rec, format));
}

TwoChannelRecord read_record(const fs::path& path) {
    const std::string bytes = read_file(path);
    TwoChannelRecord rec;
    if (bytes.size() >= 16 && std::memcmp(bytes.data(), kRecordMagic, 16) == 0) {
        const std::size_t payload = bytes.size() - 16;
        if (payload % 24 != 0)
            throw IoError(path.string() + ": binary record payload is not a whole number of (t, ch1, ch2) triples");
        const auto n = static_cast<Eigen::Index>(payload / 24);
        rec.t_s.resize(n);
        rec.ch1_v.resize(n);
        rec.ch2_v.resize(n);
        const char* p = bytes.data() + 16;
        for (Eigen::Index i = 0; i < n; ++i, p += 24) {
            rec.t_s[i] = get_le(p);
            rec.ch1_v[i] = get_le(p + 8);
            rec.ch2_v[i] = get_le(p + 16);
        }
        return rec;
    }
    const CsvTable table = parse_csv(bytes, schema::record, path.string());
    rec.t_s = table.data.col(table.column("t_s")).array();
    rec.ch1_v = table.data.col(table.column("ch1_V")).array();
    rec.ch2_v = table.data.col(table.column("ch2_V")).array();
    return rec;
}

void write_fringe_sweep(const fs::path& path, const FringeSweep& sweep) {
    if (sweep.drive.size() != sweep.volts.size()) throw ValidationError("fringe sweep lengths differ");
    CsvTable table{std::string(schema::fringe_sweep), {"drive", "volts_V"}, Eigen::MatrixXd(sweep.drive.size(), 2)};
    table.data.col(0) = sweep.drive.matrix();
    table.data.col(1) = sweep.volts.matrix();
    write_file_atomic(path, to_csv(table));
}

FringeSweep read_fringe_sweep(const fs::path& path) {
    const CsvTable table = read_csv(path, schema::fringe_sweep);
    return {table.data.col(table.column("drive")).array(), table.data.col(table.column("volts_V")).array()};
}

}  // namespace optomech
