#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bsv {

/// FNV-1a 64-bit hash; used for the reproducible config snapshot id.
std::uint64_t fnv1a(const std::string& text);

/// CSV file with '#' comment header lines recording tool version, config
/// hash, grid and normalization, followed by a column header and rows.
/// All numbers are written with %.17g so identical inputs give identical bytes.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns,
              const std::vector<std::string>& meta);
    ~CsvWriter();

    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<double>& values);

private:
    struct Impl;
    Impl* impl_;
};

std::string format_double(double v);

} // namespace bsv
