#include "bsv/csv.hpp"

#include "bsv/errors.hpp"

#include <cstdio>
#include <fstream>

namespace bsv {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::string>& meta)
    : impl_(new Impl) {
    impl_->out.open(path, std::ios::binary);  // fixed newlines on any platform
    if (!impl_->out) {
        delete impl_;
        throw ConfigError("cannot open output file: " + path);
    }
    for (const std::string& m : meta) impl_->out << "# " << m << "\n";
    for (size_t i = 0; i < columns.size(); ++i)
        impl_->out << columns[i] << (i + 1 < columns.size() ? "," : "");
    impl_->out << "\n";
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i)
        impl_->out << format_double(values[i]) << (i + 1 < values.size() ? "," : "");
    impl_->out << "\n";
}

} // namespace bsv
