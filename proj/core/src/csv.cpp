#include "fgda/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>

#include "fgda/errors.hpp"

namespace fgda {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_double(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end) {
        throw ParseError("non-numeric feature '" + std::string(field) + "'", line_no);
    }
    return value;
}

int parse_int(std::string_view field, std::size_t line_no, const char* what) {
    int value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(std::string("invalid ") + what + " '" + std::string(field) + "'", line_no);
    }
    return value;
}

} // namespace

Dataset read_csv_dataset(std::istream& in, std::optional<std::size_t> num_classes) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("missing header", 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_fields(line);
    if (header.size() < 3 || header[0] != "domain" || header[1] != "label") {
        throw ParseError("header must start with 'domain,label' and name at least one feature", line_no);
    }
    const std::size_t width = header.size() - 2;
    for (std::size_t d = 0; d < width; ++d) {
        if (header[d + 2] != "f" + std::to_string(d)) {
            throw ParseError("expected feature column 'f" + std::to_string(d) + "'", line_no);
        }
    }

    Dataset data;
    data.features.cols = width;
    Sample sample;
    sample.x.resize(width);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != width + 2) {
            throw ParseError("expected " + std::to_string(width + 2) + " fields, found " + std::to_string(fields.size()),
                             line_no);
        }
        const int domain = parse_int(fields[0], line_no, "domain");
        if (domain != 0 && domain != 1) throw ParseError("domain must be 0 or 1", line_no);
        const int label = parse_int(fields[1], line_no, "label");
        if (label < kUnlabeled || (num_classes && label >= static_cast<int>(*num_classes))) {
            throw ParseError("label " + std::to_string(label) + " out of range", line_no);
        }
        for (std::size_t d = 0; d < width; ++d) sample.x[d] = parse_double(fields[d + 2], line_no);
        sample.label = label;
        sample.domain = static_cast<Domain>(domain);
        data.push_back(sample);
    }
    return data;
}

Dataset load_csv_dataset(const std::filesystem::path& path, std::optional<std::size_t> num_classes) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset " + path.string());
    return read_csv_dataset(in, num_classes);
}

void write_csv_dataset(std::ostream& out, const Dataset& data) {
    out << "domain,label";
    for (std::size_t d = 0; d < data.width(); ++d) out << ",f" << d;
    out << '\n';
    char buffer[64];
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << static_cast<int>(data.domains[i]) << ',' << data.labels[i];
        for (double v : data.features.row(i)) {
            auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
            out << ',' << std::string_view(buffer, static_cast<std::size_t>(ptr - buffer));
        }
        out << '\n';
    }
}

void save_csv_dataset(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_csv_dataset(out, data);
    if (!out) throw IoError("failed writing " + path.string());
}

} // namespace fgda
