#include "sncf/core/io.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "sncf/core/error.hpp"

namespace sncf {

namespace {

std::string lower_ext(const std::filesystem::path& p) {
    std::string e = p.extension().string();
    for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return e;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw LoadError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) throw LoadError("cannot write " + path.string());
    return out;
}

bool host_little_endian() {
    const std::uint16_t probe = 1;
    unsigned char b = 0;
    std::memcpy(&b, &probe, 1);
    return b == 1;
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

DenseMatrix load_npy(const std::filesystem::path& path) {
    auto in = open_in(path, true);
    std::array<char, 8> magic{};
    in.read(magic.data(), 8);
    if (!in || std::memcmp(magic.data(), "\x93NUMPY", 6) != 0) {
        throw LoadError(path.string() + ": not an NPY file");
    }
    const int major = static_cast<unsigned char>(magic[6]);
    std::uint32_t header_len = 0;
    if (major == 1) {
        std::array<unsigned char, 2> b{};
        in.read(reinterpret_cast<char*>(b.data()), 2);
        header_len = b[0] | (b[1] << 8);
    } else if (major == 2 || major == 3) {
        std::array<unsigned char, 4> b{};
        in.read(reinterpret_cast<char*>(b.data()), 4);
        header_len = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    } else {
        throw LoadError(path.string() + ": unsupported NPY version " + std::to_string(major));
    }
    std::string header(header_len, '\0');
    in.read(header.data(), header_len);
    if (!in) throw LoadError(path.string() + ": truncated NPY header");

    std::smatch m;
    if (!std::regex_search(header, m, std::regex(R"('descr'\s*:\s*'([^']*)')"))) {
        throw LoadError(path.string() + ": NPY header lacks descr");
    }
    const std::string descr = m[1];
    if (descr != "<f4" && descr != "<f8") {
        throw LoadError(path.string() + ": unsupported dtype " + descr + " (expected <f4)");
    }
    if (std::regex_search(header, std::regex(R"('fortran_order'\s*:\s*True)"))) {
        throw LoadError(path.string() + ": Fortran-ordered arrays are not supported");
    }
    if (!std::regex_search(header, m, std::regex(R"('shape'\s*:\s*\(\s*(\d+)\s*,\s*(\d+)\s*,?\s*\))"))) {
        throw LoadError(path.string() + ": expected a 2-D array shape");
    }
    const std::size_t rows = std::stoull(m[1]);
    const std::size_t cols = std::stoull(m[2]);
    if (!host_little_endian()) throw LoadError("big-endian hosts are not supported");

    std::vector<double> data(rows * cols);
    if (descr == "<f4") {
        std::vector<float> raw(rows * cols);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));
        if (!in && rows * cols > 0) throw LoadError(path.string() + ": truncated NPY payload");
        for (std::size_t i = 0; i < raw.size(); ++i) data[i] = raw[i];
    } else {
        std::vector<double> raw(rows * cols);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(double)));
        if (!in && rows * cols > 0) throw LoadError(path.string() + ": truncated NPY payload");
        for (std::size_t i = 0; i < raw.size(); ++i) data[i] = static_cast<float>(raw[i]);
    }
    return DenseMatrix(rows, cols, std::move(data));
}

void save_npy(const std::filesystem::path& path, const DenseMatrix& m) {
    if (!host_little_endian()) throw LoadError("big-endian hosts are not supported");
    std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': (" + std::to_string(m.rows()) +
                         ", " + std::to_string(m.cols()) + "), }";
    const std::size_t unpadded = 10 + header.size() + 1;
    header.append((64 - unpadded % 64) % 64, ' ');
    header.push_back('\n');
    auto out = open_out(path, true);
    out.write("\x93NUMPY\x01\x00", 8);
    const auto len = static_cast<std::uint16_t>(header.size());
    const std::array<char, 2> len_bytes{static_cast<char>(len & 0xFF), static_cast<char>(len >> 8)};
    out.write(len_bytes.data(), 2);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    std::vector<float> raw(m.storage().begin(), m.storage().end());
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));
    if (!out) throw LoadError("failed writing " + path.string());
}

DenseMatrix load_csv_matrix(const std::filesystem::path& path) {
    auto in = open_in(path, false);
    std::vector<double> data;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_commas(line);
        if (rows == 0) cols = fields.size();
        if (fields.size() != cols) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(cols) + " fields, got " + std::to_string(fields.size()));
        }
        for (auto f : fields) {
            double v = 0.0;
            if (!parse_number(f, v)) {
                throw LoadError(path.string() + ":" + std::to_string(line_no) + ": invalid number '" +
                                std::string(trim(f)) + "'");
            }
            data.push_back(static_cast<float>(v));
        }
        ++rows;
    }
    return DenseMatrix(rows, cols, std::move(data));
}

void save_csv_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
    auto out = open_out(path, false);
    std::array<char, 64> buf{};
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j > 0) out.put(',');
            const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), static_cast<float>(m(i, j)));
            out.write(buf.data(), res.ptr - buf.data());
        }
        out.put('\n');
    }
    if (!out) throw LoadError("failed writing " + path.string());
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".npy") return load_npy(path);
    if (ext == ".csv" || ext == ".txt") return load_csv_matrix(path);
    throw LoadError(path.string() + ": unknown matrix format (use .npy or .csv)");
}

void save_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
    const std::string ext = lower_ext(path);
    if (ext == ".npy") return save_npy(path, m);
    if (ext == ".csv" || ext == ".txt") return save_csv_matrix(path, m);
    throw LoadError(path.string() + ": unknown matrix format (use .npy or .csv)");
}

FeatureMatrix load_features(const std::filesystem::path& path) {
    DenseMatrix m = load_matrix(path);
    try {
        return FeatureMatrix(std::move(m));
    } catch (const ConfigError& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
}

LabelVector load_labels(const std::filesystem::path& path) {
    auto in = open_in(path, false);
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        int v = 0;
        if (!parse_number(t, v)) {
            if (labels.empty() && line_no == 1) continue;
            throw LoadError(path.string() + ":" + std::to_string(line_no) + ": invalid label '" +
                            std::string(t) + "'");
        }
        labels.push_back(v);
    }
    try {
        return LabelVector(std::move(labels));
    } catch (const ConfigError& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
}

void save_labels(const std::filesystem::path& path, const LabelVector& labels) {
    auto out = open_out(path, false);
    for (int v : labels.values()) out << v << '\n';
    if (!out) throw LoadError("failed writing " + path.string());
}

void save_verdicts(const std::filesystem::path& path, std::span<const SampleVerdict> verdicts) {
    auto out = open_out(path, false);
    out << "index,kind,ood_group\n";
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        out << i << ',' << to_string(verdicts[i].kind) << ',' << verdicts[i].ood_group << '\n';
    }
    if (!out) throw LoadError("failed writing " + path.string());
}

std::vector<SampleVerdict> load_verdicts(const std::filesystem::path& path) {
    auto in = open_in(path, false);
    std::vector<SampleVerdict> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || (line_no == 1 && t.starts_with("index"))) continue;
        const auto f = split_commas(t);
        std::size_t idx = 0;
        SampleVerdict v;
        if (f.size() < 3 || !parse_number(f[0], idx) || !parse_number(f[2], v.ood_group)) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) + ": malformed verdict row");
        }
        if (idx != out.size()) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) + ": indices must be 0..N-1 in order");
        }
        v.kind = verdict_kind_from_string(trim(f[1]));
        out.push_back(v);
    }
    return out;
}

}  // namespace sncf
