#pragma once
// CSV output: header row, a "# config-hash" comment, atomic replace on close.

#include "asymptolab/core.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace asymptolab {

inline std::string fmt_num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

class CsvWriter {
public:
    CsvWriter(std::filesystem::path path, const std::vector<std::string>& cols, const std::string& hash)
        : path_(std::move(path)) {
        buf_ << "# config-hash " << hash << '\n';
        for (std::size_t i = 0; i < cols.size(); ++i) buf_ << (i ? "," : "") << cols[i];
        buf_ << '\n';
    }

    CsvWriter& cell(double v) { return sep() << fmt_num(v), *this; }
    CsvWriter& cell(int v) { return sep() << v, *this; }
    CsvWriter& cell(std::size_t v) { return sep() << v, *this; }
    CsvWriter& cell(bool v) { return sep() << (v ? 1 : 0), *this; }
    CsvWriter& cell(const std::string& v) {
        sep();
        if (v.find_first_of(",\"\n") == std::string::npos) {
            buf_ << v;
        } else {
            buf_ << '"';
            for (char c : v) buf_ << (c == '"' ? "\"\"" : std::string(1, c));
            buf_ << '"';
        }
        return *this;
    }
    CsvWriter& cell(const char* v) { return cell(std::string(v)); }
    CsvWriter& blank() { return sep(), *this; }
    void end_row() {
        buf_ << '\n';
        first_ = true;
    }

    // write to a temporary next to the target, then rename over it
    void commit() {
        std::filesystem::create_directories(path_.parent_path().empty() ? "." : path_.parent_path());
        const auto tmp = path_.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) throw Error(ErrorKind::io_error, "cannot write " + tmp);
            out << buf_.str();
            if (!out) throw Error(ErrorKind::io_error, "write failed for " + tmp);
        }
        std::filesystem::rename(tmp, path_);
    }

private:
    std::ostream& sep() {
        if (!first_) buf_ << ',';
        first_ = false;
        return buf_;
    }
    std::filesystem::path path_;
    std::ostringstream buf_;
    bool first_ = true;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string hash;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw Error(ErrorKind::io_error, "no column " + name);
    }
};

// plain split; the library never writes quoted numeric cells
inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_error, "cannot read " + path.string());
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string f;
        while (std::getline(ss, f, ',')) out.push_back(f);
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };
    while (std::getline(in, line)) {
        if (line.rfind("# config-hash ", 0) == 0) {
            t.hash = line.substr(14);
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        if (t.header.empty())
            t.header = split(line);
        else
            t.rows.push_back(split(line));
    }
    return t;
}

} // namespace asymptolab
