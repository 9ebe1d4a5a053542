#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace permeq {

// Minimal CSV emitter. Numbers are serialized with 12 significant digits so
// reruns of a deterministic experiment produce byte-identical files.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
        out_ << header << '\n';
    }

    static std::string number(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return buf;
    }

    void row(const std::string& line) { out_ << line << '\n'; }

private:
    std::ofstream out_;
};

} // namespace permeq
