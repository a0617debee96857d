#pragma once
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "batsv2x/errors.hpp"

namespace batsv2x {

// Minimal CSV emitter with a fixed header; numeric formatting is locale-free
// so identical runs produce identical bytes.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw Error("cannot open " + path);
        cols_ = header.size();
        for (size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
    }

    CsvWriter& field(const std::string& s) {
        if (in_row_) out_ << ',';
        out_ << s;
        in_row_ = true;
        ++written_;
        return *this;
    }
    CsvWriter& field(long v) { return field(std::to_string(v)); }
    CsvWriter& field(int v) { return field(std::to_string(v)); }
    CsvWriter& field(uint64_t v) { return field(std::to_string(v)); }
    CsvWriter& field(double v) {
        std::ostringstream os;
        os.imbue(std::locale::classic());
        os.precision(12);
        os << v;
        return field(os.str());
    }
    void end_row() {
        if (written_ != cols_) throw Error("csv row width mismatch");
        out_ << '\n';
        in_row_ = false;
        written_ = 0;
    }

  private:
    std::ofstream out_;
    size_t cols_ = 0;
    size_t written_ = 0;
    bool in_row_ = false;
};

// Header + column-count validation for emitted files.
bool validate_csv(const std::string& path, const std::vector<std::string>& header,
                  std::string* why = nullptr);

} // namespace batsv2x
