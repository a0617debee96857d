#include "batsv2x/csv.hpp"

namespace batsv2x {

bool validate_csv(const std::string& path, const std::vector<std::string>& header,
                  std::string* why) {
    std::ifstream in(path);
    if (!in) {
        if (why) *why = "missing file";
        return false;
    }
    std::string line;
    if (!std::getline(in, line)) {
        if (why) *why = "empty file";
        return false;
    }
    std::string expect;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) expect += ',';
        expect += header[i];
    }
    if (line != expect) {
        if (why) *why = "header mismatch: " + line;
        return false;
    }
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        size_t cols = 1;
        for (char c : line)
            if (c == ',') ++cols;
        if (cols != header.size()) {
            if (why) *why = "row " + std::to_string(lineno) + " has " + std::to_string(cols) + " columns";
            return false;
        }
    }
    return true;
}

} // namespace batsv2x
