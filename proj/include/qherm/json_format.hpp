#pragma once

#include <string>

#include "json.hpp"

namespace qherm {

// Non-finite values become the strings "inf", "-inf", "nan"; JSON has no literal for them.
nlohmann::json json_number(double v);

// Two-space indent, sorted keys, shortest round-trip doubles, trailing newline.
std::string dump_json(const nlohmann::json& j);

void write_json_file(const std::string& path, const nlohmann::json& j);
void write_text_file(const std::string& path, const std::string& text);
nlohmann::json read_json_file(const std::string& path);

}  // namespace qherm
