#pragma once

#include "symdx/numkit.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace symdx {

using ordered_json = nlohmann::ordered_json;

std::string hash_to_hex(std::uint64_t h);
std::uint64_t hash_from_hex(const std::string& s);

ordered_json matrix_to_json(const numkit::Matrix& m);
numkit::Matrix matrix_from_json(const ordered_json& j);

/// Throws ModelFormat on malformed text.
ordered_json parse_json(const std::string& text);
void check_schema(const ordered_json& j, const std::string& schema, int version);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace symdx
