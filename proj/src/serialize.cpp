#include "symdx/serialize.hpp"

#include "symdx/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace symdx {

std::string hash_to_hex(std::uint64_t h)
{
    char buf[17];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, h, 16);
    std::string digits(buf, ptr);
    return std::string(16 - digits.size(), '0') + digits;
}

std::uint64_t hash_from_hex(const std::string& s)
{
    std::uint64_t h = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), h, 16);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail(ErrorCode::ModelFormat, "bad vocabulary hash '" + s + "'");
    return h;
}

ordered_json matrix_to_json(const numkit::Matrix& m)
{
    ordered_json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["data"] = std::vector<double>(m.data().begin(), m.data().end());
    return j;
}

numkit::Matrix matrix_from_json(const ordered_json& j)
{
    return numkit::Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                          j.at("data").get<std::vector<double>>());
}

ordered_json parse_json(const std::string& text)
{
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::ModelFormat, e.what());
    }
}

void check_schema(const ordered_json& j, const std::string& schema, int version)
{
    if (!j.is_object() || !j.contains("schema") || j["schema"] != schema)
        fail(ErrorCode::ModelFormat, "expected schema '" + schema + "'");
    if (!j.contains("version") || j["version"] != version)
        fail(ErrorCode::ModelFormat, "unsupported " + schema + " version");
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::MissingFile, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::IoFailure, "cannot write " + path.string());
    out << text;
    if (!out)
        fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

} // namespace symdx
