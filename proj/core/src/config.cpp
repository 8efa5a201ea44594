#include "rrt/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rrt/error.hpp"

namespace rrt {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

std::string unquote(std::string_view v, std::size_t line_no) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return std::string(v.substr(1, v.size() - 2));
  if (v.find('"') != std::string_view::npos)
    throw ConfigError("line " + std::to_string(line_no) + ": unbalanced quotes");
  return std::string(v);
}

std::string parse_value(std::string_view v, std::size_t line_no) {
  if (v.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing value");
  if (v.front() != '[') return unquote(v, line_no);
  if (v.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
  std::string out;
  for (const auto& item : split_list(v.substr(1, v.size() - 2))) {
    if (!out.empty()) out += ',';
    out += unquote(item, line_no);
  }
  return out;
}

}  // namespace

ConfigMap parse_config(std::string_view text) {
  ConfigMap config;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const std::string_view raw = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || !valid_key(trim(line.substr(1, line.size() - 2))))
        throw ConfigError("line " + std::to_string(line_no) + ": bad section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    if (!valid_key(key)) throw ConfigError("line " + std::to_string(line_no) + ": bad key");
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (config.contains(full)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + full);
    config[full] = parse_value(trim(line.substr(eq + 1)), line_no);
  }
  return config;
}

ConfigMap load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_override(ConfigMap& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override must look like key=value");
  const std::string_view key = trim(assignment.substr(0, eq));
  if (!valid_key(key)) throw ConfigError("bad override key");
  config[std::string(key)] = parse_value(trim(assignment.substr(eq + 1)), 0);
}

double parse_real(std::string_view text, std::string_view key) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
  return value;
}

std::uint64_t parse_count(std::string_view text, std::string_view key) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc{} && ptr == text.data() + text.size()) return value;
  // Accept 1e4-style counts as long as they are whole numbers.
  const double real = parse_real(text, key);
  if (real < 0.0 || real != std::floor(real) || real > 1.8e19)
    throw ConfigError(std::string(key) + ": expected a nonnegative integer");
  return static_cast<std::uint64_t>(real);
}

bool parse_bool(std::string_view text, std::string_view key) {
  text = trim(text);
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(std::string(key) + ": expected true or false");
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  text = trim(text);
  if (text.empty()) return items;
  for (;;) {
    const auto comma = text.find(',');
    items.emplace_back(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return items;
}

}  // namespace rrt
