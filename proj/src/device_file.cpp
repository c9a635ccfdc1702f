#include "semlab/device_file.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace semlab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_bare_key(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

// Drops a trailing comment, ignoring '#' inside double quotes.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

double parse_number(std::string_view s, int line) {
  std::string cleaned;
  for (char c : s)
    if (c != '_') cleaned.push_back(c);
  if (!cleaned.empty() && cleaned.front() == '+') cleaned.erase(0, 1);
  double value = 0.0;
  const auto* first = cleaned.data();
  const auto* last = cleaned.data() + cleaned.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cleaned.empty() || ec != std::errc() || ptr != last)
    throw DeviceFileError("invalid number '" + std::string(s) + "'", line);
  return value;
}

std::string parse_string(std::string_view s, int line) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"')
    throw DeviceFileError("unterminated string", line);
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\') {
      if (i + 2 >= s.size()) throw DeviceFileError("dangling escape", line);
      const char c = s[++i];
      switch (c) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: throw DeviceFileError(std::string("unsupported escape \\") + c, line);
      }
    } else if (s[i] == '"') {
      throw DeviceFileError("unexpected quote inside string", line);
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

KvValue parse_value(std::string_view s, int line) {
  if (s.empty()) throw DeviceFileError("missing value", line);
  if (s.front() == '"') return parse_string(s, line);
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '[') {
    if (s.back() != ']') throw DeviceFileError("unterminated array", line);
    std::vector<double> out;
    auto body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const auto item = trim(body.substr(0, comma));
      if (item.empty()) {
        if (comma == std::string_view::npos) break;  // trailing comma
        throw DeviceFileError("empty array element", line);
      }
      out.push_back(parse_number(item, line));
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
    }
    return out;
  }
  return parse_number(s, line);
}

}  // namespace

bool KvDocument::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const KvValue* KvDocument::find(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  if (s == sections.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

KvDocument parse_kv(std::string_view text) {
  KvDocument doc;
  doc.sections[""];
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto raw = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw DeviceFileError("malformed section header", line_no);
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!is_bare_key(name)) throw DeviceFileError("invalid section name", line_no);
      current = std::string(name);
      if (doc.sections.contains(current) && current != "")
        throw DeviceFileError("duplicate section [" + current + "]", line_no);
      doc.sections[current];
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw DeviceFileError("expected key = value", line_no);
    auto key = trim(line.substr(0, eq));
    if (!key.empty() && key.front() == '"') {
      key = std::string_view(key).substr(1, key.size() >= 2 ? key.size() - 2 : 0);
    } else if (!is_bare_key(key)) {
      throw DeviceFileError("invalid key '" + std::string(key) + "'", line_no);
    }
    auto& section = doc.sections[current];
    const std::string k(key);
    if (section.contains(k)) throw DeviceFileError("duplicate key '" + k + "'", line_no);
    section.emplace(k, parse_value(trim(line.substr(eq + 1)), line_no));
  }
  return doc;
}

KvDocument parse_kv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DeviceFileError("cannot open " + path.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kv(ss.str());
}

}  // namespace semlab
