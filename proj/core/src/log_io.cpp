#include "cnrank/log_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace cnrank {

namespace {

[[noreturn]] void bad_line(const std::filesystem::path& path, std::size_t line_no,
                           const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, delim)) fields.push_back(field);
  if (!line.empty() && line.back() == delim) fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::uint8_t parse_bit(const std::filesystem::path& path, std::size_t line_no,
                       const std::string& field, const char* name) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  bad_line(path, line_no, std::string(name) + " must be 0 or 1, got '" + field + "'");
}

}  // namespace

InteractionLog load_log(const std::filesystem::path& path, LogFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open log file: " + path.string());
  const char delim = format == LogFormat::csv ? ',' : '\t';

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw std::runtime_error("empty log file: " + path.string());
  ++line_no;

  const std::vector<std::string> header = split_fields(strip_cr(line), delim);
  long user_col = -1, item_col = -1, y_col = -1, z_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "user") user_col = static_cast<long>(c);
    else if (header[c] == "item") item_col = static_cast<long>(c);
    else if (header[c] == "y") y_col = static_cast<long>(c);
    else if (header[c] == "z") z_col = static_cast<long>(c);
  }
  for (auto [col, name] : {std::pair{user_col, "user"}, {item_col, "item"},
                           {y_col, "y"}, {z_col, "z"}}) {
    if (col < 0) bad_line(path, line_no, std::string("missing required column '") + name + "'");
  }
  const std::size_t min_fields =
      static_cast<std::size_t>(std::max({user_col, item_col, y_col, z_col})) + 1;

  InteractionLog log;
  std::unordered_map<std::string, std::uint32_t> user_index;
  std::unordered_map<std::string, std::uint32_t> item_index;
  std::unordered_set<std::uint64_t> seen_pairs;

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line, delim);
    if (fields.size() < min_fields) {
      bad_line(path, line_no,
               "expected at least " + std::to_string(min_fields) + " fields, got " +
                   std::to_string(fields.size()));
    }

    const std::string& user_id = fields[static_cast<std::size_t>(user_col)];
    const std::string& item_id = fields[static_cast<std::size_t>(item_col)];
    if (user_id.empty()) bad_line(path, line_no, "empty user id");
    if (item_id.empty()) bad_line(path, line_no, "empty item id");

    auto [uit, u_new] = user_index.try_emplace(
        user_id, static_cast<std::uint32_t>(log.user_ids.size()));
    if (u_new) log.user_ids.push_back(user_id);
    auto [iit, i_new] = item_index.try_emplace(
        item_id, static_cast<std::uint32_t>(log.item_ids.size()));
    if (i_new) log.item_ids.push_back(item_id);

    const std::uint64_t pair_key =
        (static_cast<std::uint64_t>(uit->second) << 32) | iit->second;
    if (!seen_pairs.insert(pair_key).second) {
      bad_line(path, line_no, "duplicate (user, item) pair: (" + user_id + ", " + item_id + ")");
    }

    InteractionRecord rec;
    rec.user = uit->second;
    rec.item = iit->second;
    rec.y = parse_bit(path, line_no, fields[static_cast<std::size_t>(y_col)], "y");
    rec.z = parse_bit(path, line_no, fields[static_cast<std::size_t>(z_col)], "z");
    log.records.push_back(rec);
  }
  return log;
}

std::pair<SparseBinaryMatrix, SparseBinaryMatrix> to_matrices(const InteractionLog& log) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> y_entries;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> z_entries;
  for (const InteractionRecord& rec : log.records) {
    if (rec.y) y_entries.emplace_back(rec.user, rec.item);
    if (rec.z) z_entries.emplace_back(rec.user, rec.item);
  }
  return {SparseBinaryMatrix::from_triplets(log.n_users(), log.n_items(), y_entries),
          SparseBinaryMatrix::from_triplets(log.n_users(), log.n_items(), z_entries)};
}

}  // namespace cnrank
