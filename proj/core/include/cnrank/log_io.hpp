#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cnrank/sparse.hpp"

namespace cnrank {

enum class LogFormat { csv, tsv };

struct InteractionRecord {
  std::uint32_t user = 0;  // dense index into user_ids
  std::uint32_t item = 0;  // dense index into item_ids
  std::uint8_t y = 0;
  std::uint8_t z = 0;
};

/// Parsed interaction/treatment log. Id dictionaries map dense indices back
/// to external ids in first-appearance order.
struct InteractionLog {
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::vector<InteractionRecord> records;

  std::size_t n_users() const { return user_ids.size(); }
  std::size_t n_items() const { return item_ids.size(); }
};

/// Reads a delimited log with header columns user, item, y, z (any order;
/// extra columns are ignored). Throws with the offending line number on
/// malformed rows, duplicate (user, item) pairs, or y/z outside {0, 1}.
InteractionLog load_log(const std::filesystem::path& path, LogFormat format);

/// Outcome and treatment matrices of a log: Y[u,i]=1 iff a record has y=1,
/// Z analogous. Both span all users and items in the dictionaries.
std::pair<SparseBinaryMatrix, SparseBinaryMatrix> to_matrices(const InteractionLog& log);

}  // namespace cnrank
