#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qnls::cli {

/// %.17g; non-finite values print as nan, inf, -inf.
std::string fmt(double x);

/// Deterministic JSON text: keys sorted, floats with 17 significant digits, non-finite floats as null.
std::string dump_json(const nlohmann::json& j, int indent = 2);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t h);

/// Hash of the canonical compact form, so whitespace and key order in the source do not matter.
std::string config_hash(const nlohmann::json& doc);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Column-stable CSV builder; every row must match the header width.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add(const std::vector<double>& row);
  void add_cells(const std::vector<std::string>& row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace qnls::cli
