#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <nlohmann/json.hpp>

namespace codemask {

using Json = nlohmann::ordered_json;

// Every record the toolkit writes carries "v": kFormatVersion. Records
// without the field (hand-written corpora, external prediction files) are
// read as the current version.
inline constexpr int kFormatVersion = 1;

void checkFormatVersion(const Json& record, const std::string& where);

/// Calls `visit(record, lineNumber)` for each non-blank line. Malformed JSON
/// is reported through `onMalformed` when given, and throws FormatError
/// otherwise. Throws Error if the file cannot be opened.
void readJsonl(const std::filesystem::path& file, const std::function<void(const Json&, std::size_t)>& visit,
               const std::function<void(std::size_t, const std::string&)>& onMalformed = {});

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& file);
  void write(const Json& record);

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

Json readJsonFile(const std::filesystem::path& file);
void writeJsonFile(const std::filesystem::path& file, const Json& doc);
std::string readTextFile(const std::filesystem::path& file);
void writeTextFile(const std::filesystem::path& file, const std::string& text);

}  // namespace codemask
