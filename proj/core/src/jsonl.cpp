#include "codemask/jsonl.hpp"

#include <sstream>

#include "codemask/error.hpp"

namespace codemask {

void checkFormatVersion(const Json& record, const std::string& where) {
  if (!record.is_object()) throw FormatError(where + ": record is not a JSON object");
  const auto it = record.find("v");
  if (it == record.end()) return;
  if (!it->is_number_integer() || it->get<int>() != kFormatVersion) {
    throw FormatVersionError(where + ": unsupported format version " + it->dump());
  }
}

void readJsonl(const std::filesystem::path& file, const std::function<void(const Json&, std::size_t)>& visit,
               const std::function<void(std::size_t, const std::string&)>& onMalformed) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + file.string());
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      if (!onMalformed) {
        throw FormatError(file.string() + ":" + std::to_string(lineNo) + ": malformed JSON");
      }
      onMalformed(lineNo, e.what());
      continue;
    }
    visit(record, lineNo);
  }
}

JsonlWriter::JsonlWriter(const std::filesystem::path& file) : out_(file, std::ios::binary), path_(file) {
  if (!out_) throw Error("cannot write " + file.string());
}

void JsonlWriter::write(const Json& record) {
  out_ << record.dump() << '\n';
  if (!out_) throw Error("write failed: " + path_.string());
}

Json readJsonFile(const std::filesystem::path& file) {
  try {
    return Json::parse(readTextFile(file));
  } catch (const Json::parse_error&) {
    throw FormatError(file.string() + ": malformed JSON");
  }
}

void writeJsonFile(const std::filesystem::path& file, const Json& doc) { writeTextFile(file, doc.dump(2) + "\n"); }

std::string readTextFile(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void writeTextFile(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  out << text;
  if (!out) throw Error("write failed: " + file.string());
}

}  // namespace codemask
