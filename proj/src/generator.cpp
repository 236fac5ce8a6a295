#include "norsim/generator.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace norsim {

using nlohmann::json;

std::string GeneratorSpec::to_json() const {
  json rels = json::array();
  for (const auto& r : relations)
    rels.push_back({{"name", r.name}, {"rows", r.rows}});
  return json{{"seed", seed}, {"relations", rels}}.dump(2);
}

GeneratorSpec GeneratorSpec::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("generator spec: ") + e.what());
  }
  GeneratorSpec spec;
  spec.seed = j.value("seed", 1ull);
  for (const auto& r : j.at("relations"))
    spec.relations.push_back(
        {r.at("name").get<std::string>(), r.at("rows").get<uint64_t>()});
  return spec;
}

GeneratorSpec GeneratorSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open generator spec " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= uint8_t(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::vector<std::vector<Scalar>> generate_records(const RelationSchema& schema,
                                                  uint64_t rows,
                                                  uint64_t seed) {
  Rng rng(seed ^ fnv1a(schema.name));
  std::vector<std::vector<Scalar>> records;
  records.reserve(rows);
  for (uint64_t r = 0; r < rows; ++r) {
    std::vector<Scalar> rec;
    rec.reserve(schema.attributes.size());
    for (const auto& attr : schema.attributes) {
      if (attr.encoding == Encoding::Dictionary) {
        rec.emplace_back(
            attr.dict_values[rng.below(attr.dict_values.size())]);
      } else {
        rec.emplace_back(rng.in_range(attr.min_value, attr.max_value));
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_tbl_file(const std::string& path, const RelationSchema& schema,
                    const std::vector<std::vector<Scalar>>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto& rec : records) {
    for (size_t a = 0; a < rec.size(); ++a) {
      out << scalar_to_text(schema.attributes[a], rec[a]);
      out << '|';
    }
    out << '\n';
  }
}

std::vector<std::vector<Scalar>> read_tbl_file(const std::string& path,
                                               const RelationSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file " + path);
  std::vector<std::vector<Scalar>> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<Scalar> rec;
    size_t pos = 0;
    for (size_t a = 0; a < schema.attributes.size(); ++a) {
      size_t bar = line.find('|', pos);
      if (bar == std::string::npos)
        throw ParseError("data row has too few fields", lineno);
      rec.push_back(scalar_from_text(schema.attributes[a],
                                     line.substr(pos, bar - pos)));
      pos = bar + 1;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace norsim
