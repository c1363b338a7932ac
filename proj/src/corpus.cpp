// Copyright 2026 The patland Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "patland/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "patland/error.hpp"

namespace patland {

using nlohmann::json;

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kFormat: return "format_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kPrecondition: return "precondition_failed";
    case ErrorCode::kNumerical: return "numerical_error";
    case ErrorCode::kConvergence: return "convergence_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kInternal: return "internal_error";
  }
  return "unknown";
}

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

bool valid_group(std::string_view g) {
  const auto slash = g.find('/');
  if (slash == std::string_view::npos) return false;
  const auto main = g.substr(0, slash);
  const auto sub = g.substr(slash + 1);
  return all_digits(main) && main.size() <= 4 && all_digits(sub) && sub.size() >= 2 &&
         sub.size() <= 6;
}

bool valid_date(std::string_view d) {
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
  if (!all_digits(d.substr(0, 4)) || !all_digits(d.substr(5, 2)) || !all_digits(d.substr(8, 2)))
    return false;
  const int month = std::stoi(std::string(d.substr(5, 2)));
  const int day = std::stoi(std::string(d.substr(8, 2)));
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

}  // namespace

std::optional<CpcCode> CpcCode::parse(std::string_view text) {
  if (text.size() < 4) return std::nullopt;
  if (!is_upper(text[0]) || !is_digit(text[1]) || !is_digit(text[2]) || !is_upper(text[3]))
    return std::nullopt;
  CpcCode code;
  code.section = text[0];
  code.class_digits = std::string(text.substr(1, 2));
  code.subclass_letter = text[3];
  const auto rest = text.substr(4);
  if (!rest.empty()) {
    if (!valid_group(rest)) return std::nullopt;
    code.group = std::string(rest);
  }
  return code;
}

CpcCode CpcCode::parse_or_throw(std::string_view text) {
  auto code = parse(text);
  if (!code) throw Error(ErrorCode::kValidation, "invalid CPC code '" + std::string(text) + "'");
  return *code;
}

std::string CpcCode::str() const { return subclass() + group; }

std::string CpcCode::subclass() const {
  std::string s;
  s.reserve(4);
  s.push_back(section);
  s += class_digits;
  s.push_back(subclass_letter);
  return s;
}

std::vector<Violation> validate(const PatentRecord& record) {
  std::vector<Violation> out;
  if (record.patent_id.empty()) out.push_back({"patent_id", "must be non-empty"});
  for (const auto& code : record.cpc_codes) {
    if (!CpcCode::parse(code)) out.push_back({"cpc_codes", "invalid CPC code '" + code + "'"});
  }
  if (!record.patent_id.empty() &&
      std::find(record.citations.begin(), record.citations.end(), record.patent_id) !=
          record.citations.end()) {
    out.push_back({"citations", "record cites itself"});
  }
  for (const auto& c : record.citations) {
    if (c.empty()) {
      out.push_back({"citations", "empty citation id"});
      break;
    }
  }
  if (record.grant_date && !valid_date(*record.grant_date))
    out.push_back({"grant_date", "expected YYYY-MM-DD, got '" + *record.grant_date + "'"});
  return out;
}

const char* to_string(Label label) {
  return label == Label::kPositive ? "positive" : "negative";
}
const char* to_string(Difficulty difficulty) {
  return difficulty == Difficulty::kEasy ? "easy" : "hard";
}
const char* to_string(Source source) {
  switch (source) {
    case Source::kSeed: return "seed";
    case Source::kAntiSeed: return "anti_seed";
    case Source::kAnnotator: return "annotator";
  }
  return "?";
}
const char* to_string(Category category) {
  switch (category) {
    case Category::kHardPositive: return "Hard+";
    case Category::kHardNegative: return "Hard-";
    case Category::kEasyPositive: return "Easy+";
    case Category::kEasyNegative: return "Easy-";
  }
  return "?";
}

Label parse_label(std::string_view text) {
  if (text == "positive") return Label::kPositive;
  if (text == "negative") return Label::kNegative;
  throw Error(ErrorCode::kValidation, "unknown label '" + std::string(text) + "'");
}
Difficulty parse_difficulty(std::string_view text) {
  if (text == "easy") return Difficulty::kEasy;
  if (text == "hard") return Difficulty::kHard;
  throw Error(ErrorCode::kValidation, "unknown difficulty '" + std::string(text) + "'");
}
Source parse_source(std::string_view text) {
  if (text == "seed") return Source::kSeed;
  if (text == "anti_seed") return Source::kAntiSeed;
  if (text == "annotator") return Source::kAnnotator;
  throw Error(ErrorCode::kValidation, "unknown source '" + std::string(text) + "'");
}

Category LabeledExample::category() const {
  if (difficulty == Difficulty::kHard)
    return label == Label::kPositive ? Category::kHardPositive : Category::kHardNegative;
  return label == Label::kPositive ? Category::kEasyPositive : Category::kEasyNegative;
}

std::vector<Violation> validate(const LabeledExample& example) {
  std::vector<Violation> out;
  if (example.patent_id.empty()) out.push_back({"patent_id", "must be non-empty"});
  switch (example.source) {
    case Source::kSeed:
      if (example.label != Label::kPositive || example.difficulty != Difficulty::kEasy)
        out.push_back({"source", "seed examples must be easy positives"});
      break;
    case Source::kAntiSeed:
      if (example.label != Label::kNegative || example.difficulty != Difficulty::kEasy)
        out.push_back({"source", "anti-seed examples must be easy negatives"});
      break;
    case Source::kAnnotator:
      if (example.difficulty != Difficulty::kHard)
        out.push_back({"difficulty", "annotator examples must be hard"});
      break;
  }
  return out;
}

LabeledExample make_seed(std::string patent_id, std::string labeled_at) {
  return {std::move(patent_id), Label::kPositive, Difficulty::kEasy, Source::kSeed,
          std::nullopt, std::move(labeled_at)};
}

LabeledExample make_antiseed(std::string patent_id, std::string labeled_at) {
  return {std::move(patent_id), Label::kNegative, Difficulty::kEasy, Source::kAntiSeed,
          std::nullopt, std::move(labeled_at)};
}

LabeledExample make_annotation(std::string patent_id, Label label, std::string annotator_id,
                               std::string labeled_at) {
  return {std::move(patent_id), label, Difficulty::kHard, Source::kAnnotator,
          std::move(annotator_id), std::move(labeled_at)};
}

// ---- JSONL -----------------------------------------------------------------

namespace {

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string opt_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> opt_string_list(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_array()) throw std::invalid_argument(std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string())
      throw std::invalid_argument(std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

json record_to_json(const PatentRecord& r) {
  json j;
  j["patent_id"] = r.patent_id;
  j["title"] = r.title;
  j["abstract"] = r.abstract_text;
  j["claims"] = r.claims;
  j["description"] = r.description;
  j["cpc_codes"] = r.cpc_codes;
  j["citations"] = r.citations;
  j["family_id"] = r.family_id;
  j["grant_date"] = r.grant_date ? json(*r.grant_date) : json(nullptr);
  return j;
}

json label_to_json(const LabeledExample& e) {
  json j;
  j["patent_id"] = e.patent_id;
  j["label"] = to_string(e.label);
  j["difficulty"] = to_string(e.difficulty);
  j["source"] = to_string(e.source);
  j["annotator_id"] = e.annotator_id ? json(*e.annotator_id) : json(nullptr);
  j["labeled_at"] = e.labeled_at;
  return j;
}

}  // namespace

std::vector<PatentRecord> parse_jsonl(std::istream& in) {
  std::vector<PatentRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(ErrorCode::kParse, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(ErrorCode::kParse, line_no, "expected a JSON object");
    auto id = obj.find("patent_id");
    if (id == obj.end() || !id->is_string() || id->get<std::string>().empty())
      throw ParseError(ErrorCode::kValidation, line_no, "missing patent_id");
    PatentRecord r;
    try {
      r.patent_id = id->get<std::string>();
      r.title = opt_string(obj, "title");
      r.abstract_text = opt_string(obj, "abstract");
      r.claims = opt_string(obj, "claims");
      r.description = opt_string(obj, "description");
      r.cpc_codes = opt_string_list(obj, "cpc_codes");
      r.citations = opt_string_list(obj, "citations");
      r.family_id = opt_string(obj, "family_id");
      auto date = opt_string(obj, "grant_date");
      if (!date.empty()) r.grant_date = date;
    } catch (const std::invalid_argument& e) {
      throw ParseError(ErrorCode::kParse, line_no, e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::string to_json_line(const PatentRecord& record) { return record_to_json(record).dump(); }

void write_jsonl(std::ostream& out, const std::vector<PatentRecord>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::string to_json_line(const LabeledExample& example) { return label_to_json(example).dump(); }

LabeledExample label_from_json_line(const std::string& line) {
  std::istringstream in(line);
  auto labels = parse_labels_jsonl(in);
  if (labels.size() != 1) throw Error(ErrorCode::kParse, "expected exactly one label object");
  return labels.front();
}

std::vector<LabeledExample> parse_labels_jsonl(std::istream& in) {
  std::vector<LabeledExample> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(ErrorCode::kParse, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(ErrorCode::kParse, line_no, "expected a JSON object");
    try {
      LabeledExample e;
      e.patent_id = opt_string(obj, "patent_id");
      if (e.patent_id.empty()) throw ParseError(ErrorCode::kValidation, line_no, "missing patent_id");
      e.label = parse_label(opt_string(obj, "label"));
      e.difficulty = parse_difficulty(opt_string(obj, "difficulty"));
      e.source = parse_source(opt_string(obj, "source"));
      auto annotator = opt_string(obj, "annotator_id");
      if (!annotator.empty()) e.annotator_id = annotator;
      e.labeled_at = opt_string(obj, "labeled_at");
      auto violations = validate(e);
      if (!violations.empty())
        throw ParseError(ErrorCode::kValidation, line_no,
                         violations.front().field + ": " + violations.front().message);
      labels.push_back(std::move(e));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& err) {
      throw ParseError(ErrorCode::kValidation, line_no, err.what());
    } catch (const std::invalid_argument& err) {
      throw ParseError(ErrorCode::kParse, line_no, err.what());
    }
  }
  return labels;
}

void write_labels_jsonl(std::ostream& out, const std::vector<LabeledExample>& labels) {
  for (const auto& e : labels) out << label_to_json(e).dump() << '\n';
}

// ---- TSV -------------------------------------------------------------------

namespace {

struct TsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // 1-based line numbers in the file

  std::optional<std::size_t> column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  }

  std::size_t require(const std::string& name, const std::string& table) const {
    auto c = column(name);
    if (!c) throw Error(ErrorCode::kFormat, table + ": missing column '" + name + "'");
    return *c;
  }
};

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return out;
}

TsvTable read_tsv(const NamedStream& input) {
  if (input.stream == nullptr) throw Error(ErrorCode::kInvalidArgument, input.name + ": null stream");
  TsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(*input.stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line.empty()) throw Error(ErrorCode::kFormat, input.name + ": missing header row");
      table.header = split_tabs(line);
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != table.header.size()) {
      throw ParseError(ErrorCode::kFormat, line_no,
                       input.name + ": expected " + std::to_string(table.header.size()) +
                           " columns, found " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.row_lines.push_back(line_no);
  }
  if (!have_header) throw Error(ErrorCode::kFormat, input.name + ": missing header row");
  return table;
}

}  // namespace

TsvIngestResult parse_patentsview_tsv(const TsvInputs& inputs, const TsvColumnMap& columns) {
  TsvIngestResult result;
  const auto patents = read_tsv(inputs.patents);
  const auto& pname = inputs.patents.name;
  const std::size_t id_col = patents.require(columns.patent_id, pname);
  const auto title_col = patents.column(columns.title);
  const auto abstract_col = patents.column(columns.abstract_text);
  const auto claims_col = patents.column(columns.claims);
  const auto desc_col = patents.column(columns.description);
  const auto family_col = patents.column(columns.family_id);
  const auto date_col = patents.column(columns.grant_date);

  std::unordered_map<std::string, std::size_t> by_id;
  for (const auto& row : patents.rows) {
    PatentRecord r;
    r.patent_id = row[id_col];
    if (title_col) r.title = row[*title_col];
    if (abstract_col) r.abstract_text = row[*abstract_col];
    if (claims_col) r.claims = row[*claims_col];
    if (desc_col) r.description = row[*desc_col];
    if (family_col) r.family_id = row[*family_col];
    if (date_col && !row[*date_col].empty()) r.grant_date = row[*date_col];
    by_id.emplace(r.patent_id, result.records.size());
    result.records.push_back(std::move(r));
  }

  if (inputs.cpc) {
    const auto cpc = read_tsv(*inputs.cpc);
    const auto pid = cpc.require(columns.cpc_patent_id, inputs.cpc->name);
    const auto code = cpc.require(columns.cpc_code, inputs.cpc->name);
    for (const auto& row : cpc.rows) {
      auto it = by_id.find(row[pid]);
      if (it == by_id.end()) {
        ++result.unmatched_cpc_rows;
        continue;
      }
      auto& codes = result.records[it->second].cpc_codes;
      if (std::find(codes.begin(), codes.end(), row[code]) == codes.end()) codes.push_back(row[code]);
    }
    if (result.unmatched_cpc_rows > 0)
      result.warnings.push_back(std::to_string(result.unmatched_cpc_rows) +
                                " CPC row(s) reference unknown patents");
  }

  if (inputs.citations) {
    const auto cit = read_tsv(*inputs.citations);
    const auto pid = cit.require(columns.citation_patent_id, inputs.citations->name);
    const auto target = cit.require(columns.citation_target, inputs.citations->name);
    for (const auto& row : cit.rows) {
      auto it = by_id.find(row[pid]);
      if (it == by_id.end()) {
        ++result.unmatched_citation_rows;
        continue;
      }
      auto& cites = result.records[it->second].citations;
      if (row[target] != row[pid] &&
          std::find(cites.begin(), cites.end(), row[target]) == cites.end())
        cites.push_back(row[target]);
    }
    if (result.unmatched_citation_rows > 0)
      result.warnings.push_back(std::to_string(result.unmatched_citation_rows) +
                                " citation row(s) reference unknown patents");
  }

  if (inputs.claims) {
    const auto cl = read_tsv(*inputs.claims);
    const auto pid = cl.require(columns.claim_patent_id, inputs.claims->name);
    const auto text = cl.require(columns.claim_text, inputs.claims->name);
    const auto seq = cl.column(columns.claim_sequence);
    std::map<std::size_t, std::vector<std::pair<long, std::string>>> pieces;
    for (std::size_t i = 0; i < cl.rows.size(); ++i) {
      const auto& row = cl.rows[i];
      auto it = by_id.find(row[pid]);
      if (it == by_id.end()) {
        ++result.unmatched_claim_rows;
        continue;
      }
      long order = static_cast<long>(i);
      if (seq) {
        try {
          order = std::stol(row[*seq]);
        } catch (const std::exception&) {
          throw ParseError(ErrorCode::kFormat, cl.row_lines[i],
                           inputs.claims->name + ": non-numeric claim sequence");
        }
      }
      pieces[it->second].emplace_back(order, row[text]);
    }
    for (auto& [pos, list] : pieces) {
      std::stable_sort(list.begin(), list.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::string joined;
      for (const auto& [_, t] : list) {
        if (!joined.empty()) joined.push_back('\n');
        joined += t;
      }
      result.records[pos].claims = std::move(joined);
    }
    if (result.unmatched_claim_rows > 0)
      result.warnings.push_back(std::to_string(result.unmatched_claim_rows) +
                                " claim row(s) reference unknown patents");
  }
  return result;
}

// ---- Store -----------------------------------------------------------------

CorpusStore::CorpusStore(std::vector<PatentRecord> records, std::string ingest_source)
    : records_(std::move(records)), ingest_source_(std::move(ingest_source)) {
  positions_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    auto violations = validate(r);
    if (!violations.empty()) {
      throw Error(ErrorCode::kValidation, "record '" + r.patent_id + "': " +
                                              violations.front().field + ": " +
                                              violations.front().message);
    }
    if (!positions_.emplace(r.patent_id, i).second)
      throw Error(ErrorCode::kValidation, "duplicate patent_id '" + r.patent_id + "'");
  }
}

CorpusStore::CorpusStore(const CorpusStore& other)
    : records_(other.records_), positions_(other.positions_), ingest_source_(other.ingest_source_) {
  std::shared_lock lock(other.labels_mutex_);
  labels_ = other.labels_;
}

CorpusStore& CorpusStore::operator=(const CorpusStore& other) {
  if (this == &other) return *this;
  records_ = other.records_;
  positions_ = other.positions_;
  ingest_source_ = other.ingest_source_;
  std::map<std::string, LabeledExample, std::less<>> copy;
  {
    std::shared_lock lock(other.labels_mutex_);
    copy = other.labels_;
  }
  std::unique_lock lock(labels_mutex_);
  labels_ = std::move(copy);
  return *this;
}

bool CorpusStore::contains(std::string_view patent_id) const {
  return positions_.find(std::string(patent_id)) != positions_.end();
}

const PatentRecord* CorpusStore::find(std::string_view patent_id) const {
  auto it = positions_.find(std::string(patent_id));
  return it == positions_.end() ? nullptr : &records_[it->second];
}

std::optional<std::size_t> CorpusStore::position(std::string_view patent_id) const {
  auto it = positions_.find(std::string(patent_id));
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

const PatentRecord& CorpusStore::record(std::string_view patent_id) const {
  const auto* r = find(patent_id);
  if (r == nullptr) throw Error(ErrorCode::kNotFound, "unknown patent '" + std::string(patent_id) + "'");
  return *r;
}

void CorpusStore::put_label(const LabeledExample& example) {
  if (!contains(example.patent_id))
    throw Error(ErrorCode::kNotFound, "label for unknown patent '" + example.patent_id + "'");
  auto violations = validate(example);
  if (!violations.empty())
    throw Error(ErrorCode::kValidation, "label for '" + example.patent_id + "': " +
                                            violations.front().message);
  std::unique_lock lock(labels_mutex_);
  labels_.insert_or_assign(example.patent_id, example);
}

void CorpusStore::put_labels(const std::vector<LabeledExample>& examples) {
  for (const auto& e : examples) put_label(e);
}

std::optional<LabeledExample> CorpusStore::label(std::string_view patent_id) const {
  std::shared_lock lock(labels_mutex_);
  auto it = labels_.find(patent_id);
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

std::vector<LabeledExample> CorpusStore::labels() const {
  std::shared_lock lock(labels_mutex_);
  std::vector<LabeledExample> out;
  out.reserve(labels_.size());
  for (const auto& [_, e] : labels_) out.push_back(e);
  return out;
}

std::size_t CorpusStore::label_count() const {
  std::shared_lock lock(labels_mutex_);
  return labels_.size();
}

Provenance CorpusStore::provenance() const {
  return {ingest_source_, records_.size(), label_count()};
}

void CorpusStore::save(const std::string& directory) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory '" + directory + "': " + ec.message());
  {
    std::ofstream out(fs::path(directory) / "patents.jsonl", std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write patents.jsonl in '" + directory + "'");
    write_jsonl(out, records_);
  }
  write_labels_file((fs::path(directory) / "labels.jsonl").string(), labels());
}

CorpusStore CorpusStore::load(const std::string& directory) {
  namespace fs = std::filesystem;
  const auto patents = fs::path(directory) / "patents.jsonl";
  CorpusStore store(read_jsonl_file(patents.string()), patents.string());
  const auto labels = fs::path(directory) / "labels.jsonl";
  if (fs::exists(labels)) store.put_labels(read_labels_file(labels.string()));
  return store;
}

std::vector<PatentRecord> read_jsonl_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  try {
    return parse_jsonl(in);
  } catch (const ParseError& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::vector<LabeledExample> read_labels_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return parse_labels_jsonl(in);
}

void write_labels_file(const std::string& path, const std::vector<LabeledExample>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  write_labels_jsonl(out, labels);
}

std::vector<std::string> read_id_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!blank(line)) ids.push_back(line);
  }
  return ids;
}

void write_id_file(const std::string& path, const std::vector<std::string>& ids) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  for (const auto& id : ids) out << id << '\n';
}

}  // namespace patland
