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

#ifndef PATLAND_CORPUS_HPP_
#define PATLAND_CORPUS_HPP_

#include <cstddef>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace patland {

// Cooperative Patent Classification code, e.g. "A01B1/024".
//
// Grammar: section letter, two class digits, subclass letter, then an
// optional group of the form <1-4 digits>/<2-6 digits>.
struct CpcCode {
  char section = 'A';
  std::string class_digits;  // exactly two digits
  char subclass_letter = 'A';
  std::string group;  // "1/024" or empty

  static std::optional<CpcCode> parse(std::string_view text);
  // Throws Error(kValidation) on malformed input.
  static CpcCode parse_or_throw(std::string_view text);

  std::string str() const;
  // Section + class + subclass, e.g. "A01B".
  std::string subclass() const;
  bool has_group() const { return !group.empty(); }

  friend bool operator==(const CpcCode&, const CpcCode&) = default;
  friend auto operator<=>(const CpcCode& a, const CpcCode& b) { return a.str() <=> b.str(); }
};

struct PatentRecord {
  std::string patent_id;
  std::string title;
  std::string abstract_text;
  std::string claims;       // individual claims joined by '\n'
  std::string description;  // may be empty
  std::vector<std::string> cpc_codes;
  std::vector<std::string> citations;
  std::string family_id;  // empty = singleton family
  std::optional<std::string> grant_date;  // YYYY-MM-DD

  friend bool operator==(const PatentRecord&, const PatentRecord&) = default;
};

struct Violation {
  std::string field;
  std::string message;
};

// Empty iff every record-level invariant holds.
std::vector<Violation> validate(const PatentRecord& record);

enum class Label { kPositive, kNegative };
enum class Difficulty { kEasy, kHard };
enum class Source { kSeed, kAntiSeed, kAnnotator };

// The four dataset categories.
enum class Category { kHardPositive, kHardNegative, kEasyPositive, kEasyNegative };

const char* to_string(Label label);
const char* to_string(Difficulty difficulty);
const char* to_string(Source source);
const char* to_string(Category category);
Label parse_label(std::string_view text);
Difficulty parse_difficulty(std::string_view text);
Source parse_source(std::string_view text);

struct LabeledExample {
  std::string patent_id;
  Label label = Label::kPositive;
  Difficulty difficulty = Difficulty::kEasy;
  Source source = Source::kSeed;
  std::optional<std::string> annotator_id;
  std::string labeled_at;  // RFC 3339

  Category category() const;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

// Source-specific invariants (seeds are easy positives, and so on).
std::vector<Violation> validate(const LabeledExample& example);

LabeledExample make_seed(std::string patent_id, std::string labeled_at = {});
LabeledExample make_antiseed(std::string patent_id, std::string labeled_at = {});
LabeledExample make_annotation(std::string patent_id, Label label, std::string annotator_id,
                               std::string labeled_at = {});

// ---- JSONL / TSV ingestion -------------------------------------------------

// One JSON object per line; blank lines are ignored. Throws ParseError with
// the 1-based line number on malformed JSON or a missing patent_id.
std::vector<PatentRecord> parse_jsonl(std::istream& in);
void write_jsonl(std::ostream& out, const std::vector<PatentRecord>& records);
std::string to_json_line(const PatentRecord& record);

std::vector<LabeledExample> parse_labels_jsonl(std::istream& in);
void write_labels_jsonl(std::ostream& out, const std::vector<LabeledExample>& labels);
std::string to_json_line(const LabeledExample& example);
// Parses a single label object; throws like parse_labels_jsonl.
LabeledExample label_from_json_line(const std::string& line);

struct NamedStream {
  std::string name;
  std::istream* stream = nullptr;
};

// Column names used by the PatentsView-style adapter.
struct TsvColumnMap {
  std::string patent_id = "patent_id";
  std::string title = "patent_title";
  std::string abstract_text = "patent_abstract";
  std::string claims = "claims";  // optional column of the patent table
  std::string description = "description";
  std::string family_id = "family_id";
  std::string grant_date = "patent_date";

  std::string cpc_patent_id = "patent_id";
  std::string cpc_code = "cpc_code";

  std::string citation_patent_id = "patent_id";
  std::string citation_target = "citation_patent_id";

  std::string claim_patent_id = "patent_id";
  std::string claim_text = "claim_text";
  std::string claim_sequence = "claim_sequence";
};

struct TsvInputs {
  NamedStream patents;  // required
  std::optional<NamedStream> cpc;
  std::optional<NamedStream> citations;
  std::optional<NamedStream> claims;
};

struct TsvIngestResult {
  std::vector<PatentRecord> records;
  std::size_t unmatched_cpc_rows = 0;
  std::size_t unmatched_citation_rows = 0;
  std::size_t unmatched_claim_rows = 0;
  std::vector<std::string> warnings;
};

TsvIngestResult parse_patentsview_tsv(const TsvInputs& inputs, const TsvColumnMap& columns = {});

// ---- Store -----------------------------------------------------------------

struct Provenance {
  std::string ingest_source;
  std::size_t record_count = 0;
  std::size_t label_count = 0;
};

// Records are immutable after construction; labels may be appended by one
// writer while any number of readers query the store.
class CorpusStore {
 public:
  CorpusStore() = default;
  // Throws Error(kValidation) on duplicate ids or record violations.
  explicit CorpusStore(std::vector<PatentRecord> records, std::string ingest_source = {});

  CorpusStore(const CorpusStore& other);
  CorpusStore& operator=(const CorpusStore& other);

  std::size_t size() const { return records_.size(); }
  const std::vector<PatentRecord>& records() const { return records_; }
  bool contains(std::string_view patent_id) const;
  const PatentRecord& record(std::string_view patent_id) const;  // throws kNotFound
  const PatentRecord* find(std::string_view patent_id) const;
  std::optional<std::size_t> position(std::string_view patent_id) const;

  // Appends or replaces the label of patent_id. Throws kNotFound if the id
  // does not resolve to a record, kValidation if the example is malformed.
  void put_label(const LabeledExample& example);
  void put_labels(const std::vector<LabeledExample>& examples);
  std::optional<LabeledExample> label(std::string_view patent_id) const;
  std::vector<LabeledExample> labels() const;  // sorted by patent_id
  std::size_t label_count() const;

  Provenance provenance() const;

  // Writes patents.jsonl and labels.jsonl into an existing directory.
  void save(const std::string& directory) const;
  static CorpusStore load(const std::string& directory);

 private:
  std::vector<PatentRecord> records_;
  std::unordered_map<std::string, std::size_t> positions_;
  std::string ingest_source_;

  mutable std::shared_mutex labels_mutex_;
  std::map<std::string, LabeledExample, std::less<>> labels_;
};

std::vector<PatentRecord> read_jsonl_file(const std::string& path);
std::vector<LabeledExample> read_labels_file(const std::string& path);
void write_labels_file(const std::string& path, const std::vector<LabeledExample>& labels);
std::vector<std::string> read_id_file(const std::string& path);
void write_id_file(const std::string& path, const std::vector<std::string>& ids);

}  // namespace patland

#endif  // PATLAND_CORPUS_HPP_
