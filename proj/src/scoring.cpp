#include "edumine/scoring.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "edumine/csv.hpp"

namespace edumine::scoring {

namespace {

constexpr std::array<std::string_view, 3> kCreditNames = {"none", "partial", "full"};
constexpr std::array<std::string_view, 4> kSubjectNames = {"reading", "maths", "science",
                                                           "problem_solving"};

// Full and partial credits are tallied as integer counts so the score does
// not depend on record order.
SubjectScore finish(std::string student, std::string subject, std::size_t full, std::size_t partial,
                    std::size_t total) {
  SubjectScore s;
  s.student_id = std::move(student);
  s.subject = std::move(subject);
  s.sum_of_scores = static_cast<double>(full) * 1.0 + static_cast<double>(partial) * 0.5;
  s.total_credit_taken = total;
  s.percent = s.sum_of_scores * 100.0 / static_cast<double>(total);
  return s;
}

void count(const CreditRecord& r, std::size_t& full, std::size_t& partial) {
  if (r.credit == Credit::full) ++full;
  if (r.credit == Credit::partial) ++partial;
}

}  // namespace

std::string_view to_string(Credit credit) { return kCreditNames[static_cast<std::size_t>(credit)]; }
std::string_view to_string(Subject subject) { return kSubjectNames[static_cast<std::size_t>(subject)]; }

Credit parse_credit(std::string_view text) {
  for (std::size_t i = 0; i < kCreditNames.size(); ++i)
    if (kCreditNames[i] == text) return static_cast<Credit>(i);
  throw DataError("unknown credit '" + std::string(text) + "' (expected full, partial or none)");
}

Subject parse_subject(std::string_view text) {
  for (std::size_t i = 0; i < kSubjectNames.size(); ++i)
    if (kSubjectNames[i] == text) return static_cast<Subject>(i);
  throw DataError("unknown subject '" + std::string(text) + "'");
}

double credit_value(Credit credit) {
  switch (credit) {
    case Credit::full:
      return 1.0;
    case Credit::partial:
      return 0.5;
    case Credit::none:
      break;
  }
  return 0.0;
}

SubjectScore subject_score(std::span<const CreditRecord> records) {
  if (records.empty()) throw DataError("subject score needs at least one credit record");
  const auto& first = records.front();
  std::size_t full = 0, partial = 0;
  for (const auto& r : records) {
    if (r.student_id != first.student_id || r.subject != first.subject)
      throw DataError("subject score records must share one student and subject");
    count(r, full, partial);
  }
  return finish(first.student_id, std::string(to_string(first.subject)), full, partial,
                records.size());
}

SubjectScore aggregate_score(std::span<const CreditRecord> records) {
  if (records.empty()) throw DataError("aggregate score needs at least one credit record");
  const auto& first = records.front();
  std::size_t full = 0, partial = 0;
  for (const auto& r : records) {
    if (r.student_id != first.student_id)
      throw DataError("aggregate score records must share one student");
    count(r, full, partial);
  }
  return finish(first.student_id, std::string(kAggregate), full, partial, records.size());
}

std::vector<VariableSpec> score_schema(std::string_view id_name) {
  std::vector<VariableSpec> schema{{std::string(id_name), Role::id, Level::nominal}};
  for (auto s : kSubjects) schema.push_back({std::string(to_string(s)), Role::target, Level::interval});
  schema.push_back({std::string(kAggregate), Role::target, Level::interval});
  return schema;
}

Dataset score_table(std::span<const CreditRecord> records, std::string_view id_name) {
  // student -> subject -> records
  std::map<std::string, std::array<std::vector<CreditRecord>, 4>> by_student;
  std::set<std::tuple<std::string_view, Subject, std::string_view>> seen;
  for (const auto& r : records) {
    if (!seen.emplace(r.student_id, r.subject, r.item_id).second)
      throw DataError("duplicate credit record for student '" + r.student_id + "', subject '" +
                      std::string(to_string(r.subject)) + "', item '" + r.item_id + "'");
    by_student[r.student_id][static_cast<std::size_t>(r.subject)].push_back(r);
  }

  const std::size_t n = by_student.size();
  std::vector<std::string> ids;
  std::array<std::vector<double>, 5> values;
  std::array<std::vector<std::uint8_t>, 5> missing;
  for (auto& v : values) v.assign(n, 0.0);
  for (auto& m : missing) m.assign(n, 0);

  std::size_t row = 0;
  for (const auto& [student, subjects] : by_student) {
    ids.push_back(student);
    std::vector<CreditRecord> pooled;
    for (std::size_t k = 0; k < subjects.size(); ++k) {
      if (subjects[k].empty()) {
        missing[k][row] = 1;
        continue;
      }
      values[k][row] = subject_score(subjects[k]).percent;
      pooled.insert(pooled.end(), subjects[k].begin(), subjects[k].end());
    }
    values[4][row] = aggregate_score(pooled).percent;
    ++row;
  }

  std::vector<Column> columns;
  columns.push_back(Column::text(std::move(ids), std::vector<std::uint8_t>(n, 0)));
  for (std::size_t k = 0; k < values.size(); ++k)
    columns.push_back(Column::numeric(std::move(values[k]), std::move(missing[k])));
  return Dataset(score_schema(id_name), std::move(columns));
}

std::vector<CreditRecord> parse_credits(std::string_view text) {
  const csv::Table t = csv::parse(text);
  const std::array<std::string_view, 4> required = {"student_id", "subject", "item_id", "credit"};
  std::array<std::size_t, 4> pos{};
  for (std::size_t k = 0; k < required.size(); ++k) {
    auto it = std::find(t.header.begin(), t.header.end(), required[k]);
    if (it == t.header.end())
      throw SchemaError("credit file lacks column '" + std::string(required[k]) + "'");
    pos[k] = static_cast<std::size_t>(it - t.header.begin());
  }
  std::vector<CreditRecord> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    if (row[pos[0]].empty()) throw DataError("credit record with empty student_id");
    out.push_back({row[pos[0]], parse_subject(row[pos[1]]), row[pos[2]], parse_credit(row[pos[3]])});
  }
  return out;
}

std::vector<CreditRecord> load_credits(const std::filesystem::path& path) {
  return parse_credits(csv::read_text(path));
}

void write_credits(std::ostream& out, std::span<const CreditRecord> records) {
  out << "student_id,subject,item_id,credit\n";
  for (const auto& r : records)
    csv::write_row(out, {r.student_id, std::string(to_string(r.subject)), r.item_id,
                         std::string(to_string(r.credit))});
}

}  // namespace edumine::scoring
