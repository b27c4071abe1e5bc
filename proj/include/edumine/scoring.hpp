#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edumine/dataset.hpp"

namespace edumine::scoring {

enum class Credit { none, partial, full };
enum class Subject { reading, maths, science, problem_solving };

inline constexpr std::array<Subject, 4> kSubjects = {Subject::reading, Subject::maths,
                                                     Subject::science, Subject::problem_solving};

/// Reserved label of the pooled all-subject score.
inline constexpr std::string_view kAggregate = "aggregate";

std::string_view to_string(Credit credit);
std::string_view to_string(Subject subject);
Credit parse_credit(std::string_view text);
Subject parse_subject(std::string_view text);

struct CreditRecord {
  std::string student_id;
  Subject subject = Subject::reading;
  std::string item_id;
  Credit credit = Credit::none;
};

struct SubjectScore {
  std::string student_id;
  std::string subject;  // subject name or kAggregate
  double sum_of_scores = 0.0;
  std::size_t total_credit_taken = 0;
  double percent = 0.0;
};

/// full = 1, partial = 0.5, none = 0.
double credit_value(Credit credit);

/// Score over one student's items in one subject.
SubjectScore subject_score(std::span<const CreditRecord> records);

/// Score pooled over every item a student took, regardless of subject.
SubjectScore aggregate_score(std::span<const CreditRecord> records);

/// One row per student (sorted by id) with an interval percent column per
/// subject plus the aggregate. A subject the student never took is missing.
/// Throws DataError on a repeated (student, subject, item) triple.
Dataset score_table(std::span<const CreditRecord> records, std::string_view id_name = "student_id");

/// Schema produced by score_table.
std::vector<VariableSpec> score_schema(std::string_view id_name = "student_id");

/// Credit file: header `student_id,subject,item_id,credit`.
std::vector<CreditRecord> parse_credits(std::string_view text);
std::vector<CreditRecord> load_credits(const std::filesystem::path& path);
void write_credits(std::ostream& out, std::span<const CreditRecord> records);

}  // namespace edumine::scoring
