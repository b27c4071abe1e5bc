#include <algorithm>
#include <sstream>

#include "doctest.h"

#include "edumine/random.hpp"
#include "edumine/scoring.hpp"

using namespace edumine;
using namespace edumine::scoring;

namespace {

std::vector<CreditRecord> items(const std::string& sid, Subject s, std::initializer_list<Credit> credits) {
  std::vector<CreditRecord> out;
  int k = 0;
  for (auto c : credits) out.push_back({sid, s, "I" + std::to_string(++k), c});
  return out;
}

std::vector<CreditRecord> random_records(Rng& rng, std::size_t students) {
  std::vector<CreditRecord> out;
  for (std::size_t s = 0; s < students; ++s)
    for (auto subj : kSubjects) {
      if (rng.uniform() < 0.3) continue;
      const std::size_t n = 1 + rng.below(12);
      for (std::size_t i = 0; i < n; ++i)
        out.push_back({"S" + std::to_string(s), subj, "I" + std::to_string(i), static_cast<Credit>(rng.below(3))});
    }
  return out;
}

// Straight from the definition: weighted credit over item count.
double oracle_percent(std::span<const CreditRecord> recs) {
  double points = 0.0;
  for (const auto& r : recs) points += r.credit == Credit::full ? 1.0 : r.credit == Credit::partial ? 0.5 : 0.0;
  return points / static_cast<double>(recs.size()) * 100.0;
}

}  // namespace

TEST_CASE("credit values") {
  CHECK(credit_value(Credit::full) == 1.0);
  CHECK(credit_value(Credit::partial) == 0.5);
  CHECK(credit_value(Credit::none) == 0.0);
}

TEST_CASE("subject score fixtures") {
  using C = Credit;
  CHECK(subject_score(items("a", Subject::maths, {C::full, C::full, C::full, C::full})).percent == 100.0);
  CHECK(subject_score(items("a", Subject::maths, {C::none, C::none, C::none, C::none})).percent == 0.0);
  const auto s = subject_score(items("a", Subject::maths, {C::full, C::full, C::partial, C::none}));
  CHECK(s.percent == 62.5);
  CHECK(s.sum_of_scores == 2.5);
  CHECK(s.total_credit_taken == 4);
  CHECK(s.subject == "maths");
  CHECK_THROWS_AS(subject_score({}), DataError);

  auto mixed = items("a", Subject::maths, {C::full});
  mixed.push_back({"b", Subject::maths, "I9", C::full});
  CHECK_THROWS_AS(subject_score(mixed), DataError);
}

TEST_CASE("aggregate score pools across subjects") {
  using C = Credit;
  auto recs = items("a", Subject::reading, {C::full, C::full});
  auto more = items("a", Subject::science, {C::none, C::none});
  recs.insert(recs.end(), more.begin(), more.end());
  const auto agg = aggregate_score(recs);
  CHECK(agg.percent == 50.0);
  CHECK(agg.subject == "aggregate");

  const auto one = items("a", Subject::science, {C::full, C::partial, C::none});
  CHECK(aggregate_score(one).percent == subject_score(one).percent);

  for (int n = 1; n < 20; ++n) {
    std::vector<CreditRecord> partial;
    for (int i = 0; i < n; ++i) partial.push_back({"a", kSubjects[i % 4], "I" + std::to_string(i), C::partial});
    CHECK(aggregate_score(partial).percent == 50.0);
  }
}

TEST_CASE("scores agree with the definition on random batches") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto recs = random_records(rng, 1);
    if (recs.empty()) continue;
    const auto agg = aggregate_score(recs);
    CHECK(agg.percent == doctest::Approx(oracle_percent(recs)).epsilon(1e-14));
    CHECK(agg.percent >= 0.0);
    CHECK(agg.percent <= 100.0);
    CHECK(agg.sum_of_scores <= static_cast<double>(agg.total_credit_taken));

    double sum = 0.0;
    std::size_t total = 0;
    for (auto subj : kSubjects) {
      std::vector<CreditRecord> part;
      std::copy_if(recs.begin(), recs.end(), std::back_inserter(part),
                   [&](const CreditRecord& r) { return r.subject == subj; });
      if (part.empty()) continue;
      const auto s = subject_score(part);
      CHECK(s.percent >= 0.0);
      CHECK(s.percent <= 100.0);
      sum += s.sum_of_scores;
      total += s.total_credit_taken;
    }
    CHECK(agg.sum_of_scores == sum);
    CHECK(agg.total_credit_taken == total);

    auto shuffled = recs;
    rng.shuffle(std::span<CreditRecord>(shuffled));
    CHECK(aggregate_score(shuffled).percent == agg.percent);
    CHECK(score_table(shuffled) == score_table(recs));
  }
}

TEST_CASE("upgrading one credit never lowers the score") {
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    auto recs = random_records(rng, 1);
    if (recs.empty()) continue;
    const double before = aggregate_score(recs).percent;
    auto& r = recs[rng.below(recs.size())];
    if (r.credit == Credit::full) continue;
    r.credit = static_cast<Credit>(static_cast<int>(r.credit) + 1);
    CHECK(aggregate_score(recs).percent > before);
  }
}

TEST_CASE("score table layout") {
  using C = Credit;
  std::vector<CreditRecord> recs;
  for (const std::string sid : {"B", "A"})
    for (auto subj : {Subject::reading, Subject::maths}) {
      auto r = items(sid, subj, {C::full, C::none});
      recs.insert(recs.end(), r.begin(), r.end());
    }
  auto t = score_table(recs);
  REQUIRE(t.rows() == 2);
  CHECK(t.id(0) == "A");
  CHECK(t.column("reading").missing_count() == 0);
  CHECK(t.column("maths").missing_count() == 0);
  CHECK(t.column("science").missing_count() == 2);
  CHECK(t.column("aggregate").number(0) == 50.0);

  auto no_maths = items("C", Subject::reading, {C::full});
  t = score_table(no_maths);
  CHECK(t.column("maths").missing(0));
  CHECK(t.column("aggregate").number(0) == 100.0);

  t = score_table({});
  CHECK(t.rows() == 0);
  CHECK(t.cols() == 6);

  auto dup = items("C", Subject::reading, {C::full});
  dup.push_back(dup.front());
  CHECK_THROWS_AS(score_table(dup), DataError);
}

TEST_CASE("credit files round-trip") {
  Rng rng(2);
  const auto recs = random_records(rng, 6);
  std::ostringstream out;
  write_credits(out, recs);
  const auto back = parse_credits(out.str());
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].student_id == recs[i].student_id);
    CHECK(back[i].subject == recs[i].subject);
    CHECK(back[i].item_id == recs[i].item_id);
    CHECK(back[i].credit == recs[i].credit);
  }
  CHECK_THROWS_AS(parse_credits("student_id,subject,item_id,credit\nA,art,I1,full\n"), DataError);
  CHECK_THROWS_AS(parse_credits("student_id,subject,item_id,credit\nA,maths,I1,half\n"), DataError);
  CHECK_THROWS_AS(parse_credits("student_id,subject,credit\nA,maths,full\n"), SchemaError);
}
