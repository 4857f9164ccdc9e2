// Copyright 2026 The ScreenLens Authors
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

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "screenlens/docmodel.hpp"

using namespace screenlens::docmodel;
using fixtures::at;

TEST_CASE("make_id") {
  CHECK(make_id("s01", at(2017, 3, 2, 14, 5, 9)) == "s01_20170302T140509");
  CHECK_THROWS_AS(make_id("", at(2017, 3, 2, 14, 5, 9)), InvalidSubject);
  CHECK_THROWS_AS(make_id("a_b", at(2017, 3, 2, 14, 5, 9)), InvalidSubject);
  CHECK(make_id("s01", at(2017, 3, 2, 14, 5, 9)) != make_id("s01", at(2017, 3, 2, 14, 5, 10)));

  const auto parsed = parse_id("s01_20170302T140509");
  CHECK(parsed.subject == "s01");
  CHECK(parsed.timestamp == at(2017, 3, 2, 14, 5, 9));
  CHECK_THROWS_AS(parse_id("nounderscore"), SchemaError);
  CHECK_THROWS_AS(parse_id("s01_2017"), SchemaError);

  SUBCASE("injective at second resolution") {
    std::mt19937 rng(12);
    std::set<std::string> ids;
    std::set<std::pair<std::string, Timestamp>> keys;
    for (int i = 0; i < 2000; ++i) {
      const std::string subject = "u" + std::to_string(rng() % 7);
      const auto ts = fixtures::random_time(rng);
      keys.insert({subject, ts});
      ids.insert(make_id(subject, ts));
    }
    CHECK(ids.size() == keys.size());
  }
}

TEST_CASE("timestamps") {
  CHECK(format_iso(at(2017, 3, 2, 14, 5, 9)) == "2017-03-02T14:05:09Z");
  CHECK(format_compact(at(2017, 3, 2, 14, 5, 9)) == "20170302T140509");
  CHECK(parse_timestamp("2017-03-02T14:05:09Z") == at(2017, 3, 2, 14, 5, 9));
  CHECK(parse_timestamp("2017-03-02T14:05:09") == at(2017, 3, 2, 14, 5, 9));
  CHECK(parse_timestamp("2017-03-02T14:05:09+00:00") == at(2017, 3, 2, 14, 5, 9));
  CHECK(parse_timestamp("20170302T140509") == at(2017, 3, 2, 14, 5, 9));
  CHECK_THROWS_AS(parse_timestamp("2017-02-30T00:00:00Z"), TimestampError);
  CHECK_THROWS_AS(parse_timestamp("yesterday"), TimestampError);
  CHECK_THROWS_AS(parse_timestamp("2017-03-02T25:00:00Z"), TimestampError);
  try {
    parse_timestamp("bogus");
  } catch (const TimestampError& e) {
    CHECK(e.raw() == "bogus");
  }
}

TEST_CASE("to_xml") {
  ScreenshotDocument d;
  d.id = "s01_20170302T140509";
  d.timestamp = at(2017, 3, 2, 14, 5, 9);
  const std::string expected =
      "<add>\n"
      "    <doc>\n"
      "    <field name=\"id\">s01_20170302T140509</field>\n"
      "    <field name=\"timestamp\">2017-03-02T14:05:09Z</field>\n"
      "    <field name=\"category\"></field>\n"
      "    <field name=\"text\"></field>\n"
      "    <field name=\"previous_image\"></field>\n"
      "    <field name=\"next_image\"></field>\n"
      "    </doc>\n"
      "</add>\n";
  CHECK(to_xml(d) == expected);
  CHECK(from_xml(to_xml(d)) == std::vector<ScreenshotDocument>{d});

  d.text = "if a < b && c > d";
  const auto xml = to_xml(d);
  CHECK(xml.find("a &lt; b &amp;&amp; c &gt; d") != std::string::npos);
  CHECK(from_xml(xml).front().text == d.text);

  SUBCASE("round trip on hostile documents") {
    std::mt19937 rng(500);
    std::vector<ScreenshotDocument> docs;
    for (int i = 0; i < 100; ++i) docs.push_back(fixtures::random_document(rng, i));
    CHECK(from_xml(to_xml(docs)) == docs);
  }
}

TEST_CASE("from_xml") {
  const std::string two =
      "<add><doc><field name=\"id\">a_20170101T000000</field><field name=\"timestamp\">2017-01-01T00:00:00Z</field></doc>"
      "<doc><field name=\"id\">a_20170101T000005</field><field name=\"timestamp\"></field>"
      "<field name=\"category\">Web</field></doc></add>";
  const auto docs = from_xml(two);
  REQUIRE(docs.size() == 2);
  CHECK(docs[1].timestamp == at(2017, 1, 1, 0, 0, 5));
  CHECK(docs[1].category == std::optional<std::string>("Web"));
  CHECK_FALSE(docs[0].category.has_value());

  try {
    from_xml("<add><doc><field name=\"timestamp\">2017-01-01T00:00:00Z</field></doc></add>");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.element() == "id");
  }
  try {
    from_xml("<add><doc><field name=\"id\">x_20170101T000000</field><field name=\"timestamp\">noon</field></doc></add>");
    FAIL("expected TimestampError");
  } catch (const TimestampError& e) {
    CHECK(e.raw() == "noon");
  }
  CHECK_THROWS_AS(from_xml("<add><doc><field name=\"id\">x</field>"), SchemaError);
  CHECK_THROWS_AS(from_xml("<root/>"), SchemaError);
  CHECK_THROWS_AS(from_xml("<add><item/></add>"), SchemaError);
  CHECK_THROWS_AS(from_xml("<add><doc><field name=\"colour\">x</field></doc></add>"), SchemaError);
  CHECK(from_xml("<add>\n</add>\n").empty());
}

TEST_CASE("link_timeline") {
  auto doc = [](const std::string& subject, Timestamp ts) {
    ScreenshotDocument d;
    d.id = make_id(subject, ts);
    d.timestamp = ts;
    d.image_path = "/shots/" + d.id + ".png";
    return d;
  };

  const auto single = link_timeline({doc("s1", at(2017, 1, 1, 0, 0, 0))});
  CHECK_FALSE(single[0].previous_image.has_value());
  CHECK_FALSE(single[0].next_image.has_value());

  const auto three = link_timeline({doc("s1", at(2017, 1, 1, 0, 0, 10)), doc("s1", at(2017, 1, 1, 0, 0, 0)),
                                    doc("s1", at(2017, 1, 1, 0, 0, 5))});
  CHECK(three[2].previous_image == three[1].image_path);
  CHECK(three[2].next_image == three[0].image_path);
  CHECK_FALSE(three[1].previous_image.has_value());
  CHECK_FALSE(three[0].next_image.has_value());

  auto dup = doc("s1", at(2017, 1, 1, 0, 0, 0));
  CHECK_THROWS_AS(link_timeline({dup, dup}), screenlens::DuplicateId);

  SUBCASE("interleaved subjects never cross-link and form one chain each") {
    std::mt19937 rng(31);
    std::vector<ScreenshotDocument> docs;
    std::set<std::string> ids;
    while (docs.size() < 60) {
      auto d = doc("p" + std::to_string(rng() % 4), fixtures::random_time(rng));
      if (ids.insert(d.id).second) docs.push_back(d);
    }
    const auto linked = link_timeline(docs);
    std::map<std::string, const ScreenshotDocument*> by_path;
    for (const auto& d : linked) by_path[d.image_path] = &d;

    std::map<std::string, std::vector<const ScreenshotDocument*>> per_subject;
    for (const auto& d : linked) per_subject[parse_id(d.id).subject].push_back(&d);
    for (auto& [subject, members] : per_subject) {
      std::sort(members.begin(), members.end(),
                [](auto* a, auto* b) { return a->timestamp < b->timestamp; });
      // walk next links from the earliest
      const ScreenshotDocument* cur = members.front();
      CHECK_FALSE(cur->previous_image.has_value());
      std::size_t visited = 1;
      while (cur->next_image) {
        const auto* nxt = by_path.at(*cur->next_image);
        CHECK(parse_id(nxt->id).subject == subject);
        CHECK(nxt->previous_image == cur->image_path);
        cur = nxt;
        ++visited;
      }
      CHECK(visited == members.size());
    }
  }
}

TEST_CASE("resolve_image_paths") {
  std::vector<ScreenshotDocument> docs(3);
  for (int i = 0; i < 3; ++i) {
    docs[i].timestamp = at(2017, 1, 1, 0, 0, i);
    docs[i].id = make_id("s", docs[i].timestamp);
    docs[i].image_path = "/p/" + std::to_string(i) + ".png";
  }
  auto linked = link_timeline(docs);
  for (auto& d : linked) d.image_path.clear();
  const auto resolved = resolve_image_paths(from_xml(to_xml(linked)));
  for (int i = 0; i < 3; ++i) CHECK(resolved[i].image_path == docs[i].image_path);
}
