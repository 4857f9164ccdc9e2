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

#include "screenlens/docmodel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace screenlens::docmodel {
namespace {

using namespace std::chrono;

constexpr std::string_view kFieldNames[] = {"id",   "timestamp",      "category",
                                            "text", "previous_image", "next_image"};

struct CivilTime {
  int year, month, day, hour, minute, second;
};

CivilTime to_civil(Timestamp ts) {
  const auto day = floor<days>(ts);
  const year_month_day ymd{day};
  const hh_mm_ss hms{ts - day};
  return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
          static_cast<int>(static_cast<unsigned>(ymd.day())), static_cast<int>(hms.hours().count()),
          static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count())};
}

bool read_digits(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return true;
}

std::optional<Timestamp> from_civil(const CivilTime& c) {
  const year_month_day ymd{year{c.year}, month{static_cast<unsigned>(c.month)},
                           day{static_cast<unsigned>(c.day)}};
  if (!ymd.ok() || c.hour > 23 || c.minute > 59 || c.second > 59) return std::nullopt;
  return sys_days{ymd} + hours{c.hour} + minutes{c.minute} + seconds{c.second};
}

std::string_view field_value(const std::optional<std::string>& v) {
  return v ? std::string_view(*v) : std::string_view();
}

} // namespace

std::string format_iso(Timestamp ts) {
  const auto c = to_civil(ts);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

std::string format_compact(Timestamp ts) {
  const auto c = to_civil(ts);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d%02d%02dT%02d%02d%02d", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

Timestamp parse_timestamp(std::string_view raw) {
  CivilTime c{};
  std::string_view s = raw;
  bool ok = false;
  if (s.size() >= 19 && s[4] == '-') {
    ok = read_digits(s, 0, 4, c.year) && read_digits(s, 5, 2, c.month) && s[7] == '-' &&
         read_digits(s, 8, 2, c.day) && (s[10] == 'T' || s[10] == ' ') &&
         read_digits(s, 11, 2, c.hour) && s[13] == ':' && read_digits(s, 14, 2, c.minute) &&
         s[16] == ':' && read_digits(s, 17, 2, c.second);
    const auto rest = s.substr(19);
    ok = ok && (rest.empty() || rest == "Z" || rest == "+00:00");
  } else if (s.size() == 15) {
    ok = read_digits(s, 0, 4, c.year) && read_digits(s, 4, 2, c.month) &&
         read_digits(s, 6, 2, c.day) && s[8] == 'T' && read_digits(s, 9, 2, c.hour) &&
         read_digits(s, 11, 2, c.minute) && read_digits(s, 13, 2, c.second);
  }
  if (!ok) throw TimestampError(std::string(raw));
  const auto ts = from_civil(c);
  if (!ts) throw TimestampError(std::string(raw));
  return *ts;
}

std::string make_id(std::string_view subject, Timestamp captured_at) {
  if (subject.empty() || subject.find('_') != std::string_view::npos)
    throw InvalidSubject(std::string(subject));
  std::string id(subject);
  id += '_';
  id += format_compact(captured_at);
  return id;
}

ParsedId parse_id(std::string_view id) {
  const auto sep = id.find('_');
  if (sep == std::string_view::npos || sep == 0)
    throw SchemaError("id", "'" + std::string(id) + "' is not <subject>_<YYYYMMDDTHHMMSS>");
  try {
    return {std::string(id.substr(0, sep)), parse_timestamp(id.substr(sep + 1))};
  } catch (const TimestampError&) {
    throw SchemaError("id", "'" + std::string(id) + "' is not <subject>_<YYYYMMDDTHHMMSS>");
  }
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default:
      // Parsers fold raw CR into LF; other controls are not legal raw XML.
      if ((c < 0x20 && c != '\n' && c != '\t') || c == 0x7F) {
        out += "&#" + std::to_string(c) + ";";
      } else {
        out += ch;
      }
    }
  }
  return out;
}

std::string to_xml(std::span<const ScreenshotDocument> docs) {
  std::string out = "<add>\n";
  for (const auto& d : docs) {
    const std::string ts = format_iso(d.timestamp);
    const std::string_view values[] = {d.id,   ts, field_value(d.category),
                                       d.text, field_value(d.previous_image),
                                       field_value(d.next_image)};
    out += "    <doc>\n";
    for (std::size_t i = 0; i < std::size(kFieldNames); ++i) {
      out += "    <field name=\"";
      out += kFieldNames[i];
      out += "\">";
      out += xml_escape(values[i]);
      out += "</field>\n";
    }
    out += "    </doc>\n";
  }
  out += "</add>\n";
  return out;
}

std::string to_xml(const ScreenshotDocument& doc) { return to_xml(std::span(&doc, 1)); }

std::vector<ScreenshotDocument> from_xml(std::string_view xml) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw SchemaError("xml", e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  const pt::ptree* add = nullptr;
  for (const auto& [name, node] : tree) {
    if (name == "<xmlcomment>") continue;
    if (name != "add") throw SchemaError(name, "expected <add> as the root element");
    if (add) throw SchemaError("add", "more than one root element");
    add = &node;
  }
  if (!add) throw SchemaError("add", "missing root element");

  std::vector<ScreenshotDocument> docs;
  for (const auto& [name, node] : *add) {
    if (name == "<xmlcomment>" || name == "<xmlattr>") continue;
    if (name != "doc") throw SchemaError(name, "unexpected element inside <add>");

    std::map<std::string, std::string> fields;
    for (const auto& [fname, fnode] : node) {
      if (fname == "<xmlcomment>") continue;
      if (fname != "field") throw SchemaError(fname, "unexpected element inside <doc>");
      const auto attr = fnode.get_optional<std::string>("<xmlattr>.name");
      if (!attr) throw SchemaError("field", "missing name attribute");
      if (std::find(std::begin(kFieldNames), std::end(kFieldNames), *attr) ==
          std::end(kFieldNames))
        throw SchemaError(*attr, "unknown field");
      if (!fields.emplace(*attr, fnode.data()).second)
        throw SchemaError(*attr, "field repeated");
    }

    ScreenshotDocument doc;
    const auto id = fields.find("id");
    if (id == fields.end() || id->second.empty()) throw SchemaError("id", "missing document id");
    doc.id = id->second;

    const auto ts = fields.find("timestamp");
    if (ts == fields.end()) throw SchemaError("timestamp", "missing in document " + doc.id);
    if (ts->second.empty()) {
      // Fall back to the capture time embedded in the id.
      try {
        doc.timestamp = parse_id(doc.id).timestamp;
      } catch (const SchemaError&) {
        throw TimestampError(ts->second);
      }
    } else {
      doc.timestamp = parse_timestamp(ts->second);
    }

    auto optional_field = [&](const char* key) -> std::optional<std::string> {
      const auto it = fields.find(key);
      if (it == fields.end() || it->second.empty()) return std::nullopt;
      return it->second;
    };
    doc.category = optional_field("category");
    if (const auto it = fields.find("text"); it != fields.end()) doc.text = it->second;
    doc.previous_image = optional_field("previous_image");
    doc.next_image = optional_field("next_image");
    docs.push_back(std::move(doc));
  }
  return docs;
}

namespace {

// Per-subject index lists, each sorted by (timestamp, id).
std::map<std::string, std::vector<std::size_t>> timelines(const std::vector<ScreenshotDocument>& docs) {
  std::set<std::string_view> seen;
  for (const auto& d : docs)
    if (!seen.insert(d.id).second) throw DuplicateId(d.id);

  std::map<std::string, std::vector<std::size_t>> by_subject;
  for (std::size_t i = 0; i < docs.size(); ++i)
    by_subject[parse_id(docs[i].id).subject].push_back(i);
  for (auto& [subject, members] : by_subject) {
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      if (docs[a].timestamp != docs[b].timestamp) return docs[a].timestamp < docs[b].timestamp;
      return docs[a].id < docs[b].id;
    });
  }
  return by_subject;
}

std::optional<std::string> non_empty(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

} // namespace

std::vector<ScreenshotDocument> resolve_image_paths(std::vector<ScreenshotDocument> docs) {
  for (const auto& [subject, members] : timelines(docs)) {
    for (std::size_t k = 0; k < members.size(); ++k) {
      auto& d = docs[members[k]];
      if (!d.image_path.empty()) continue;
      if (k > 0 && docs[members[k - 1]].next_image)
        d.image_path = *docs[members[k - 1]].next_image;
      else if (k + 1 < members.size() && docs[members[k + 1]].previous_image)
        d.image_path = *docs[members[k + 1]].previous_image;
    }
  }
  return docs;
}

std::vector<ScreenshotDocument> link_timeline(std::vector<ScreenshotDocument> docs) {
  for (const auto& [subject, members] : timelines(docs)) {
    for (std::size_t k = 0; k < members.size(); ++k) {
      auto& d = docs[members[k]];
      d.previous_image = k > 0 ? non_empty(docs[members[k - 1]].image_path) : std::nullopt;
      d.next_image = k + 1 < members.size() ? non_empty(docs[members[k + 1]].image_path) : std::nullopt;
    }
  }
  return docs;
}

} // namespace screenlens::docmodel
