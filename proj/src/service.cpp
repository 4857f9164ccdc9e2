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

#include "screenlens/service.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "screenlens/docmodel.hpp"
#include "screenlens/utf8.hpp"

namespace screenlens::service {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

Response json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

Response bad_request(const std::string& message) {
  return json_response(400, json{{"error", message}});
}

Response not_found(const std::string& id) {
  return json_response(404, json{{"error", "unknown document"}, {"id", id}});
}

std::optional<std::size_t> parse_size(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

json optional_json(const std::optional<std::string>& v) {
  if (!v) return nullptr;
  return *v;
}

json neighbor_ids(const index::InvertedIndex& idx, const index::Neighbors& n) {
  auto id_of = [&](const std::optional<index::DocOrdinal>& o) -> json {
    if (!o) return nullptr;
    return idx.document(*o).id;
  };
  return json{{"previous", id_of(n.previous)}, {"next", id_of(n.next)}};
}

std::string image_url(const std::string& id) { return "/doc/" + id + "/image"; }

std::string content_type_for(const fs::path& p) {
  std::string ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  return "application/octet-stream";
}

} // namespace

std::variant<SearchRequest, Response> parse_search_request(
    const std::multimap<std::string, std::string>& params) {
  SearchRequest req;
  if (const auto it = params.find("q"); it != params.end()) req.q = it->second;
  if (const auto it = params.find("category"); it != params.end() && !it->second.empty())
    req.category = it->second;
  if (const auto it = params.find("page"); it != params.end()) {
    const auto v = parse_size(it->second);
    if (!v || *v < 1) return bad_request("page must be an integer >= 1");
    req.page = *v;
  }
  if (const auto it = params.find("page_size"); it != params.end()) {
    const auto v = parse_size(it->second);
    if (!v || *v < 1 || *v > kMaxPageSize)
      return bad_request("page_size must be an integer in [1, " + std::to_string(kMaxPageSize) + "]");
    req.page_size = *v;
  }
  return req;
}

IndexSnapshot::IndexSnapshot(std::shared_ptr<const index::InvertedIndex> idx)
    : current_(std::move(idx)) {}

std::shared_ptr<const index::InvertedIndex> IndexSnapshot::get() const {
  std::lock_guard lock(mu_);
  return current_;
}

void IndexSnapshot::replace(std::shared_ptr<const index::InvertedIndex> idx) {
  std::lock_guard lock(mu_);
  current_ = std::move(idx);
}

SearchService::SearchService(std::shared_ptr<const index::InvertedIndex> idx, ServiceOptions options)
    : snapshot_(std::move(idx)), options_(std::move(options)) {}

json SearchService::hit_json(const index::InvertedIndex& idx, const index::SearchHit& hit) const {
  const auto& d = idx.document(hit.doc);
  json j{{"id", d.id},
         {"rank", hit.rank},
         {"timestamp", docmodel::format_iso(d.timestamp)},
         {"category", optional_json(d.category)},
         {"score", hit.score},
         {"excerpt", std::string(utf8::prefix(d.text, kExcerptChars))},
         {"image", image_url(d.id)}};
  const auto n = neighbor_ids(idx, idx.neighbors(hit.doc));
  j["previous"] = n["previous"];
  j["next"] = n["next"];
  return j;
}

Response SearchService::search(const SearchRequest& req) const {
  if (req.page < 1 || req.page_size < 1 || req.page_size > kMaxPageSize)
    return bad_request("invalid page or page_size");
  const auto idx = snapshot_.get();
  const auto hits = idx->rank(req.q, req.category);

  json page = json::array();
  const std::size_t start = (req.page - 1) * req.page_size;
  for (std::size_t i = start; i < hits.size() && i < start + req.page_size; ++i)
    page.push_back(hit_json(*idx, hits[i]));
  return json_response(200, json{{"total", hits.size()},
                                 {"page", req.page},
                                 {"page_size", req.page_size},
                                 {"hits", std::move(page)}});
}

Response SearchService::search(const std::multimap<std::string, std::string>& params) const {
  auto parsed = parse_search_request(params);
  if (auto* err = std::get_if<Response>(&parsed)) return *err;
  return search(std::get<SearchRequest>(parsed));
}

Response SearchService::document(const std::string& id) const {
  const auto idx = snapshot_.get();
  const auto doc = idx->find(id);
  if (!doc) return not_found(id);
  const auto& d = idx->document(*doc);
  json j{{"id", d.id},
         {"timestamp", docmodel::format_iso(d.timestamp)},
         {"category", optional_json(d.category)},
         {"text", d.text},
         {"previous_image", optional_json(d.previous_image)},
         {"next_image", optional_json(d.next_image)},
         {"image", image_url(d.id)}};
  const auto n = neighbor_ids(*idx, idx->neighbors(*doc));
  j["previous"] = n["previous"];
  j["next"] = n["next"];
  return json_response(200, j);
}

Response SearchService::neighbors(const std::string& id) const {
  const auto idx = snapshot_.get();
  const auto doc = idx->find(id);
  if (!doc) return not_found(id);
  json j = neighbor_ids(*idx, idx->neighbors(*doc));
  j["id"] = id;
  return json_response(200, j);
}

std::optional<fs::path> SearchService::image_candidate(const index::InvertedIndex& idx,
                                                       index::DocOrdinal doc) const {
  const auto& d = idx.document(doc);
  std::vector<fs::path> candidates;
  if (!d.image_path.empty()) {
    candidates.emplace_back(d.image_path);
    if (!options_.images_dir.empty())
      candidates.push_back(options_.images_dir / fs::path(d.image_path).filename());
  }
  if (!options_.images_dir.empty())
    for (const char* ext : {".png", ".jpg", ".jpeg", ".PNG", ".JPG", ".JPEG"})
      candidates.push_back(options_.images_dir / (d.id + ext));
  for (const auto& c : candidates)
    if (fs::is_regular_file(c)) return c;
  return std::nullopt;
}

Response SearchService::image(const std::string& id) const {
  const auto idx = snapshot_.get();
  const auto doc = idx->find(id);
  if (!doc) return not_found(id);
  const auto path = image_candidate(*idx, *doc);
  if (!path) return json_response(410, json{{"error", "image file missing"}, {"id", id}});
  std::ifstream in(*path, std::ios::binary);
  if (!in) return json_response(410, json{{"error", "image file unreadable"}, {"id", id}});
  std::ostringstream buf;
  buf << in.rdbuf();
  return {200, buf.str(), content_type_for(*path)};
}

void SearchService::install(httplib::Server& server) const {
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body, r.content_type);
  };
  server.Get("/search", [this, send](const httplib::Request& req, httplib::Response& res) {
    std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
    send(res, search(params));
  });
  server.Get(R"(/doc/([^/]+)/neighbors)", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, neighbors(req.matches[1].str()));
  });
  server.Get(R"(/doc/([^/]+)/image)", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, image(req.matches[1].str()));
  });
  server.Get(R"(/doc/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, document(req.matches[1].str()));
  });
}

std::pair<std::string, int> parse_address(const std::string& addr) {
  std::string host = "127.0.0.1";
  std::string port = addr;
  if (const auto colon = addr.rfind(':'); colon != std::string::npos) {
    if (colon > 0) host = addr.substr(0, colon);
    port = addr.substr(colon + 1);
  }
  const auto p = parse_size(port);
  if (!p || *p == 0 || *p > 65535) throw ConfigError("invalid listen address: " + addr);
  return {host, static_cast<int>(*p)};
}

void serve(const ServeOptions& options) {
  auto idx = std::make_shared<const index::InvertedIndex>(index::InvertedIndex::load(options.index_path));
  const SearchService service(std::move(idx), {options.images_dir});
  httplib::Server server;
  service.install(server);
  if (!server.bind_to_port(options.host, options.port))
    throw IoError("cannot listen on " + options.host + ":" + std::to_string(options.port));
  server.listen_after_bind();
}

} // namespace screenlens::service
