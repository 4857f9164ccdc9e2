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

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "screenlens/index.hpp"

namespace httplib {
class Server;
}

namespace screenlens::service {

inline constexpr std::size_t kDefaultPageSize = 20;
inline constexpr std::size_t kMaxPageSize = 100;
inline constexpr std::size_t kExcerptChars = 200;

struct SearchRequest {
  std::string q;
  std::optional<std::string> category;
  std::size_t page = 1;
  std::size_t page_size = kDefaultPageSize;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Builds a request from raw query parameters. Returns a 400 response when
// page or page_size is missing a valid integer value or out of range.
std::variant<SearchRequest, Response> parse_search_request(
    const std::multimap<std::string, std::string>& params);

// Holds the index currently being served. Readers take a shared_ptr copy for
// the duration of a request, so replace() never tears an in-flight request.
class IndexSnapshot {
public:
  explicit IndexSnapshot(std::shared_ptr<const index::InvertedIndex> idx);

  std::shared_ptr<const index::InvertedIndex> get() const;
  void replace(std::shared_ptr<const index::InvertedIndex> idx);

private:
  mutable std::mutex mu_;
  std::shared_ptr<const index::InvertedIndex> current_;
};

struct ServiceOptions {
  // Fallback location for screenshots: <images_dir>/<basename of stored
  // path>, then <images_dir>/<id>.{png,jpg,jpeg}.
  std::filesystem::path images_dir;
};

// Read-only JSON API over an index snapshot.
class SearchService {
public:
  SearchService(std::shared_ptr<const index::InvertedIndex> idx, ServiceOptions options = {});

  Response search(const SearchRequest& req) const;
  Response search(const std::multimap<std::string, std::string>& params) const;
  Response document(const std::string& id) const;
  Response neighbors(const std::string& id) const;
  Response image(const std::string& id) const;

  void replace_index(std::shared_ptr<const index::InvertedIndex> idx) { snapshot_.replace(std::move(idx)); }

  // Registers GET /search, /doc/{id}, /doc/{id}/image, /doc/{id}/neighbors.
  void install(httplib::Server& server) const;

private:
  nlohmann::json hit_json(const index::InvertedIndex& idx, const index::SearchHit& hit) const;
  std::optional<std::filesystem::path> image_candidate(const index::InvertedIndex& idx,
                                                       index::DocOrdinal doc) const;

  IndexSnapshot snapshot_;
  ServiceOptions options_;
};

struct ServeOptions {
  std::filesystem::path index_path;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path images_dir;
};

// "host:port", ":port" or "port".
std::pair<std::string, int> parse_address(const std::string& addr);

// Loads the index and blocks serving requests.
void serve(const ServeOptions& options);

} // namespace screenlens::service
