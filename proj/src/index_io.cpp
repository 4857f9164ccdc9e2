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

// On-disk layout, all integers little-endian:
//
//   magic    "SLIX"
//   u32      format version
//   u64      payload length in bytes
//   u32      CRC-32 of the payload
//   payload:
//     f64 k1, f64 b, f64 category_boost
//     u32 document count N
//     N x document:
//       str id, i64 timestamp (unix seconds), opt category, str text,
//       opt previous_image, opt next_image, str image_path
//     field index, text field then category field:
//       N x u32 token length
//       u32 term count, then per term in byte order:
//         str term, u32 posting count, postings x (u32 ordinal, u32 tf)
//
//   str = u32 byte length + bytes; opt = u8 presence flag + str when present.

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "screenlens/index.hpp"

namespace screenlens::index {
namespace {

constexpr char kMagic[4] = {'S', 'L', 'I', 'X'};
constexpr std::size_t kHeaderSize = 4 + 4 + 8 + 4;

class Writer {
public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void opt(const std::optional<std::string>& s) {
    u8(s ? 1 : 0);
    if (s) str(*s);
  }
  std::string& bytes() { return out_; }

private:
  std::string out_;
};

class Reader {
public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::optional<std::string> opt() {
    const auto flag = u8();
    if (flag > 1) throw CorruptIndex("corrupt index: bad optional flag");
    if (flag == 0) return std::nullopt;
    return str();
  }
  bool done() const { return pos_ == in_.size(); }

private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw CorruptIndex("corrupt index: payload truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

std::uint32_t checksum(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

} // namespace

std::string InvertedIndex::serialize() const {
  Writer w;
  w.f64(params_.k1);
  w.f64(params_.b);
  w.f64(params_.category_boost);
  w.u32(static_cast<std::uint32_t>(docs_.size()));
  for (const auto& d : docs_) {
    w.str(d.id);
    w.u64(static_cast<std::uint64_t>(d.timestamp.time_since_epoch().count()));
    w.opt(d.category);
    w.str(d.text);
    w.opt(d.previous_image);
    w.opt(d.next_image);
    w.str(d.image_path);
  }
  for (const FieldIndex* fi : {&text_, &category_}) {
    for (auto len : fi->lengths) w.u32(len);
    std::vector<const std::string*> terms;
    terms.reserve(fi->postings.size());
    for (const auto& [term, _] : fi->postings) terms.push_back(&term);
    std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return *a < *b; });
    w.u32(static_cast<std::uint32_t>(terms.size()));
    for (const auto* term : terms) {
      const auto& list = fi->postings.at(*term);
      w.str(*term);
      w.u32(static_cast<std::uint32_t>(list.size()));
      for (const auto& p : list) {
        w.u32(p.doc);
        w.u32(p.frequency);
      }
    }
  }

  const std::string& payload = w.bytes();
  Writer header;
  header.bytes().append(kMagic, 4);
  header.u32(kFormatVersion);
  header.u64(payload.size());
  header.u32(checksum(payload));
  return header.bytes() + payload;
}

InvertedIndex InvertedIndex::deserialize(std::string_view bytes) {
  if (bytes.size() < kHeaderSize) throw CorruptIndex("corrupt index: file shorter than header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw CorruptIndex("corrupt index: bad magic");
  Reader header(bytes.substr(4, kHeaderSize - 4));
  const std::uint32_t version = header.u32();
  if (version != kFormatVersion)
    throw CorruptIndex("index format version " + std::to_string(version) +
                       " does not match supported version " + std::to_string(kFormatVersion));
  const std::uint64_t length = header.u64();
  const std::uint32_t crc = header.u32();
  const auto payload = bytes.substr(kHeaderSize);
  if (payload.size() != length)
    throw CorruptIndex("corrupt index: payload is " + std::to_string(payload.size()) +
                       " bytes, header says " + std::to_string(length));
  if (checksum(payload) != crc) throw CorruptIndex("corrupt index: checksum mismatch");

  Reader r(payload);
  Bm25Params params;
  params.k1 = r.f64();
  params.b = r.f64();
  params.category_boost = r.f64();
  InvertedIndex idx(params);

  const std::uint32_t n = r.u32();
  idx.docs_.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    ScreenshotDocument d;
    d.id = r.str();
    d.timestamp = docmodel::Timestamp(std::chrono::seconds(static_cast<std::int64_t>(r.u64())));
    d.category = r.opt();
    d.text = r.str();
    d.previous_image = r.opt();
    d.next_image = r.opt();
    d.image_path = r.str();
    if (idx.by_id_.contains(d.id)) throw CorruptIndex("corrupt index: duplicate id " + d.id);
    idx.docs_.push_back(std::move(d));
    idx.register_document(i);
  }

  for (FieldIndex* fi : {&idx.text_, &idx.category_}) {
    fi->lengths.resize(n);
    for (auto& len : fi->lengths) {
      len = r.u32();
      fi->total_length += len;
    }
    std::vector<std::uint64_t> posted(n, 0);
    const std::uint32_t terms = r.u32();
    for (std::uint32_t t = 0; t < terms; ++t) {
      std::string term = r.str();
      const std::uint32_t count = r.u32();
      std::vector<Posting> list;
      list.reserve(count);
      for (std::uint32_t k = 0; k < count; ++k) {
        Posting p{r.u32(), r.u32()};
        if (p.doc >= n || p.frequency == 0 || (!list.empty() && p.doc <= list.back().doc))
          throw CorruptIndex("corrupt index: bad postings for term '" + term + "'");
        posted[p.doc] += p.frequency;
        list.push_back(p);
      }
      if (!fi->postings.emplace(std::move(term), std::move(list)).second)
        throw CorruptIndex("corrupt index: repeated term");
    }
    for (std::uint32_t d = 0; d < n; ++d)
      if (posted[d] != fi->lengths[d])
        throw CorruptIndex("corrupt index: postings disagree with document lengths");
  }
  if (!r.done()) throw CorruptIndex("corrupt index: trailing bytes");
  return idx;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
  const std::string bytes = serialize();
  // Written beside the target and renamed so readers never see a partial file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move index into place at " + path.string() + ": " + ec.message());
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

} // namespace screenlens::index
