// Copyright 2026 The entrate Authors.
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

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "entrate/errors.hpp"
#include "entrate/ngram.hpp"

namespace entrate {
namespace {

constexpr std::string_view kTsvTag = "#entrate-ngram-table\tv1";
constexpr std::array<char, 8> kMagic = {'E', 'N', 'T', 'R', 'N', 'G', 'T', '1'};
constexpr std::uint32_t kBinaryVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw ParseError("truncated binary n-gram table");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  }
  return static_cast<T>(v);
}

std::string header_value(std::istream& in, std::string_view name,
                         std::size_t& line_no) {
  std::string line;
  ++line_no;
  if (!std::getline(in, line) || line.rfind("#", 0) != 0) {
    throw ParseError("line " + std::to_string(line_no) + ": expected #" +
                     std::string(name) + " header");
  }
  std::istringstream fields(line.substr(1));
  std::string key;
  std::string value;
  std::getline(fields, key, '\t');
  std::getline(fields, value);
  if (key != name) {
    throw ParseError("line " + std::to_string(line_no) + ": expected #" +
                     std::string(name) + ", got #" + key);
  }
  return value;
}

std::uint64_t to_u64(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s +
                     "'");
  }
}

}  // namespace

void write_table_tsv(const NgramTable& table, std::ostream& out) {
  out << kTsvTag << '\n'
      << "#n_max\t" << table.n_max() << '\n'
      << "#vocab_size\t" << table.vocab_size() << '\n'
      << "#granularity\t" << to_string(table.granularity()) << '\n'
      << "#pruned\t" << (table.pruned() ? 1 : 0) << '\n';
  for (int k = 1; k <= table.n_max(); ++k) {
    out << "#total\t" << k << '\t' << table.total(k) << '\n';
  }
  for (int k = 1; k <= table.n_max(); ++k) {
    for (std::size_t i = 0; i < table.distinct(k); ++i) {
      out << k << '\t';
      const auto gram = table.gram(k, i);
      for (std::size_t j = 0; j < gram.size(); ++j) {
        if (j > 0) out << ' ';
        out << gram[j];
      }
      out << '\t' << table.count_at(k, i) << '\n';
    }
  }
}

NgramTable read_table_tsv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kTsvTag) {
    throw ParseError("line 1: not an entrate n-gram table");
  }
  const auto n_max = static_cast<int>(
      to_u64(header_value(in, "n_max", line_no), line_no));
  const auto vocab_size = to_u64(header_value(in, "vocab_size", line_no), line_no);
  const Granularity granularity =
      parse_granularity(header_value(in, "granularity", line_no));
  const bool pruned = header_value(in, "pruned", line_no) == "1";
  if (n_max < 1) throw ParseError("n_max must be at least 1");

  NgramTable table(n_max, vocab_size, granularity);
  table.set_pruned(pruned);
  for (int k = 1; k <= n_max; ++k) {
    std::istringstream fields(header_value(in, "total", line_no));
    std::string order;
    std::string total;
    std::getline(fields, order, '\t');
    std::getline(fields, total);
    if (to_u64(order, line_no) != static_cast<std::uint64_t>(k)) {
      throw ParseError("line " + std::to_string(line_no) + ": totals out of order");
    }
    table.mutable_order(k).total = to_u64(total, line_no);
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string k_field;
    std::string ids_field;
    std::string count_field;
    if (!std::getline(fields, k_field, '\t') ||
        !std::getline(fields, ids_field, '\t') ||
        !std::getline(fields, count_field)) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields");
    }
    const auto k = static_cast<int>(to_u64(k_field, line_no));
    if (k < 1 || k > n_max) {
      throw ParseError("line " + std::to_string(line_no) + ": order out of range");
    }
    auto& order = table.mutable_order(k);
    std::istringstream ids(ids_field);
    std::string id;
    int seen = 0;
    while (ids >> id) {
      const auto v = to_u64(id, line_no);
      if (v >= vocab_size) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": token ID outside the vocabulary");
      }
      order.keys.push_back(static_cast<TokenId>(v));
      ++seen;
    }
    if (seen != k) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(k) + " token IDs");
    }
    order.counts.push_back(to_u64(count_field, line_no));
  }
  return table;
}

void write_table_binary(const NgramTable& table, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kBinaryVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.n_max()));
  put<std::uint64_t>(out, table.vocab_size());
  put<std::uint8_t>(out, table.granularity() == Granularity::kLetter ? 0 : 1);
  put<std::uint8_t>(out, table.pruned() ? 1 : 0);
  for (int i = 0; i < 6; ++i) put<std::uint8_t>(out, 0);
  for (int k = 1; k <= table.n_max(); ++k) {
    const auto& order = table.order(k);
    put<std::uint64_t>(out, order.total);
    put<std::uint64_t>(out, order.counts.size());
    if constexpr (std::endian::native == std::endian::little) {
      out.write(reinterpret_cast<const char*>(order.keys.data()),
                static_cast<std::streamsize>(order.keys.size() * sizeof(TokenId)));
      out.write(reinterpret_cast<const char*>(order.counts.data()),
                static_cast<std::streamsize>(order.counts.size() *
                                             sizeof(std::uint64_t)));
    } else {
      for (TokenId id : order.keys) put<std::uint32_t>(out, id);
      for (std::uint64_t c : order.counts) put<std::uint64_t>(out, c);
    }
  }
}

NgramTable read_table_binary(std::istream& in) {
  std::array<char, 8> magic;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError("not an entrate binary n-gram table");
  }
  if (get<std::uint32_t>(in) != kBinaryVersion) {
    throw ParseError("unsupported binary n-gram table version");
  }
  const auto n_max = static_cast<int>(get<std::uint32_t>(in));
  const auto vocab_size = get<std::uint64_t>(in);
  const auto granularity =
      get<std::uint8_t>(in) == 0 ? Granularity::kLetter : Granularity::kWord;
  const bool pruned = get<std::uint8_t>(in) != 0;
  for (int i = 0; i < 6; ++i) get<std::uint8_t>(in);
  if (n_max < 1) throw ParseError("n_max must be at least 1");

  NgramTable table(n_max, vocab_size, granularity);
  table.set_pruned(pruned);
  for (int k = 1; k <= n_max; ++k) {
    auto& order = table.mutable_order(k);
    order.total = get<std::uint64_t>(in);
    const auto distinct = get<std::uint64_t>(in);
    order.keys.resize(distinct * static_cast<std::uint64_t>(k));
    order.counts.resize(distinct);
    if constexpr (std::endian::native == std::endian::little) {
      in.read(reinterpret_cast<char*>(order.keys.data()),
              static_cast<std::streamsize>(order.keys.size() * sizeof(TokenId)));
      in.read(reinterpret_cast<char*>(order.counts.data()),
              static_cast<std::streamsize>(order.counts.size() *
                                           sizeof(std::uint64_t)));
      if (!in) throw ParseError("truncated binary n-gram table");
    } else {
      for (TokenId& id : order.keys) id = get<std::uint32_t>(in);
      for (std::uint64_t& c : order.counts) c = get<std::uint64_t>(in);
    }
  }
  return table;
}

void save_table(const NgramTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  if (path.extension() == ".tsv") {
    write_table_tsv(table, out);
  } else {
    write_table_binary(table, out);
  }
  if (!out) throw IoError("error while writing " + path.string());
}

NgramTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return path.extension() == ".tsv" ? read_table_tsv(in)
                                      : read_table_binary(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace entrate
