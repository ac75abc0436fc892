#include "nnbandit/corpus_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "nnbandit/errors.hpp"

namespace nnbandit {

namespace {

constexpr std::string_view kHeader =
    "context_id\tcontext_text\tresponse_id\tresponse_text\tlabel";
constexpr std::array<char, 4> kEmbeddingMagic = {'E', 'M', 'B', '1'};

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool has_tab_or_newline(std::string_view s) {
  return s.find_first_of("\t\r\n") != std::string_view::npos;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> bytes = {
      static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
      static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes.data(), bytes.size());
}

std::uint32_t decode_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

// Reads exactly n bytes or reports where the stream ran out.
void read_exact(std::istream& in, void* dst, std::size_t n, std::uint64_t& offset,
                const char* what) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError(offset + static_cast<std::uint64_t>(in.gcount()),
                      std::string("truncated file while reading ") + what);
  }
  offset += n;
}

std::uint32_t read_u32(std::istream& in, std::uint64_t& offset, const char* what) {
  unsigned char b[4];
  read_exact(in, b, 4, offset, what);
  return decode_u32(b);
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw IoError(path, "cannot open for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

}  // namespace

std::size_t ContextEntry::true_index() const {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].label == 1) return i;
  }
  throw ValidationError("context '" + context_id + "' has no true response");
}

std::size_t ReplayDataset::min_pool_size() const {
  std::size_t m = contexts.empty() ? 0 : contexts.front().candidates.size();
  for (const auto& c : contexts) m = std::min(m, c.candidates.size());
  return m;
}

std::size_t ReplayDataset::max_pool_size() const {
  std::size_t m = 0;
  for (const auto& c : contexts) m = std::max(m, c.candidates.size());
  return m;
}

void validate_dataset(const ReplayDataset& dataset) {
  std::unordered_set<std::string_view> context_ids;
  std::unordered_set<std::string_view> response_ids;
  for (const auto& ctx : dataset.contexts) {
    if (ctx.context_id.empty()) throw ValidationError("empty context_id");
    if (!context_ids.insert(ctx.context_id).second) {
      throw ValidationError("duplicate context_id '" + ctx.context_id + "'");
    }
    if (ctx.candidates.size() < 2) {
      throw ValidationError("context '" + ctx.context_id +
                            "' has fewer than 2 candidates");
    }
    std::unordered_set<std::string_view> pool;
    int positives = 0;
    for (const auto& cand : ctx.candidates) {
      if (cand.response_id.empty()) {
        throw ValidationError("context '" + ctx.context_id + "' has an empty response_id");
      }
      if (!pool.insert(cand.response_id).second) {
        throw ValidationError("context '" + ctx.context_id +
                              "' lists response_id '" + cand.response_id + "' twice");
      }
      if (cand.label != 0 && cand.label != 1) {
        throw ValidationError("context '" + ctx.context_id + "' has a label outside {0,1}");
      }
      positives += cand.label;
      response_ids.insert(cand.response_id);
    }
    if (positives != 1) {
      throw ValidationError("context '" + ctx.context_id + "' has " +
                            std::to_string(positives) +
                            " label-1 candidates, expected exactly 1");
    }
  }
  // Both namespaces share one embedding store.
  for (const auto& id : context_ids) {
    if (response_ids.contains(id)) {
      throw ValidationError("id '" + std::string(id) +
                            "' is used both as a context_id and a response_id");
    }
  }
}

ReplayDataset read_dataset(std::istream& in) {
  ReplayDataset dataset;
  std::unordered_set<std::string> closed;  // contexts whose row block has ended
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != kHeader) {
        throw ParseError(line_no, "expected header '" + std::string(kHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;

    const auto cols = split_tabs(line);
    if (cols.size() != 5) {
      throw ParseError(line_no, "expected 5 tab-separated columns, found " +
                                    std::to_string(cols.size()));
    }
    int label;
    if (cols[4] == "0") {
      label = 0;
    } else if (cols[4] == "1") {
      label = 1;
    } else {
      throw ParseError(line_no, "label must be 0 or 1, found '" + std::string(cols[4]) + "'");
    }
    if (cols[0].empty()) throw ParseError(line_no, "empty context_id");
    if (cols[2].empty()) throw ParseError(line_no, "empty response_id");

    if (dataset.contexts.empty() || dataset.contexts.back().context_id != cols[0]) {
      if (!dataset.contexts.empty()) closed.insert(dataset.contexts.back().context_id);
      if (closed.contains(std::string(cols[0]))) {
        throw ParseError(line_no, "rows of context '" + std::string(cols[0]) +
                                      "' are not contiguous");
      }
      ContextEntry entry;
      entry.context_id = std::string(cols[0]);
      entry.context_text = std::string(cols[1]);
      dataset.contexts.push_back(std::move(entry));
    }
    dataset.contexts.back().candidates.push_back(
        Candidate{std::string(cols[2]), std::string(cols[3]), label});
  }
  if (!header_seen) throw ParseError(1, "missing header row");

  validate_dataset(dataset);
  return dataset;
}

ReplayDataset load_dataset(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in);
  return read_dataset(in);
}

void write_dataset(const ReplayDataset& dataset, std::ostream& out) {
  out << kHeader << '\n';
  for (const auto& ctx : dataset.contexts) {
    if (has_tab_or_newline(ctx.context_id) || has_tab_or_newline(ctx.context_text)) {
      throw ValidationError("context '" + ctx.context_id +
                            "' contains a tab or newline and cannot be written as TSV");
    }
    for (const auto& cand : ctx.candidates) {
      if (has_tab_or_newline(cand.response_id) || has_tab_or_newline(cand.response_text)) {
        throw ValidationError("response '" + cand.response_id +
                              "' contains a tab or newline and cannot be written as TSV");
      }
      out << ctx.context_id << '\t' << ctx.context_text << '\t' << cand.response_id
          << '\t' << cand.response_text << '\t' << cand.label << '\n';
    }
  }
}

void write_dataset(const ReplayDataset& dataset, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::out | std::ios::trunc);
  write_dataset(dataset, out);
  if (!out) throw IoError(path, "write failed");
}

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw DimensionError("embedding dimension must be positive");
}

void EmbeddingStore::insert(std::string id, Vector vector) {
  if (static_cast<std::size_t>(vector.size()) != dim_) {
    throw DimensionError("embedding '" + id + "' has length " +
                         std::to_string(vector.size()) + ", store dimension is " +
                         std::to_string(dim_));
  }
  if (id.empty()) throw ValidationError("embedding id must be non-empty");
  if (!vector.allFinite()) {
    throw ValidationError("embedding '" + id + "' has a non-finite component");
  }
  if (index_.contains(id)) throw ValidationError("duplicate embedding id '" + id + "'");
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  vectors_.push_back(std::move(vector));
}

bool EmbeddingStore::contains(std::string_view id) const {
  return find(id) != nullptr;
}

const Vector* EmbeddingStore::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

const Vector& EmbeddingStore::at(std::string_view id) const {
  const auto* v = find(id);
  if (v == nullptr) throw ValidationError("no embedding for id '" + std::string(id) + "'");
  return *v;
}

bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
  return a.dim_ == b.dim_ && a.ids_ == b.ids_ && a.vectors_ == b.vectors_;
}

EmbeddingStore read_embeddings(std::istream& in) {
  std::uint64_t offset = 0;
  std::array<char, 4> magic{};
  read_exact(in, magic.data(), magic.size(), offset, "magic");
  if (magic != kEmbeddingMagic) throw FormatError(0, "bad magic, expected 'EMB1'");

  const std::uint32_t dim = read_u32(in, offset, "dimension");
  if (dim == 0) throw FormatError(offset - 4, "declared dimension is 0");
  const std::uint32_t count = read_u32(in, offset, "record count");

  EmbeddingStore store(dim);
  std::vector<unsigned char> raw(std::size_t{dim} * 4);
  for (std::uint32_t r = 0; r < count; ++r) {
    const std::uint64_t record_start = offset;
    const std::uint32_t id_len = read_u32(in, offset, "id length");
    if (id_len == 0) throw FormatError(record_start, "record has an empty id");
    std::string id(id_len, '\0');
    read_exact(in, id.data(), id_len, offset, "id bytes");
    read_exact(in, raw.data(), raw.size(), offset, "vector components");

    Vector v(dim);
    for (std::uint32_t i = 0; i < dim; ++i) {
      v[i] = static_cast<double>(std::bit_cast<float>(decode_u32(&raw[4 * i])));
    }
    if (!v.allFinite()) {
      throw FormatError(record_start, "record '" + id + "' has a non-finite component");
    }
    if (store.contains(id)) throw FormatError(record_start, "duplicate id '" + id + "'");
    store.insert(std::move(id), std::move(v));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(offset, "trailing bytes after the last record");
  }
  return store;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  return read_embeddings(in);
}

void write_embeddings(const EmbeddingStore& store, std::ostream& out) {
  out.write(kEmbeddingMagic.data(), kEmbeddingMagic.size());
  put_u32(out, static_cast<std::uint32_t>(store.dim()));
  put_u32(out, static_cast<std::uint32_t>(store.size()));
  for (std::size_t r = 0; r < store.size(); ++r) {
    const auto& id = store.ids()[r];
    put_u32(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (double x : store.vector_at(r)) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
    }
  }
}

void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  write_embeddings(store, out);
  if (!out) throw IoError(path, "write failed");
}

std::vector<std::string> missing_ids(const ReplayDataset& dataset,
                                     const EmbeddingStore& store) {
  std::vector<std::string> missing;
  std::unordered_set<std::string_view> seen;
  auto check = [&](const std::string& id) {
    if (!store.contains(id) && seen.insert(id).second) missing.push_back(id);
  };
  for (const auto& ctx : dataset.contexts) {
    check(ctx.context_id);
    for (const auto& cand : ctx.candidates) check(cand.response_id);
  }
  return missing;
}

void validate_embeddings(const ReplayDataset& dataset, const EmbeddingStore& store) {
  const auto missing = missing_ids(dataset, store);
  if (missing.empty()) return;
  std::ostringstream msg;
  msg << missing.size() << " id(s) have no embedding:";
  for (const auto& id : missing) msg << ' ' << id;
  throw ValidationError(msg.str());
}

}  // namespace nnbandit
