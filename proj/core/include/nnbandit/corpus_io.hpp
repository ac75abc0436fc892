#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nnbandit/types.hpp"

namespace nnbandit {

struct Candidate {
  std::string response_id;
  std::string response_text;
  int label = 0;
};

struct ContextEntry {
  std::string context_id;
  std::string context_text;
  std::vector<Candidate> candidates;

  /// Position of the single label-1 candidate. Only meaningful after validation.
  std::size_t true_index() const;
};

/// Contexts with their candidate pools, in file order.
struct ReplayDataset {
  std::vector<ContextEntry> contexts;

  std::size_t min_pool_size() const;
  std::size_t max_pool_size() const;
};

/// Checks the dataset invariants: at least two candidates per context, exactly
/// one true response, non-empty ids, unique context ids, unique response ids
/// within a pool, and no id used both as a context and as a response.
void validate_dataset(const ReplayDataset& dataset);

/// Reads the five-column TSV format (header row required). Candidates of one
/// context must be on contiguous rows.
ReplayDataset read_dataset(std::istream& in);
ReplayDataset load_dataset(const std::filesystem::path& path);

void write_dataset(const ReplayDataset& dataset, std::ostream& out);
void write_dataset(const ReplayDataset& dataset, const std::filesystem::path& path);

/// Id-keyed embedding vectors of one common dimension. Insertion order is kept
/// and is the order used when writing.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  /// Throws DimensionError on a length mismatch, ValidationError on an empty
  /// or duplicate id or a non-finite component.
  void insert(std::string id, Vector vector);

  bool contains(std::string_view id) const;
  const Vector* find(std::string_view id) const;
  /// Throws ValidationError naming the id when absent.
  const Vector& at(std::string_view id) const;

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const Vector& vector_at(std::size_t i) const { return vectors_[i]; }

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b);

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<Vector> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// EMB1 binary format: magic "EMB1", u32 dim, u32 count, then per record
/// u32 id length, id bytes, dim x float32. All integers and floats little-endian.
EmbeddingStore read_embeddings(std::istream& in);
EmbeddingStore load_embeddings(const std::filesystem::path& path);

/// Components are rounded to float32 on write.
void write_embeddings(const EmbeddingStore& store, std::ostream& out);
void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path);

/// Every context and response id referenced by the dataset but absent from the
/// store, deduplicated, in first-reference order.
std::vector<std::string> missing_ids(const ReplayDataset& dataset,
                                     const EmbeddingStore& store);

/// Throws ValidationError listing all missing ids.
void validate_embeddings(const ReplayDataset& dataset, const EmbeddingStore& store);

}  // namespace nnbandit
