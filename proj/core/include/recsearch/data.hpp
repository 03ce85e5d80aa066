#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recsearch/rng.hpp"
#include "recsearch/tensor.hpp"

namespace recsearch {

enum class TaskKind { kRating, kCtr };

std::string_view task_name(TaskKind t);

enum class ColumnRole {
    kUserId,
    kItemId,
    kCategorical,
    kDense,
    kRatingTarget,
    kLabelTarget,
    kIgnore,
};

ColumnRole role_from_string(std::string_view s);
std::string_view role_name(ColumnRole r);

struct Column {
    std::string name;
    ColumnRole role;
};

// Column layout of one delimited log file. The delimiter may be multi-byte
// ("::" for MovieLens-1M). Header files may leave `columns` empty and give
// `header_roles`; the real columns are then resolved from the first line.
struct Schema {
    std::vector<Column> columns;
    std::string delimiter = ",";
    bool has_header = false;
    // Role per header name; names absent from the map default to categorical.
    std::map<std::string, ColumnRole> header_roles;

    void validate() const;  // exactly one target, >=1 feature column
    std::size_t target_index() const;
    TaskKind task() const;
};

// Built-in formats: movielens ("::" user/item/rating/timestamp),
// criteo (TSV, label + 13 dense + 26 categorical), avazu (CSV with header,
// label column "click", "id" ignored).
Schema builtin_schema(std::string_view format);

// Parsed rows kept as raw lines; fields are re-split on demand so half a
// gigabyte of click logs does not explode into per-token strings.
struct RawTable {
    Schema schema;
    std::vector<std::string> lines;

    std::size_t rows() const { return lines.size(); }
    std::vector<std::string_view> fields(std::size_t row) const;
};

// Loads and validates a delimited file. Ragged rows are reported with their
// 1-based line numbers; an empty table is an error.
RawTable load_table(const std::string& path, Schema schema);

// Token -> index map with index 0 reserved for out-of-vocabulary. In hash
// mode no map is kept and tokens bucket into 1 + (hash % buckets).
struct Vocabulary {
    std::unordered_map<std::string, std::int64_t> map;
    std::size_t vocab_size = 0;   // V; valid encoded values are 0..V
    std::size_t hash_buckets = 0; // 0 = map mode

    std::int64_t transform(std::string_view token) const;
};

// Fits on train-split rows only: tokens with count >= min_count are indexed
// 1..V in first-appearance order, the rest map to 0.
Vocabulary fit_vocabulary(const std::vector<std::string_view>& tokens, std::size_t min_count = 1,
                          std::size_t hash_buckets = 0);

// Train-split moments of one dense feature after the ln(1+max(x,0)) clamp.
struct DenseStats {
    double mean = 0.0;
    double stddev = 0.0;  // 0 => feature zeroed at encode time
};

struct EncodedSplit {
    std::size_t rows = 0;
    std::vector<std::vector<std::int64_t>> categorical;  // [column][row]
    std::vector<std::vector<double>> dense;              // [column][row]
    std::vector<double> targets;
};

struct EncodedBatch {
    std::size_t rows = 0;
    std::vector<std::vector<std::int64_t>> categorical;
    std::vector<std::vector<double>> dense;
    std::vector<double> targets;
};

// What model construction needs to know about an encoded dataset.
struct DatasetInfo {
    TaskKind task = TaskKind::kRating;
    std::vector<std::string> categorical_names;  // includes user/item id columns
    std::vector<ColumnRole> categorical_roles;
    std::vector<std::size_t> vocab_sizes;        // per categorical column
    std::vector<std::string> dense_names;

    std::optional<std::size_t> categorical_index(std::string_view name) const;
    std::optional<std::size_t> user_index() const;
    std::optional<std::size_t> item_index() const;
};

struct EncodeOptions {
    std::size_t min_count = 1;
    std::size_t hash_buckets = 0;  // 0 disables hashing
};

// 8:1:1 split + fit + encode bundle.
struct DatasetBundle {
    DatasetInfo info;
    EncodedSplit train, val, test;
    std::vector<Vocabulary> vocabularies;  // per categorical column
    std::vector<DenseStats> dense_stats;
};

// Deterministic seeded permutation; first 80% train, next 10% validation,
// remainder test. Vocabularies and dense statistics are fitted on the train
// rows only, then all three splits are encoded with that state.
DatasetBundle split_and_encode(const RawTable& table, std::uint64_t seed,
                               const EncodeOptions& options = {});

// Encodes explicit row indices of a table with already-fitted state.
EncodedSplit encode_rows(const RawTable& table, const std::vector<std::size_t>& row_indices,
                         const std::vector<Vocabulary>& vocabularies,
                         const std::vector<DenseStats>& dense_stats);

// Mini-batch iteration. Training iteration reshuffles per epoch, keyed by
// (shuffle_seed, epoch); validation/test iteration passes shuffle off. The
// last partial batch is kept.
class BatchIterator {
  public:
    BatchIterator(const EncodedSplit& split, std::size_t batch_size, bool shuffle,
                  std::uint64_t shuffle_seed = 0, std::uint64_t epoch = 0);

    std::optional<EncodedBatch> next();
    std::size_t batch_count() const;

  private:
    const EncodedSplit& split_;
    std::size_t batch_size_;
    std::vector<std::size_t> order_;
    std::size_t pos_ = 0;
};

}  // namespace recsearch
