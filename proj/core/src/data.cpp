#include "recsearch/data.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>

#include "recsearch/errors.hpp"

namespace recsearch {

std::string_view task_name(TaskKind t) {
    return t == TaskKind::kRating ? "rating" : "ctr";
}

ColumnRole role_from_string(std::string_view s) {
    if (s == "user_id") return ColumnRole::kUserId;
    if (s == "item_id") return ColumnRole::kItemId;
    if (s == "categorical") return ColumnRole::kCategorical;
    if (s == "dense") return ColumnRole::kDense;
    if (s == "rating_target") return ColumnRole::kRatingTarget;
    if (s == "label_target") return ColumnRole::kLabelTarget;
    if (s == "ignore") return ColumnRole::kIgnore;
    throw SchemaError("unknown column role '" + std::string(s) + "'");
}

std::string_view role_name(ColumnRole r) {
    switch (r) {
        case ColumnRole::kUserId: return "user_id";
        case ColumnRole::kItemId: return "item_id";
        case ColumnRole::kCategorical: return "categorical";
        case ColumnRole::kDense: return "dense";
        case ColumnRole::kRatingTarget: return "rating_target";
        case ColumnRole::kLabelTarget: return "label_target";
        case ColumnRole::kIgnore: return "ignore";
    }
    return "?";
}

namespace {

bool is_target(ColumnRole r) {
    return r == ColumnRole::kRatingTarget || r == ColumnRole::kLabelTarget;
}

bool is_categorical_storage(ColumnRole r) {
    return r == ColumnRole::kUserId || r == ColumnRole::kItemId ||
           r == ColumnRole::kCategorical;
}

}  // namespace

void Schema::validate() const {
    if (columns.empty()) throw SchemaError("schema has no columns");
    std::size_t targets = 0, features = 0;
    for (const auto& c : columns) {
        if (is_target(c.role)) ++targets;
        else if (c.role != ColumnRole::kIgnore) ++features;
    }
    if (targets != 1)
        throw SchemaError("schema must have exactly one target column, found " +
                          std::to_string(targets));
    if (features == 0) throw SchemaError("schema has no feature columns");
}

std::size_t Schema::target_index() const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (is_target(columns[i].role)) return i;
    throw SchemaError("schema has no target column");
}

TaskKind Schema::task() const {
    return columns[target_index()].role == ColumnRole::kRatingTarget ? TaskKind::kRating
                                                                     : TaskKind::kCtr;
}

Schema builtin_schema(std::string_view format) {
    Schema s;
    if (format == "movielens") {
        s.delimiter = "::";
        s.has_header = false;
        s.columns = {{"user_id", ColumnRole::kUserId},
                     {"item_id", ColumnRole::kItemId},
                     {"rating", ColumnRole::kRatingTarget},
                     {"timestamp", ColumnRole::kIgnore}};
        return s;
    }
    if (format == "criteo") {
        s.delimiter = "\t";
        s.has_header = false;
        s.columns.push_back({"label", ColumnRole::kLabelTarget});
        for (int i = 1; i <= 13; ++i)
            s.columns.push_back({"I" + std::to_string(i), ColumnRole::kDense});
        for (int i = 1; i <= 26; ++i)
            s.columns.push_back({"C" + std::to_string(i), ColumnRole::kCategorical});
        return s;
    }
    if (format == "avazu") {
        s.delimiter = ",";
        s.has_header = true;
        s.header_roles = {{"click", ColumnRole::kLabelTarget}, {"id", ColumnRole::kIgnore}};
        return s;
    }
    throw ConfigError("unknown dataset format '" + std::string(format) + "'");
}

namespace {

std::vector<std::string_view> split_line(std::string_view line, std::string_view delim) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t hit = line.find(delim, pos);
        if (hit == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, hit - pos));
        pos = hit + delim.size();
    }
}

}  // namespace

std::vector<std::string_view> RawTable::fields(std::size_t row) const {
    return split_line(lines[row], schema.delimiter);
}

RawTable load_table(const std::string& path, Schema schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file '" + path + "'");

    std::string line;
    std::size_t line_no = 0;

    if (schema.has_header) {
        if (!std::getline(in, line)) throw DataError("dataset file '" + path + "' is empty");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (schema.columns.empty()) {
            for (auto name : split_line(line, schema.delimiter)) {
                auto it = schema.header_roles.find(std::string(name));
                const ColumnRole role = it == schema.header_roles.end()
                                            ? ColumnRole::kCategorical
                                            : it->second;
                schema.columns.push_back({std::string(name), role});
            }
        }
    }
    schema.validate();

    RawTable table;
    table.schema = std::move(schema);
    const std::size_t want = table.schema.columns.size();
    std::vector<std::string> ragged;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t got = split_line(line, table.schema.delimiter).size();
        if (got != want) {
            ragged.push_back("line " + std::to_string(line_no) + ": " + std::to_string(got) +
                             " fields, expected " + std::to_string(want));
            if (ragged.size() >= 20) break;
        }
        table.lines.push_back(std::move(line));
    }
    if (!ragged.empty()) {
        std::string msg = "ragged rows in '" + path + "':";
        for (const auto& r : ragged) msg += "\n  " + r;
        throw DataError(msg);
    }
    if (table.lines.empty()) throw DataError("dataset file '" + path + "' has no data rows");
    return table;
}

std::int64_t Vocabulary::transform(std::string_view token) const {
    if (token.empty()) return 0;
    if (hash_buckets > 0)
        return 1 + static_cast<std::int64_t>(fnv1a(token) % hash_buckets);
    auto it = map.find(std::string(token));
    return it == map.end() ? 0 : it->second;
}

Vocabulary fit_vocabulary(const std::vector<std::string_view>& tokens, std::size_t min_count,
                          std::size_t hash_buckets) {
    Vocabulary v;
    if (hash_buckets > 0) {
        v.hash_buckets = hash_buckets;
        v.vocab_size = hash_buckets;
        return v;
    }
    std::unordered_map<std::string, std::size_t> counts;
    counts.reserve(tokens.size() / 4 + 16);
    for (auto t : tokens) {
        if (t.empty()) continue;  // missing values stay out-of-vocabulary
        ++counts[std::string(t)];
    }
    std::int64_t next = 1;
    for (auto t : tokens) {
        if (t.empty()) continue;
        const std::string key(t);
        if (v.map.count(key)) continue;
        if (counts[key] >= min_count) v.map.emplace(key, next++);
    }
    v.vocab_size = static_cast<std::size_t>(next - 1);
    return v;
}

namespace {

double parse_dense(std::string_view field, std::size_t line_no) {
    if (field.empty()) return 0.0;  // missing
    double x = 0.0;
    const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
    if (ec != std::errc() || p != field.data() + field.size())
        throw DataError("row " + std::to_string(line_no) + ": dense value '" +
                        std::string(field) + "' is not numeric");
    return x;
}

// The dense pipeline: missing -> 0, clamp negatives, compress counts.
double dense_raw_transform(double x) {
    return std::log1p(std::max(x, 0.0));
}

double parse_target(std::string_view field, TaskKind task, std::size_t line_no) {
    if (field.empty())
        throw DataError("row " + std::to_string(line_no) + ": missing target value");
    double x = 0.0;
    const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
    if (ec != std::errc() || p != field.data() + field.size())
        throw DataError("row " + std::to_string(line_no) + ": target '" + std::string(field) +
                        "' is not numeric");
    if (task == TaskKind::kCtr && x != 0.0 && x != 1.0)
        throw DataError("row " + std::to_string(line_no) + ": label '" + std::string(field) +
                        "' is not binary");
    return x;
}

struct ColumnPlan {
    std::vector<std::size_t> categorical;  // field indices
    std::vector<std::size_t> dense;
    std::size_t target;
};

ColumnPlan plan_columns(const Schema& schema) {
    ColumnPlan plan{};
    plan.target = schema.target_index();
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
        if (is_categorical_storage(schema.columns[i].role)) plan.categorical.push_back(i);
        else if (schema.columns[i].role == ColumnRole::kDense) plan.dense.push_back(i);
    }
    return plan;
}

}  // namespace

EncodedSplit encode_rows(const RawTable& table, const std::vector<std::size_t>& row_indices,
                         const std::vector<Vocabulary>& vocabularies,
                         const std::vector<DenseStats>& dense_stats) {
    const ColumnPlan plan = plan_columns(table.schema);
    const TaskKind task = table.schema.task();

    EncodedSplit split;
    split.rows = row_indices.size();
    split.categorical.assign(plan.categorical.size(), {});
    for (auto& c : split.categorical) c.reserve(split.rows);
    split.dense.assign(plan.dense.size(), {});
    for (auto& c : split.dense) c.reserve(split.rows);
    split.targets.reserve(split.rows);

    for (const std::size_t row : row_indices) {
        const auto fields = table.fields(row);
        for (std::size_t c = 0; c < plan.categorical.size(); ++c)
            split.categorical[c].push_back(vocabularies[c].transform(fields[plan.categorical[c]]));
        for (std::size_t c = 0; c < plan.dense.size(); ++c) {
            const double raw =
                dense_raw_transform(parse_dense(fields[plan.dense[c]], row + 1));
            const DenseStats& st = dense_stats[c];
            split.dense[c].push_back(st.stddev > 0.0 ? (raw - st.mean) / st.stddev : 0.0);
        }
        split.targets.push_back(parse_target(fields[plan.target], task, row + 1));
    }
    return split;
}

DatasetBundle split_and_encode(const RawTable& table, std::uint64_t seed,
                               const EncodeOptions& options) {
    const std::size_t n = table.rows();
    if (n < 10)
        throw ConfigError("dataset has " + std::to_string(n) +
                          " rows; at least 10 are required for an 8:1:1 split");

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.uniform_index(i + 1)]);

    const std::size_t n_train = n * 8 / 10;
    const std::size_t n_val = n / 10;
    std::vector<std::size_t> train_rows(perm.begin(), perm.begin() + n_train);
    std::vector<std::size_t> val_rows(perm.begin() + n_train, perm.begin() + n_train + n_val);
    std::vector<std::size_t> test_rows(perm.begin() + n_train + n_val, perm.end());

    const ColumnPlan plan = plan_columns(table.schema);

    DatasetBundle bundle;
    bundle.info.task = table.schema.task();
    for (std::size_t f : plan.categorical) {
        bundle.info.categorical_names.push_back(table.schema.columns[f].name);
        bundle.info.categorical_roles.push_back(table.schema.columns[f].role);
    }
    for (std::size_t f : plan.dense)
        bundle.info.dense_names.push_back(table.schema.columns[f].name);

    // Vocabulary fit on the train split only.
    for (std::size_t c = 0; c < plan.categorical.size(); ++c) {
        std::vector<std::string_view> tokens;
        tokens.reserve(train_rows.size());
        for (const std::size_t row : train_rows)
            tokens.push_back(table.fields(row)[plan.categorical[c]]);
        bundle.vocabularies.push_back(
            fit_vocabulary(tokens, options.min_count, options.hash_buckets));
        bundle.info.vocab_sizes.push_back(bundle.vocabularies.back().vocab_size);
    }

    // Dense moments on the train split, after the raw transform.
    for (std::size_t c = 0; c < plan.dense.size(); ++c) {
        double sum = 0.0, sum_sq = 0.0;
        for (const std::size_t row : train_rows) {
            const double x =
                dense_raw_transform(parse_dense(table.fields(row)[plan.dense[c]], row + 1));
            sum += x;
            sum_sq += x * x;
        }
        const double mean = sum / static_cast<double>(train_rows.size());
        const double var =
            std::max(0.0, sum_sq / static_cast<double>(train_rows.size()) - mean * mean);
        bundle.dense_stats.push_back({mean, std::sqrt(var)});
    }

    bundle.train = encode_rows(table, train_rows, bundle.vocabularies, bundle.dense_stats);
    bundle.val = encode_rows(table, val_rows, bundle.vocabularies, bundle.dense_stats);
    bundle.test = encode_rows(table, test_rows, bundle.vocabularies, bundle.dense_stats);
    return bundle;
}

std::optional<std::size_t> DatasetInfo::categorical_index(std::string_view name) const {
    for (std::size_t i = 0; i < categorical_names.size(); ++i)
        if (categorical_names[i] == name) return i;
    return std::nullopt;
}

std::optional<std::size_t> DatasetInfo::user_index() const {
    for (std::size_t i = 0; i < categorical_roles.size(); ++i)
        if (categorical_roles[i] == ColumnRole::kUserId) return i;
    return std::nullopt;
}

std::optional<std::size_t> DatasetInfo::item_index() const {
    for (std::size_t i = 0; i < categorical_roles.size(); ++i)
        if (categorical_roles[i] == ColumnRole::kItemId) return i;
    return std::nullopt;
}

BatchIterator::BatchIterator(const EncodedSplit& split, std::size_t batch_size, bool shuffle,
                             std::uint64_t shuffle_seed, std::uint64_t epoch)
    : split_(split), batch_size_(batch_size) {
    if (batch_size_ == 0) throw ContractError("batch_size must be >= 1");
    order_.resize(split.rows);
    for (std::size_t i = 0; i < split.rows; ++i) order_[i] = i;
    if (shuffle) {
        Rng rng(mix64(shuffle_seed, epoch));
        for (std::size_t i = split.rows; i > 1; --i)
            std::swap(order_[i - 1], order_[rng.uniform_index(i)]);
    }
}

std::size_t BatchIterator::batch_count() const {
    return (split_.rows + batch_size_ - 1) / batch_size_;
}

std::optional<EncodedBatch> BatchIterator::next() {
    if (pos_ >= order_.size()) return std::nullopt;
    const std::size_t take = std::min(batch_size_, order_.size() - pos_);

    EncodedBatch batch;
    batch.rows = take;
    batch.categorical.assign(split_.categorical.size(), {});
    batch.dense.assign(split_.dense.size(), {});
    batch.targets.reserve(take);
    for (auto& c : batch.categorical) c.reserve(take);
    for (auto& c : batch.dense) c.reserve(take);

    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t row = order_[pos_ + i];
        for (std::size_t c = 0; c < split_.categorical.size(); ++c)
            batch.categorical[c].push_back(split_.categorical[c][row]);
        for (std::size_t c = 0; c < split_.dense.size(); ++c)
            batch.dense[c].push_back(split_.dense[c][row]);
        batch.targets.push_back(split_.targets[row]);
    }
    pos_ += take;
    return batch;
}

}  // namespace recsearch
