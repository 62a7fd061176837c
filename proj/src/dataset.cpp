#include "gwgb/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string_view>

#include "gwgb/errors.hpp"
#include "gwgb/io.hpp"
#include "gwgb/rng.hpp"

namespace gwgb {

const char* to_string(Task task) {
    return task == Task::regression ? "regression" : "classification";
}

Task parse_task(const std::string& name) {
    if (name == "regression") return Task::regression;
    if (name == "classification") return Task::classification;
    throw ConfigError("unknown task '" + name + "' (expected regression or classification)");
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.features = features.select_rows(indices);
    if (!response.empty()) out.response = response.select_rows(indices);
    out.feature_names = feature_names;
    out.task = task;
    out.label_name = label_name;
    out.sample_ids.reserve(indices.size());
    for (auto i : indices) out.sample_ids.push_back(sample_ids[i]);
    if (!raw_labels.empty()) {
        out.raw_labels.reserve(indices.size());
        for (auto i : indices) out.raw_labels.push_back(raw_labels[i]);
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string_view>> rows;
    std::string text;  // owns the views
};

Table read_table(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw DataError("missing file '" + path.string() + "'");
    Table table;
    table.text = read_file(path);
    std::string_view all(table.text);
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= all.size()) {
        auto nl = all.find('\n', pos);
        auto line = all.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? all.size() + 1 : nl + 1;
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (!have_header) {
            for (auto f : fields) table.header.emplace_back(f);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            std::ostringstream msg;
            msg << path.string() << ": data row " << table.rows.size() + 1 << " (line " << line_no << ") has "
                << fields.size() << " fields, header has " << table.header.size();
            throw DataError(msg.str());
        }
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) throw DataError(path.string() + ": missing header row");
    if (table.rows.empty()) throw DataError(path.string() + ": empty data body");
    return table;
}

double parse_cell(std::string_view cell, std::size_t row, const std::string& column,
                  const std::filesystem::path& path) {
    auto fail = [&](const char* what) {
        std::ostringstream msg;
        msg << path.string() << ": data row " << row << ", column '" << column << "': " << what << " '"
            << cell << "'";
        throw DataError(msg.str());
    };
    if (cell.empty()) fail("missing value");
    double value = 0.0;
    const char* first = cell.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) fail("non-numeric value");
    if (!std::isfinite(value)) fail("NaN/Inf value");
    return value;
}

std::size_t resolve_column(const Table& table, const ColumnRef& ref, const std::filesystem::path& path) {
    if (const auto* index = std::get_if<std::size_t>(&ref)) {
        if (*index >= table.header.size())
            throw DataError(path.string() + ": label column index " + std::to_string(*index) + " out of range");
        return *index;
    }
    const auto& name = std::get<std::string>(ref);
    auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw DataError(path.string() + ": missing label column '" + name + "'");
    return static_cast<std::size_t>(it - table.header.begin());
}

Dataset features_from_table(const Table& table, std::size_t skip_column, const std::filesystem::path& path) {
    Dataset data;
    std::vector<std::size_t> columns;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c == skip_column) continue;
        columns.push_back(c);
        data.feature_names.push_back(table.header[c]);
    }
    if (columns.empty()) throw DataError(path.string() + ": no feature columns");
    const std::size_t m = table.rows.size();
    data.features = Matrix(m, columns.size());
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < columns.size(); ++j)
            data.features(r, j) = parse_cell(table.rows[r][columns[j]], r + 1, table.header[columns[j]], path);
        data.sample_ids.push_back(r);
    }
    return data;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column, Task task) {
    Table table = read_table(path);
    const std::size_t label = resolve_column(table, label_column, path);
    Dataset data = features_from_table(table, label, path);
    data.task = task;
    data.label_name = table.header[label];
    const std::size_t m = table.rows.size();
    if (task == Task::regression) {
        data.response = Matrix(m, 1);
        for (std::size_t r = 0; r < m; ++r)
            data.response(r, 0) = parse_cell(table.rows[r][label], r + 1, data.label_name, path);
    } else {
        data.raw_labels.reserve(m);
        for (std::size_t r = 0; r < m; ++r) {
            auto cell = table.rows[r][label];
            if (cell.empty())
                throw DataError(path.string() + ": data row " + std::to_string(r + 1) + ", column '" +
                                data.label_name + "': missing value ''");
            data.raw_labels.emplace_back(cell);
        }
    }
    return data;
}

Dataset load_feature_csv(const std::filesystem::path& path, const std::string& ignore_column) {
    Table table = read_table(path);
    auto it = std::find(table.header.begin(), table.header.end(), ignore_column);
    const std::size_t skip =
        it == table.header.end() ? table.header.size() : static_cast<std::size_t>(it - table.header.begin());
    return features_from_table(table, skip, path);
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    std::string out;
    for (const auto& name : data.feature_names) out += name + ",";
    out += data.label_name.empty() ? std::string("label") : data.label_name;
    out += '\n';
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (std::size_t c = 0; c < data.feature_count(); ++c) out += format_double(data.features(r, c)) + ",";
        if (data.task == Task::classification && !data.raw_labels.empty())
            out += data.raw_labels[r];
        else
            out += format_double(data.response(r, 0));
        out += '\n';
    }
    write_file_atomic(path, out);
}

SplitPair subsample(std::size_t rows, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("subsample fraction must lie in (0, 1], got " + format_double(fraction));
    std::vector<std::size_t> order(rows);
    for (std::size_t i = 0; i < rows; ++i) order[i] = i;
    const auto n_in = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows)));
    // Partial Fisher-Yates: the first n_in slots become a uniform sample.
    Rng rng(seed);
    for (std::size_t i = 0; i < n_in && i + 1 < rows; ++i) {
        auto j = i + static_cast<std::size_t>(rng.below(rows - i));
        std::swap(order[i], order[j]);
    }
    SplitPair split;
    split.seed = seed;
    split.fraction = fraction;
    split.in_bag.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_in));
    split.oob.assign(order.begin() + static_cast<std::ptrdiff_t>(n_in), order.end());
    std::sort(split.in_bag.begin(), split.in_bag.end());
    std::sort(split.oob.begin(), split.oob.end());
    return split;
}

SplitPair subsample(const Dataset& data, double fraction, std::uint64_t seed) {
    return subsample(data.rows(), fraction, seed);
}

FoldPlan folds_from_assignment(const std::vector<std::size_t>& fold_of_row) {
    std::size_t k = 0;
    for (auto f : fold_of_row) k = std::max(k, f + 1);
    FoldPlan plan;
    plan.folds.resize(k);
    for (std::size_t r = 0; r < fold_of_row.size(); ++r) {
        for (std::size_t f = 0; f < k; ++f) {
            if (fold_of_row[r] == f)
                plan.folds[f].test.push_back(r);
            else
                plan.folds[f].train.push_back(r);
        }
    }
    for (std::size_t f = 0; f < k; ++f)
        if (plan.folds[f].test.empty()) throw DataError("fold " + std::to_string(f) + " has no rows");
    return plan;
}

FoldPlan kfold_indices(const Dataset& data, std::size_t k, std::uint64_t seed, bool stratified) {
    const std::size_t m = data.rows();
    if (k < 2) throw ConfigError("fold count must be at least 2");
    if (k > m) throw ConfigError("fold count " + std::to_string(k) + " exceeds row count " + std::to_string(m));
    if (stratified && data.task != Task::classification)
        throw ConfigError("stratified folds require a classification dataset");

    Rng rng(seed);
    std::vector<std::size_t> dealt;
    std::string warning;
    if (stratified) {
        std::map<std::string, std::vector<std::size_t>> by_class;
        for (std::size_t r = 0; r < m; ++r) by_class[data.raw_labels[r]].push_back(r);
        for (const auto& [label, members] : by_class) {
            if (members.size() < k) {
                warning = "class '" + label + "' has " + std::to_string(members.size()) + " rows, fewer than " +
                          std::to_string(k) + " folds; using unstratified folds";
                break;
            }
        }
        if (warning.empty()) {
            for (auto& [label, members] : by_class) {
                rng.shuffle(members);
                dealt.insert(dealt.end(), members.begin(), members.end());
            }
        }
    }
    if (dealt.empty()) {
        dealt.resize(m);
        for (std::size_t r = 0; r < m; ++r) dealt[r] = r;
        rng.shuffle(dealt);
    }
    std::vector<std::size_t> fold_of_row(m);
    for (std::size_t pos = 0; pos < m; ++pos) fold_of_row[dealt[pos]] = pos % k;
    FoldPlan plan = folds_from_assignment(fold_of_row);
    plan.warning = std::move(warning);
    return plan;
}

void write_fold_file(const Dataset& data, const FoldPlan& plan, const std::filesystem::path& path) {
    std::vector<std::size_t> fold_of_row(data.rows(), 0);
    for (std::size_t f = 0; f < plan.folds.size(); ++f)
        for (auto r : plan.folds[f].test) fold_of_row[r] = f;
    std::string out = "sample_id,fold\n";
    for (std::size_t r = 0; r < data.rows(); ++r)
        out += std::to_string(data.sample_ids[r]) + "," + std::to_string(fold_of_row[r]) + "\n";
    write_file_atomic(path, out);
}

FoldPlan read_fold_file(const Dataset& data, const std::filesystem::path& path) {
    Table table = read_table(path);
    if (table.header.size() != 2) throw DataError(path.string() + ": expected columns sample_id,fold");
    std::map<std::size_t, std::size_t> row_of_id;
    for (std::size_t r = 0; r < data.rows(); ++r) row_of_id[data.sample_ids[r]] = r;

    auto parse_index = [&](std::string_view cell, std::size_t row, const char* column) {
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
        if (ec != std::errc() || ptr != cell.data() + cell.size())
            throw DataError(path.string() + ": data row " + std::to_string(row) + ", column '" + column +
                            "': not a non-negative integer '" + std::string(cell) + "'");
        return value;
    };

    std::vector<std::size_t> raw_fold(data.rows(), 0);
    std::vector<bool> seen(data.rows(), false);
    std::set<std::size_t> labels;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        auto id = parse_index(table.rows[i][0], i + 1, "sample_id");
        auto fold = parse_index(table.rows[i][1], i + 1, "fold");
        auto it = row_of_id.find(id);
        if (it == row_of_id.end()) throw DataError(path.string() + ": unknown sample_id " + std::to_string(id));
        if (seen[it->second]) throw DataError(path.string() + ": sample_id " + std::to_string(id) + " repeated");
        seen[it->second] = true;
        raw_fold[it->second] = fold;
        labels.insert(fold);
    }
    for (std::size_t r = 0; r < data.rows(); ++r)
        if (!seen[r])
            throw DataError(path.string() + ": sample_id " + std::to_string(data.sample_ids[r]) + " has no fold");
    if (labels.size() < 2) throw DataError(path.string() + ": need at least 2 folds");
    // Fold numbers may be arbitrary (e.g. 1-based); renumber by ascending value.
    std::map<std::size_t, std::size_t> dense;
    for (auto f : labels) dense.emplace(f, dense.size());
    for (auto& f : raw_fold) f = dense[f];
    return folds_from_assignment(raw_fold);
}

}  // namespace gwgb
