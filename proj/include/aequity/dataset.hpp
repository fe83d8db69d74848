#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aequity/common.hpp"
#include "aequity/rng.hpp"
#include "aequity/stats.hpp"

namespace aequity {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            const std::string t = trim(cur);
            if (!t.empty()) out.push_back(t);
            cur.clear();
        } else {
            cur += c;
        }
    }
    const std::string t = trim(cur);
    if (!t.empty()) out.push_back(t);
    return out;
}

/// Run configuration. File keys use exactly these names; CLI flags are the
/// kebab-case equivalents.
struct RunConfig {
    std::string data_path;
    std::vector<std::string> demographics_cols;  // demographics_col (comma list for intersections)
    std::vector<std::string> outcome_cols;
    std::vector<std::string> exclude_cols;
    std::string patient_id_col;  // optional; absent -> every row is its own patient
    std::string out_data;
    std::size_t bootstraps = 50;
    std::int64_t start_seed = 42;
    std::size_t input_dim = 0;
    std::size_t max_sample_size = 0;
    std::string root_dir;
    // tool extensions
    std::string protected_group;  // empty -> smallest group
    std::size_t min_sample_size = 16;
    double alpha = 0.05;
    double threshold = 0.5;
    bool impute_missing = false;

    std::vector<std::string> warnings;  // unknown keys, oversampling notes

    std::uint64_t seed_u64() const { return static_cast<std::uint64_t>(start_seed); }

    void validate() const {
        if (bootstraps < 2) throw ConfigError("config: bootstraps must be >= 2");
        if (min_sample_size < 2) throw ConfigError("config: min_sample_size must be >= 2");
        if (max_sample_size < 2 * min_sample_size) {
            throw ConfigError("config: max_sample_size must be >= 2 * min_sample_size");
        }
        if (input_dim == 0) throw ConfigError("config: input_dim must be positive");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("config: alpha must be in (0,1)");
        if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("config: threshold must be in (0,1)");
    }
};

namespace detail {

inline bool parse_i64(const std::string& s, std::int64_t& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

inline bool parse_f64(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* endp = nullptr;
    out = std::strtod(t.c_str(), &endp);
    return endp == t.c_str() + t.size() && std::isfinite(out);
}

inline bool parse_bool(const std::string& s, bool& out) {
    const std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes") { out = true; return true; }
    if (t == "false" || t == "0" || t == "no") { out = false; return true; }
    return false;
}

inline bool is_none(const std::string& s) {
    return s.empty() || s == "None" || s == "none" || s == "null";
}

}  // namespace detail

/// Parse a flat `key: value` config file ('#' starts a comment). Unknown keys
/// warn; missing required keys or malformed values are errors.
inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    auto fail = [&](const std::string& what) {
        throw ConfigError("config line " + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) fail("expected 'key: value'");
        const std::string key = trim(line.substr(0, colon));
        const std::string value = trim(line.substr(colon + 1));
        if (key.empty()) fail("empty key");
        seen.insert(key);

        std::int64_t i = 0;
        double d = 0.0;
        bool b = false;
        if (key == "data_path") {
            cfg.data_path = value;
        } else if (key == "demographics_col") {
            cfg.demographics_cols = split_list(value);
        } else if (key == "outcome_cols") {
            cfg.outcome_cols = split_list(value);
        } else if (key == "exclude_cols") {
            if (!detail::is_none(value)) cfg.exclude_cols = split_list(value);
        } else if (key == "patient_id_col") {
            if (!detail::is_none(value)) cfg.patient_id_col = value;
        } else if (key == "out_data") {
            cfg.out_data = value;
        } else if (key == "bootstraps") {
            if (!detail::parse_i64(value, i) || i < 0) fail("bootstraps: expected a non-negative integer");
            cfg.bootstraps = static_cast<std::size_t>(i);
        } else if (key == "start_seed") {
            if (!detail::parse_i64(value, i)) fail("start_seed: expected a 64-bit integer");
            cfg.start_seed = i;
        } else if (key == "input_dim") {
            if (!detail::parse_i64(value, i) || i <= 0) fail("input_dim: expected a positive integer");
            cfg.input_dim = static_cast<std::size_t>(i);
        } else if (key == "max_sample_size") {
            if (!detail::parse_i64(value, i) || i <= 0) fail("max_sample_size: expected a positive integer");
            cfg.max_sample_size = static_cast<std::size_t>(i);
        } else if (key == "min_sample_size") {
            if (!detail::parse_i64(value, i) || i <= 0) fail("min_sample_size: expected a positive integer");
            cfg.min_sample_size = static_cast<std::size_t>(i);
        } else if (key == "root_dir") {
            cfg.root_dir = value;
        } else if (key == "protected_group") {
            if (!detail::is_none(value)) cfg.protected_group = value;
        } else if (key == "alpha") {
            if (!detail::parse_f64(value, d)) fail("alpha: expected a real number");
            cfg.alpha = d;
        } else if (key == "threshold") {
            if (!detail::parse_f64(value, d)) fail("threshold: expected a real number");
            cfg.threshold = d;
        } else if (key == "impute_missing") {
            if (!detail::parse_bool(value, b)) fail("impute_missing: expected true/false");
            cfg.impute_missing = b;
        } else {
            cfg.warnings.push_back("unknown config key '" + key + "' ignored");
        }
    }

    std::vector<std::string> missing;
    for (const char* req : {"data_path", "demographics_col", "outcome_cols", "input_dim",
                            "max_sample_size", "root_dir"}) {
        if (!seen.count(req)) missing.emplace_back(req);
    }
    if (!missing.empty()) {
        std::string msg = "config: missing required keys:";
        for (const auto& k : missing) msg += " " + k;
        throw ConfigError(msg);
    }
    if (cfg.out_data.empty()) cfg.out_data = cfg.root_dir + "/data.tsv";
    cfg.validate();
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config file not found: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

/// In-memory table: standardized feature matrix plus per-row ids, group
/// values and outcome columns. Immutable after load.
struct FeatureDataset {
    std::vector<std::string> patient_ids;
    std::vector<std::string> groups;  // joined demographics value per row
    Matrix features;                  // rows x input_dim
    std::vector<std::string> feature_names;
    std::map<std::string, std::vector<double>> outcomes;

    bool standardized = false;
    std::vector<double> feature_means;   // stats used by standardize()
    std::vector<double> feature_stddevs;
    std::vector<std::size_t> constant_features;

    std::size_t n_rows() const { return features.rows; }

    std::vector<std::string> distinct_groups() const {
        std::set<std::string> s(groups.begin(), groups.end());
        return {s.begin(), s.end()};
    }

    std::size_t group_count(const std::string& g) const {
        std::size_t n = 0;
        for (const auto& v : groups) n += (v == g);
        return n;
    }
};

/// Row-index subset of a dataset. `with_replacement` marks multiset
/// semantics (duplicate indices allowed) produced by bootstrap sampling.
/// `balanced_halves` marks a balanced two-group merge whose first and second
/// halves (of that many rows each) are the per-group parts; bootstrap cells
/// sample such views stratified, half from each part.
struct DatasetView {
    const FeatureDataset* ds = nullptr;
    std::vector<std::size_t> rows;
    std::string group;  // descriptor, may be empty
    std::string label;  // descriptor, may be empty
    bool with_replacement = false;
    std::size_t balanced_halves = 0;

    std::size_t size() const { return rows.size(); }
    bool empty() const { return rows.empty(); }
};

inline DatasetView full_view(const FeatureDataset& ds) {
    DatasetView v;
    v.ds = &ds;
    v.rows.resize(ds.n_rows());
    std::iota(v.rows.begin(), v.rows.end(), std::size_t{0});
    return v;
}

inline DatasetView filter_view(const FeatureDataset& ds, const std::string& group,
                               const std::string& outcome_col, double positive_value = 1.0) {
    DatasetView v;
    v.ds = &ds;
    v.group = group;
    v.label = outcome_col;
    const auto it = ds.outcomes.find(outcome_col);
    if (it == ds.outcomes.end()) throw DataError("unknown outcome column: " + outcome_col);
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        if (!group.empty() && ds.groups[r] != group) continue;
        if (it->second[r] == positive_value) v.rows.push_back(r);
    }
    return v;
}

/// Materialize the feature rows of a view.
inline Matrix gather_features(const DatasetView& v) {
    Matrix out(v.rows.size(), v.ds->features.cols);
    for (std::size_t r = 0; r < v.rows.size(); ++r) {
        const double* src = v.ds->features.row(v.rows[r]);
        std::copy(src, src + v.ds->features.cols, out.row(r));
    }
    return out;
}

inline Matrix gather_outcome(const DatasetView& v, const std::string& outcome_col) {
    const auto it = v.ds->outcomes.find(outcome_col);
    if (it == v.ds->outcomes.end()) throw DataError("unknown outcome column: " + outcome_col);
    Matrix out(v.rows.size(), 1);
    for (std::size_t r = 0; r < v.rows.size(); ++r) out(r, 0) = it->second[v.rows[r]];
    return out;
}

/// Load the TSV named by the config. Feature columns are everything that is
/// not demographics, outcome, excluded or the patient-id column; the count
/// must equal input_dim. Rows with missing cells are rejected unless
/// impute_missing is set (feature columns only; mean imputation).
inline FeatureDataset load_table(const RunConfig& cfg) {
    std::ifstream f(cfg.data_path);
    if (!f) throw DataError("data file not found: " + cfg.data_path);

    std::string header;
    if (!std::getline(f, header)) throw DataError("empty data file: " + cfg.data_path);
    if (!header.empty() && header.back() == '\r') header.pop_back();

    std::vector<std::string> col_names;
    {
        std::string cur;
        std::istringstream hs(header);
        while (std::getline(hs, cur, '\t')) col_names.push_back(trim(cur));
    }

    auto col_index = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(col_names.begin(), col_names.end(), name);
        if (it == col_names.end()) throw DataError("column not found in data file: " + name);
        return static_cast<std::size_t>(it - col_names.begin());
    };

    std::vector<std::size_t> demo_idx;
    for (const auto& c : cfg.demographics_cols) demo_idx.push_back(col_index(c));
    std::vector<std::size_t> outcome_idx;
    for (const auto& c : cfg.outcome_cols) outcome_idx.push_back(col_index(c));
    std::optional<std::size_t> pid_idx;
    if (!cfg.patient_id_col.empty()) pid_idx = col_index(cfg.patient_id_col);

    std::set<std::size_t> non_feature(demo_idx.begin(), demo_idx.end());
    non_feature.insert(outcome_idx.begin(), outcome_idx.end());
    if (pid_idx) non_feature.insert(*pid_idx);
    for (const auto& c : cfg.exclude_cols) non_feature.insert(col_index(c));

    std::vector<std::size_t> feature_idx;
    for (std::size_t i = 0; i < col_names.size(); ++i) {
        if (!non_feature.count(i)) feature_idx.push_back(i);
    }
    if (feature_idx.size() != cfg.input_dim) {
        throw DataError("data file has " + std::to_string(feature_idx.size()) +
                        " feature columns but input_dim is " + std::to_string(cfg.input_dim));
    }

    FeatureDataset ds;
    for (std::size_t i : feature_idx) ds.feature_names.push_back(col_names[i]);
    for (const auto& c : cfg.outcome_cols) ds.outcomes[c] = {};

    std::vector<std::vector<double>> feature_rows;
    std::vector<std::vector<bool>> missing_mask;
    bool any_missing = false;

    std::string line;
    std::size_t row_no = 1;  // header was row 1
    while (std::getline(f, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        {
            std::string cur;
            std::istringstream ls(line);
            while (std::getline(ls, cur, '\t')) cells.push_back(cur);
            if (!line.empty() && line.back() == '\t') cells.emplace_back();
        }
        if (cells.size() != col_names.size()) {
            throw DataError("row " + std::to_string(row_no) + ": expected " +
                            std::to_string(col_names.size()) + " cells, got " +
                            std::to_string(cells.size()));
        }

        auto cell_missing = [&](std::size_t i) {
            const std::string t = trim(cells[i]);
            return t.empty() || t == "NA" || t == "nan" || t == "NaN";
        };
        auto parse_cell = [&](std::size_t i) {
            double d = 0.0;
            if (!detail::parse_f64(cells[i], d)) {
                throw DataError("row " + std::to_string(row_no) + ", column '" + col_names[i] +
                                "': non-numeric value '" + trim(cells[i]) + "'");
            }
            return d;
        };

        std::vector<double> feats(feature_idx.size(), 0.0);
        std::vector<bool> miss(feature_idx.size(), false);
        bool row_missing = false;
        for (std::size_t k = 0; k < feature_idx.size(); ++k) {
            if (cell_missing(feature_idx[k])) {
                miss[k] = true;
                row_missing = true;
            } else {
                feats[k] = parse_cell(feature_idx[k]);
            }
        }
        for (std::size_t k = 0; k < outcome_idx.size(); ++k) {
            if (cell_missing(outcome_idx[k])) row_missing = true;
        }
        if (row_missing && !cfg.impute_missing) {
            throw DataError("row " + std::to_string(row_no) +
                            " has missing values (set impute_missing to mean-impute features)");
        }
        for (std::size_t k = 0; k < outcome_idx.size(); ++k) {
            if (cell_missing(outcome_idx[k])) {
                throw DataError("row " + std::to_string(row_no) +
                                " has a missing outcome value (cannot be imputed)");
            }
            ds.outcomes[cfg.outcome_cols[k]].push_back(parse_cell(outcome_idx[k]));
        }

        std::string group_value;
        for (std::size_t k = 0; k < demo_idx.size(); ++k) {
            if (k > 0) group_value += "|";
            group_value += trim(cells[demo_idx[k]]);
        }
        ds.groups.push_back(group_value);
        ds.patient_ids.push_back(pid_idx ? trim(cells[*pid_idx])
                                         : "row" + std::to_string(feature_rows.size()));
        any_missing = any_missing || row_missing;
        feature_rows.push_back(std::move(feats));
        missing_mask.push_back(std::move(miss));
    }

    if (feature_rows.empty()) throw DataError("data file has no rows: " + cfg.data_path);

    ds.features = Matrix(feature_rows.size(), feature_idx.size());
    for (std::size_t r = 0; r < feature_rows.size(); ++r) {
        std::copy(feature_rows[r].begin(), feature_rows[r].end(), ds.features.row(r));
    }

    if (any_missing) {
        // mean-impute per feature from the observed cells
        for (std::size_t c = 0; c < ds.features.cols; ++c) {
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t r = 0; r < ds.features.rows; ++r) {
                if (!missing_mask[r][c]) {
                    sum += ds.features(r, c);
                    ++n;
                }
            }
            const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
            for (std::size_t r = 0; r < ds.features.rows; ++r) {
                if (missing_mask[r][c]) ds.features(r, c) = mean;
            }
        }
    }
    if (!ds.features.all_finite()) throw DataError("data file contains non-finite feature values");
    return ds;
}

/// Per-feature z-score with the dataset's own population statistics.
/// Constant features map to 0 and are recorded.
inline FeatureDataset standardize(FeatureDataset ds) {
    const std::size_t rows = ds.features.rows;
    const std::size_t cols = ds.features.cols;
    ds.feature_means.assign(cols, 0.0);
    ds.feature_stddevs.assign(cols, 0.0);
    ds.constant_features.clear();
    for (std::size_t c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < rows; ++r) sum += ds.features(r, c);
        const double mean = sum / static_cast<double>(rows);
        double sq = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            const double d = ds.features(r, c) - mean;
            sq += d * d;
        }
        const double stddev = std::sqrt(sq / static_cast<double>(rows));
        ds.feature_means[c] = mean;
        ds.feature_stddevs[c] = stddev;
        if (stddev == 0.0) {
            ds.constant_features.push_back(c);
            for (std::size_t r = 0; r < rows; ++r) ds.features(r, c) = 0.0;
        } else {
            for (std::size_t r = 0; r < rows; ++r) {
                ds.features(r, c) = (ds.features(r, c) - mean) / stddev;
            }
        }
    }
    ds.standardized = true;
    return ds;
}

/// Patient-level split. All rows of one patient land in one partition;
/// partition sizes are within one patient of the requested fractions.
inline std::array<DatasetView, 3> split_by_patient(const FeatureDataset& ds,
                                                   std::array<double, 3> fractions,
                                                   std::uint64_t seed) {
    const double fsum = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(fsum - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");

    std::vector<std::string> patients;
    std::map<std::string, std::vector<std::size_t>> rows_of;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        auto [it, inserted] = rows_of.try_emplace(ds.patient_ids[r]);
        if (inserted) patients.push_back(ds.patient_ids[r]);
        it->second.push_back(r);
    }
    if (patients.size() < 3) throw DataError("split_by_patient: need at least 3 distinct patients");

    Rng rng(mix_seed(seed, 0x59171));
    for (std::size_t i = patients.size(); i > 1; --i) {
        std::swap(patients[i - 1], patients[rng.below(i)]);
    }

    // largest-remainder apportionment so counts sum exactly
    const double n = static_cast<double>(patients.size());
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double want = fractions[i] * n;
        counts[i] = static_cast<std::size_t>(std::floor(want));
        remainders[i] = want - std::floor(want);
        assigned += counts[i];
    }
    while (assigned < patients.size()) {
        const int best = static_cast<int>(std::max_element(remainders.begin(), remainders.end()) -
                                          remainders.begin());
        counts[best] += 1;
        remainders[best] = -1.0;
        ++assigned;
    }

    std::array<DatasetView, 3> parts;
    std::size_t at = 0;
    for (int i = 0; i < 3; ++i) {
        parts[i].ds = &ds;
        for (std::size_t k = 0; k < counts[i]; ++k, ++at) {
            const auto& rows = rows_of[patients[at]];
            parts[i].rows.insert(parts[i].rows.end(), rows.begin(), rows.end());
        }
        std::sort(parts[i].rows.begin(), parts[i].rows.end());
    }
    return parts;
}

/// Uniform row subsample, deterministic per seed.
inline DatasetView subsample(const DatasetView& view, std::size_t n, std::uint64_t seed,
                             bool with_replacement) {
    if (n < 1) throw DataError("subsample: n must be >= 1");
    if (view.empty()) throw DataError("subsample: empty view");
    DatasetView out;
    out.ds = view.ds;
    out.group = view.group;
    out.label = view.label;
    Rng rng(mix_seed(seed, 0x5A3B));
    if (with_replacement) {
        out.with_replacement = true;
        out.rows.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            out.rows.push_back(view.rows[rng.below(view.rows.size())]);
        }
    } else {
        if (n > view.size()) {
            throw DataError("subsample: n=" + std::to_string(n) + " exceeds view size " +
                            std::to_string(view.size()) + " without replacement");
        }
        std::vector<std::size_t> pool = view.rows;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(n);
        out.rows = std::move(pool);
        out.with_replacement = view.with_replacement;
    }
    return out;
}

/// Equal-count merge of several views. A group smaller than its quota is
/// sampled with replacement and the merged view is flagged.
inline DatasetView balanced_merge(const std::vector<DatasetView>& views, std::size_t n_total,
                                  std::uint64_t seed) {
    if (views.size() < 2) throw DataError("balanced_merge: need >= 2 views");
    for (const auto& v : views) {
        if (v.empty()) throw DataError("balanced_merge: empty view for group '" + v.group + "'");
        if (v.ds != views.front().ds) throw DataError("balanced_merge: views of different datasets");
    }
    const std::size_t quota = n_total / views.size();
    if (quota == 0) throw DataError("balanced_merge: n_total too small");

    DatasetView out;
    out.ds = views.front().ds;
    out.label = views.front().label;
    out.group = "joint";
    for (std::size_t i = 0; i < views.size(); ++i) {
        const bool need_replacement = quota > views[i].size();
        DatasetView part = subsample(views[i], quota, mix_seed(seed, 0xBA1A + i), need_replacement);
        if (need_replacement || part.with_replacement) out.with_replacement = true;
        out.rows.insert(out.rows.end(), part.rows.begin(), part.rows.end());
    }
    return out;
}

struct RiskStrata {
    std::vector<double> labels;       // 1 iff value >= threshold
    double threshold = 0.0;           // interpolated quantile at p
    std::vector<double> auto_enroll;  // 1 iff value >= auto threshold (when requested)
    double auto_threshold = 0.0;
};

/// Binary high/low risk labels: the threshold is the linear-interpolation
/// quantile of the values at percentile p, and "at or above" maps to 1.
inline RiskStrata risk_stratify(std::span<const double> values, double p,
                                std::optional<double> auto_enroll_p = std::nullopt) {
    if (values.empty()) throw DataError("risk_stratify: empty values");
    if (!(p > 0.0 && p < 100.0)) throw ConfigError("risk_stratify: percentile must be in (0,100)");
    for (double v : values) {
        if (!std::isfinite(v)) throw DataError("risk_stratify: non-finite value");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    RiskStrata out;
    out.threshold = quantile_sorted(sorted, p / 100.0);
    out.labels.reserve(values.size());
    for (double v : values) out.labels.push_back(v >= out.threshold ? 1.0 : 0.0);
    if (auto_enroll_p) {
        if (!(*auto_enroll_p > 0.0 && *auto_enroll_p < 100.0)) {
            throw ConfigError("risk_stratify: auto-enroll percentile must be in (0,100)");
        }
        out.auto_threshold = quantile_sorted(sorted, *auto_enroll_p / 100.0);
        for (double v : values) out.auto_enroll.push_back(v >= out.auto_threshold ? 1.0 : 0.0);
    }
    return out;
}

/// Write a dataset back to TSV (full precision; round-trips losslessly).
inline void write_dataset_tsv(const FeatureDataset& ds, const std::string& path,
                              const std::string& demographics_col = "demographics",
                              const std::string& patient_id_col = "patient_id") {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write dataset: " + path);
    f << patient_id_col << '\t' << demographics_col;
    for (const auto& name : ds.feature_names) f << '\t' << name;
    for (const auto& [name, _] : ds.outcomes) f << '\t' << name;
    f << '\n';
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        f << ds.patient_ids[r] << '\t' << ds.groups[r];
        for (std::size_t c = 0; c < ds.features.cols; ++c) {
            f << '\t' << format_double_exact(ds.features(r, c));
        }
        for (const auto& [_, col] : ds.outcomes) f << '\t' << format_double_exact(col[r]);
        f << '\n';
    }
}

}  // namespace aequity
