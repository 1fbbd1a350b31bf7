#include "imbalforest/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "imbalforest/numio.hpp"

namespace imbalforest {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

// Reads all lines, tolerating CRLF and a missing final newline.
std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::size_t round_half_up(double x) {
    return static_cast<std::size_t>(std::floor(x + 0.5));
}

} // namespace

void RawSchema::validate() const {
    if (columns.empty())
        throw std::invalid_argument("schema has no columns");
    std::size_t labels = 0;
    std::unordered_set<std::string> seen;
    for (const auto& col : columns) {
        if (col.kind == ColumnKind::label) ++labels;
        if (!seen.insert(col.name).second)
            throw std::invalid_argument("duplicate column name '" + col.name +
                                        "' in schema");
    }
    if (labels != 1)
        throw std::invalid_argument("schema must have exactly one label column, got " +
                                    std::to_string(labels));
}

std::size_t RawSchema::label_index() const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].kind == ColumnKind::label) return i;
    throw std::invalid_argument("schema has no label column");
}

RawSchema table1_schema() {
    RawSchema schema;
    auto add = [&](std::string name, ColumnKind kind) {
        schema.columns.push_back({std::move(name), kind});
    };
    add("DOMAIN", ColumnKind::categorical_text);
    add("STATE", ColumnKind::categorical_text);
    add("ZIP CODE", ColumnKind::numeric);
    add("Time1", ColumnKind::numeric);
    add("Time2", ColumnKind::numeric);
    add("VIS1", ColumnKind::numeric);
    add("VIS2", ColumnKind::numeric);
    for (int i = 1; i <= 5; ++i)
        add("XRN" + std::to_string(i), ColumnKind::numeric);
    for (int i = 1; i <= 5; ++i)
        add("VAR" + std::to_string(i), ColumnKind::numeric);
    add("TRN_AMT", ColumnKind::numeric);
    add("TOTAL_TRN_AMT", ColumnKind::numeric);
    add("TRN_TYPE", ColumnKind::label);
    return schema;
}

RawDataset load_csv(const std::filesystem::path& path, const RawSchema& schema) {
    schema.validate();
    const auto lines = read_lines(path);
    if (lines.empty())
        throw std::runtime_error(path.string() + ": missing header line");

    const auto header = split_line(lines[0]);
    if (header.size() != schema.columns.size())
        throw std::runtime_error(path.string() + ": header has " +
                                 std::to_string(header.size()) + " columns, schema expects " +
                                 std::to_string(schema.columns.size()));
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] != schema.columns[i].name)
            throw std::runtime_error(path.string() + ": header mismatch at column " +
                                     std::to_string(i + 1) + ": expected '" +
                                     schema.columns[i].name + "', got '" + header[i] + "'");

    RawDataset raw;
    raw.schema = schema;
    raw.columns.reserve(schema.columns.size());
    for (const auto& col : schema.columns) {
        if (col.kind == ColumnKind::numeric)
            raw.columns.emplace_back(std::vector<double>{});
        else
            raw.columns.emplace_back(std::vector<std::string>{});
    }

    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty() && li + 1 == lines.size()) break; // trailing blank
        const auto cells = split_line(lines[li]);
        const std::size_t row = li; // 1-based data row number
        if (cells.size() != schema.columns.size())
            throw std::runtime_error(path.string() + ": row " + std::to_string(row) +
                                     ": expected " + std::to_string(schema.columns.size()) +
                                     " cells, got " + std::to_string(cells.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (schema.columns[c].kind == ColumnKind::numeric) {
                double v = 0.0;
                if (!parse_finite(cells[c], v))
                    throw std::runtime_error(path.string() + ": row " + std::to_string(row) +
                                             ", column " + schema.columns[c].name +
                                             ": cannot parse numeric value '" + cells[c] + "'");
                std::get<std::vector<double>>(raw.columns[c]).push_back(v);
            } else {
                std::get<std::vector<std::string>>(raw.columns[c]).push_back(cells[c]);
            }
        }
        ++raw.n_rows;
    }
    return raw;
}

void SynthSpec::validate() const {
    if (n_rows == 0)
        throw std::invalid_argument("synth spec: n_rows must be positive");
    if (!(fraud_rate > 0.0 && fraud_rate < 1.0))
        throw std::invalid_argument("synth spec: fraud_rate must be in (0, 1)");
    if (n_features == 0)
        throw std::invalid_argument("synth spec: n_features must be positive");
    if (class_separation < 0.0)
        throw std::invalid_argument("synth spec: class_separation must be nonnegative");
    if (include_redundant_pair && n_features < 2)
        throw std::invalid_argument("synth spec: redundant pair needs at least 2 features");
    if (round_half_up(double(n_rows) * fraud_rate) < 1)
        throw std::invalid_argument("synth spec: round(n_rows * fraud_rate) must be >= 1");
}

Dataset generate_synthetic(const SynthSpec& spec, const RandomSource& rng) {
    spec.validate();
    const std::size_t n_fraud = round_half_up(double(spec.n_rows) * spec.fraud_rate);

    Dataset ds;
    ds.feature_names.reserve(spec.n_features);
    for (std::size_t f = 0; f < spec.n_features; ++f)
        ds.feature_names.push_back("x" + std::to_string(f));

    ds.labels.assign(spec.n_rows, 0);
    std::fill(ds.labels.begin(), ds.labels.begin() + std::ptrdiff_t(n_fraud), 1);
    auto label_stream = rng.child("synth/labels").stream();
    label_stream.shuffle(ds.labels);

    auto feat = rng.child("synth/features").stream();
    ds.features.resize(spec.n_rows * spec.n_features);
    const std::size_t base_cols =
        spec.include_redundant_pair ? spec.n_features - 1 : spec.n_features;
    for (std::size_t r = 0; r < spec.n_rows; ++r) {
        const double mean = ds.labels[r] == 1 ? spec.class_separation : 0.0;
        double* row = ds.features.data() + r * spec.n_features;
        for (std::size_t f = 0; f < base_cols; ++f)
            row[f] = mean + feat.next_gaussian();
        if (spec.include_redundant_pair)
            row[spec.n_features - 1] =
                row[spec.n_features - 2] + 0.01 * feat.next_gaussian();
    }
    return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    check_dataset(ds);
    for (const auto& name : ds.feature_names)
        if (name.empty() || name.find(',') != std::string::npos ||
            name.find('\n') != std::string::npos)
            throw std::invalid_argument("feature name '" + name +
                                        "' cannot be stored in CSV");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open file for writing: " + path.string());
    std::ostringstream buf;
    for (const auto& name : ds.feature_names) buf << "f:" << name << ',';
    buf << "label\n";
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        for (double v : ds.row(r)) buf << format_double(v) << ',';
        buf << ds.labels[r] << '\n';
    }
    out << buf.str();
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty())
        throw std::runtime_error(path.string() + ": missing header line");

    const auto header = split_line(lines[0]);
    if (header.size() < 2 || header.back() != "label")
        throw std::runtime_error(path.string() +
                                 ": invalid processed dataset header (last column must be 'label')");
    Dataset ds;
    for (std::size_t i = 0; i + 1 < header.size(); ++i) {
        if (header[i].rfind("f:", 0) != 0)
            throw std::runtime_error(path.string() + ": invalid processed dataset header: column '" +
                                     header[i] + "' lacks the 'f:' prefix");
        ds.feature_names.push_back(header[i].substr(2));
    }

    const std::size_t n_features = ds.feature_names.size();
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty() && li + 1 == lines.size()) break;
        const auto cells = split_line(lines[li]);
        if (cells.size() != n_features + 1)
            throw std::runtime_error(path.string() + ": row " + std::to_string(li) +
                                     ": expected " + std::to_string(n_features + 1) +
                                     " cells, got " + std::to_string(cells.size()));
        for (std::size_t c = 0; c < n_features; ++c) {
            double v = 0.0;
            if (!parse_finite(cells[c], v))
                throw std::runtime_error(path.string() + ": row " + std::to_string(li) +
                                         ", column " + ds.feature_names[c] +
                                         ": cannot parse numeric value '" + cells[c] + "'");
            ds.features.push_back(v);
        }
        const auto& cell = cells[n_features];
        if (cell == "0")
            ds.labels.push_back(0);
        else if (cell == "1")
            ds.labels.push_back(1);
        else
            throw std::runtime_error(path.string() + ": row " + std::to_string(li) +
                                     ": invalid label '" + cell + "' (must be 0 or 1)");
    }
    return ds;
}

} // namespace imbalforest
