#include "simplex/data_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace simplex {

namespace {

const char* failure_name(ParseFailure failure) {
  switch (failure) {
    case ParseFailure::unreadable: return "cannot read file";
    case ParseFailure::ragged_row: return "ragged row";
    case ParseFailure::non_numeric: return "non-numeric value";
    case ParseFailure::malformed_pair: return "malformed index:value pair";
    case ParseFailure::missing_label: return "missing label";
  }
  return "parse failure";
}

std::string parse_message(ParseFailure failure, const std::string& source, size_t line,
                          const std::string& detail) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ":" << line;
  os << ": " << failure_name(failure);
  if (!detail.empty()) os << ": " << detail;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool skip_line(const std::string& trimmed) { return trimmed.empty() || trimmed.front() == '#'; }

std::vector<std::string> split_fields(const std::string& line, bool comma) {
  std::vector<std::string> fields;
  if (comma) {
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
  } else {
    std::istringstream is(line);
    std::string field;
    while (is >> field) fields.push_back(field);
  }
  return fields;
}

std::optional<double> parse_number(const std::string& token) {
  if (token.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return v;
}

class LabelMap {
 public:
  int intern(const std::string& token) {
    auto [it, inserted] = index_.try_emplace(token, static_cast<int>(names_.size()) + 1);
    if (inserted) names_.push_back(token);
    return it->second;
  }
  std::vector<std::string> names() const { return names_; }
  int size() const { return static_cast<int>(names_.size()); }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> names_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseFailure::unreadable, path, 0, "");
  return in;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

ParseError::ParseError(ParseFailure failure, const std::string& source, size_t line,
                       const std::string& detail)
    : Error(failure == ParseFailure::unreadable ? ErrorCode::io : ErrorCode::parse,
            parse_message(failure, source, line, detail)),
      failure_(failure),
      line_(line) {}

void Dataset::validate() const {
  require(size() >= 1, ErrorCode::invalid_data, "dataset is empty");
  require(features.allFinite(), ErrorCode::invalid_data, "dataset has non-finite features");
  if (!labeled()) return;
  require(static_cast<Eigen::Index>(labels.size()) == size(), ErrorCode::invalid_data,
          "dataset label count does not match its rows");
  require(classes >= 2, ErrorCode::invalid_data, "dataset needs at least 2 classes");
  require(static_cast<int>(label_names.size()) == classes, ErrorCode::invalid_data,
          "label mapping does not cover every class");
  for (const int y : labels) {
    require(y >= 1 && y <= classes, ErrorCode::invalid_data, "label out of range");
  }
}

Dataset Dataset::subset(std::span<const Eigen::Index> rows) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), dimension());
  out.classes = classes;
  out.label_names = label_names;
  for (size_t k = 0; k < rows.size(); ++k) {
    require(rows[k] >= 0 && rows[k] < size(), ErrorCode::invalid_argument, "subset row out of range");
    out.features.row(static_cast<Eigen::Index>(k)) = features.row(rows[k]);
    if (labeled()) out.labels.push_back(labels[static_cast<size_t>(rows[k])]);
  }
  return out;
}

Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  LabelMap mapping;
  std::optional<bool> comma;
  std::optional<size_t> width;
  bool header_pending = options.has_header;

  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (skip_line(line)) continue;
    if (!comma) comma = line.find(',') != std::string::npos;
    const auto fields = split_fields(line, *comma);
    if (header_pending) {
      header_pending = false;
      width = fields.size();
      continue;
    }
    if (!width) width = fields.size();
    if (fields.size() != *width) {
      throw ParseError(ParseFailure::ragged_row, source, line_no,
                       "expected " + std::to_string(*width) + " columns, found " +
                           std::to_string(fields.size()));
    }
    std::optional<size_t> label_at;
    if (options.label_column) {
      const int col = *options.label_column;
      const auto w = static_cast<int>(*width);
      const int resolved = col < 0 ? w + col : col;
      if (resolved < 0 || resolved >= w) {
        throw ParseError(ParseFailure::missing_label, source, line_no,
                         "label column " + std::to_string(col) + " outside " + std::to_string(w) +
                             " columns");
      }
      label_at = static_cast<size_t>(resolved);
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (size_t c = 0; c < fields.size(); ++c) {
      if (label_at && c == *label_at) {
        if (fields[c].empty()) throw ParseError(ParseFailure::missing_label, source, line_no, "empty label");
        labels.push_back(mapping.intern(fields[c]));
        continue;
      }
      const auto v = parse_number(fields[c]);
      if (!v) {
        throw ParseError(ParseFailure::non_numeric, source, line_no,
                         "column " + std::to_string(c + 1) + ": '" + fields[c] + "'");
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::invalid_data, source + ": no data rows");

  Dataset data;
  const auto p = static_cast<Eigen::Index>(rows.front().size());
  data.features.resize(static_cast<Eigen::Index>(rows.size()), p);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) data.features(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  data.labels = std::move(labels);
  data.classes = mapping.size();
  data.label_names = mapping.names();
  return data;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  auto in = open_input(path);
  return parse_csv(in, options, path);
}

Dataset parse_sparse(std::istream& in, Eigen::Index min_features, const std::string& source) {
  struct Entry {
    long index;
    double value;
  };
  std::vector<std::vector<Entry>> rows;
  std::vector<int> labels;
  LabelMap mapping;
  long min_index = -1;
  long max_index = -1;

  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string token;
    is >> token;
    labels.push_back(mapping.intern(token));
    std::vector<Entry> row;
    while (is >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos || colon == 0) {
        throw ParseError(ParseFailure::malformed_pair, source, line_no, "'" + token + "'");
      }
      const std::string index_text = token.substr(0, colon);
      char* end = nullptr;
      errno = 0;
      const long index = std::strtol(index_text.c_str(), &end, 10);
      const auto value = parse_number(token.substr(colon + 1));
      if (end != index_text.c_str() + index_text.size() || errno == ERANGE || index < 0 || !value) {
        throw ParseError(ParseFailure::malformed_pair, source, line_no, "'" + token + "'");
      }
      min_index = min_index < 0 ? index : std::min(min_index, index);
      max_index = std::max(max_index, index);
      row.push_back({index, *value});
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::invalid_data, source + ": no data rows");

  const long offset = min_index == 0 ? 0 : 1;
  const Eigen::Index width =
      std::max<Eigen::Index>(max_index < 0 ? 0 : max_index + 1 - offset, min_features);
  Dataset data;
  data.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), width);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (const auto& e : rows[i]) data.features(static_cast<Eigen::Index>(i), e.index - offset) = e.value;
  }
  data.labels = std::move(labels);
  data.classes = mapping.size();
  data.label_names = mapping.names();
  return data;
}

Dataset load_sparse(const std::string& path, Eigen::Index min_features) {
  auto in = open_input(path);
  return parse_sparse(in, min_features, path);
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::io, "cannot write " + path);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dimension(); ++j) {
      if (j > 0) out << ',';
      out << format_double(data.features(i, j));
    }
    if (data.labeled()) {
      if (data.dimension() > 0) out << ',';
      out << data.label_names[static_cast<size_t>(data.labels[static_cast<size_t>(i)] - 1)];
    }
    out << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::io, "failed writing " + path);
}

void save_sparse(const Dataset& data, const std::string& path) {
  require(data.labeled(), ErrorCode::invalid_argument, "sparse format requires labels");
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::io, "cannot write " + path);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out << data.label_names[static_cast<size_t>(data.labels[static_cast<size_t>(i)] - 1)];
    for (Eigen::Index j = 0; j < data.dimension(); ++j) {
      if (data.features(i, j) != 0.0) out << ' ' << (j + 1) << ':' << format_double(data.features(i, j));
    }
    out << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::io, "failed writing " + path);
}

Dataset remap_labels(const Dataset& data, const std::vector<std::string>& label_names) {
  std::map<std::string, int> index;
  for (size_t k = 0; k < label_names.size(); ++k) index.emplace(label_names[k], static_cast<int>(k) + 1);
  Dataset out = data;
  out.classes = static_cast<int>(label_names.size());
  out.label_names = label_names;
  for (auto& y : out.labels) {
    const auto& token = data.label_names[static_cast<size_t>(y - 1)];
    const auto it = index.find(token);
    require(it != index.end(), ErrorCode::invalid_data, "label '" + token + "' is unknown to the model");
    y = it->second;
  }
  return out;
}

SplitResult split(const Dataset& data, const SplitSpec& spec) {
  require(spec.train_fraction > 0.0 && spec.train_fraction < 1.0, ErrorCode::invalid_argument,
          "train fraction must lie in (0, 1)");
  const Eigen::Index n = data.size();
  std::mt19937_64 rng(spec.seed);
  SplitResult result;

  bool stratify = spec.stratified && data.labeled();
  std::vector<std::vector<Eigen::Index>> by_class;
  if (stratify) {
    by_class.resize(static_cast<size_t>(data.classes));
    for (Eigen::Index i = 0; i < n; ++i) by_class[static_cast<size_t>(data.labels[static_cast<size_t>(i)] - 1)].push_back(i);
    for (const auto& members : by_class) {
      if (members.size() == 1) {
        stratify = false;
        result.stratification_fallback = true;
        break;
      }
    }
  }

  if (stratify) {
    for (auto& members : by_class) {
      std::shuffle(members.begin(), members.end(), rng);
      const auto take = static_cast<size_t>(
          std::llround(spec.train_fraction * static_cast<double>(members.size())));
      result.train_rows.insert(result.train_rows.end(), members.begin(),
                               members.begin() + static_cast<std::ptrdiff_t>(take));
      result.validation_rows.insert(result.validation_rows.end(),
                                    members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
    }
  } else {
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    const auto take = static_cast<size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
    result.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    result.validation_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(take), order.end());
  }
  std::sort(result.train_rows.begin(), result.train_rows.end());
  std::sort(result.validation_rows.begin(), result.validation_rows.end());
  require(!result.train_rows.empty() && !result.validation_rows.empty(), ErrorCode::invalid_data,
          "split leaves an empty part; dataset has " + std::to_string(n) + " rows");
  result.train = data.subset(result.train_rows);
  result.validation = data.subset(result.validation_rows);
  return result;
}

Standardizer Standardizer::fit(const Eigen::Ref<const Eigen::MatrixXd>& features) {
  require(features.rows() >= 1, ErrorCode::invalid_argument, "cannot standardize an empty dataset");
  Standardizer s;
  s.mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - s.mean.transpose();
  s.scale = (centered.array().square().colwise().sum() / static_cast<double>(features.rows()))
                .sqrt()
                .transpose();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
    if (!(s.scale(j) > 0.0)) s.scale(j) = 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::Ref<const Eigen::MatrixXd>& features) const {
  require(features.cols() == mean.size(), ErrorCode::dimension_mismatch,
          "standardizer expects " + std::to_string(mean.size()) + " features");
  return (features.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Dataset Standardizer::apply(const Dataset& data) const {
  Dataset out = data;
  out.features = apply(data.features);
  return out;
}

}  // namespace simplex
