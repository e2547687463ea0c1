// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#include "ems/supervision.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ems/parallel.hpp"

namespace ems {

void ExpertTable::add_document(std::string doc_id, std::vector<ExpertPrediction> rows) {
  if (index_.count(doc_id)) throw Error("expert table: duplicate document '" + doc_id + "'");
  index_.emplace(doc_id, documents_.size());
  documents_.emplace_back(std::move(doc_id), std::move(rows));
}

std::span<const ExpertPrediction> ExpertTable::rows(const std::string& doc_id) const {
  auto it = index_.find(doc_id);
  if (it == index_.end()) throw Error("expert table: no predictions for document '" + doc_id + "'");
  return documents_[it->second].second;
}

size_t ExpertTable::row_count() const {
  size_t total = 0;
  for (const auto& [id, rows] : documents_) total += rows.size();
  return total;
}

void ExpertTable::check_covers(const CorpusSplit& split) const {
  const Eigen::Index width = split.schema.size() + 1;
  for (const Document& doc : split.documents) {
    auto it = index_.find(doc.doc_id);
    if (it == index_.end()) throw Error("alignment error: no expert predictions for document '" + doc.doc_id + "'");
    const auto& rows = documents_[it->second].second;
    if (rows.size() != doc.instances.size())
      throw Error("alignment error: document '" + doc.doc_id + "' has " + std::to_string(doc.instances.size()) +
                  " instances but " + std::to_string(rows.size()) + " prediction rows");
    for (size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].distribution.size() != width)
        throw Error("alignment error: document '" + doc.doc_id + "' row " + std::to_string(i) +
                    " has distribution width " + std::to_string(rows[i].distribution.size()) + ", expected " +
                    std::to_string(width));
      if (!rows[i].labels.within(split.schema.size()))
        throw Error("alignment error: document '" + doc.doc_id + "' row " + std::to_string(i) +
                    " has a label outside the schema");
    }
  }
}

ExpertPrediction make_prediction(const Eigen::Ref<const Eigen::VectorXd>& logits) {
  return {predict_labels(logits), predict_distribution(logits)};
}

ExpertTable run_expert(const ModelParamsd& params, const CorpusSplit& split, int threads) {
  if (params.num_classes() != split.schema.size())
    throw Error("run_expert: model has " + std::to_string(params.num_classes()) + " classes, corpus has " +
                std::to_string(split.schema.size()));
  if (params.feature_dim() != split.feature_dim)
    throw Error("run_expert: dimension mismatch (model " + std::to_string(params.feature_dim()) + ", corpus " +
                std::to_string(split.feature_dim) + ")");
  std::vector<std::vector<ExpertPrediction>> rows(split.documents.size());
  parallel_for(split.documents.size(), threads, [&](size_t d) {
    const Document& doc = split.documents[d];
    rows[d].reserve(doc.instances.size());
    for (const Instance& inst : doc.instances) rows[d].push_back(make_prediction(forward(params, inst.features)));
  });
  ExpertTable table;
  for (size_t d = 0; d < rows.size(); ++d) table.add_document(split.documents[d].doc_id, std::move(rows[d]));
  return table;
}

namespace {

void append_double(std::string& out, double value) {
  char buffer[32];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  out.append(buffer, end);
}

std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view text, const std::string& where) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error(where + ": bad number '" + std::string(text) + "'");
  return value;
}

}  // namespace

void write_predictions(const ExpertTable& table, std::ostream& out, const std::string& provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << "# doc_id\tinstance_index\tlabel_indices\tdistribution\n";
  std::string line;
  for (const auto& [doc_id, rows] : table.documents()) {
    for (size_t i = 0; i < rows.size(); ++i) {
      line = doc_id;
      line += '\t';
      line += std::to_string(i);
      line += '\t';
      if (rows[i].labels.empty()) line += '-';
      bool first = true;
      for (int r : rows[i].labels) {
        if (!first) line += ',';
        line += std::to_string(r);
        first = false;
      }
      line += '\t';
      for (Eigen::Index k = 0; k < rows[i].distribution.size(); ++k) {
        if (k) line += ',';
        append_double(line, rows[i].distribution[k]);
      }
      out << line << '\n';
    }
  }
}

void save_predictions(const ExpertTable& table, const std::filesystem::path& path, const std::string& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_predictions(table, out, provenance);
}

ExpertTable read_predictions(std::istream& in, const std::string& source) {
  std::vector<std::pair<std::string, std::vector<ExpertPrediction>>> docs;
  std::unordered_map<std::string, size_t> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto fields = split_on(line, '\t');
    if (fields.size() != 4) throw Error(where + ": expected 4 tab-separated fields, got " + std::to_string(fields.size()));
    const std::string doc_id(fields[0]);
    const auto index = parse_number<size_t>(fields[1], where);

    ExpertPrediction row;
    if (fields[2] != "-" && !fields[2].empty()) {
      std::vector<int> labels;
      for (auto part : split_on(fields[2], ',')) labels.push_back(parse_number<int>(part, where));
      row.labels = LabelSet(std::move(labels));
    }
    const auto probs = split_on(fields[3], ',');
    row.distribution.resize(static_cast<Eigen::Index>(probs.size()));
    for (size_t k = 0; k < probs.size(); ++k) row.distribution[static_cast<Eigen::Index>(k)] = parse_number<double>(probs[k], where);
    const double total = row.distribution.sum();
    if (!row.distribution.allFinite() || (row.distribution.array() < 0).any() || std::abs(total - 1.0) > 1e-6)
      throw Error(where + ": row for document '" + doc_id + "' instance " + std::to_string(index) +
                  " is not a probability distribution (sum " + std::to_string(total) + ")");

    auto it = seen.find(doc_id);
    if (it == seen.end()) {
      it = seen.emplace(doc_id, docs.size()).first;
      docs.emplace_back(doc_id, std::vector<ExpertPrediction>{});
    }
    auto& rows = docs[it->second].second;
    if (index != rows.size())
      throw Error(where + ": document '" + doc_id + "' instance index " + std::to_string(index) + " out of order (expected " +
                  std::to_string(rows.size()) + ")");
    rows.push_back(std::move(row));
  }
  ExpertTable table;
  for (auto& [id, rows] : docs) table.add_document(std::move(id), std::move(rows));
  return table;
}

ExpertTable read_predictions(std::istream& in, const CorpusSplit& split, const std::string& source) {
  ExpertTable table = read_predictions(in, source);
  std::unordered_map<std::string, size_t> corpus_ids;
  for (size_t d = 0; d < split.documents.size(); ++d) corpus_ids.emplace(split.documents[d].doc_id, d);
  for (const auto& [doc_id, rows] : table.documents())
    if (!corpus_ids.count(doc_id)) throw Error(source + ": unknown doc_id '" + doc_id + "'");
  table.check_covers(split);
  return restrict_to(table, split);
}

ExpertTable load_predictions(const std::filesystem::path& path, const CorpusSplit& split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open prediction file " + path.string());
  return read_predictions(in, split, path.string());
}

ExpertTable restrict_to(const ExpertTable& table, const CorpusSplit& split) {
  table.check_covers(split);
  ExpertTable out;
  for (const Document& doc : split.documents) {
    auto rows = table.rows(doc.doc_id);
    out.add_document(doc.doc_id, std::vector<ExpertPrediction>(rows.begin(), rows.end()));
  }
  return out;
}

}  // namespace ems
