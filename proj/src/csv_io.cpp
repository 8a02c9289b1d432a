#include "mmdscan/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mmdscan/errors.hpp"

namespace mmdscan {
namespace {

struct Row {
  std::size_t line = 0;
  std::string label;
  std::vector<double> values;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, std::size_t line) {
  std::string_view text = trim(field);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "not a number: '" + std::string(trim(field)) + "'");
  }
  return v;
}

std::vector<Row> read_rows(std::istream& in) {
  std::vector<Row> rows;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const std::string_view body = trim(text);
    if (body.empty() || body.front() == '#') continue;

    Row row;
    row.line = line;
    std::size_t start = 0;
    bool first = true;
    while (true) {
      const auto comma = body.find(',', start);
      const std::string_view field =
          body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (first && trim(field).starts_with("id:")) {
        row.label = std::string(trim(field).substr(3));
      } else {
        row.values.push_back(parse_number(field, line));
      }
      first = false;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Sequence row_to_sequence(const Row& row, std::size_t dim) {
  if (row.values.size() % dim != 0) {
    throw ParseError(row.line, std::to_string(row.values.size()) +
                                   " values do not group into samples of dimension " +
                                   std::to_string(dim));
  }
  if (row.values.size() / dim < 2) {
    throw InvalidInput("line " + std::to_string(row.line) +
                       ": a sequence needs at least 2 samples after grouping");
  }
  return Sequence::from_sample_major(row.values, dim);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Dataset parse_dataset(std::istream& sequences, std::size_t dim, std::istream* reference) {
  if (dim == 0) throw InvalidInput("dimension must be >= 1");
  const std::vector<Row> rows = read_rows(sequences);
  if (rows.empty()) throw InvalidInput("dataset file has no data rows");

  const std::size_t width = rows.front().values.size();
  std::vector<Sequence> seqs;
  std::vector<std::string> labels;
  bool any_label = false;
  for (const Row& row : rows) {
    if (row.values.size() != width) {
      throw ParseError(row.line, "row has " + std::to_string(row.values.size()) +
                                     " values, expected " + std::to_string(width));
    }
    seqs.push_back(row_to_sequence(row, dim));
    labels.push_back(row.label);
    any_label = any_label || !row.label.empty();
  }

  std::optional<Sequence> ref;
  if (reference != nullptr) {
    const std::vector<Row> ref_rows = read_rows(*reference);
    if (ref_rows.empty()) throw InvalidInput("reference file has no data rows");
    if (ref_rows.size() > 1) {
      throw ParseError(ref_rows[1].line, "reference file must hold exactly one sequence");
    }
    ref = row_to_sequence(ref_rows.front(), dim);
  }

  Dataset d(std::move(seqs), std::move(ref));
  if (any_label) d.set_labels(std::move(labels));
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, std::size_t dim,
                     const std::optional<std::filesystem::path>& reference_path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read dataset file " + path.string());
  if (!reference_path) return parse_dataset(in, dim);
  std::ifstream ref(*reference_path);
  if (!ref) throw InvalidInput("cannot read reference file " + reference_path->string());
  return parse_dataset(in, dim, &ref);
}

void write_sequence_csv(std::ostream& out, const Sequence& s) {
  for (std::size_t j = 0; j < s.size(); ++j) {
    for (std::size_t c = 0; c < s.dim(); ++c) {
      if (j + c > 0) out << ',';
      out << format_double(s.at(j, c));
    }
  }
  out << '\n';
}

void write_dataset_csv(std::ostream& out, const Dataset& d) {
  for (std::size_t k = 0; k < d.n(); ++k) {
    if (!d.labels().empty() && !d.labels()[k].empty()) out << "id:" << d.labels()[k] << ',';
    write_sequence_csv(out, d.sequence(k));
  }
}

}  // namespace mmdscan
