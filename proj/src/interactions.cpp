#include "lsnet/interactions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <set>

#include "lsnet/csv.hpp"
#include "lsnet/error.hpp"

namespace lsnet {

InteractionMatrix::InteractionMatrix(std::vector<std::string> hosts, std::vector<std::string> parasites,
                                     std::vector<std::uint8_t> cells, std::vector<std::optional<int>> years)
    : hosts_(std::move(hosts)), parasites_(std::move(parasites)), cells_(std::move(cells)), years_(std::move(years)) {
  if (cells_.size() != hosts_.size() * parasites_.size())
    throw Error(ErrorCode::Internal, "cell count does not match labels");
  if (!years_.empty() && years_.size() != cells_.size())
    throw Error(ErrorCode::Internal, "year count does not match cells");
  for (auto c : cells_)
    if (c > 1) throw Error(ErrorCode::InvalidRecord, "cells must be 0 or 1");
  if (std::set<std::string>(hosts_.begin(), hosts_.end()).size() != hosts_.size())
    throw Error(ErrorCode::InvalidRecord, "duplicate host label");
  if (std::set<std::string>(parasites_.begin(), parasites_.end()).size() != parasites_.size())
    throw Error(ErrorCode::InvalidRecord, "duplicate parasite label");
}

std::size_t InteractionMatrix::row_sum(std::size_t h) const {
  return static_cast<std::size_t>(std::accumulate(cells_.begin() + static_cast<std::ptrdiff_t>(h * cols()),
                                                  cells_.begin() + static_cast<std::ptrdiff_t>((h + 1) * cols()), 0));
}

std::size_t InteractionMatrix::col_sum(std::size_t j) const {
  std::size_t n = 0;
  for (std::size_t h = 0; h < rows(); ++h) n += at(h, j);
  return n;
}

std::size_t InteractionMatrix::ones() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

std::vector<std::vector<std::size_t>> InteractionMatrix::column_ones() const {
  std::vector<std::vector<std::size_t>> out(cols());
  for (std::size_t h = 0; h < rows(); ++h)
    for (std::size_t j = 0; j < cols(); ++j)
      if (at(h, j)) out[j].push_back(h);
  return out;
}

InteractionMatrix InteractionMatrix::without(const std::vector<Cell>& cells) const {
  auto copy = cells_;
  for (const auto& c : cells) copy[c.h * cols() + c.j] = 0;
  return InteractionMatrix(hosts_, parasites_, std::move(copy), years_);
}

InteractionMatrix InteractionMatrix::select_columns(const std::vector<std::size_t>& cols_keep) const {
  std::vector<std::string> ps;
  for (auto j : cols_keep) ps.push_back(parasites_[j]);
  std::vector<std::uint8_t> cells(rows() * cols_keep.size());
  std::vector<std::optional<int>> years(has_years() ? cells.size() : 0);
  for (std::size_t h = 0; h < rows(); ++h)
    for (std::size_t k = 0; k < cols_keep.size(); ++k) {
      cells[h * cols_keep.size() + k] = at(h, cols_keep[k]);
      if (has_years()) years[h * cols_keep.size() + k] = year(h, cols_keep[k]);
    }
  return InteractionMatrix(hosts_, std::move(ps), std::move(cells), std::move(years));
}

InteractionMatrix InteractionMatrix::select_rows(const std::vector<std::size_t>& rows_keep) const {
  std::vector<std::string> hs;
  for (auto h : rows_keep) hs.push_back(hosts_[h]);
  std::vector<std::uint8_t> cells(rows_keep.size() * cols());
  std::vector<std::optional<int>> years(has_years() ? cells.size() : 0);
  for (std::size_t k = 0; k < rows_keep.size(); ++k)
    for (std::size_t j = 0; j < cols(); ++j) {
      cells[k * cols() + j] = at(rows_keep[k], j);
      if (has_years()) years[k * cols() + j] = year(rows_keep[k], j);
    }
  return InteractionMatrix(std::move(hs), parasites_, std::move(cells), std::move(years));
}

InteractionMatrix build_matrix(const std::vector<InteractionRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no interaction records");
  std::vector<std::string> hosts;
  std::vector<std::string> parasites;
  std::map<std::string, std::size_t> host_index;
  std::map<std::string, std::size_t> parasite_index;
  bool any_year = false;
  for (const auto& r : records) {
    if (r.host.empty() || r.parasite.empty()) throw Error(ErrorCode::InvalidRecord, "empty host or parasite label");
    if (r.year && (*r.year < 1800 || *r.year > 2100))
      throw Error(ErrorCode::InvalidRecord, "implausible year " + std::to_string(*r.year));
    if (host_index.emplace(r.host, hosts.size()).second) hosts.push_back(r.host);
    if (parasite_index.emplace(r.parasite, parasites.size()).second) parasites.push_back(r.parasite);
    any_year = any_year || r.year.has_value();
  }
  const std::size_t cols = parasites.size();
  std::vector<std::uint8_t> cells(hosts.size() * cols, 0);
  std::vector<std::optional<int>> years(any_year ? cells.size() : 0);
  for (const auto& r : records) {
    const std::size_t k = host_index[r.host] * cols + parasite_index[r.parasite];
    cells[k] = 1;
    if (r.year) years[k] = years[k] ? std::min(*years[k], *r.year) : *r.year;
  }
  return InteractionMatrix(std::move(hosts), std::move(parasites), std::move(cells), std::move(years));
}

std::vector<InteractionRecord> to_records(const InteractionMatrix& z) {
  std::vector<InteractionRecord> out;
  for (std::size_t h = 0; h < z.rows(); ++h)
    for (std::size_t j = 0; j < z.cols(); ++j)
      if (z.at(h, j)) out.push_back({z.hosts()[h], z.parasites()[j], z.year(h, j), std::nullopt});
  return out;
}

namespace {

InteractionMatrix drop_empty_rows(const InteractionMatrix& z) {
  std::vector<std::size_t> keep;
  for (std::size_t h = 0; h < z.rows(); ++h)
    if (z.row_sum(h) > 0) keep.push_back(h);
  return z.select_rows(keep);
}

}  // namespace

InteractionMatrix drop_single_host_parasites(const InteractionMatrix& z) {
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < z.cols(); ++j)
    if (z.col_sum(j) != 1) keep.push_back(j);
  if (keep.empty()) throw Error(ErrorCode::AllColumnsDropped, "every parasite has a single host");
  auto out = drop_empty_rows(z.select_columns(keep));
  if (out.rows() == 0) throw Error(ErrorCode::AllColumnsDropped, "no hosts remain");
  return out;
}

InteractionMatrix filter_parasites(const InteractionMatrix& z, const std::function<bool(const std::string&)>& keep) {
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < z.cols(); ++j)
    if (keep(z.parasites()[j])) cols.push_back(j);
  if (cols.empty()) throw Error(ErrorCode::AllColumnsDropped, "parasite filter removed every column");
  return drop_empty_rows(z.select_columns(cols));
}

TemporalSplit temporal_split(const InteractionMatrix& z, int cutoff) {
  std::vector<Cell> missing;
  std::vector<Cell> late;
  for (std::size_t h = 0; h < z.rows(); ++h)
    for (std::size_t j = 0; j < z.cols(); ++j) {
      if (!z.at(h, j)) continue;
      auto y = z.year(h, j);
      if (!y) missing.push_back({h, j});
      else if (*y > cutoff) late.push_back({h, j});
    }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " one-cells lack a year, first (" + z.hosts()[missing[0].h] +
                      ", " + z.parasites()[missing[0].j] + ")";
    throw Error(ErrorCode::MissingYears, msg);
  }
  return {z.without(late), late};
}

DegreeDistribution degree_distributions(const InteractionMatrix& z) {
  DegreeDistribution d;
  for (std::size_t h = 0; h < z.rows(); ++h) {
    d.host_degrees.push_back(z.row_sum(h));
    ++d.host_histogram[d.host_degrees.back()];
  }
  for (std::size_t j = 0; j < z.cols(); ++j) {
    d.parasite_degrees.push_back(z.col_sum(j));
    ++d.parasite_histogram[d.parasite_degrees.back()];
  }
  return d;
}

std::vector<std::size_t> left_order_permutation(const InteractionMatrix& z) {
  std::vector<std::size_t> perm(z.cols());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t h = 0; h < z.rows(); ++h)
      if (z.at(h, a) != z.at(h, b)) return z.at(h, a) > z.at(h, b);
    return z.parasites()[a] < z.parasites()[b];
  });
  return perm;
}

InteractionMatrix left_order(const InteractionMatrix& z) { return z.select_columns(left_order_permutation(z)); }

std::string normalize_label(const std::string& label, const LabelNormalization& opts) {
  std::string out = csv::trim(label);
  for (auto& c : out) {
    if (opts.underscores_as_spaces && c == '_') c = ' ';
    if (opts.case_fold) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

namespace {

std::optional<int> parse_int_field(const std::string& raw, const std::string& what, std::size_t line) {
  const std::string s = csv::trim(raw);
  if (s.empty() || s == "NA") return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::InvalidRecord, "line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
  return v;
}

}  // namespace

std::vector<InteractionRecord> read_edges_csv(const std::string& path) {
  auto rows = csv::read_file(path);
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, path + " is empty");
  const auto& header = rows.front();
  int year_col = -1;
  int evidence_col = -1;
  if (header.size() < 2 || csv::trim(header[0]) != "host" || csv::trim(header[1]) != "parasite")
    throw Error(ErrorCode::InvalidRecord, path + ": header must start with host,parasite");
  for (std::size_t k = 2; k < header.size(); ++k) {
    const auto name = csv::trim(header[k]);
    if (name == "year") year_col = static_cast<int>(k);
    else if (name == "evidence_count") evidence_col = static_cast<int>(k);
    else throw Error(ErrorCode::InvalidRecord, path + ": unknown column '" + name + "'");
  }
  std::vector<InteractionRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && csv::trim(row[0]).empty()) continue;
    if (row.size() != header.size())
      throw Error(ErrorCode::InvalidRecord, path + " line " + std::to_string(r + 1) + ": wrong field count");
    InteractionRecord rec{csv::trim(row[0]), csv::trim(row[1]), std::nullopt, std::nullopt};
    if (rec.host.empty() || rec.parasite.empty())
      throw Error(ErrorCode::InvalidRecord, path + " line " + std::to_string(r + 1) + ": empty label");
    if (year_col >= 0) rec.year = parse_int_field(row[static_cast<std::size_t>(year_col)], "year", r + 1);
    if (evidence_col >= 0) {
      rec.evidence_count = parse_int_field(row[static_cast<std::size_t>(evidence_col)], "evidence_count", r + 1);
      if (rec.evidence_count && *rec.evidence_count < 1)
        throw Error(ErrorCode::InvalidRecord, path + " line " + std::to_string(r + 1) + ": evidence_count < 1");
    }
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw Error(ErrorCode::EmptyInput, path + " has no records");
  return out;
}

void write_edges_csv(const std::string& path, const InteractionMatrix& z) {
  std::string out = z.has_years() ? "host,parasite,year\n" : "host,parasite\n";
  for (const auto& r : to_records(z)) {
    out += csv::escape(r.host) + "," + csv::escape(r.parasite);
    if (z.has_years()) out += "," + (r.year ? std::to_string(*r.year) : std::string());
    out += "\n";
  }
  csv::write_file(path, out);
}

void write_matrix_csv(const std::string& path, const InteractionMatrix& z) {
  std::string out = "host";
  for (const auto& p : z.parasites()) out += "," + csv::escape(p);
  out += "\n";
  for (std::size_t h = 0; h < z.rows(); ++h) {
    out += csv::escape(z.hosts()[h]);
    for (std::size_t j = 0; j < z.cols(); ++j) out += z.at(h, j) ? ",1" : ",0";
    out += "\n";
  }
  csv::write_file(path, out);
}

void write_probability_csv(const std::string& path, const std::vector<std::string>& hosts,
                           const std::vector<std::string>& parasites, const Matrix& p) {
  std::string out = "host";
  for (const auto& name : parasites) out += "," + csv::escape(name);
  out += "\n";
  for (std::size_t h = 0; h < hosts.size(); ++h) {
    out += csv::escape(hosts[h]);
    for (std::size_t j = 0; j < parasites.size(); ++j) out += "," + csv::fixed(p(h, j), 6);
    out += "\n";
  }
  csv::write_file(path, out);
}

Matrix read_probability_csv(const std::string& path, std::vector<std::string>* hosts,
                            std::vector<std::string>* parasites) {
  auto rows = csv::read_file(path);
  if (rows.size() < 2 || rows[0].size() < 2) throw Error(ErrorCode::InvalidRecord, path + ": not a matrix CSV");
  const std::size_t cols = rows[0].size() - 1;
  Matrix m(rows.size() - 1, cols);
  if (parasites) parasites->assign(rows[0].begin() + 1, rows[0].end());
  if (hosts) hosts->clear();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != cols + 1) throw Error(ErrorCode::InvalidRecord, path + ": ragged row " + std::to_string(r + 1));
    if (hosts) hosts->push_back(rows[r][0]);
    for (std::size_t j = 0; j < cols; ++j) {
      const std::string& s = rows[r][j + 1];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(ErrorCode::InvalidRecord, path + ": bad number '" + s + "'");
      m(r - 1, j) = v;
    }
  }
  return m;
}

InteractionMatrix read_matrix_csv(const std::string& path) {
  std::vector<std::string> hosts;
  std::vector<std::string> parasites;
  Matrix m = read_probability_csv(path, &hosts, &parasites);
  std::vector<std::uint8_t> cells(m.data().size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const double v = m.data()[k];
    if (v != 0.0 && v != 1.0) throw Error(ErrorCode::InvalidRecord, path + ": cells must be 0/1");
    cells[k] = v == 1.0 ? 1 : 0;
  }
  return InteractionMatrix(std::move(hosts), std::move(parasites), std::move(cells));
}

}  // namespace lsnet
