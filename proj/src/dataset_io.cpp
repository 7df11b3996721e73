#include "valuegap/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "valuegap/csv.hpp"

namespace valuegap {

using Eigen::Index;

namespace {

constexpr const char* kRealTag = "real-vector";
constexpr const char* kTabularTag = "tabular-index";

struct Header {
  StateKind kind = StateKind::RealVector;
  Index dim = 0;
  std::vector<int> sizes;
};

long field_long(const std::string& field, long line, const char* what) {
  try {
    return csv::parse_long(field);
  } catch (const std::invalid_argument&) {
    throw DatasetParseError(line, std::string(what) + " is not an integer: '" + field + "'");
  }
}

double field_double(const std::string& field, long line) {
  try {
    return csv::parse_double(field);
  } catch (const std::invalid_argument&) {
    throw DatasetParseError(line, "not a number: '" + field + "'");
  }
}

Header parse_header(const std::string& text, long line) {
  const std::vector<std::string> f = csv::split(text);
  Header h;
  if (f[0] == kRealTag) {
    h.kind = StateKind::RealVector;
    if (f.size() != 2) throw DatasetParseError(line, "expected 'real-vector,<d>'");
  } else if (f[0] == kTabularTag) {
    h.kind = StateKind::TabularIndex;
  } else {
    throw DatasetParseError(line, "unknown state kind '" + f[0] + "'");
  }
  if (f.size() < 2) throw DatasetParseError(line, "missing state dimension");
  const long d = field_long(f[1], line, "dimension");
  if (d < 1 || d > 1'000'000) throw DatasetParseError(line, "dimension out of range");
  h.dim = d;
  if (h.kind == StateKind::TabularIndex) {
    if (static_cast<long>(f.size()) != 2 + d) {
      throw DatasetParseError(line, "expected " + std::to_string(d) + " component sizes");
    }
    for (long i = 0; i < d; ++i) {
      const long n = field_long(f[static_cast<std::size_t>(2 + i)], line, "component size");
      if (n < 1 || n > std::numeric_limits<int>::max()) {
        throw DatasetParseError(line, "component size out of range");
      }
      h.sizes.push_back(static_cast<int>(n));
    }
  }
  return h;
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

LoadedDataset read_dataset_csv(std::istream& in) {
  std::string text;
  long line = 0;
  bool have_header = false;
  Header h;
  std::vector<std::vector<double>> rows;
  std::vector<long> row_lines;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text)) continue;
    if (!have_header) {
      h = parse_header(text, line);
      have_header = true;
      continue;
    }
    const std::vector<std::string> f = csv::split(text);
    const std::size_t expected = static_cast<std::size_t>(2 * h.dim + 1);
    if (f.size() != expected) {
      throw DatasetParseError(line, "expected " + std::to_string(expected) + " fields, got " +
                                        std::to_string(f.size()));
    }
    std::vector<double> row(expected);
    for (std::size_t i = 0; i < expected; ++i) {
      const bool reward = i == static_cast<std::size_t>(h.dim);
      if (h.kind == StateKind::TabularIndex && !reward) {
        row[i] = static_cast<double>(field_long(f[i], line, "state index"));
      } else {
        row[i] = field_double(f[i], line);
      }
    }
    rows.push_back(std::move(row));
    row_lines.push_back(line);
  }
  if (!have_header) throw DatasetParseError(line, "missing header line");
  if (rows.empty()) throw DatasetParseError(line, "no transitions");

  const Index n = static_cast<Index>(rows.size());
  const Index d = h.dim;
  Eigen::VectorXd rewards(n);
  for (Index t = 0; t < n; ++t) rewards(t) = rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(d)];

  if (h.kind == StateKind::RealVector) {
    Eigen::MatrixXd s(d, n), sn(d, n);
    for (Index t = 0; t < n; ++t) {
      const auto& r = rows[static_cast<std::size_t>(t)];
      for (Index i = 0; i < d; ++i) {
        s(i, t) = r[static_cast<std::size_t>(i)];
        sn(i, t) = r[static_cast<std::size_t>(d + 1 + i)];
      }
    }
    try {
      return LoadedDataset{TransitionDataset::from_real(std::move(s), std::move(rewards),
                                                        std::move(sn)),
                           {}};
    } catch (const ValidationError& e) {
      throw DatasetParseError(row_lines.front(), e.what());
    }
  }

  Eigen::MatrixXi s(d, n), sn(d, n);
  for (Index t = 0; t < n; ++t) {
    const auto& r = rows[static_cast<std::size_t>(t)];
    for (Index i = 0; i < d; ++i) {
      const int size = h.sizes[static_cast<std::size_t>(i)];
      const double a = r[static_cast<std::size_t>(i)];
      const double b = r[static_cast<std::size_t>(d + 1 + i)];
      if (a < 0 || a >= size || b < 0 || b >= size) {
        throw DatasetParseError(row_lines[static_cast<std::size_t>(t)],
                                "component " + std::to_string(i) + " index outside [0, " +
                                    std::to_string(size) + ")");
      }
      s(i, t) = static_cast<int>(a);
      sn(i, t) = static_cast<int>(b);
    }
  }
  return LoadedDataset{TransitionDataset::from_tabular(std::move(s), std::move(rewards),
                                                       std::move(sn)),
                       h.sizes};
}

LoadedDataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file '" + path.string() + "'");
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const TransitionDataset& data,
                       const std::vector<int>& sizes) {
  const Index d = data.state_dim();
  if (data.kind() == StateKind::RealVector) {
    out << kRealTag << ',' << d << '\n';
    const auto& s = data.real_states();
    const auto& sn = data.real_next_states();
    for (Index t = 0; t < data.size(); ++t) {
      for (Index i = 0; i < d; ++i) out << csv::format_exact(s(i, t)) << ',';
      out << csv::format_exact(data.rewards()(t));
      for (Index i = 0; i < d; ++i) out << ',' << csv::format_exact(sn(i, t));
      out << '\n';
    }
    return;
  }
  if (static_cast<Index>(sizes.size()) != d) {
    throw ValidationError("write_dataset_csv: tabular data needs one size per component");
  }
  out << kTabularTag << ',' << d;
  for (int n : sizes) out << ',' << n;
  out << '\n';
  const auto& s = data.tabular_states();
  const auto& sn = data.tabular_next_states();
  for (Index t = 0; t < data.size(); ++t) {
    for (Index i = 0; i < d; ++i) out << s(i, t) << ',';
    out << csv::format_exact(data.rewards()(t));
    for (Index i = 0; i < d; ++i) out << ',' << sn(i, t);
    out << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const TransitionDataset& data,
                       const std::vector<int>& sizes) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  write_dataset_csv(out, data, sizes);
  if (!out) throw NumericalError("failed writing '" + path.string() + "'");
}

}  // namespace valuegap
