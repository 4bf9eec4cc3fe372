#include "gpsl/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gpsl {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& path) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin)
    throw std::invalid_argument(path + ": expected a number, got '" + s + "'");
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const Eigen::MatrixXd& rows) {
  if (static_cast<int>(columns.size()) != rows.cols())
    throw std::invalid_argument("write_csv: header width does not match data");
  std::ofstream out = open_out(path);
  for (size_t j = 0; j < columns.size(); ++j)
    out << (j ? "," : "") << columns[j];
  out << '\n';
  for (int i = 0; i < rows.rows(); ++i) {
    for (int j = 0; j < rows.cols(); ++j)
      out << (j ? "," : "") << format_double(rows(i, j));
    out << '\n';
  }
  if (!out) throw std::invalid_argument("write_csv: failed writing '" + path + "'");
}

Eigen::MatrixXd read_csv(const std::string& path, std::vector<std::string>* columns) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument(path + ": missing header row");
  const std::vector<std::string> header = split_line(line);
  if (columns) *columns = header;

  std::vector<double> data;
  int n_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size())
      throw std::invalid_argument(path + ": ragged row " + std::to_string(n_rows + 1));
    for (const std::string& f : fields) data.push_back(parse_double(f, path));
    ++n_rows;
  }
  Eigen::MatrixXd out(n_rows, header.size());
  for (int i = 0; i < n_rows; ++i)
    for (int j = 0; j < out.cols(); ++j) out(i, j) = data[i * out.cols() + j];
  return out;
}

void write_training_csv(const std::string& path, const TrainingSet& train) {
  std::vector<std::string> columns;
  for (int j = 0; j < train.dim(); ++j) columns.push_back("theta_" + std::to_string(j));
  columns.push_back("y");
  columns.push_back("noise_std");
  Eigen::MatrixXd rows(train.size(), train.dim() + 2);
  rows.leftCols(train.dim()) = train.locations;
  rows.col(train.dim()) = train.values;
  rows.col(train.dim() + 1) = train.noise_std;
  write_csv(path, columns, rows);
}

TrainingSet read_training_csv(const std::string& path) {
  std::vector<std::string> columns;
  const Eigen::MatrixXd rows = read_csv(path, &columns);
  if (columns.size() < 3 || columns[columns.size() - 2] != "y" ||
      columns.back() != "noise_std")
    throw std::invalid_argument(path + ": not a training-set file");
  const int d = static_cast<int>(columns.size()) - 2;
  TrainingSet train(d);
  train.locations = rows.leftCols(d);
  train.values = rows.col(d);
  train.noise_std = rows.col(d + 1);
  train.validate();
  return train;
}

void write_samples_csv(const std::string& path, const Eigen::MatrixXd& samples,
                       const Eigen::VectorXd& log_density) {
  if (samples.rows() != log_density.size())
    throw std::invalid_argument("write_samples_csv: row count mismatch");
  std::vector<std::string> columns;
  for (int j = 0; j < samples.cols(); ++j) columns.push_back("theta_" + std::to_string(j));
  columns.push_back("log_density");
  Eigen::MatrixXd rows(samples.rows(), samples.cols() + 1);
  rows.leftCols(samples.cols()) = samples;
  rows.col(samples.cols()) = log_density;
  write_csv(path, columns, rows);
}

Eigen::MatrixXd read_samples_csv(const std::string& path, Eigen::VectorXd* log_density) {
  std::vector<std::string> columns;
  const Eigen::MatrixXd rows = read_csv(path, &columns);
  if (columns.empty() || columns.back() != "log_density")
    throw std::invalid_argument(path + ": not a samples file");
  if (log_density) *log_density = rows.rightCols(1);
  return rows.leftCols(rows.cols() - 1);
}

void write_summary_block_csv(const std::string& path, const SummaryBlock& block) {
  std::vector<std::string> columns{"kind"};
  for (int j = 0; j < block.summary_dim(); ++j)
    columns.push_back("s_" + std::to_string(j));
  Eigen::MatrixXd rows(block.repeats() + 1, block.summary_dim() + 1);
  rows(0, 0) = 0.0;  // observed row
  rows.row(0).tail(block.summary_dim()) = block.observed;
  for (int i = 0; i < block.repeats(); ++i) {
    rows(i + 1, 0) = 1.0;  // repeat row
    rows.row(i + 1).tail(block.summary_dim()) = block.summaries.row(i);
  }
  write_csv(path, columns, rows);
}

}  // namespace gpsl
