#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "gpsl/synthetic_likelihood.hpp"
#include "gpsl/training_set.hpp"

namespace gpsl {

// Numeric CSV with a header row. Values are written with enough digits to
// round-trip doubles exactly.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const Eigen::MatrixXd& rows);
Eigen::MatrixXd read_csv(const std::string& path,
                         std::vector<std::string>* columns = nullptr);

// training.csv: theta_0..theta_{d-1}, y, noise_std
void write_training_csv(const std::string& path, const TrainingSet& train);
TrainingSet read_training_csv(const std::string& path);

// samples.csv: theta_0..theta_{d-1}, log_density
void write_samples_csv(const std::string& path, const Eigen::MatrixXd& samples,
                       const Eigen::VectorXd& log_density);
Eigen::MatrixXd read_samples_csv(const std::string& path,
                                 Eigen::VectorXd* log_density = nullptr);

// audit dump of one synthetic-likelihood block: observed row first, then one
// row per repeat
void write_summary_block_csv(const std::string& path, const SummaryBlock& block);

std::string format_double(double x);  // exact round-trip form

}  // namespace gpsl
