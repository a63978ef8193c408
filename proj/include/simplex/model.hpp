#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "simplex/data_io.hpp"
#include "simplex/losses.hpp"
#include "simplex/srls.hpp"

namespace simplex {

enum class Solver { s_ls_batch, s_ls_online, sc_svm_batch, sh_svm_batch, sc_svm_online, sh_svm_online };

std::string_view to_string(Solver solver) noexcept;
Solver parse_solver(std::string_view name);
Solver solver_for(LossKind loss, bool online) noexcept;
LossKind loss_of(Solver solver) noexcept;
bool is_online(Solver solver) noexcept;

/// A trained classifier as stored on disk: the predictor, the label tokens
/// and, optionally, the feature standardization applied before prediction.
struct Model {
  Solver solver = Solver::s_ls_batch;
  std::variant<KernelModel, LinearModel> predictor;
  std::vector<std::string> label_names;
  std::optional<Standardizer> standardizer;

  const CodeBook& codebook() const;
  int classes() const { return codebook().classes(); }
  double lambda() const;
  Eigen::Index dimension() const;
  std::optional<KernelSpec> kernel() const;

  /// Decision values f(x), m x (T-1), for raw (unstandardized) inputs.
  Eigen::MatrixXd decision(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const;
  std::vector<int> classify(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const;
};

inline constexpr int kModelFormatVersion = 1;

// The model file is line-oriented text; every number is written with 17
// significant digits, so a save/load cycle reproduces predictions exactly.
//
//   simplex-model 1
//   solver <name>
//   classes <T>
//   lambda <value>
//   kernel linear | kernel rbf <sigma>
//   labels <T>
//   <one token per line>
//   standardize 0 | standardize <p> / mean ... / scale ...
//   form linear <T-1> <p>       followed by T-1 weight rows
//   form kernel <n> <p>         followed by n input rows, then n coefficient rows
//   end
void save_model(const Model& model, std::ostream& out);
void save_model(const Model& model, const std::string& path);
Model load_model(std::istream& in, const std::string& source = "<stream>");
Model load_model(const std::string& path);

}  // namespace simplex
