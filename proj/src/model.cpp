#include "simplex/model.hpp"

#include <fstream>
#include <sstream>

namespace simplex {

std::string_view to_string(Solver solver) noexcept {
  switch (solver) {
    case Solver::s_ls_batch: return "s-ls-batch";
    case Solver::s_ls_online: return "s-ls-online";
    case Solver::sc_svm_batch: return "sc-svm";
    case Solver::sh_svm_batch: return "sh-svm";
    case Solver::sc_svm_online: return "sc-svm-online";
    case Solver::sh_svm_online: return "sh-svm-online";
  }
  return "?";
}

Solver parse_solver(std::string_view name) {
  for (const Solver s : {Solver::s_ls_batch, Solver::s_ls_online, Solver::sc_svm_batch, Solver::sh_svm_batch,
                         Solver::sc_svm_online, Solver::sh_svm_online}) {
    if (to_string(s) == name) return s;
  }
  fail(ErrorCode::config, "unknown solver '" + std::string(name) + "'");
}

Solver solver_for(LossKind loss, bool online) noexcept {
  switch (loss) {
    case LossKind::s_ls: return online ? Solver::s_ls_online : Solver::s_ls_batch;
    case LossKind::sc_svm: return online ? Solver::sc_svm_online : Solver::sc_svm_batch;
    case LossKind::sh_svm: return online ? Solver::sh_svm_online : Solver::sh_svm_batch;
  }
  return Solver::s_ls_batch;
}

LossKind loss_of(Solver solver) noexcept {
  switch (solver) {
    case Solver::s_ls_batch:
    case Solver::s_ls_online: return LossKind::s_ls;
    case Solver::sc_svm_batch:
    case Solver::sc_svm_online: return LossKind::sc_svm;
    case Solver::sh_svm_batch:
    case Solver::sh_svm_online: return LossKind::sh_svm;
  }
  return LossKind::s_ls;
}

bool is_online(Solver solver) noexcept {
  return solver == Solver::s_ls_online || solver == Solver::sc_svm_online || solver == Solver::sh_svm_online;
}

const CodeBook& Model::codebook() const {
  return std::visit([](const auto& p) -> const CodeBook& { return p.codebook; }, predictor);
}

double Model::lambda() const {
  return std::visit([](const auto& p) { return p.lambda; }, predictor);
}

Eigen::Index Model::dimension() const {
  if (const auto* k = std::get_if<KernelModel>(&predictor)) return k->train_inputs.cols();
  return std::get<LinearModel>(predictor).weights.cols();
}

std::optional<KernelSpec> Model::kernel() const {
  if (const auto* k = std::get_if<KernelModel>(&predictor)) return k->spec;
  return std::nullopt;
}

Eigen::MatrixXd Model::decision(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const {
  require(inputs.cols() == dimension(), ErrorCode::dimension_mismatch,
          "model expects " + std::to_string(dimension()) + " features, got " + std::to_string(inputs.cols()));
  const Eigen::MatrixXd prepared = standardizer ? standardizer->apply(inputs) : Eigen::MatrixXd(inputs);
  return std::visit([&](const auto& p) { return predict(p, prepared); }, predictor);
}

std::vector<int> Model::classify(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const {
  return codebook().decode_batch(decision(inputs));
}

namespace {

void write_row(std::ostream& out, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (j > 0) out << ' ';
    out << row(j);
  }
  out << '\n';
}

void write_rows(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) write_row(out, m.row(i));
}

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::string line() {
    std::string text;
    if (!std::getline(in_, text)) bad("unexpected end of file");
    ++line_;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    return text;
  }

  std::istringstream keyed(const std::string& key) {
    std::istringstream is(line());
    std::string word;
    is >> word;
    if (word != key) bad("expected '" + key + "', found '" + word + "'");
    return is;
  }

  template <typename T>
  T value(std::istringstream& is, const char* what) {
    T v{};
    if (!(is >> v)) bad(std::string("cannot read ") + what);
    return v;
  }

  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      std::istringstream is(line());
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = value<double>(is, "matrix entry");
    }
    return m;
  }

  [[noreturn]] void bad(const std::string& what) const {
    fail(ErrorCode::parse, source_ + ":" + std::to_string(line_) + ": bad model file: " + what);
  }

 private:
  std::istream& in_;
  std::string source_;
  size_t line_ = 0;
};

}  // namespace

void save_model(const Model& model, std::ostream& out) {
  out.precision(17);
  out << "simplex-model " << kModelFormatVersion << '\n';
  out << "solver " << to_string(model.solver) << '\n';
  out << "classes " << model.classes() << '\n';
  out << "lambda " << model.lambda() << '\n';
  const auto kernel = model.kernel();
  out << "kernel " << (kernel ? kernel->describe() : "linear") << '\n';
  out << "labels " << model.label_names.size() << '\n';
  for (const auto& name : model.label_names) out << name << '\n';
  if (model.standardizer) {
    out << "standardize " << model.standardizer->mean.size() << '\n';
    out << "mean ";
    write_row(out, model.standardizer->mean.transpose());
    out << "scale ";
    write_row(out, model.standardizer->scale.transpose());
  } else {
    out << "standardize 0\n";
  }
  if (const auto* k = std::get_if<KernelModel>(&model.predictor)) {
    out << "form kernel " << k->train_inputs.rows() << ' ' << k->train_inputs.cols() << '\n';
    write_rows(out, k->train_inputs);
    write_rows(out, k->coefficients);
  } else {
    const auto& l = std::get<LinearModel>(model.predictor);
    out << "form linear " << l.weights.rows() << ' ' << l.weights.cols() << '\n';
    write_rows(out, l.weights);
  }
  out << "end\n";
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::io, "cannot write model file " + path);
  save_model(model, out);
  require(static_cast<bool>(out), ErrorCode::io, "failed writing model file " + path);
}

Model load_model(std::istream& in, const std::string& source) {
  Reader r(in, source);
  {
    auto is = r.keyed("simplex-model");
    const int version = r.value<int>(is, "format version");
    if (version != kModelFormatVersion) r.bad("unsupported format version " + std::to_string(version));
  }
  Solver solver;
  {
    auto is = r.keyed("solver");
    solver = parse_solver(r.value<std::string>(is, "solver"));
  }
  int classes = 0;
  {
    auto is = r.keyed("classes");
    classes = r.value<int>(is, "class count");
    if (classes < 2) r.bad("class count must be >= 2");
  }
  double lambda = 0.0;
  {
    auto is = r.keyed("lambda");
    lambda = r.value<double>(is, "lambda");
  }
  KernelSpec spec;
  {
    auto is = r.keyed("kernel");
    const auto kind = r.value<std::string>(is, "kernel kind");
    if (kind == "rbf") {
      spec = KernelSpec::rbf(r.value<double>(is, "bandwidth"));
    } else if (kind != "linear") {
      r.bad("unknown kernel '" + kind + "'");
    }
  }
  std::vector<std::string> label_names;
  {
    auto is = r.keyed("labels");
    const auto count = r.value<size_t>(is, "label count");
    if (count != static_cast<size_t>(classes)) r.bad("label count differs from class count");
    for (size_t k = 0; k < count; ++k) label_names.push_back(r.line());
  }
  std::optional<Standardizer> standardizer;
  {
    auto is = r.keyed("standardize");
    const auto p = r.value<Eigen::Index>(is, "standardizer size");
    if (p > 0) {
      Standardizer s;
      auto mean = r.keyed("mean");
      s.mean.resize(p);
      for (Eigen::Index j = 0; j < p; ++j) s.mean(j) = r.value<double>(mean, "mean");
      auto scale = r.keyed("scale");
      s.scale.resize(p);
      for (Eigen::Index j = 0; j < p; ++j) s.scale(j) = r.value<double>(scale, "scale");
      standardizer = std::move(s);
    }
  }
  CodeBook codebook(classes);
  std::optional<std::variant<KernelModel, LinearModel>> predictor;
  {
    auto is = r.keyed("form");
    const auto form = r.value<std::string>(is, "form");
    const auto rows = r.value<Eigen::Index>(is, "row count");
    const auto cols = r.value<Eigen::Index>(is, "column count");
    if (rows < 1 || cols < 1) r.bad("empty model");
    if (form == "linear") {
      if (rows != codebook.dim()) r.bad("weight rows differ from T-1");
      predictor = LinearModel{r.matrix(rows, cols), codebook, lambda};
    } else if (form == "kernel") {
      Eigen::MatrixXd inputs = r.matrix(rows, cols);
      Eigen::MatrixXd coeffs = r.matrix(rows, codebook.dim());
      predictor = KernelModel{std::move(coeffs), std::move(inputs), spec, codebook, lambda};
    } else {
      r.bad("unknown form '" + form + "'");
    }
  }
  Model model{solver, std::move(*predictor), std::move(label_names), std::move(standardizer)};
  if (model.standardizer && model.standardizer->mean.size() != model.dimension()) {
    r.bad("standardizer size differs from feature count");
  }
  r.keyed("end");
  return model;
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io, "cannot read model file " + path);
  return load_model(in, path);
}

}  // namespace simplex
