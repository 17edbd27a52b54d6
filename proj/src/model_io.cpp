#include "llp/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "llp/errors.hpp"

namespace llp {

namespace {

using nlohmann::json;

constexpr const char* kSchema = "llp-model-v1";

std::string kernel_kind_name(KernelKind k) {
  return k == KernelKind::gaussian ? "gaussian" : "sigmoidal";
}

KernelKind kernel_kind_from(const std::string& s) {
  if (s == "gaussian") return KernelKind::gaussian;
  if (s == "sigmoidal") return KernelKind::sigmoidal;
  throw InputError("model file: unknown kernel kind '" + s + "'");
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
  model.validate();
  std::ofstream out(path);
  if (!out) throw RuntimeFailure(path + ": cannot write");

  json header;
  header["schema"] = kSchema;
  header["kernel"] = {{"kind", kernel_kind_name(model.kernel.kind)},
                      {"sigma", model.kernel.sigma},
                      {"kappa", model.kernel.kappa},
                      {"theta", model.kernel.theta}};
  header["dim"] = model.dim();
  header["n_train"] = model.training_x.cols();
  json tx = json::array();
  for (Eigen::Index i = 0; i < model.training_x.cols(); ++i) {
    json row = json::array();
    for (Eigen::Index d = 0; d < model.training_x.rows(); ++d) {
      row.push_back(model.training_x(d, i));
    }
    tx.push_back(std::move(row));
  }
  header["training_x"] = std::move(tx);
  out << header.dump() << "\n";

  for (const PosteriorSample& s : model.samples) {
    json rec;
    rec["chain"] = s.chain;
    rec["active"] = s.active;
    rec["beta"] = std::vector<double>(s.beta.data(),
                                      s.beta.data() + s.beta.size());
    out << rec.dump() << "\n";
  }
  if (!out) throw RuntimeFailure(path + ": write failed");
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty model file");

  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw InputError(path + ": bad header: " + e.what());
  }
  if (header.value("schema", "") != kSchema) {
    throw InputError(path + ": unsupported schema");
  }

  TrainedModel model;
  const auto& kj = header.at("kernel");
  model.kernel.kind = kernel_kind_from(kj.at("kind").get<std::string>());
  model.kernel.sigma = kj.at("sigma").get<double>();
  model.kernel.kappa = kj.at("kappa").get<double>();
  model.kernel.theta = kj.at("theta").get<double>();
  const int dim = header.at("dim").get<int>();
  const int n = header.at("n_train").get<int>();
  const auto& tx = header.at("training_x");
  if (static_cast<int>(tx.size()) != n) {
    throw InputError(path + ": training_x length mismatch");
  }
  model.training_x.resize(dim, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(tx[static_cast<std::size_t>(i)].size()) != dim) {
      throw InputError(path + ": training_x row dimension mismatch");
    }
    for (int d = 0; d < dim; ++d) {
      model.training_x(d, i) =
          tx[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)]
              .get<double>();
    }
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw InputError(path + ": line " + std::to_string(line_no) + ": " +
                       e.what());
    }
    PosteriorSample s;
    s.chain = rec.value("chain", 0);
    s.active = rec.at("active").get<std::vector<int>>();
    const auto beta = rec.at("beta").get<std::vector<double>>();
    s.beta = Eigen::Map<const Eigen::VectorXd>(
        beta.data(), static_cast<Eigen::Index>(beta.size()));
    model.samples.push_back(std::move(s));
  }
  model.validate();
  return model;
}

namespace {

json chain_report_to_json(const ChainReport& report) {
  json j;
  j["z_acceptance_rate"] = report.z_acceptance_rate;
  j["gamma_flip_acceptance"] = report.gamma_flip_acceptance;
  j["active_kernel_trace"] = report.active_kernel_trace;
  j["delta2_trace"] = report.delta2_trace;
  j["wall_time_sec"] = report.wall_time_sec;
  j["beta_solve_failures"] = report.beta_solve_failures;
  j["hard_sign_violations"] = report.hard_sign_violations;
  return j;
}

}  // namespace

void save_chain_report(const ChainReport& report, const std::string& path) {
  save_chain_reports({report}, path);
}

void save_chain_reports(const std::vector<ChainReport>& reports,
                        const std::string& path) {
  json j;
  j["chains"] = json::array();
  for (const ChainReport& r : reports) {
    j["chains"].push_back(chain_report_to_json(r));
  }
  std::ofstream out(path);
  if (!out) throw RuntimeFailure(path + ": cannot write");
  out << j.dump(2) << "\n";
  if (!out) throw RuntimeFailure(path + ": write failed");
}

std::string eval_report_json(const EvalReport& report) {
  json j;
  j["auc"] = report.auc;
  j["n_pos"] = report.n_pos;
  j["n_neg"] = report.n_neg;
  j["mean_active_kernels"] = report.mean_active_kernels;
  if (!report.per_seed_auc.empty()) j["per_seed_auc"] = report.per_seed_auc;
  return j.dump(2);
}

void save_scores(const std::vector<long>& ids,
                 const std::vector<double>& probs, const std::string& path) {
  if (ids.size() != probs.size()) {
    throw InputError("save_scores: ids/probs size mismatch");
  }
  std::ofstream out(path);
  if (!out) throw RuntimeFailure(path + ": cannot write");
  out << "id,prob\n";
  char buf[64];
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", probs[i]);
    out << ids[i] << ',' << buf << "\n";
  }
  if (!out) throw RuntimeFailure(path + ": write failed");
}

void save_grid_csv(const PredictiveGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure(path + ": cannot write");
  char buf[64];
  for (int r = 0; r < grid.ny; ++r) {
    for (int c = 0; c < grid.nx; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", grid.at(r, c));
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw RuntimeFailure(path + ": write failed");
}

void save_grid_pgm(const PredictiveGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure(path + ": cannot write");
  out << "P5\n" << grid.nx << " " << grid.ny << "\n255\n";
  for (int r = grid.ny - 1; r >= 0; --r) {
    for (int c = 0; c < grid.nx; ++c) {
      const auto pixel = static_cast<unsigned char>(
          std::floor(255.0 * grid.at(r, c) + 0.5));
      out.put(static_cast<char>(pixel));
    }
  }
  if (!out) throw RuntimeFailure(path + ": write failed");
}

}  // namespace llp
