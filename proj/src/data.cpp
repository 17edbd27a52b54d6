#include "llp/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "llp/errors.hpp"

namespace llp {

namespace {

std::array<double, 2> gauss2(const std::array<double, 2>& center, double sd,
                             Rng& rng) {
  return {center[0] + sd * rng.normal(), center[1] + sd * rng.normal()};
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw InputError(path + ": line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& s, const std::string& path,
                    std::size_t line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    parse_fail(path, line, "bad number '" + s + "'");
  }
  if (pos != s.size()) parse_fail(path, line, "bad number '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& path,
                std::size_t line) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    parse_fail(path, line, "bad integer '" + s + "'");
  }
  if (pos != s.size()) parse_fail(path, line, "bad integer '" + s + "'");
  return v;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

Dataset gen_dataset_a(const SyntheticSpecA& spec, Rng& rng) {
  if (spec.group_sizes.size() != spec.positives_per_group.size()) {
    throw InputError("SyntheticSpecA: size/positives length mismatch");
  }
  const int n = std::accumulate(spec.group_sizes.begin(),
                                spec.group_sizes.end(), 0);
  Dataset data;
  data.X.resize(2, n);
  data.group_of.resize(static_cast<std::size_t>(n));
  data.true_labels = std::vector<int>(static_cast<std::size_t>(n));

  int idx = 0;
  for (std::size_t j = 0; j < spec.group_sizes.size(); ++j) {
    const int ng = spec.group_sizes[j];
    const int n_pos = spec.positives_per_group[j];
    if (n_pos < 0 || n_pos > ng) {
      throw InputError("SyntheticSpecA: positive count out of range");
    }
    Group group;
    for (int t = 0; t < ng; ++t, ++idx) {
      const bool positive = t < n_pos;
      const auto& centers = positive ? spec.pos_centers : spec.neg_centers;
      const double sd = positive ? spec.pos_sd : spec.neg_sd;
      const auto p = gauss2(centers[rng.uniform_below(centers.size())], sd,
                            rng);
      data.X(0, idx) = p[0];
      data.X(1, idx) = p[1];
      data.group_of[static_cast<std::size_t>(idx)] = static_cast<int>(j);
      (*data.true_labels)[static_cast<std::size_t>(idx)] = positive ? 1 : 0;
      group.members.push_back(idx);
    }
    group.m = std::round(100.0 * n_pos / ng) / 100.0;
    data.groups.push_back(std::move(group));
  }
  data.validate();
  return data;
}

Dataset gen_dataset_b(const SyntheticSpecB& spec, Rng& rng) {
  const int n = spec.n_groups * spec.group_size;
  const int n_mixed = spec.n_groups - spec.n_negative_groups;
  if (n_mixed < 0) throw InputError("SyntheticSpecB: too many negative groups");
  Dataset data;
  data.X.resize(2, n);
  data.group_of.resize(static_cast<std::size_t>(n));
  data.true_labels = std::vector<int>(static_cast<std::size_t>(n));

  int idx = 0;
  for (int j = 0; j < spec.n_groups; ++j) {
    const bool mixed = j >= spec.n_negative_groups;
    int n_pos = 0;
    if (mixed) {
      n_pos = spec.min_pos_per_mixed +
              static_cast<int>(rng.uniform_below(static_cast<std::size_t>(
                  spec.max_pos_per_mixed - spec.min_pos_per_mixed + 1)));
    }
    Group group;
    for (int t = 0; t < spec.group_size; ++t, ++idx) {
      const bool positive = t < n_pos;
      const auto p = positive
                         ? gauss2(spec.pos_center, spec.pos_sd, rng)
                         : gauss2({0.0, 0.0}, spec.neg_sd, rng);
      data.X(0, idx) = p[0];
      data.X(1, idx) = p[1];
      data.group_of[static_cast<std::size_t>(idx)] = j;
      (*data.true_labels)[static_cast<std::size_t>(idx)] = positive ? 1 : 0;
      group.members.push_back(idx);
    }
    group.m = static_cast<double>(n_pos) / spec.group_size;
    data.groups.push_back(std::move(group));
  }
  data.validate();
  return data;
}

std::vector<double> fractions_from_annotations(
    const std::vector<AnnotationRecord>& records,
    const std::string& target_word) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const AnnotationRecord& r : records) {
    if (r.words.empty()) {
      throw InputError("fractions_from_annotations: empty word list for " +
                       r.image_id);
    }
    const bool present =
        std::find(r.words.begin(), r.words.end(), target_word) !=
        r.words.end();
    out.push_back(present ? 1.0 / static_cast<double>(r.words.size()) : 0.0);
  }
  return out;
}

Dataset perturb_fractions(const Dataset& data, double noise_chi, Rng& rng) {
  if (!(noise_chi > 0.0)) {
    throw InputError("perturb_fractions: noise_chi must be positive");
  }
  if (!data.true_labels) {
    throw InputError("perturb_fractions: dataset has no true labels");
  }
  Dataset out = data;
  for (Group& g : out.groups) {
    double lambda = 0.0;
    for (int i : g.members) {
      lambda += (*data.true_labels)[static_cast<std::size_t>(i)];
    }
    lambda /= static_cast<double>(g.members.size());
    g.m = rng.beta(noise_chi * lambda + 1.0,
                   noise_chi * (1.0 - lambda) + 1.0);
  }
  return out;
}

LoadedDataset with_default_ids(Dataset data) {
  LoadedDataset out;
  out.instance_ids.resize(static_cast<std::size_t>(data.n()));
  std::iota(out.instance_ids.begin(), out.instance_ids.end(), 0L);
  out.group_ids.resize(data.groups.size());
  std::iota(out.group_ids.begin(), out.group_ids.end(), 0L);
  out.data = std::move(data);
  return out;
}

LoadedDataset load_dataset(const std::string& instances_path,
                           const std::string& groups_path,
                           LabelColumn label_policy) {
  // Groups first: instances reference them.
  const auto glines = read_lines(groups_path);
  if (glines.empty()) throw InputError(groups_path + ": empty file");
  {
    const auto h = split_csv(glines[0]);
    if (h.size() < 2 || h[0] != "group" || h[1] != "m" ||
        (h.size() == 3 && h[2] != "chi") || h.size() > 3) {
      parse_fail(groups_path, 1, "expected header 'group,m[,chi]'");
    }
  }
  LoadedDataset out;
  std::unordered_map<long, int> group_index;
  for (std::size_t ln = 1; ln < glines.size(); ++ln) {
    if (glines[ln].empty()) continue;
    const auto f = split_csv(glines[ln]);
    if (f.size() != 2 && f.size() != 3) {
      parse_fail(groups_path, ln + 1, "expected 2 or 3 fields");
    }
    const long gid = parse_long(f[0], groups_path, ln + 1);
    if (!group_index.emplace(gid, static_cast<int>(out.group_ids.size()))
             .second) {
      parse_fail(groups_path, ln + 1, "duplicate group id");
    }
    Group g;
    g.m = parse_double(f[1], groups_path, ln + 1);
    if (!(g.m >= 0.0 && g.m <= 1.0)) {
      parse_fail(groups_path, ln + 1, "m outside [0,1]");
    }
    if (f.size() == 3) {
      g.chi = parse_double(f[2], groups_path, ln + 1);
      if (!(*g.chi >= 0.0)) parse_fail(groups_path, ln + 1, "negative chi");
    }
    out.group_ids.push_back(gid);
    out.data.groups.push_back(std::move(g));
  }
  if (out.data.groups.empty()) throw InputError(groups_path + ": no groups");

  const auto ilines = read_lines(instances_path);
  if (ilines.empty()) throw InputError(instances_path + ": empty file");
  const auto header = split_csv(ilines[0]);
  if (header.size() < 3 || header[0] != "id" || header[1] != "group") {
    parse_fail(instances_path, 1, "expected header 'id,group,f1,...[,label]'");
  }
  const bool has_label = header.back() == "label";
  if (has_label && label_policy == LabelColumn::refuse) {
    throw InputError(instances_path +
                     ": label column is not accepted by the training path");
  }
  const int dim = static_cast<int>(header.size()) - 2 - (has_label ? 1 : 0);
  if (dim < 1) parse_fail(instances_path, 1, "no feature columns");
  for (int d = 0; d < dim; ++d) {
    if (header[static_cast<std::size_t>(2 + d)] !=
        "f" + std::to_string(d + 1)) {
      parse_fail(instances_path, 1, "feature columns must be f1,...,fd");
    }
  }

  std::vector<double> features;
  std::vector<int> labels;
  std::unordered_map<long, int> seen_ids;
  for (std::size_t ln = 1; ln < ilines.size(); ++ln) {
    if (ilines[ln].empty()) continue;
    const auto f = split_csv(ilines[ln]);
    if (static_cast<int>(f.size()) != 2 + dim + (has_label ? 1 : 0)) {
      parse_fail(instances_path, ln + 1, "wrong field count");
    }
    const long id = parse_long(f[0], instances_path, ln + 1);
    if (!seen_ids.emplace(id, static_cast<int>(out.instance_ids.size()))
             .second) {
      parse_fail(instances_path, ln + 1, "duplicate instance id");
    }
    const long gid = parse_long(f[1], instances_path, ln + 1);
    const auto git = group_index.find(gid);
    if (git == group_index.end()) {
      parse_fail(instances_path, ln + 1, "unknown group id");
    }
    const int inst = static_cast<int>(out.instance_ids.size());
    out.instance_ids.push_back(id);
    out.data.group_of.push_back(git->second);
    out.data.groups[static_cast<std::size_t>(git->second)].members.push_back(
        inst);
    for (int d = 0; d < dim; ++d) {
      features.push_back(
          parse_double(f[static_cast<std::size_t>(2 + d)], instances_path,
                       ln + 1));
    }
    if (has_label) {
      const long lab = parse_long(f.back(), instances_path, ln + 1);
      if (lab != 0 && lab != 1) {
        parse_fail(instances_path, ln + 1, "label must be 0 or 1");
      }
      labels.push_back(static_cast<int>(lab));
    }
  }
  const int n = static_cast<int>(out.instance_ids.size());
  if (n == 0) throw InputError(instances_path + ": no instances");
  out.data.X.resize(dim, n);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) {
      out.data.X(d, i) = features[static_cast<std::size_t>(i) * dim +
                                  static_cast<std::size_t>(d)];
    }
  }
  if (has_label) out.data.true_labels = std::move(labels);
  out.data.validate();
  return out;
}

void save_instances(const LoadedDataset& ds, const std::string& path,
                    bool include_labels) {
  if (include_labels && !ds.data.true_labels) {
    throw InputError("save_instances: dataset has no labels");
  }
  std::ofstream outf(path);
  if (!outf) throw RuntimeFailure(path + ": cannot write");
  outf << "id,group";
  for (int d = 0; d < ds.data.dim(); ++d) outf << ",f" << d + 1;
  if (include_labels) outf << ",label";
  outf << "\n";
  for (int i = 0; i < ds.data.n(); ++i) {
    outf << ds.instance_ids[static_cast<std::size_t>(i)] << ','
         << ds.group_ids[static_cast<std::size_t>(
                ds.data.group_of[static_cast<std::size_t>(i)])];
    for (int d = 0; d < ds.data.dim(); ++d) {
      outf << ',' << fmt_double(ds.data.X(d, i));
    }
    if (include_labels) {
      outf << ',' << (*ds.data.true_labels)[static_cast<std::size_t>(i)];
    }
    outf << "\n";
  }
  if (!outf) throw RuntimeFailure(path + ": write failed");
}

void save_groups(const LoadedDataset& ds, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw RuntimeFailure(path + ": cannot write");
  const bool any_chi =
      std::any_of(ds.data.groups.begin(), ds.data.groups.end(),
                  [](const Group& g) { return g.chi.has_value(); });
  outf << (any_chi ? "group,m,chi\n" : "group,m\n");
  for (std::size_t j = 0; j < ds.data.groups.size(); ++j) {
    outf << ds.group_ids[j] << ',' << fmt_double(ds.data.groups[j].m);
    if (any_chi) {
      outf << ',' << fmt_double(ds.data.groups[j].chi.value_or(0.0));
    }
    outf << "\n";
  }
  if (!outf) throw RuntimeFailure(path + ": write failed");
}

void save_labels(const LoadedDataset& ds, const std::string& path) {
  if (!ds.data.true_labels) throw InputError("save_labels: no labels");
  std::ofstream outf(path);
  if (!outf) throw RuntimeFailure(path + ": cannot write");
  outf << "id,label\n";
  for (int i = 0; i < ds.data.n(); ++i) {
    outf << ds.instance_ids[static_cast<std::size_t>(i)] << ','
         << (*ds.data.true_labels)[static_cast<std::size_t>(i)] << "\n";
  }
  if (!outf) throw RuntimeFailure(path + ": write failed");
}

InstanceTable load_instances(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw InputError(path + ": empty file");
  const auto header = split_csv(lines[0]);
  if (header.size() < 3 || header[0] != "id" || header[1] != "group") {
    parse_fail(path, 1, "expected header 'id,group,f1,...[,label]'");
  }
  const bool has_label = header.back() == "label";
  const int dim = static_cast<int>(header.size()) - 2 - (has_label ? 1 : 0);
  if (dim < 1) parse_fail(path, 1, "no feature columns");

  InstanceTable out;
  std::vector<double> features;
  std::vector<int> labels;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto f = split_csv(lines[ln]);
    if (static_cast<int>(f.size()) != 2 + dim + (has_label ? 1 : 0)) {
      parse_fail(path, ln + 1, "wrong field count");
    }
    out.ids.push_back(parse_long(f[0], path, ln + 1));
    for (int d = 0; d < dim; ++d) {
      features.push_back(
          parse_double(f[static_cast<std::size_t>(2 + d)], path, ln + 1));
    }
    if (has_label) {
      const long lab = parse_long(f.back(), path, ln + 1);
      if (lab != 0 && lab != 1) parse_fail(path, ln + 1, "label must be 0 or 1");
      labels.push_back(static_cast<int>(lab));
    }
  }
  const int n = static_cast<int>(out.ids.size());
  if (n == 0) throw InputError(path + ": no instances");
  out.X.resize(dim, n);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) {
      out.X(d, i) = features[static_cast<std::size_t>(i) * dim +
                             static_cast<std::size_t>(d)];
    }
  }
  if (has_label) out.labels = std::move(labels);
  return out;
}

std::vector<int> load_labels(const std::string& path,
                             const std::vector<long>& instance_ids) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw InputError(path + ": empty file");
  if (split_csv(lines[0]) != std::vector<std::string>{"id", "label"}) {
    parse_fail(path, 1, "expected header 'id,label'");
  }
  std::unordered_map<long, int> by_id;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto f = split_csv(lines[ln]);
    if (f.size() != 2) parse_fail(path, ln + 1, "expected 2 fields");
    const long id = parse_long(f[0], path, ln + 1);
    const long lab = parse_long(f[1], path, ln + 1);
    if (lab != 0 && lab != 1) parse_fail(path, ln + 1, "label must be 0 or 1");
    if (!by_id.emplace(id, static_cast<int>(lab)).second) {
      parse_fail(path, ln + 1, "duplicate id");
    }
  }
  std::vector<int> labels(instance_ids.size());
  for (std::size_t i = 0; i < instance_ids.size(); ++i) {
    const auto it = by_id.find(instance_ids[i]);
    if (it == by_id.end()) {
      throw InputError(path + ": missing label for instance id " +
                       std::to_string(instance_ids[i]));
    }
    labels[i] = it->second;
  }
  return labels;
}

}  // namespace llp
