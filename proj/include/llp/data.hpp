#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "llp/model.hpp"
#include "llp/rng.hpp"

namespace llp {

/// First synthetic benchmark: 55 2-D instances in 3 groups whose positive
/// counts (14, 4, 17) round to the published fractions. The cluster layout
/// is a reconstruction: positives form two lobes above a negative mass,
/// giving a non-linear decision boundary.
struct SyntheticSpecA {
  std::vector<int> group_sizes{19, 16, 20};
  std::vector<int> positives_per_group{14, 4, 17};
  std::vector<std::array<double, 2>> pos_centers{{-1.5, 1.0}, {1.5, 1.0}};
  std::vector<std::array<double, 2>> neg_centers{{0.0, -0.2}, {0.0, -1.5}};
  double pos_sd = 0.45;
  double neg_sd = 0.50;
  std::uint64_t seed = 1;
};

/// Second synthetic benchmark: 600 2-D instances in 75 groups of 8, a
/// tight positive cluster embedded in a diffuse negative mass; 62 groups
/// are all-negative and 13 are mixed.
struct SyntheticSpecB {
  int n_groups = 75;
  int group_size = 8;
  int n_negative_groups = 62;
  std::array<double, 2> pos_center{1.2, 1.2};
  double pos_sd = 0.35;
  double neg_sd = 2.0;
  int min_pos_per_mixed = 2;
  int max_pos_per_mixed = 6;
  std::uint64_t seed = 1;
};

/// Group fraction m is the true generated fraction rounded to two
/// decimals; true labels are retained for evaluation.
Dataset gen_dataset_a(const SyntheticSpecA& spec, Rng& rng);

/// Group fractions are exact; the all-negative groups carry m = 0.
Dataset gen_dataset_b(const SyntheticSpecB& spec, Rng& rng);

/// One annotated image treated as a group of regions.
struct AnnotationRecord {
  std::string image_id;
  std::vector<std::string> words;
  int region_count = 0;
};

/// Crude fraction estimates from annotations: m = 1/w for records whose
/// w-word annotation contains target_word, 0 otherwise.
std::vector<double> fractions_from_annotations(
    const std::vector<AnnotationRecord>& records,
    const std::string& target_word);

/// Replace every group's m by a draw from the measurement model
/// Beta(chi*lambda + 1, chi*(1 - lambda) + 1) around the true fraction
/// lambda (requires true labels). For misspecification studies.
Dataset perturb_fractions(const Dataset& data, double noise_chi, Rng& rng);

/// Dataset with its external ids preserved for round-tripping.
struct LoadedDataset {
  Dataset data;
  std::vector<long> instance_ids;
  std::vector<long> group_ids;
};

enum class LabelColumn { refuse, accept };

/// Reads the two-file CSV format (instances: id,group,f1,...,fd[,label];
/// groups: group,m[,chi]). A label column is an error under
/// LabelColumn::refuse (the training path). Parse errors name the
/// offending line.
LoadedDataset load_dataset(const std::string& instances_path,
                           const std::string& groups_path,
                           LabelColumn label_policy);

/// Writers; features use 17 significant digits so save/load round-trips
/// bit-exactly.
void save_instances(const LoadedDataset& ds, const std::string& path,
                    bool include_labels = false);
void save_groups(const LoadedDataset& ds, const std::string& path);
void save_labels(const LoadedDataset& ds, const std::string& path);

/// id,label file -> labels aligned with the given instance id order.
std::vector<int> load_labels(const std::string& path,
                             const std::vector<long>& instance_ids);

/// Wrap a generated dataset with sequential ids 0..N-1 / 0..G-1.
LoadedDataset with_default_ids(Dataset data);

/// Instances CSV read standalone (group references unresolved); used by
/// prediction and evaluation, which do not need the groups file.
struct InstanceTable {
  std::vector<long> ids;
  Eigen::MatrixXd X;  // d x N
  std::optional<std::vector<int>> labels;
};

InstanceTable load_instances(const std::string& path);

}  // namespace llp
