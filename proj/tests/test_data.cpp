#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "llp/data.hpp"
#include "llp/errors.hpp"
#include "test_util.hpp"

using namespace llp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("llp_data_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static inline int counter = 0;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("gen_dataset_a: counts, fractions, determinism") {
  SyntheticSpecA spec;
  Rng rng(5);
  const Dataset data = gen_dataset_a(spec, rng);

  CHECK(data.n() == 55);
  REQUIRE(data.groups.size() == 3);
  REQUIRE(data.true_labels.has_value());

  const std::vector<int> sizes{19, 16, 20};
  const std::vector<int> pos{14, 4, 17};
  for (std::size_t j = 0; j < 3; ++j) {
    const Group& g = data.groups[j];
    CHECK(static_cast<int>(g.members.size()) == sizes[j]);
    int k = 0;
    for (int i : g.members) k += (*data.true_labels)[static_cast<std::size_t>(i)];
    CHECK(k == pos[j]);
    // m is the true fraction rounded to two decimals
    const double frac = static_cast<double>(pos[j]) / sizes[j];
    CHECK(g.m == doctest::Approx(std::round(100.0 * frac) / 100.0));
    CHECK(std::abs(g.m - frac) < 0.005);
  }

  Rng rng2(5);
  const Dataset again = gen_dataset_a(spec, rng2);
  CHECK(again.X == data.X);

  Rng rng3(6);
  const Dataset other = gen_dataset_a(spec, rng3);
  CHECK(other.X != data.X);
}

TEST_CASE("gen_dataset_b: group structure") {
  SyntheticSpecB spec;
  Rng rng(7);
  const Dataset data = gen_dataset_b(spec, rng);

  CHECK(data.n() == 600);
  REQUIRE(data.groups.size() == 75);
  REQUIRE(data.true_labels.has_value());

  int n_zero = 0, n_mixed = 0;
  for (const Group& g : data.groups) {
    CHECK(g.members.size() == 8);
    int k = 0;
    for (int i : g.members) k += (*data.true_labels)[static_cast<std::size_t>(i)];
    CHECK(g.m == doctest::Approx(k / 8.0));  // exact fractions
    if (g.m == 0.0) {
      ++n_zero;
      for (int i : g.members) {
        CHECK((*data.true_labels)[static_cast<std::size_t>(i)] == 0);
      }
    } else {
      ++n_mixed;
      CHECK(k >= 2);
      CHECK(k <= 6);
    }
  }
  CHECK(n_zero == 62);
  CHECK(n_mixed == 13);
}

TEST_CASE("fractions_from_annotations") {
  std::vector<AnnotationRecord> records{
      {"img1", {"tiger", "grass", "water", "sky"}, 10},
      {"img2", {"grass", "sky"}, 6},
      {"img3", {"tiger"}, 4},
  };
  const auto m = fractions_from_annotations(records, "tiger");
  REQUIRE(m.size() == 3);
  CHECK(m[0] == doctest::Approx(0.25));
  CHECK(m[1] == 0.0);
  CHECK(m[2] == doctest::Approx(1.0));

  records.push_back({"img4", {}, 2});
  CHECK_THROWS_AS(fractions_from_annotations(records, "tiger"), InputError);
}

TEST_CASE("perturb_fractions draws around the true fraction") {
  Rng data_rng(11);
  SyntheticSpecA spec;
  const Dataset data = gen_dataset_a(spec, data_rng);

  Rng rng(12);
  // Very concentrated noise keeps m close to the true fraction.
  const Dataset tight = perturb_fractions(data, 1e6, rng);
  for (std::size_t j = 0; j < data.groups.size(); ++j) {
    const Group& g = data.groups[j];
    double lambda = 0.0;
    for (int i : g.members) {
      lambda += (*data.true_labels)[static_cast<std::size_t>(i)];
    }
    lambda /= static_cast<double>(g.members.size());
    CHECK(std::abs(tight.groups[j].m - lambda) < 0.01);
    CHECK(tight.groups[j].m > 0.0);
    CHECK(tight.groups[j].m < 1.0);
  }

  Dataset unlabeled = data;
  unlabeled.true_labels.reset();
  CHECK_THROWS_AS(perturb_fractions(unlabeled, 10.0, rng), InputError);
  CHECK_THROWS_AS(perturb_fractions(data, 0.0, rng), InputError);
}

TEST_CASE("dataset CSV round-trip is bit-exact") {
  TempDir tmp;
  Rng data_rng(21);
  SyntheticSpecA spec;
  LoadedDataset ds = with_default_ids(gen_dataset_a(spec, data_rng));
  ds.data.groups[1].chi = 250.0;

  save_instances(ds, tmp.file("inst.csv"));
  save_groups(ds, tmp.file("groups.csv"));
  save_labels(ds, tmp.file("labels.csv"));

  const LoadedDataset back =
      load_dataset(tmp.file("inst.csv"), tmp.file("groups.csv"),
                   LabelColumn::refuse);
  CHECK(back.data.X == ds.data.X);
  CHECK(back.data.group_of == ds.data.group_of);
  CHECK(back.instance_ids == ds.instance_ids);
  CHECK(back.group_ids == ds.group_ids);
  REQUIRE(back.data.groups.size() == ds.data.groups.size());
  for (std::size_t j = 0; j < ds.data.groups.size(); ++j) {
    CHECK(back.data.groups[j].m == ds.data.groups[j].m);
    CHECK(back.data.groups[j].members == ds.data.groups[j].members);
  }
  CHECK(back.data.groups[1].chi == 250.0);

  const auto labels = load_labels(tmp.file("labels.csv"), back.instance_ids);
  CHECK(labels == *ds.data.true_labels);

  // Saving the reloaded data reproduces the files byte for byte.
  LoadedDataset relabeled = back;
  relabeled.data.true_labels = labels;
  save_instances(relabeled, tmp.file("inst2.csv"));
  save_groups(relabeled, tmp.file("groups2.csv"));
  CHECK(slurp(tmp.file("inst.csv")) == slurp(tmp.file("inst2.csv")));
  CHECK(slurp(tmp.file("groups.csv")) == slurp(tmp.file("groups2.csv")));
}

TEST_CASE("instances CSV with labels: policy and standalone reader") {
  TempDir tmp;
  write_file(tmp.file("groups.csv"), "group,m\n0,0.5\n");
  write_file(tmp.file("inst.csv"),
             "id,group,f1,f2,label\n10,0,0.5,-1,1\n11,0,2,3,0\n");

  CHECK_THROWS_AS(load_dataset(tmp.file("inst.csv"), tmp.file("groups.csv"),
                               LabelColumn::refuse),
                  InputError);
  const LoadedDataset ds = load_dataset(
      tmp.file("inst.csv"), tmp.file("groups.csv"), LabelColumn::accept);
  REQUIRE(ds.data.true_labels.has_value());
  CHECK(*ds.data.true_labels == std::vector<int>{1, 0});
  CHECK(ds.instance_ids == std::vector<long>{10, 11});
  CHECK(ds.data.X(1, 0) == -1.0);

  const InstanceTable table = load_instances(tmp.file("inst.csv"));
  CHECK(table.ids == std::vector<long>{10, 11});
  CHECK(table.X == ds.data.X);
  REQUIRE(table.labels.has_value());
  CHECK(*table.labels == std::vector<int>{1, 0});
}

TEST_CASE("parse errors name the offending line") {
  TempDir tmp;
  write_file(tmp.file("groups.csv"), "group,m\n0,0.5\n1,1.2\n");
  write_file(tmp.file("inst.csv"), "id,group,f1\n0,0,1.0\n");

  try {
    load_dataset(tmp.file("inst.csv"), tmp.file("groups.csv"),
                 LabelColumn::refuse);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  write_file(tmp.file("groups.csv"), "group,m\n0,0.5\n");
  write_file(tmp.file("bad_group.csv"), "id,group,f1\n0,7,1.0\n");
  CHECK_THROWS_AS(load_dataset(tmp.file("bad_group.csv"),
                               tmp.file("groups.csv"), LabelColumn::refuse),
                  InputError);

  write_file(tmp.file("dup.csv"), "id,group,f1\n0,0,1.0\n0,0,2.0\n");
  CHECK_THROWS_AS(load_dataset(tmp.file("dup.csv"), tmp.file("groups.csv"),
                               LabelColumn::refuse),
                  InputError);

  write_file(tmp.file("badnum.csv"), "id,group,f1\n0,0,abc\n");
  CHECK_THROWS_AS(load_dataset(tmp.file("badnum.csv"), tmp.file("groups.csv"),
                               LabelColumn::refuse),
                  InputError);

  write_file(tmp.file("empty_groups.csv"), "group,m\n");
  CHECK_THROWS_AS(load_dataset(tmp.file("inst.csv"),
                               tmp.file("empty_groups.csv"),
                               LabelColumn::refuse),
                  InputError);

  write_file(tmp.file("badheader.csv"), "ident,group,f1\n0,0,1.0\n");
  CHECK_THROWS_AS(load_dataset(tmp.file("badheader.csv"),
                               tmp.file("groups.csv"), LabelColumn::refuse),
                  InputError);

  CHECK_THROWS_AS(load_dataset(tmp.file("missing.csv"), tmp.file("groups.csv"),
                               LabelColumn::refuse),
                  InputError);
}

TEST_CASE("load_labels alignment and validation") {
  TempDir tmp;
  write_file(tmp.file("labels.csv"), "id,label\n5,1\n3,0\n9,1\n");
  CHECK(load_labels(tmp.file("labels.csv"), {3, 9, 5}) ==
        std::vector<int>{0, 1, 1});
  CHECK_THROWS_AS(load_labels(tmp.file("labels.csv"), {3, 4}), InputError);

  write_file(tmp.file("bad.csv"), "id,label\n1,2\n");
  CHECK_THROWS_AS(load_labels(tmp.file("bad.csv"), {1}), InputError);
  write_file(tmp.file("dup.csv"), "id,label\n1,0\n1,1\n");
  CHECK_THROWS_AS(load_labels(tmp.file("dup.csv"), {1}), InputError);
}
