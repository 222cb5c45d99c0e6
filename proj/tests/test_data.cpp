#include <gtest/gtest.h>

#include <set>

#include "deql/errors.hpp"
#include "deql/gram.hpp"
#include "deql/interactions.hpp"
#include "deql/parallel.hpp"
#include "deql/split.hpp"
#include "test_util.hpp"

namespace deql {
namespace {

using testing::TempDir;
using testing::write_file;

TEST(LoadInteractions, MapsIdsInFirstAppearanceOrder) {
  TempDir dir;
  write_file(dir / "r.tsv", "u1\ti1\nu1\ti2\nu2\ti1\n");
  auto data = load_interactions(dir / "r.tsv");
  EXPECT_EQ(data.matrix.num_users(), 2u);
  EXPECT_EQ(data.matrix.num_items(), 2u);
  EXPECT_EQ(data.matrix.num_entries(), 3u);
  EXPECT_EQ(data.users.id(0), "u1");
  EXPECT_EQ(data.items.id(1), "i2");
  EXPECT_TRUE(data.matrix.contains(1, 0));
  EXPECT_FALSE(data.matrix.contains(1, 1));
}

TEST(LoadInteractions, CollapsesDuplicatesAndSkipsComments) {
  TempDir dir;
  write_file(dir / "r.tsv", "# header\nu1\ti1\n\nu1\ti1\n");
  auto data = load_interactions(dir / "r.tsv");
  EXPECT_EQ(data.matrix.num_entries(), 1u);
}

TEST(LoadInteractions, MalformedLineNamesTheLine) {
  TempDir dir;
  write_file(dir / "r.tsv", "u1\ti1\nu1\n");
  try {
    load_interactions(dir / "r.tsv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
  write_file(dir / "r3.tsv", "u1\ti1\tx\n");
  EXPECT_THROW(load_interactions(dir / "r3.tsv"), ParseError);
}

TEST(LoadInteractions, EmptyFileIsAnError) {
  TempDir dir;
  write_file(dir / "empty.tsv", "");
  EXPECT_THROW(load_interactions(dir / "empty.tsv"), ParseError);
  write_file(dir / "comments.tsv", "# nothing\n");
  EXPECT_THROW(load_interactions(dir / "comments.tsv"), ParseError);
}

TEST(LoadInteractions, FrozenItemTableSkipsUnknownItems) {
  TempDir dir;
  write_file(dir / "r.tsv", "u1\ti1\nu1\tzz\n");
  LoadOptions opts;
  opts.items.intern("i0");
  opts.items.intern("i1");
  opts.freeze_items = true;
  auto data = load_interactions(dir / "r.tsv", InteractionFormat::pair_tsv, opts);
  EXPECT_EQ(data.matrix.num_items(), 2u);
  EXPECT_EQ(data.matrix.num_entries(), 1u);
  EXPECT_EQ(data.unknown_items_skipped, 1u);
  EXPECT_TRUE(data.matrix.contains(0, 1));
}

TEST(IdTable, SaveLoadRoundTrip) {
  TempDir dir;
  IdTable t;
  t.intern("alpha");
  t.intern("beta gamma");
  t.save(dir / "ids.tsv");
  EXPECT_EQ(IdTable::load(dir / "ids.tsv"), t);
}

TEST(InteractionMatrix, RejectsOutOfBounds) {
  EXPECT_THROW(InteractionMatrix(2, 2, {{0, 2}}), InvalidArgument);
  EXPECT_THROW(InteractionMatrix(2, 2, {{2, 0}}), InvalidArgument);
}

TEST(Gram, IdentityPattern) {
  InteractionMatrix r(2, 2, {{0, 0}, {1, 1}});
  auto g = gram(r);
  EXPECT_EQ(g.gram, Matrix::Identity(2, 2));
}

TEST(Gram, SmallExampleMatchesNaiveProduct) {
  InteractionMatrix r(2, 2, {{0, 0}, {0, 1}, {1, 0}});
  const Matrix expected = testing::brute_force_gram(r);
  Matrix frozen(2, 2);
  frozen << 2, 1, 1, 1;
  ASSERT_EQ(expected, frozen);
  EXPECT_EQ(gram(r).gram, frozen);
  EXPECT_EQ(gram_reference(r).gram, frozen);
}

TEST(Gram, RandomMatricesAreIntegerExact) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const std::size_t m = 5 + seed % 17, n = 3 + (seed * 7) % 13;
    auto r = random_interactions(m, n, 0.05 + 0.03 * static_cast<double>(seed % 10), seed, false);
    const auto g = gram(r);
    EXPECT_EQ(g.gram, testing::brute_force_gram(r)) << "seed " << seed;
    EXPECT_EQ(g.gram, g.gram.transpose());
    const auto counts = r.item_counts();
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(g.item_counts[i], counts[i]);
      EXPECT_EQ(g.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)),
                static_cast<double>(counts[i]));
    }
  }
}

TEST(Gram, ParallelKernelMatchesSerialReference) {
  const int saved = max_threads();
  set_max_threads(3);
  auto r = random_interactions(200, 60, 0.1, 42);
  const auto par = gram(r, Execution::parallel);
  const auto ser = gram(r, Execution::serial);
  const auto ref = gram_reference(r);
  set_max_threads(saved);
  EXPECT_EQ(par.gram, ser.gram);
  EXPECT_EQ(par.gram, ref.gram);
  EXPECT_EQ(par.item_counts, ref.item_counts);
}

TEST(CheckNoZeroColumns, ReportsUntouchedItems) {
  EXPECT_EQ(check_no_zero_columns(InteractionMatrix(2, 3, {{0, 0}, {1, 1}})),
            (std::vector<std::size_t>{2}));
  EXPECT_TRUE(check_no_zero_columns(InteractionMatrix(2, 2, {{0, 0}, {1, 1}})).empty());
  EXPECT_EQ(check_no_zero_columns(InteractionMatrix(1, 3, {})),
            (std::vector<std::size_t>{0, 1, 2}));
}

TEST(DropItems, CompactsIndicesAndTable) {
  LoadedInteractions data;
  data.users.intern("u");
  for (auto id : {"a", "b", "c"}) data.items.intern(id);
  data.matrix = InteractionMatrix(1, 3, {{0, 0}, {0, 2}});
  auto out = drop_items(data, {1});
  EXPECT_EQ(out.matrix.num_items(), 2u);
  EXPECT_EQ(out.items.id(1), "c");
  EXPECT_TRUE(out.matrix.contains(0, 1));
}

TEST(Split, WeakModeCardinality) {
  InteractionMatrix r(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  auto s = split(r, SplitSpec{SplitMode::weak, 0.5, 0.5, 7});
  EXPECT_EQ(s.test_target.num_entries(), 2u);
  EXPECT_EQ(s.train.num_entries(), 2u);
  EXPECT_EQ(s.test_input, s.train);
}

TEST(Split, StrongModeHoldsOutHalfOfATestUser) {
  InteractionMatrix r(1, 4, {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  auto s = split(r, SplitSpec{SplitMode::strong, 0.9, 0.5, 3});
  EXPECT_EQ(s.train.num_entries(), 0u);
  EXPECT_EQ(s.test_input.num_entries(), 2u);
  EXPECT_EQ(s.test_target.num_entries(), 2u);
}

TEST(Split, StrongModeSkipsUsersWithOneInteraction) {
  InteractionMatrix r(2, 3, {{0, 0}, {1, 1}, {1, 2}});
  auto s = split(r, SplitSpec{SplitMode::strong, 0.99, 0.5, 1});
  EXPECT_EQ(s.skipped_users, 1u);
  EXPECT_TRUE(s.train.contains(0, 0));
  EXPECT_EQ(s.test_input.num_entries() + s.test_target.num_entries(), 2u);
}

TEST(Split, RejectsBadFractions) {
  InteractionMatrix r(1, 2, {{0, 0}, {0, 1}});
  EXPECT_THROW(split(r, SplitSpec{SplitMode::weak, 0.0, 0.5, 1}), InvalidArgument);
  EXPECT_THROW(split(r, SplitSpec{SplitMode::strong, 0.5, 1.0, 1}), InvalidArgument);
  EXPECT_THROW(split(InteractionMatrix(1, 1, {}), SplitSpec{}), InvalidArgument);
}

// Split invariants over random inputs and seeds.
TEST(Split, ConservesEntriesAndIsDeterministic) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto r = random_interactions(40, 25, 0.15, seed, false);
    for (auto mode : {SplitMode::strong, SplitMode::weak}) {
      SplitSpec spec{mode, 0.3, 0.4, seed * 31 + 1};
      auto a = split(r, spec);
      auto b = split(r, spec);
      EXPECT_EQ(a.train, b.train);
      EXPECT_EQ(a.test_input, b.test_input);
      EXPECT_EQ(a.test_target, b.test_target);

      std::set<Entry> all;
      for (auto& e : a.train.entries()) all.insert(e);
      for (auto& e : a.test_target.entries()) EXPECT_FALSE(a.train.contains(e.first, e.second));
      for (auto& e : a.test_target.entries()) all.insert(e);
      if (mode == SplitMode::strong) {
        for (auto& e : a.test_input.entries()) {
          EXPECT_FALSE(a.train.contains(e.first, e.second));
          EXPECT_FALSE(a.test_target.contains(e.first, e.second));
          all.insert(e);
        }
        EXPECT_EQ(a.train.num_entries() + a.test_input.num_entries() + a.test_target.num_entries(),
                  r.num_entries());
      } else {
        EXPECT_EQ(a.train.num_entries() + a.test_target.num_entries(), r.num_entries());
      }
      EXPECT_EQ(all.size(), r.num_entries());
    }
  }
}

TEST(Split, SaveWritesAllArtifacts) {
  TempDir dir;
  write_file(dir / "r.tsv", "u1\ta\nu1\tb\nu2\ta\nu2\tc\nu3\tb\nu3\tc\n");
  auto data = load_interactions(dir / "r.tsv");
  SplitSpec spec{SplitMode::strong, 0.5, 0.5, 11};
  auto s = split(data.matrix, spec);
  save_split(dir / "out", s, spec, data.users, data.items);
  for (auto name : {"train.tsv", "test_input.tsv", "test_target.tsv", "users.tsv", "items.tsv", "split.json"})
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / name)) << name;
  auto meta = testing::read_file(dir / "out" / "split.json");
  EXPECT_NE(meta.find("\"spec_version\""), std::string::npos);
  EXPECT_NE(meta.find("\"skipped_users\""), std::string::npos);
}

}  // namespace
}  // namespace deql
