#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace deql {

using Entry = std::pair<std::uint32_t, std::uint32_t>;  // (user, item)

// Sparse binary m x n user-item matrix. Stored row-compressed with each
// user's items sorted ascending; entries are unique and in bounds.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;

  // Duplicates are collapsed. Throws InvalidArgument on out-of-range indices.
  InteractionMatrix(std::size_t num_users, std::size_t num_items,
                    std::vector<Entry> entries);

  std::size_t num_users() const { return num_users_; }
  std::size_t num_items() const { return num_items_; }
  std::size_t num_entries() const { return items_.size(); }

  std::span<const std::uint32_t> row(std::size_t user) const {
    return {items_.data() + row_ptr_[user], row_ptr_[user + 1] - row_ptr_[user]};
  }

  bool contains(std::size_t user, std::size_t item) const;

  // Entries in (user, item) lexicographic order.
  std::vector<Entry> entries() const;

  // Per-item interaction counts (column popcounts).
  std::vector<std::int64_t> item_counts() const;

  friend bool operator==(const InteractionMatrix&, const InteractionMatrix&) = default;

 private:
  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> items_;
};

// Bidirectional string id <-> dense index table, indices assigned in
// first-appearance order.
class IdTable {
 public:
  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::size_t index) const { return ids_.at(index); }
  const std::vector<std::string>& ids() const { return ids_; }

  // Index of `id`, inserting it when absent.
  std::size_t intern(const std::string& id);
  // Index of `id`, or -1 when unknown.
  std::ptrdiff_t find(const std::string& id) const;

  void save(const std::filesystem::path& path) const;
  static IdTable load(const std::filesystem::path& path);

  friend bool operator==(const IdTable& a, const IdTable& b) { return a.ids_ == b.ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class InteractionFormat { pair_tsv };

struct LoadedInteractions {
  InteractionMatrix matrix;
  IdTable users;
  IdTable items;
  std::size_t unknown_items_skipped = 0;
};

struct LoadOptions {
  // Pre-existing tables to map onto. With `freeze_items`, lines naming an
  // item absent from `items` are skipped and counted instead of interned.
  IdTable users;
  IdTable items;
  bool freeze_items = false;
};

// Reads `user<TAB>item` lines; '#' lines and blank lines are ignored.
// Throws ParseError (with line number) on malformed lines or an empty file.
LoadedInteractions load_interactions(const std::filesystem::path& path,
                                     InteractionFormat format = InteractionFormat::pair_tsv,
                                     LoadOptions options = {});

// Writes entries as pair_tsv using the given id tables.
void save_interactions(const std::filesystem::path& path, const InteractionMatrix& r,
                       const IdTable& users, const IdTable& items);

// Items with zero interactions. Empty result certifies that no column of R
// is a zero vector.
std::vector<std::size_t> check_no_zero_columns(const InteractionMatrix& r);

// Removes the given items and compacts the remaining item indices.
InteractionMatrix remove_items(const InteractionMatrix& r, const std::vector<std::size_t>& items);

// Removes the given items and compacts the item indices (and table).
LoadedInteractions drop_items(const LoadedInteractions& data,
                              const std::vector<std::size_t>& items);

}  // namespace deql
