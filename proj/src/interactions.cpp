#include "deql/interactions.hpp"

#include <algorithm>
#include <fstream>

#include "deql/errors.hpp"

namespace deql {

ZeroColumnError::ZeroColumnError(std::vector<std::size_t> items)
    : Error([&] {
        std::string msg = "items with no interactions (no column of R may be zero): ";
        for (std::size_t k = 0; k < items.size() && k < 10; ++k) {
          if (k) msg += ",";
          msg += std::to_string(items[k]);
        }
        if (items.size() > 10) msg += ",... (" + std::to_string(items.size()) + " total)";
        return msg;
      }()),
      items_(std::move(items)) {}

InteractionMatrix::InteractionMatrix(std::size_t num_users, std::size_t num_items,
                                     std::vector<Entry> entries)
    : num_users_(num_users), num_items_(num_items) {
  for (const auto& [u, i] : entries) {
    if (u >= num_users || i >= num_items) {
      throw InvalidArgument("interaction (" + std::to_string(u) + "," + std::to_string(i) +
                            ") outside " + std::to_string(num_users) + "x" +
                            std::to_string(num_items));
    }
  }
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

  row_ptr_.assign(num_users + 1, 0);
  items_.reserve(entries.size());
  for (const auto& [u, i] : entries) {
    ++row_ptr_[u + 1];
    items_.push_back(i);
  }
  for (std::size_t u = 0; u < num_users; ++u) row_ptr_[u + 1] += row_ptr_[u];
}

bool InteractionMatrix::contains(std::size_t user, std::size_t item) const {
  if (user >= num_users_) return false;
  auto r = row(user);
  return std::binary_search(r.begin(), r.end(), static_cast<std::uint32_t>(item));
}

std::vector<Entry> InteractionMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(items_.size());
  for (std::size_t u = 0; u < num_users_; ++u)
    for (auto i : row(u)) out.emplace_back(static_cast<std::uint32_t>(u), i);
  return out;
}

std::vector<std::int64_t> InteractionMatrix::item_counts() const {
  std::vector<std::int64_t> counts(num_items_, 0);
  for (auto i : items_) ++counts[i];
  return counts;
}

std::size_t IdTable::intern(const std::string& id) {
  auto [it, inserted] = index_.try_emplace(id, ids_.size());
  if (inserted) ids_.push_back(id);
  return it->second;
}

std::ptrdiff_t IdTable::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

void IdTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t k = 0; k < ids_.size(); ++k) out << k << '\t' << ids_[k] << '\n';
}

IdTable IdTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  IdTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(path.string(), line_no, "expected index<TAB>id");
    std::size_t index = 0;
    try {
      index = std::stoull(line.substr(0, tab));
    } catch (const std::exception&) {
      throw ParseError(path.string(), line_no, "bad index");
    }
    if (index != table.size()) throw ParseError(path.string(), line_no, "indices must be dense and ordered");
    table.intern(line.substr(tab + 1));
  }
  return table;
}

LoadedInteractions load_interactions(const std::filesystem::path& path, InteractionFormat,
                                     LoadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());

  LoadedInteractions out;
  out.users = std::move(options.users);
  out.items = std::move(options.items);

  std::vector<Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos || tab == 0 ||
        tab + 1 == line.size()) {
      throw ParseError(path.string(), line_no, "expected exactly two tab-separated fields");
    }
    std::string user = line.substr(0, tab);
    std::string item = line.substr(tab + 1);
    std::size_t item_index;
    if (options.freeze_items) {
      auto found = out.items.find(item);
      if (found < 0) {
        ++out.unknown_items_skipped;
        continue;
      }
      item_index = static_cast<std::size_t>(found);
    } else {
      item_index = out.items.intern(item);
    }
    auto user_index = out.users.intern(user);
    entries.emplace_back(static_cast<std::uint32_t>(user_index),
                         static_cast<std::uint32_t>(item_index));
  }
  if (entries.empty() && out.unknown_items_skipped == 0)
    throw ParseError(path.string(), line_no, "file contains no interactions");

  out.matrix = InteractionMatrix(out.users.size(), out.items.size(), std::move(entries));
  return out;
}

void save_interactions(const std::filesystem::path& path, const InteractionMatrix& r,
                       const IdTable& users, const IdTable& items) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& [u, i] : r.entries()) out << users.id(u) << '\t' << items.id(i) << '\n';
}

std::vector<std::size_t> check_no_zero_columns(const InteractionMatrix& r) {
  std::vector<std::size_t> zero;
  auto counts = r.item_counts();
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] == 0) zero.push_back(i);
  return zero;
}

InteractionMatrix remove_items(const InteractionMatrix& r, const std::vector<std::size_t>& items) {
  const std::size_t n = r.num_items();
  std::vector<std::int64_t> remap(n, 0);
  for (auto i : items) {
    if (i >= n) throw InvalidArgument("remove_items: item index out of range");
    remap[i] = -1;
  }
  std::int64_t next = 0;
  for (auto& v : remap) v = v < 0 ? -1 : next++;
  std::vector<Entry> entries;
  for (const auto& [u, i] : r.entries())
    if (remap[i] >= 0) entries.emplace_back(u, static_cast<std::uint32_t>(remap[i]));
  return InteractionMatrix(r.num_users(), static_cast<std::size_t>(next), std::move(entries));
}

LoadedInteractions drop_items(const LoadedInteractions& data,
                              const std::vector<std::size_t>& items) {
  LoadedInteractions out;
  out.matrix = remove_items(data.matrix, items);
  out.users = data.users;
  out.unknown_items_skipped = data.unknown_items_skipped;
  std::vector<bool> dropped(data.matrix.num_items(), false);
  for (auto i : items) dropped[i] = true;
  for (std::size_t i = 0; i < dropped.size(); ++i)
    if (!dropped[i]) out.items.intern(data.items.id(i));
  return out;
}

}  // namespace deql
