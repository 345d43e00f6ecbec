#include "genlie/jet.hpp"

#include <cctype>
#include <numeric>

#include "genlie/context.hpp"
#include "genlie/error.hpp"

namespace genlie {

JetSpace::JetSpace(std::vector<std::string> independent, std::vector<std::string> dependent,
                   int max_order)
    : independent_(std::move(independent)), dependent_(std::move(dependent)), max_order_(max_order) {
  if (max_order_ < 0) throw InputError("negative jet order");
  for (const auto& name : independent_) {
    if (name.size() != 1 || !std::isalpha(static_cast<unsigned char>(name[0]))) {
      throw InputError("independent variable '" + name + "' must be a single letter");
    }
  }
  for (const auto& name : dependent_) {
    if (name.empty() || name.find('_') != std::string::npos) {
      throw InputError("dependent variable '" + name + "' must be a non-empty name without '_'");
    }
    if (independent_index(name) >= 0) throw InputError("variable '" + name + "' declared twice");
  }
}

JetSpace JetSpace::with_order(int max_order) const {
  JetSpace copy = *this;
  copy.max_order_ = max_order;
  return copy;
}

std::string JetSpace::jet_name(int dependent, const std::vector<int>& counts) const {
  std::string name = dependent_.at(static_cast<std::size_t>(dependent));
  int total = std::accumulate(counts.begin(), counts.end(), 0);
  if (total == 0) return name;
  name += '_';
  for (std::size_t i = 0; i < counts.size(); ++i) name.append(static_cast<std::size_t>(counts[i]), independent_[i][0]);
  return name;
}

Expr JetSpace::jet(int dependent, const std::vector<int>& counts) const {
  if (counts.size() != p()) throw InputError("multi-index has wrong length");
  int total = std::accumulate(counts.begin(), counts.end(), 0);
  if (total > max_order_) {
    throw JetOrderError("jet order " + std::to_string(total) + " exceeds configured order " +
                        std::to_string(max_order_));
  }
  return jet_symbol(jet_name(dependent, counts), dependent, counts);
}

Expr JetSpace::jet_from_indices(int dependent, const std::vector<int>& indices) const {
  std::vector<int> counts(p(), 0);
  for (int i : indices) counts.at(static_cast<std::size_t>(i))++;
  return jet(dependent, counts);
}

Expr JetSpace::independent_symbol(std::size_t i) const { return symbol(independent_.at(i)); }

int JetSpace::independent_index(const std::string& name) const {
  for (std::size_t i = 0; i < independent_.size(); ++i)
    if (independent_[i] == name) return static_cast<int>(i);
  return -1;
}

int JetSpace::dependent_index(const std::string& name) const {
  for (std::size_t i = 0; i < dependent_.size(); ++i)
    if (dependent_[i] == name) return static_cast<int>(i);
  return -1;
}

std::optional<std::pair<int, std::vector<int>>> JetSpace::parse_jet(const std::string& name) const {
  auto us = name.find('_');
  std::string base = name.substr(0, us);
  int alpha = dependent_index(base);
  if (alpha < 0) return std::nullopt;
  std::vector<int> counts(p(), 0);
  if (us == std::string::npos) return std::make_pair(alpha, counts);
  std::string suffix = name.substr(us + 1);
  if (suffix.empty()) return std::nullopt;
  for (char c : suffix) {
    int i = independent_index(std::string(1, c));
    if (i < 0) return std::nullopt;
    counts[static_cast<std::size_t>(i)]++;
  }
  return std::make_pair(alpha, counts);
}

namespace {

void combos(std::size_t p, int order, std::size_t start, std::vector<int>& counts,
            std::vector<std::vector<int>>& out) {
  if (order == 0) {
    out.push_back(counts);
    return;
  }
  for (std::size_t i = start; i < p; ++i) {
    counts[i]++;
    combos(p, order - 1, i, counts, out);
    counts[i]--;
  }
}

}  // namespace

std::vector<std::vector<int>> JetSpace::multi_indices(int order) const {
  std::vector<std::vector<int>> out;
  for (int k = 1; k <= order; ++k) {
    std::vector<int> counts(p(), 0);
    combos(p(), k, 0, counts, out);
  }
  return out;
}

std::vector<Expr> JetSpace::coordinates(int order) const {
  std::vector<Expr> z;
  for (std::size_t i = 0; i < p(); ++i) z.push_back(independent_symbol(i));
  auto indices = multi_indices(order);
  JetSpace wide = with_order(std::max(order, max_order_));
  for (std::size_t a = 0; a < q(); ++a) {
    z.push_back(wide.jet(static_cast<int>(a)));
    for (const auto& counts : indices) z.push_back(wide.jet(static_cast<int>(a), counts));
  }
  return z;
}

// ---------------------------------------------------------------------------

Context Context::standard() {
  Context c;
  c.functions.push_back({"F", {"u"}, {}});
  c.functions.push_back({"G", {"u"}, {}});
  return c;
}

const FunctionDecl* Context::find_function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

Context& Context::declare(FunctionDecl decl) {
  for (auto& f : functions) {
    if (f.name == decl.name) {
      f = std::move(decl);
      return *this;
    }
  }
  functions.push_back(std::move(decl));
  return *this;
}

Context& Context::declare_inverse_pair(const std::string& name, const std::string& inverse_name,
                                       const std::string& param) {
  declare({name, {param}, inverse_name});
  declare({inverse_name, {param}, name});
  return *this;
}

}  // namespace genlie
