#include "hypalign/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "hypalign/error.hpp"

namespace hypalign {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

template <class T>
T parse_integer(const std::string& key, const std::string& value) {
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("option '" + key + "': expected an integer, got '" + value + "'");
  }
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size()) {
    throw UsageError("option '" + key + "': expected a number, got '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw UsageError("option '" + key + "': expected a boolean, got '" + value + "'");
}

std::string real_text(double v) {
  // shortest text that round-trips
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct Option {
  const char* name;
  std::function<void(TrainConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define INT_OPTION(field) \
  Option{#field, [](TrainConfig& c, const std::string& k, const std::string& v) { c.field = parse_integer<decltype(c.field)>(k, v); }, \
         [](const TrainConfig& c) { return std::to_string(c.field); }}
#define REAL_OPTION(field) \
  Option{#field, [](TrainConfig& c, const std::string& k, const std::string& v) { c.field = parse_real(k, v); }, \
         [](const TrainConfig& c) { return real_text(c.field); }}
#define BOOL_OPTION(field) \
  Option{#field, [](TrainConfig& c, const std::string& k, const std::string& v) { c.field = parse_bool(k, v); }, \
         [](const TrainConfig& c) { return std::string(c.field ? "true" : "false"); }}

const std::vector<Option>& options() {
  static const std::vector<Option> table = {
      INT_OPTION(dim),
      INT_OPTION(negatives),
      INT_OPTION(walks_per_node),
      INT_OPTION(walk_length),
      INT_OPTION(window),
      REAL_OPTION(neg_exponent),
      REAL_OPTION(alpha1),
      REAL_OPTION(alpha2),
      REAL_OPTION(rho),
      REAL_OPTION(rho_decay),
      INT_OPTION(warmup_epochs),
      INT_OPTION(burnin_epochs),
      INT_OPTION(outer_iters),
      INT_OPTION(em_iters_per_outer),
      INT_OPTION(sgd_epochs_per_outer),
      REAL_OPTION(community_step_cap),
      REAL_OPTION(scatter_floor),
      REAL_OPTION(init_scatter),
      REAL_OPTION(tolerance),
      INT_OPTION(eval_terms),
      REAL_OPTION(init_radius),
      INT_OPTION(seed),
      BOOL_OPTION(deterministic),
      INT_OPTION(threads),
      BOOL_OPTION(full_batch),
      REAL_OPTION(r),
      REAL_OPTION(omega),
      INT_OPTION(communities_source),
      INT_OPTION(communities_target),
      Option{"estep",
             [](TrainConfig& c, const std::string&, const std::string& v) { c.estep = parse_estep_mode(v); },
             [](const TrainConfig& c) { return std::string(to_string(c.estep)); }},
      REAL_OPTION(tau),
  };
  return table;
}

#undef INT_OPTION
#undef REAL_OPTION
#undef BOOL_OPTION

}  // namespace

KeyValues parse_config_text(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

void set_option(TrainConfig& cfg, const std::string& key, const std::string& value) {
  // Accept dashed spellings as used on the command line.
  std::string name = key;
  for (char& ch : name) {
    if (ch == '-') ch = '_';
  }
  for (const Option& o : options()) {
    if (name == o.name) {
      o.set(cfg, name, value);
      return;
    }
  }
  throw UsageError("unknown option '" + key + "'");
}

KeyValues describe(const TrainConfig& cfg) {
  KeyValues out;
  for (const Option& o : options()) out.emplace_back(o.name, o.get(cfg));
  return out;
}

std::vector<std::string> option_names() {
  std::vector<std::string> out;
  for (const Option& o : options()) out.emplace_back(o.name);
  return out;
}

}  // namespace hypalign
