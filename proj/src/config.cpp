#include "magdirac/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "magdirac/error.hpp"

namespace magdirac {

namespace {

constexpr std::pair<Task, std::string_view> kTaskNames[] = {
    {Task::Spectrum, "spectrum"},
    {Task::HeatCheck, "heat-check"},
    {Task::SchrodingerCheck, "schrodinger-check"},
    {Task::SubordinationCheck, "subordination-check"},
    {Task::DiracCheck, "dirac-check"},
    {Task::DecayScan, "decay-scan"},
    {Task::BernsteinScan, "bernstein-scan"},
    {Task::StrichartzScan, "strichartz-scan"},
    {Task::NormCheck, "norm-check"},
    {Task::SquareCheck, "square-check"},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Raised while converting one value; the caller adds the line number.
struct BadValue {
  std::string what;
};

double to_double(std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw BadValue{fmt::format("'{}' is not a number", s)};
  return v;
}

long long to_integer(std::string_view s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw BadValue{fmt::format("'{}' is not an integer", s)};
  return v;
}

int to_int(std::string_view s) {
  const auto v = to_integer(s);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw BadValue{fmt::format("'{}' is out of range", s)};
  return static_cast<int>(v);
}

std::vector<double> to_doubles(std::string_view s) {
  std::vector<double> out;
  for (auto item : split(s, ',')) out.push_back(to_double(item));
  return out;
}

Spin to_spin(std::string_view s) {
  if (s == "up") return Spin::Up;
  if (s == "down") return Spin::Down;
  throw BadValue{fmt::format("unknown spin '{}'", s)};
}

Flow to_flow(std::string_view s) {
  for (Flow f : {Flow::HalfwaveUp, Flow::HalfwaveDown, Flow::Dirac})
    if (s == to_string(f)) return f;
  throw BadValue{fmt::format("unknown flow '{}'", s)};
}

std::string num(double v) {
  if (std::isinf(v)) return "inf";
  return fmt::format("{}", v);
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + f(xs[i]);
  return out;
}

[[noreturn]] void invalid(std::string_view field, std::string_view what) {
  throw Error(Errc::ValidationError, fmt::format("{}: {}", field, what));
}

void apply_task_defaults(RunConfig& c, const std::set<std::string>& given) {
  auto unset = [&](const char* key) { return !given.count(key); };
  switch (c.task) {
    case Task::BernsteinScan:
      if (unset("j_min")) c.j_min = 2;
      if (unset("j_max")) c.j_max = 6;
      if (unset("pairs")) c.pairs = {{1.0, HUGE_VAL}, {2.0, HUGE_VAL}, {2.0, 2.0}};
      break;
    case Task::StrichartzScan:
      if (unset("pairs")) c.pairs = {{8.0, 4.0}, {HUGE_VAL, 2.0}};
      if (unset("flows")) c.flows = {Flow::HalfwaveUp, Flow::HalfwaveDown, Flow::Dirac};
      break;
    case Task::NormCheck:
      if (unset("s_list")) c.s_list = {0.0, 0.5, 1.0};
      break;
    case Task::SquareCheck:
      if (unset("p_list")) c.p_list = {2.0, 4.0};
      break;
    case Task::HeatCheck:
      if (unset("times")) c.times = {0.25, 0.5, 1.0};
      break;
    case Task::SchrodingerCheck:
      if (unset("times")) c.times = {0.3, 0.7, 1.2};
      break;
    case Task::DiracCheck:
      if (unset("times")) c.times = {0.5, 2.0, 10.0};
      break;
    default:
      break;
  }
}

}  // namespace

std::string to_string(Task task) {
  for (const auto& [t, name] : kTaskNames)
    if (t == task) return std::string(name);
  return "?";
}

void RunConfig::validate() const {
  if (!(field.B0 > 0.0) || !std::isfinite(field.B0)) invalid("B0", "must be a finite positive number");
  if (!(field.m >= 0.0) || !std::isfinite(field.m)) invalid("m", "must be finite and >= 0");
  if (R && !(*R > 0.0)) invalid("R", "must be > 0 or 'auto'");
  if (Nr < 16) invalid("Nr", "must be >= 16");
  if (Ntheta < 8 || (Ntheta & (Ntheta - 1)) != 0) invalid("Ntheta", "must be a power of two >= 8");
  if (K < 0 || K > 512) invalid("K", "must lie in [0, 512]");
  if (L < 0 || L > 4096) invalid("L", "must lie in [0, 4096]");
  if (j_min < -20 || j_min > 20) invalid("j_min", "must lie in [-20, 20]");
  if (j_max < j_min || j_max > 20) invalid("j_max", "must lie in [j_min, 20]");
  if (!(t_scaled_min > 0.0)) invalid("t_scaled_min", "must be > 0");
  if (!(t_scaled_max >= t_scaled_min)) invalid("t_scaled_max", "must be >= t_scaled_min");
  if (t_points < 1) invalid("t_points", "must be >= 1");
  if (spins.empty()) invalid("spin", "needs at least one entry");
  if (!(T > 0.0)) invalid("T", "must be > 0");
  for (const auto& [q, p] : pairs)
    if (!(q >= 1.0) || !(p >= 1.0)) invalid("pairs", "exponents must be >= 1");
  for (double s : s_list)
    if (!(s >= 0.0 && s <= 2.0)) invalid("s_list", "entries must lie in [0, 2]");
  for (double p : p_list)
    if (!(p > 1.0) || std::isinf(p)) invalid("p_list", "entries must lie in (1, inf)");
  for (double t : times)
    if (!std::isfinite(t)) invalid("times", "entries must be finite");
  if (family_size < 1) invalid("family_size", "must be >= 1");
  if (family_modes < 1) invalid("family_modes", "must be >= 1");
  if (out.empty()) invalid("out", "must not be empty");
}

std::string RunConfig::canonical() const {
  std::string s;
  auto line = [&](std::string_view k, const std::string& v) { s += fmt::format("{} = {}\n", k, v); };
  line("task", to_string(task));
  line("B0", num(field.B0));
  line("m", num(field.m));
  line("R", R ? num(*R) : "auto");
  line("Nr", std::to_string(Nr));
  line("Ntheta", std::to_string(Ntheta));
  line("K", std::to_string(K));
  line("L", std::to_string(L));
  line("j_min", std::to_string(j_min));
  line("j_max", std::to_string(j_max));
  line("t_scaled_min", num(t_scaled_min));
  line("t_scaled_max", num(t_scaled_max));
  line("t_points", std::to_string(t_points));
  line("spin", join(spins, [](Spin x) { return to_string(x); }));
  line("T", num(T));
  line("pairs", join(pairs, [](const auto& qp) { return num(qp.first) + ":" + num(qp.second); }));
  line("flows", join(flows, [](Flow f) { return to_string(f); }));
  line("s_list", join(s_list, num));
  line("p_list", join(p_list, num));
  line("times", join(times, num));
  line("family_size", std::to_string(family_size));
  line("family_modes", std::to_string(family_modes));
  line("seed", std::to_string(seed));
  line("out", out.string());
  line("cache", cache ? cache->string() : "default");
  return s;
}

namespace {

// List-valued keys accept an empty value, which is how canonical() renders an
// empty list.
const std::set<std::string, std::less<>> kListKeys = {"pairs", "flows", "s_list", "p_list",
                                                      "times"};

void clear_list(RunConfig& c, std::string_view key) {
  if (key == "pairs") c.pairs.clear();
  if (key == "flows") c.flows.clear();
  if (key == "s_list") c.s_list.clear();
  if (key == "p_list") c.p_list.clear();
  if (key == "times") c.times.clear();
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::set<std::string> given;

  using Setter = std::function<void(std::string_view)>;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"task",
       [&](std::string_view v) {
         for (const auto& [t, name] : kTaskNames)
           if (v == name) {
             c.task = t;
             return;
           }
         throw BadValue{fmt::format("unknown task '{}'", v)};
       }},
      {"B0", [&](auto v) { c.field.B0 = to_double(v); }},
      {"m", [&](auto v) { c.field.m = to_double(v); }},
      {"R",
       [&](auto v) {
         if (v == "auto")
           c.R.reset();
         else
           c.R = to_double(v);
       }},
      {"Nr", [&](auto v) { c.Nr = to_int(v); }},
      {"Ntheta", [&](auto v) { c.Ntheta = to_int(v); }},
      {"K", [&](auto v) { c.K = to_int(v); }},
      {"L", [&](auto v) { c.L = to_int(v); }},
      {"j_min", [&](auto v) { c.j_min = to_int(v); }},
      {"j_max", [&](auto v) { c.j_max = to_int(v); }},
      {"t_scaled_min", [&](auto v) { c.t_scaled_min = to_double(v); }},
      {"t_scaled_max", [&](auto v) { c.t_scaled_max = to_double(v); }},
      {"t_points", [&](auto v) { c.t_points = to_int(v); }},
      {"spin",
       [&](auto v) {
         c.spins.clear();
         for (auto item : split(v, ','))
           if (item == "both") {
             c.spins.push_back(Spin::Up);
             c.spins.push_back(Spin::Down);
           } else {
             c.spins.push_back(to_spin(item));
           }
       }},
      {"T", [&](auto v) { c.T = to_double(v); }},
      {"pairs",
       [&](auto v) {
         c.pairs.clear();
         for (auto item : split(v, ',')) {
           const auto qp = split(item, ':');
           if (qp.size() != 2) throw BadValue{fmt::format("pair '{}' is not q:p", item)};
           c.pairs.emplace_back(to_double(qp[0]), to_double(qp[1]));
         }
       }},
      {"flows",
       [&](auto v) {
         c.flows.clear();
         for (auto item : split(v, ',')) c.flows.push_back(to_flow(item));
       }},
      {"s_list", [&](auto v) { c.s_list = to_doubles(v); }},
      {"p_list", [&](auto v) { c.p_list = to_doubles(v); }},
      {"times", [&](auto v) { c.times = to_doubles(v); }},
      {"family_size", [&](auto v) { c.family_size = to_int(v); }},
      {"family_modes", [&](auto v) { c.family_modes = to_int(v); }},
      {"seed",
       [&](auto v) {
         const auto s = to_integer(v);
         if (s < 0) throw BadValue{"seed must be non-negative"};
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"out", [&](auto v) { c.out = std::string(v); }},
      {"cache",
       [&](auto v) {
         if (v == "default")
           c.cache.reset();
         else
           c.cache = std::string(v);
       }},
  };

  int lineno = 0;
  for (auto raw : split(text, '\n')) {
    ++lineno;
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::ParseError, fmt::format("line {}: expected 'key = value'", lineno));
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw Error(Errc::ParseError, fmt::format("line {}: unknown key '{}'", lineno, key));
    if (!given.insert(std::string(key)).second)
      throw Error(Errc::ParseError, fmt::format("line {}: duplicate key '{}'", lineno, key));
    if (value.empty() && !kListKeys.contains(key))
      throw Error(Errc::ParseError, fmt::format("line {}: empty value for '{}'", lineno, key));
    try {
      if (value.empty())
        clear_list(c, key);
      else
        it->second(value);
    } catch (const BadValue& e) {
      throw Error(Errc::ParseError, fmt::format("line {}: {}: {}", lineno, key, e.what));
    }
  }
  apply_task_defaults(c, given);
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace magdirac
