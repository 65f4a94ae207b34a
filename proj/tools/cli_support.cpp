#include "cli_support.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>

#include "procnash/gen/rng.hpp"

namespace procnash::cli {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad size '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("bad size '" + s + "'");
  return v;
}

std::string fixed(double x, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out = "|";
  for (const auto& h : header) out += " " + h + " |";
  out += "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? "---|" : "---:|";
  out += "\n";
  for (const auto& r : rows) {
    out += "|";
    for (const auto& c : r) out += " " + c + " |";
    out += "\n";
  }
  return out;
}

void render_results(std::string& out, const std::vector<EvalFile>& files) {
  std::set<int> sizes;
  for (const auto& f : files)
    for (const auto& r : f.results) sizes.insert(r.n);
  std::vector<std::string> header{"agent"};
  for (int n : sizes) header.push_back(std::to_string(n) + "x" + std::to_string(n));

  const auto section = [&](const std::string& title, auto cell) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& f : files) {
      std::vector<std::string> row{f.agent};
      for (int n : sizes) {
        const auto it = std::find_if(f.results.begin(), f.results.end(), [n](const EvalResult& r) { return r.n == n; });
        row.push_back(it == f.results.end() ? "--" : cell(*it));
      }
      rows.push_back(std::move(row));
    }
    out += "### " + title + "\n\n" + table(header, rows) + "\n";
  };
  section("s@tau", [](const EvalResult& r) { return format_with_se(r.s_at_tau, r.se_s); });
  section("pass@1", [](const EvalResult& r) { return format_with_se(r.pass_at_1, r.se_pass); });
  section("valid output rate", [](const EvalResult& r) { return fixed(r.valid_rate); });
}

void render_padding(std::string& out, const json& j) {
  std::vector<int> targets = j.at("targets").get<std::vector<int>>();
  std::vector<std::string> header{"condition"};
  std::optional<json> base;
  for (const auto& c : j.at("results"))
    if (c.at("condition") == "base") base = c;
  if (base) header.push_back("base " + std::to_string(base->at("n").get<int>()));
  for (int n : targets) header.push_back("N=" + std::to_string(n));

  std::vector<std::vector<std::string>> rows;
  for (const char* cond : {"dense", "dominated", "random"}) {
    std::vector<std::string> row{cond};
    if (base) row.push_back(format_with_se(base->at("s_at_tau"), base->at("se_s")));
    for (int n : targets) {
      std::string cell = "--";
      for (const auto& c : j.at("results"))
        if (c.at("condition") == cond && c.at("n") == n) cell = format_with_se(c.at("s_at_tau"), c.at("se_s"));
      row.push_back(cell);
    }
    rows.push_back(std::move(row));
  }
  out += "### padding (" + j.value("agent", std::string("?")) + ", s@tau)\n\n" + table(header, rows) + "\n";
}

void render_audits(std::string& out, const json& j) {
  std::set<int> sizes;
  for (const auto& a : j.at("audits"))
    for (const auto& s : a.at("per_size")) sizes.insert(s.at("n").get<int>());
  std::vector<std::string> header{"audit"};
  for (int n : sizes) header.push_back(std::to_string(n) + "x" + std::to_string(n));
  header.push_back("all (mean / max)");
  std::vector<std::vector<std::string>> rows;
  for (const auto& a : j.at("audits")) {
    std::vector<std::string> row{a.at("kind").get<std::string>()};
    for (int n : sizes) {
      std::string cell = "--";
      for (const auto& s : a.at("per_size"))
        if (s.at("n") == n && s.at("count").get<int>() > 0) cell = fixed(s.at("mean").get<double>(), 4);
      row.push_back(cell);
    }
    row.push_back(a.at("count").get<int>() > 0
                      ? fixed(a.at("mean").get<double>(), 4) + " / " + fixed(a.at("max").get<double>(), 4)
                      : "--");
    rows.push_back(std::move(row));
  }
  out += "### invariance audits (" + j.value("agent", std::string("?")) + ", mean |reward difference|)\n\n" +
         table(header, rows) + "\n";
}

}  // namespace

std::vector<int> parse_sizes(const std::string& text) {
  const std::string t = trim(text);
  std::vector<int> out;
  if (const auto dots = t.find(".."); dots != std::string::npos) {
    const int lo = to_int(trim(t.substr(0, dots)));
    const int hi = to_int(trim(t.substr(dots + 2)));
    if (lo > hi) throw ConfigError("empty size range '" + text + "'");
    for (int n = lo; n <= hi; ++n) out.push_back(n);
  } else {
    std::stringstream ss(t);
    for (std::string part; std::getline(ss, part, ',');) out.push_back(to_int(trim(part)));
  }
  if (out.empty()) throw ConfigError("no sizes in '" + text + "'");
  for (int n : out)
    if (n < 2) throw ConfigError("sizes must be at least 2");
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::string> merge_config_args(const CLI::App& sub, const std::vector<std::string>& args,
                                           const std::vector<std::pair<std::string, std::string>>& entries) {
  std::vector<std::string> injected;
  for (const auto& [key, value] : entries) {
    const CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") throw ConfigError("unknown config key '" + key + "' for " + sub.get_name());
    if (opt->get_items_expected_max() == 0) {
      if (value == "true" || value == "1") {
        injected.push_back("--" + key);
      } else if (value != "false" && value != "0") {
        throw ConfigError("config key '" + key + "' expects true or false");
      }
      continue;
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  // args = [program, subcommand, user args...]
  std::vector<std::string> out(args.begin(), args.begin() + std::min<std::size_t>(2, args.size()));
  out.insert(out.end(), injected.begin(), injected.end());
  if (args.size() > 2) out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

RunManifest::RunManifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)),
      argv_(std::move(argv)),
      started_(std::chrono::steady_clock::now()),
      started_wall_(std::chrono::system_clock::now()) {}

json RunManifest::to_json() const {
  const auto digests = [](const std::vector<std::string>& paths) {
    json j = json::object();
    for (const auto& p : paths) {
      try {
        j[p] = file_digest(p);
      } catch (const ConfigError&) {
        j[p] = nullptr;
      }
    }
    return j;
  };
  json seeds = json::object();
  for (const auto& [k, v] : seeds_) seeds[k] = v;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  return json{{"command", command_},
              {"argv", argv_},
              {"config", config_},
              {"seeds", seeds},
              {"version", PROCNASH_VERSION},
              {"inputs", digests(inputs_)},
              {"outputs", digests(outputs_)},
              {"started_unix_s", std::chrono::duration_cast<std::chrono::seconds>(started_wall_.time_since_epoch()).count()},
              {"wall_clock_s", wall}};
}

void RunManifest::write(const std::string& out_path) const {
  std::ofstream out(out_path + ".manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest for " + out_path);
  out << to_json().dump(2) << '\n';
}

std::string format_with_se(double value, double se) { return fixed(value) + " ± " + fixed(se); }

std::string render_report(const std::vector<json>& inputs) {
  std::vector<EvalFile> results;
  std::string padding, audits;
  for (const auto& j : inputs) {
    if (j.value("schema", "") == kEvalResultSchema) {
      results.push_back(eval_file_from_json(j));
    } else if (j.contains("targets") && j.contains("results")) {
      render_padding(padding, j);
    } else if (j.contains("audits")) {
      render_audits(audits, j);
    } else {
      throw ConfigError("report input is not a results, padding or audit file");
    }
  }
  std::string out = "# procnash report\n\n";
  if (!results.empty()) render_results(out, results);
  out += padding + audits;
  return out;
}

}  // namespace procnash::cli
