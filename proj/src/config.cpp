#include "hsgc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "hsgc/error.hpp"

namespace hsgc {
namespace {

constexpr const char* kModule = "config";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(kModule, "'" + key + "': cannot parse '" + value + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) throw ConfigError(kModule, "'" + key + "': value must be finite");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(kModule, "'" + key + "': expected true/false, got '" + value + "'");
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

template <typename T>
Setter number(T PipelineConfig::*field) {
  return [field](PipelineConfig& c, const std::string& k, const std::string& v) { c.*field = parse_number<T>(k, v); };
}

template <typename T>
Setter optional_number(std::optional<T> PipelineConfig::*field) {
  return [field](PipelineConfig& c, const std::string& k, const std::string& v) {
    if (v == "auto") {
      (c.*field).reset();
    } else {
      c.*field = parse_number<T>(k, v);
    }
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"variance_target", number(&PipelineConfig::variance_target)},
      {"max_bands", number(&PipelineConfig::max_bands)},
      {"cov_window", number(&PipelineConfig::cov_window)},
      {"cov_epsilon_scale", number(&PipelineConfig::cov_epsilon_scale)},
      {"superpixels", optional_number(&PipelineConfig::superpixels)},
      {"compactness", number(&PipelineConfig::compactness)},
      {"max_iters", number(&PipelineConfig::max_iters)},
      {"seg_tol", number(&PipelineConfig::seg_tol)},
      {"density_lambda", number(&PipelineConfig::density_lambda)},
      {"density_gmin", number(&PipelineConfig::density_gmin)},
      {"density_smoothing", number(&PipelineConfig::density_smoothing)},
      {"h", optional_number(&PipelineConfig::h)},
      {"beta", number(&PipelineConfig::beta)},
      {"sigma_s", optional_number(&PipelineConfig::sigma_s)},
      {"sigma_l", optional_number(&PipelineConfig::sigma_l)},
      {"knn", number(&PipelineConfig::knn)},
      {"alpha", number(&PipelineConfig::alpha)},
      {"lgc_tol", number(&PipelineConfig::lgc_tol)},
      {"lgc_max_iters", number(&PipelineConfig::lgc_max_iters)},
      {"labels_per_class", number(&PipelineConfig::labels_per_class)},
      {"trials", number(&PipelineConfig::trials)},
      {"rng_seed", number(&PipelineConfig::rng_seed)},
      {"include_seeds",
       [](PipelineConfig& c, const std::string& k, const std::string& v) { c.include_seeds = parse_bool(k, v); }},
      {"threads", number(&PipelineConfig::threads)},
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& domain) {
  if (!ok) throw ConfigError(kModule, "'" + key + "' must be " + domain);
}

}  // namespace

void PipelineConfig::validate() const {
  require(variance_target > 0.0 && variance_target <= 1.0, "variance_target", "in (0, 1]");
  require(max_bands >= 0, "max_bands", ">= 0");
  require(cov_window >= 3 && cov_window % 2 == 1, "cov_window", "odd and >= 3");
  require(cov_epsilon_scale > 0.0, "cov_epsilon_scale", "> 0");
  require(!superpixels || *superpixels >= 1, "superpixels", ">= 1");
  require(compactness > 0.0, "compactness", "> 0");
  require(max_iters >= 1, "max_iters", ">= 1");
  require(seg_tol >= 0.0, "seg_tol", ">= 0");
  require(density_lambda >= 0.0, "density_lambda", ">= 0");
  require(density_gmin > 0.0 && density_gmin <= 1.0, "density_gmin", "in (0, 1]");
  require(density_smoothing >= 1 && density_smoothing % 2 == 1, "density_smoothing", "odd and >= 1");
  require(!h || *h > 0.0, "h", "> 0");
  require(beta >= 0.0 && beta <= 1.0, "beta", "in [0, 1]");
  require(!sigma_s || *sigma_s > 0.0, "sigma_s", "> 0");
  require(!sigma_l || *sigma_l > 0.0, "sigma_l", "> 0");
  require(knn >= 1, "knn", ">= 1");
  require(alpha > 0.0 && alpha < 1.0, "alpha", "in (0, 1)");
  require(lgc_tol > 0.0, "lgc_tol", "> 0");
  require(lgc_max_iters >= 1, "lgc_max_iters", ">= 1");
  require(labels_per_class >= 0, "labels_per_class", ">= 0");
  require(trials >= 1, "trials", ">= 1");
  require(threads >= 0, "threads", ">= 0");
}

int resolve_superpixels(const PipelineConfig& config, std::size_t pixel_count) {
  const std::size_t k = config.superpixels
                            ? static_cast<std::size_t>(*config.superpixels)
                            : std::max<std::size_t>(1, (pixel_count + kPixelsPerSuperpixel / 2) / kPixelsPerSuperpixel);
  return static_cast<int>(std::min(k, pixel_count));
}

void apply_setting(PipelineConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(kModule, "unknown key '" + key + "'");
  it->second(config, key, value);
}

PipelineConfig parse_config_text(const std::string& text) {
  PipelineConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(kModule, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  config.validate();
  return config;
}

PipelineConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(kModule, "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void write_config(const PipelineConfig& c, std::ostream& out) {
  const auto opt = [](const auto& v) {
    std::ostringstream s;
    s << std::setprecision(17);
    if (v) {
      s << *v;
    } else {
      s << "auto";
    }
    return s.str();
  };
  out << std::setprecision(17);
  out << "variance_target = " << c.variance_target << '\n'
      << "max_bands = " << c.max_bands << '\n'
      << "cov_window = " << c.cov_window << '\n'
      << "cov_epsilon_scale = " << c.cov_epsilon_scale << '\n'
      << "superpixels = " << opt(c.superpixels) << '\n'
      << "compactness = " << c.compactness << '\n'
      << "max_iters = " << c.max_iters << '\n'
      << "seg_tol = " << c.seg_tol << '\n'
      << "density_lambda = " << c.density_lambda << '\n'
      << "density_gmin = " << c.density_gmin << '\n'
      << "density_smoothing = " << c.density_smoothing << '\n'
      << "h = " << opt(c.h) << '\n'
      << "beta = " << c.beta << '\n'
      << "sigma_s = " << opt(c.sigma_s) << '\n'
      << "sigma_l = " << opt(c.sigma_l) << '\n'
      << "knn = " << c.knn << '\n'
      << "alpha = " << c.alpha << '\n'
      << "lgc_tol = " << c.lgc_tol << '\n'
      << "lgc_max_iters = " << c.lgc_max_iters << '\n'
      << "labels_per_class = " << c.labels_per_class << '\n'
      << "trials = " << c.trials << '\n'
      << "rng_seed = " << c.rng_seed << '\n'
      << "include_seeds = " << (c.include_seeds ? "true" : "false") << '\n'
      << "threads = " << c.threads << '\n';
}

}  // namespace hsgc
