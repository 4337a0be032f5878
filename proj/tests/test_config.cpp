#include <doctest.h>

#include <sstream>

#include "hsgc/config.hpp"
#include "hsgc/error.hpp"

using namespace hsgc;

TEST_CASE("empty text gives the defaults") {
  const PipelineConfig c = parse_config_text("\n# nothing here\n   \n");
  const PipelineConfig d;
  CHECK(c.beta == d.beta);
  CHECK(c.alpha == d.alpha);
  CHECK(c.knn == d.knn);
  CHECK_FALSE(c.superpixels.has_value());
}

TEST_CASE("values, comments and auto") {
  const PipelineConfig c = parse_config_text("knn = 12 # comment\nsuperpixels=300\nsigma_s = 0.25\ninclude_seeds = yes\n");
  CHECK(c.knn == 12);
  CHECK(c.superpixels == 300);
  CHECK(c.sigma_s == 0.25);
  CHECK(c.include_seeds);
  CHECK_FALSE(parse_config_text("superpixels = 300\nsuperpixels = auto\n").superpixels.has_value());
}

TEST_CASE("errors name the offending key") {
  auto message = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("beta = 1.5").find("beta") != std::string::npos);
  CHECK(message("alpha = 1").find("alpha") != std::string::npos);
  CHECK(message("cov_window = 4").find("cov_window") != std::string::npos);
  CHECK(message("knn = twelve").find("knn") != std::string::npos);
  CHECK(message("gamma = 2").find("gamma") != std::string::npos);
  CHECK(message("beta 0.5").find("line 1") != std::string::npos);
  CHECK(message("sigma_l = nan").find("sigma_l") != std::string::npos);
}

TEST_CASE("written configs parse back unchanged") {
  PipelineConfig c;
  c.superpixels = 777;
  c.sigma_l = 3.0 / 7.0;
  c.beta = 0.1 + 0.2;
  c.rng_seed = 1234567890123ULL;
  c.include_seeds = true;
  std::ostringstream out;
  write_config(c, out);
  const PipelineConfig back = parse_config_text(out.str());
  std::ostringstream again;
  write_config(back, again);
  CHECK(out.str() == again.str());
  CHECK(back.sigma_l == c.sigma_l);
  CHECK(back.beta == c.beta);
  CHECK(back.rng_seed == c.rng_seed);
  CHECK_FALSE(back.h.has_value());
}

TEST_CASE("automatic superpixel count") {
  PipelineConfig c;
  CHECK(resolve_superpixels(c, 4096) == 4096 / kPixelsPerSuperpixel);
  CHECK(resolve_superpixels(c, 1) == 1);
  c.superpixels = 50;
  CHECK(resolve_superpixels(c, 4096) == 50);
  CHECK(resolve_superpixels(c, 20) == 20);
}
