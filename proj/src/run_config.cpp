#include "laysam/run_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace laysam {

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& j, const char* key, T& field) {
  if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<T>();
}

template <typename T>
void read_field(const json& j, const char* key, std::optional<T>& field) {
  if (j.contains(key) && !j.at(key).is_null()) {
    field = j.at(key).get<T>();
  } else {
    field.reset();
  }
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options) {
    if (v == o) return true;
  }
  return false;
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (!one_of(task, {"cluster", "regress"})) fail("task must be cluster or regress");
  if (!one_of(method, {"laysam", "unisam", "nn", "full"})) fail("method must be laysam, unisam, nn or full");
  for (const auto& m : methods) {
    if (!one_of(m, {"laysam", "unisam", "nn", "full"})) fail("unknown method '" + m + "' in methods");
  }
  if (n < 1) fail("n must be >= 1");
  if (d < 1 || (task == "regress" && d < 2)) fail("d must be >= 1 (>= 2 for regression)");
  if (k < 1 || k > n) fail("k must lie in [1, n]");
  if (z < 0 || z >= n) fail("z must lie in [0, n)");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) fail("epsilon must lie in (0, 1]");
  if (!(eta > 0.0 && eta < 1.0)) fail("eta must lie in (0, 1)");
  if (!(constant > 0.0)) fail("constant must be positive");
  if (coreset_size && (*coreset_size < 1 || *coreset_size > n)) fail("coreset_size must lie in [1, n]");
  if (per_layer && *per_layer < 1) fail("per_layer must be >= 1");
  if (!(sigma >= 0.0)) fail("sigma must be nonnegative");
  for (double s : sigmas) {
    if (!(s >= 0.0)) fail("sigmas must be nonnegative");
  }
  if (!one_of(distribution, {"gauss", "uniform"})) fail("distribution must be gauss or uniform");
  if (!(region > 0.0)) fail("region bound D must be positive");
  if (power != 1 && power != 2) fail("power must be 1 or 2");
  if (max_iter < 0) fail("max_iter must be >= 0");
  if (!(tol >= 0.0)) fail("tol must be nonnegative");
  if (seed_sample_factor < 1 || init_sample_factor < 1) fail("sample factors must be >= 1");
  if (trials < 1) fail("trials must be >= 1");
}

std::string RunConfig::to_json() const {
  json j = {
      {"task", task},
      {"method", method},
      {"n", n},
      {"d", d},
      {"k", k},
      {"z", z},
      {"epsilon", epsilon},
      {"eta", eta},
      {"constant", constant},
      {"coreset_size", optional_json(coreset_size)},
      {"per_layer", optional_json(per_layer)},
      {"sigma", sigma},
      {"distribution", distribution},
      {"region", region},
      {"normalized", normalized},
      {"power", power},
      {"seed", seed},
      {"max_iter", max_iter},
      {"tol", tol},
      {"seed_sample_factor", seed_sample_factor},
      {"init_sample_factor", init_sample_factor},
      {"trials", trials},
      {"sigmas", sigmas},
      {"methods", methods},
      {"construct_seconds", construct_seconds},
      {"solve_seconds", solve_seconds},
  };
  return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  RunConfig c;
  try {
    read_field(j, "task", c.task);
    read_field(j, "method", c.method);
    read_field(j, "n", c.n);
    read_field(j, "d", c.d);
    read_field(j, "k", c.k);
    read_field(j, "z", c.z);
    read_field(j, "epsilon", c.epsilon);
    read_field(j, "eta", c.eta);
    read_field(j, "constant", c.constant);
    read_field(j, "coreset_size", c.coreset_size);
    read_field(j, "per_layer", c.per_layer);
    read_field(j, "sigma", c.sigma);
    read_field(j, "distribution", c.distribution);
    read_field(j, "region", c.region);
    read_field(j, "normalized", c.normalized);
    read_field(j, "power", c.power);
    read_field(j, "seed", c.seed);
    read_field(j, "max_iter", c.max_iter);
    read_field(j, "tol", c.tol);
    read_field(j, "seed_sample_factor", c.seed_sample_factor);
    read_field(j, "init_sample_factor", c.init_sample_factor);
    read_field(j, "trials", c.trials);
    read_field(j, "sigmas", c.sigmas);
    read_field(j, "methods", c.methods);
    read_field(j, "construct_seconds", c.construct_seconds);
    read_field(j, "solve_seconds", c.solve_seconds);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

void RunConfig::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config '" + path.string() + "'");
  out << to_json() << '\n';
}

}  // namespace laysam
