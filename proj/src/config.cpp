#include "bli/config.hpp"

#include "text_util.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace bli {
namespace {

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

[[noreturn]] void type_error(const std::string& key, const std::string& value, const char* type) {
  throw ValidationError("config key '" + key + "': expected " + type + ", got '" + value + "'");
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& value) {
  Int out{};
  if (!detail::parse_integer(value, out)) type_error(key, value, "an integer");
  return out;
}

double to_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  if (!detail::parse_double(value, out)) type_error(key, value, "a number");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  type_error(key, value, "true or false");
}

template <typename Field>
Setter text_field(Field field) {
  return [field](RunConfig& c, const std::string&, const std::string& v) { field(c) = v; };
}

template <typename Int, typename Field>
Setter int_field(Field field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    field(c) = to_integer<Int>(k, v);
  };
}

template <typename Field>
Setter real_field(Field field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    field(c) = to_real(k, v);
  };
}

template <typename Field>
Setter bool_field(Field field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    field(c) = to_bool(k, v);
  };
}

const std::vector<std::pair<std::string, Setter>>& registry() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"src", text_field([](RunConfig& c) -> auto& { return c.src; })},
      {"tgt", text_field([](RunConfig& c) -> auto& { return c.tgt; })},
      {"src_lang", text_field([](RunConfig& c) -> auto& { return c.src_lang; })},
      {"tgt_lang", text_field([](RunConfig& c) -> auto& { return c.tgt_lang; })},
      {"seed_dict", text_field([](RunConfig& c) -> auto& { return c.seed_dict; })},
      {"test_dict", text_field([](RunConfig& c) -> auto& { return c.test_dict; })},
      {"output_dir", text_field([](RunConfig& c) -> auto& { return c.output_dir; })},
      {"adversarial_checkpoint",
       text_field([](RunConfig& c) -> auto& { return c.adversarial_checkpoint; })},
      {"method",
       [](RunConfig& c, const std::string&, const std::string& v) { c.method = parse_method(v); }},
      {"direction",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "forward") {
           c.direction = Direction::Forward;
         } else if (v == "backward") {
           c.direction = Direction::Backward;
         } else if (v == "both") {
           c.direction = Direction::Both;
         } else {
           type_error(k, v, "forward, backward or both");
         }
       }},
      {"max_vocab", int_field<std::size_t>([](RunConfig& c) -> auto& { return c.max_vocab; })},
      {"normalize", bool_field([](RunConfig& c) -> auto& { return c.normalize; })},
      {"csls_k",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int value = to_integer<int>(k, v);
         c.procrustes.csls_k = value;
         c.adversarial.csls_k = value;
       }},
      {"n_iterations", int_field<int>([](RunConfig& c) -> auto& { return c.procrustes.n_iterations; })},
      {"dict_top_pairs",
       int_field<std::size_t>([](RunConfig& c) -> auto& { return c.procrustes.dict_top_pairs; })},
      {"mutual_only", bool_field([](RunConfig& c) -> auto& { return c.procrustes.mutual_only; })},
      {"export_mutual_only",
       bool_field([](RunConfig& c) -> auto& { return c.procrustes.export_mutual_only; })},
      {"s_anchor_pairs", int_field<std::size_t>([](RunConfig& c) -> auto& { return c.s_anchor_pairs; })},
      {"epochs", int_field<int>([](RunConfig& c) -> auto& { return c.adversarial.epochs; })},
      {"steps_per_epoch",
       int_field<int>([](RunConfig& c) -> auto& { return c.adversarial.steps_per_epoch; })},
      {"batch_size", int_field<int>([](RunConfig& c) -> auto& { return c.adversarial.batch_size; })},
      {"beta", real_field([](RunConfig& c) -> auto& { return c.adversarial.beta; })},
      {"learning_rate", real_field([](RunConfig& c) -> auto& { return c.adversarial.learning_rate; })},
      {"lr_decay", real_field([](RunConfig& c) -> auto& { return c.adversarial.lr_decay; })},
      {"lr_shrink", real_field([](RunConfig& c) -> auto& { return c.adversarial.lr_shrink; })},
      {"sample_top_n",
       int_field<std::size_t>([](RunConfig& c) -> auto& { return c.adversarial.sample_top_n; })},
      {"label_smoothing",
       real_field([](RunConfig& c) -> auto& { return c.adversarial.label_smoothing; })},
      {"hidden", int_field<Eigen::Index>([](RunConfig& c) -> auto& { return c.adversarial.hidden; })},
      {"input_dropout", real_field([](RunConfig& c) -> auto& { return c.adversarial.input_dropout; })},
      {"leaky_slope", real_field([](RunConfig& c) -> auto& { return c.adversarial.leaky_slope; })},
      {"rng_seed", int_field<std::uint64_t>([](RunConfig& c) -> auto& { return c.adversarial.rng_seed; })},
      {"init",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "identity") {
           c.adversarial.init = MappingInit::Identity;
         } else if (v == "random-orthogonal") {
           c.adversarial.init = MappingInit::RandomOrthogonal;
         } else {
           type_error(k, v, "identity or random-orthogonal");
         }
       }},
      {"validation_words",
       int_field<std::size_t>([](RunConfig& c) -> auto& { return c.adversarial.validation_words; })},
      {"validation_vocab",
       int_field<std::size_t>([](RunConfig& c) -> auto& { return c.adversarial.validation_vocab; })},
      {"log_interval", int_field<int>([](RunConfig& c) -> auto& { return c.adversarial.log_interval; })},
  };
  return table;
}

void require_file(const std::filesystem::path& p, const char* key) {
  if (p.empty()) throw ValidationError(std::string("missing required key '") + key + "'");
  if (!std::filesystem::is_regular_file(p)) {
    throw ValidationError(std::string(key) + ": no such file " + p.string());
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, s] : registry()) out.push_back(k);
    return out;
  }();
  return keys;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& [k, setter] : registry()) {
    if (k == key) {
      setter(config, key, value);
      return;
    }
  }
  throw ValidationError("unknown config key '" + key + "'");
}

std::vector<Setting> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::vector<Setting> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected \"key = value\"");
    }
    out.emplace_back(std::string(detail::trim(body.substr(0, eq))),
                     std::string(detail::trim(body.substr(eq + 1))));
  }
  return out;
}

RunConfig parse_config(const std::optional<std::filesystem::path>& file,
                       const std::vector<Setting>& overrides) {
  RunConfig config;
  if (file) {
    for (const auto& [k, v] : read_config_file(*file)) apply_setting(config, k, v);
  }
  for (const auto& [k, v] : overrides) apply_setting(config, k, v);
  return config;
}

void RunConfig::validate() const {
  require_file(src, "src");
  require_file(tgt, "tgt");
  if (output_dir.empty()) throw ValidationError("missing required key 'output_dir'");
  if (max_vocab == 0) throw ValidationError("max_vocab must be positive");
  if (method == Method::SemiSup) require_file(seed_dict, "seed_dict");
  if (!test_dict.empty()) require_file(test_dict, "test_dict");
  if (!adversarial_checkpoint.empty()) require_file(adversarial_checkpoint, "adversarial_checkpoint");
  if (direction == Direction::Both && src_lang == tgt_lang) {
    throw ValidationError("src_lang and tgt_lang must differ when direction is both");
  }
  procrustes.validate();
  adversarial.validate();
  if (method == Method::SelfSupRe) refine().validate();
}

}  // namespace bli
