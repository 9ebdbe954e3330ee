#include "core/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "core/io_util.hpp"

namespace bdp {

namespace {

using json = nlohmann::ordered_json;

constexpr char kMagic[8] = {'B', 'D', 'P', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

json config_to_json(const ModelConfig& c) {
  return json{{"num_layers", c.num_layers},
              {"hidden_size", c.hidden_size},
              {"input_len", c.input_len},
              {"output_len", c.output_len},
              {"input_channels", c.input_channels},
              {"in_step_cycles", c.in_step_cycles},
              {"out_step_cycles", c.out_step_cycles}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.num_layers = j.at("num_layers").get<std::size_t>();
  c.hidden_size = j.at("hidden_size").get<std::size_t>();
  c.input_len = j.at("input_len").get<std::size_t>();
  c.output_len = j.at("output_len").get<std::size_t>();
  c.input_channels = j.at("input_channels").get<std::size_t>();
  c.in_step_cycles = j.at("in_step_cycles").get<std::size_t>();
  c.out_step_cycles = j.at("out_step_cycles").get<std::size_t>();
  return c;
}

}  // namespace

std::vector<char> serialize_model(const Model& model) {
  json header;
  header["version"] = kVersion;
  header["kind"] = to_string(model.kind());
  header["config"] = config_to_json(model.config());
  header["reg"] = {{"lambda1", model.reg().lambda1},
                   {"lambda2", model.reg().lambda2}};
  header["norm"] = {{"q_nominal", model.norm().q_nominal},
                    {"r_base", model.norm().r_base},
                    {"knee_grad_cap", model.norm().knee_grad_cap},
                    {"knee_grad_res", model.norm().knee_grad_res}};
  header["split"] = {{"train", model.split().train},
                     {"val", model.split().val},
                     {"test", model.split().test}};
  json tensors = json::array();
  for (const auto& t : model.params().tensors()) {
    tensors.push_back({{"name", t.name},
                       {"offset", t.offset},
                       {"rows", t.rows},
                       {"cols", t.cols}});
  }
  header["tensors"] = tensors;
  header["payload_doubles"] = model.params().total_size();

  const std::string head_str = header.dump();
  const std::uint64_t head_len = head_str.size();
  const std::size_t payload_bytes = model.params().total_size() * sizeof(double);

  std::vector<char> out(sizeof(kMagic) + sizeof(head_len) + head_len +
                        payload_bytes);
  char* p = out.data();
  std::memcpy(p, kMagic, sizeof(kMagic));
  p += sizeof(kMagic);
  std::memcpy(p, &head_len, sizeof(head_len));
  p += sizeof(head_len);
  std::memcpy(p, head_str.data(), head_len);
  p += head_len;
  std::memcpy(p, model.params().raw().data(), payload_bytes);
  return out;
}

Model deserialize_model(const std::vector<char>& bytes) {
  auto corrupt = [](const std::string& why) -> void {
    fail(ErrorCode::Corrupt, "corrupt checkpoint: " + why);
  };
  if (bytes.size() < sizeof(kMagic) + sizeof(std::uint64_t)) {
    corrupt("truncated preamble");
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    corrupt("bad magic");
  }
  std::uint64_t head_len = 0;
  std::memcpy(&head_len, bytes.data() + sizeof(kMagic), sizeof(head_len));
  const std::size_t head_begin = sizeof(kMagic) + sizeof(head_len);
  if (bytes.size() < head_begin + head_len) corrupt("truncated header");

  json header;
  try {
    header = json::parse(bytes.begin() + long(head_begin),
                         bytes.begin() + long(head_begin + head_len));
  } catch (const json::exception& e) {
    corrupt(std::string("unparsable header: ") + e.what());
  }
  if (header.at("version").get<std::uint32_t>() != kVersion) {
    fail(ErrorCode::Unsupported,
         "unsupported checkpoint version " +
             std::to_string(header.at("version").get<std::uint32_t>()));
  }

  const ModelKind kind =
      model_kind_from_string(header.at("kind").get<std::string>());
  const ModelConfig config = config_from_json(header.at("config"));
  RegularizationSpec reg;
  reg.lambda1 = header.at("reg").at("lambda1").get<double>();
  reg.lambda2 = header.at("reg").at("lambda2").get<double>();

  Model model(kind, config, reg);
  model.norm().q_nominal = header.at("norm").at("q_nominal").get<double>();
  model.norm().r_base = header.at("norm").at("r_base").get<double>();
  model.norm().knee_grad_cap =
      header.at("norm").at("knee_grad_cap").get<double>();
  model.norm().knee_grad_res =
      header.at("norm").at("knee_grad_res").get<double>();
  model.split().train =
      header.at("split").at("train").get<std::vector<std::string>>();
  model.split().val =
      header.at("split").at("val").get<std::vector<std::string>>();
  model.split().test =
      header.at("split").at("test").get<std::vector<std::string>>();

  const auto& tensors = header.at("tensors");
  const auto& registered = model.params().tensors();
  if (tensors.size() != registered.size()) {
    corrupt("tensor directory does not match the architecture");
  }
  for (std::size_t i = 0; i < registered.size(); ++i) {
    const auto& t = tensors[i];
    if (t.at("name").get<std::string>() != registered[i].name ||
        t.at("offset").get<std::size_t>() != registered[i].offset ||
        t.at("rows").get<std::size_t>() != registered[i].rows ||
        t.at("cols").get<std::size_t>() != registered[i].cols) {
      corrupt("tensor " + registered[i].name + " has inconsistent dimensions");
    }
  }

  const std::size_t n = header.at("payload_doubles").get<std::size_t>();
  if (n != model.params().total_size()) {
    corrupt("payload size does not match the architecture");
  }
  const std::size_t payload_begin = head_begin + head_len;
  if (bytes.size() != payload_begin + n * sizeof(double)) {
    corrupt("truncated payload");
  }
  std::memcpy(model.params().raw().data(), bytes.data() + payload_begin,
              n * sizeof(double));
  check_finite(model.params().raw(), "checkpoint payload");
  return model;
}

void save_model(const Model& model, const std::string& path) {
  const std::vector<char> bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write checkpoint: " + path);
  out.write(bytes.data(), long(bytes.size()));
  if (!out) fail(ErrorCode::Io, "checkpoint write failed: " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open checkpoint: " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace bdp
