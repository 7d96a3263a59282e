#include "ineq_cli/manifest.hpp"

#include <array>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json.hpp"

namespace ineq::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 init failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    const auto got = in.gcount();
    if (got > 0 && EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got)) != 1)
      throw std::runtime_error("sha256 update failed");
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
    throw std::runtime_error("sha256 final failed");
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string to_json(const Manifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "ineq";
  j["version"] = m.tool_version;
  j["subcommand"] = m.subcommand;
  j["config"] = nlohmann::ordered_json::parse(m.config_json);
  auto list = [](const std::vector<FileDigest>& files) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& f : files) a.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return a;
  };
  j["inputs"] = list(m.inputs);
  j["outputs"] = list(m.outputs);
  j["created_utc"] = m.created_utc;
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  Manifest m;
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    m.tool_version = j.at("version").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.config_json = j.at("config").dump();
    for (const auto& f : j.at("inputs"))
      m.inputs.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
    for (const auto& f : j.at("outputs"))
      m.outputs.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
    m.created_utc = j.value("created_utc", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(fmt::format("malformed manifest: {}", e.what()));
  }
  return m;
}

std::vector<Mismatch> verify_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", manifest_path.string()));
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const Manifest m = manifest_from_json(text);
  const auto dir = manifest_path.parent_path();

  std::vector<Mismatch> bad;
  auto check = [&](const FileDigest& f, const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) {
      bad.push_back({f.path, "missing"});
      return;
    }
    if (sha256_file(p) != f.sha256) bad.push_back({f.path, "digest mismatch"});
  };
  for (const auto& f : m.inputs) check(f, f.path);
  for (const auto& f : m.outputs) check(f, dir / f.path);
  return bad;
}

}  // namespace ineq::cli
