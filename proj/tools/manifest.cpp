#include "manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "decolab/types.hpp"

namespace decolab::cli {

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("manifest: cannot read " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

void write_manifest(const std::string& dir, const ExperimentConfig& cfg, std::vector<std::string> files,
                    const json& summary) {
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  json m;
  m["schema_version"] = kSchemaVersion;
  m["experiment"] = cfg.experiment;
  m["name"] = cfg.name;
  m["config"] = cfg.source;
  m["summary"] = summary;
  json list = json::array();
  for (const auto& f : files) {
    std::string p = (std::filesystem::path(dir) / f).string();
    list.push_back({{"path", f}, {"bytes", std::filesystem::file_size(p)}, {"sha256", sha256_file(p)}});
  }
  m["files"] = list;
  std::ofstream out(std::filesystem::path(dir) / "manifest.json");
  if (!out) throw InputError("manifest: cannot write in " + dir);
  out << m.dump(2) << "\n";
}

}  // namespace decolab::cli
