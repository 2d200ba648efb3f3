#include "guidewave/floquet/serialization.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "guidewave/core/errors.hpp"
#include "guidewave/core/fourier_index.hpp"

namespace guidewave::floquet {

using nlohmann::json;

namespace {

json basis_doc(const ModeBasis& basis) {
  json doc;
  doc["side"] = to_string(basis.side);
  doc["N"] = basis.N;
  doc["M"] = basis.M;
  doc["J"] = basis.J;
  doc["k"] = basis.k;
  doc["cell"] = {{"period", basis.cell.L}, {"height", basis.cell.H}};
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(basis.q_fingerprint));
  doc["q_fingerprint"] = hex;
  doc["modes"] = json::array();
  for (const auto& m : basis.modes) {
    json jm;
    jm["alpha"] = {m.alpha.real(), m.alpha.imag()};
    jm["kind"] = to_string(m.kind);
    if (m.lambda) jm["lambda"] = *m.lambda;
    jm["norm_sign"] = m.norm_sign;
    jm["residual"] = m.residual;
    json coeffs = json::array();
    for (int f = 0; f < m.coeffs.size(); ++f) {
      if (m.coeffs(f) == cplx(0.0)) continue;
      const FourierIndex idx = unflat_index(m.N, f);
      coeffs.push_back({idx.j, idx.l, m.coeffs(f).real(), m.coeffs(f).imag()});
    }
    jm["coeffs"] = std::move(coeffs);
    doc["modes"].push_back(std::move(jm));
  }
  return doc;
}

ModeBasis basis_from_doc(const json& doc) {
  ModeBasis basis;
  basis.side = side_from_string(doc.at("side").get<std::string>());
  basis.N = doc.at("N").get<int>();
  basis.M = doc.at("M").get<int>();
  basis.J = doc.at("J").get<int>();
  basis.k = doc.at("k").get<double>();
  basis.cell = {doc.at("cell").at("period").get<double>(), doc.at("cell").at("height").get<double>()};
  basis.q_fingerprint = std::stoull(doc.at("q_fingerprint").get<std::string>(), nullptr, 16);
  const int d = fourier_dim(basis.N);
  for (const auto& jm : doc.at("modes")) {
    FloquetMode m;
    m.alpha = cplx(jm.at("alpha")[0].get<double>(), jm.at("alpha")[1].get<double>());
    m.kind = mode_kind_from_string(jm.at("kind").get<std::string>());
    if (jm.contains("lambda")) m.lambda = jm["lambda"].get<double>();
    m.norm_sign = jm.value("norm_sign", 1);
    m.residual = jm.at("residual").get<double>();
    m.N = basis.N;
    m.cell = basis.cell;
    m.coeffs = Eigen::VectorXcd::Zero(d);
    for (const auto& c : jm.at("coeffs")) {
      m.coeffs(flat_index(basis.N, {c[0].get<int>(), c[1].get<int>()})) =
          cplx(c[2].get<double>(), c[3].get<double>());
    }
    basis.modes.push_back(std::move(m));
  }
  return basis;
}

}  // namespace

std::string basis_to_json(const ModeBasis& basis) { return basis_doc(basis).dump(1); }

ModeBasis basis_from_json(const std::string& text) {
  try {
    return basis_from_doc(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed mode basis document: ") + e.what());
  }
}

std::string mode_cache_key(std::uint64_t q_fingerprint, double k, CellSpec cell, int N, int M,
                           const Tolerances& tol) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%016llx|%.17g|%.17g|%.17g|%d|%d|%.17g|%.17g",
                static_cast<unsigned long long>(q_fingerprint), k, cell.L, cell.H, N, M, tol.unit_circle,
                tol.pencil_residual);
  std::uint64_t h = 1469598103934665603ull;
  for (const char* c = buf; *c; ++c) {
    h ^= static_cast<unsigned char>(*c);
    h *= 1099511628211ull;
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void save_mode_cache(const std::string& dir, const std::string& key, const ModeBasis& plus,
                     const ModeBasis& minus) {
  std::filesystem::create_directories(dir);
  json doc;
  doc["plus"] = basis_doc(plus);
  doc["minus"] = basis_doc(minus);
  const auto path = std::filesystem::path(dir) / ("modes_" + key + ".json");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write mode cache '" + path.string() + "'");
  // Full precision so that a cached run reproduces a fresh one bit for bit.
  out << doc.dump(1) << '\n';
}

std::optional<std::pair<ModeBasis, ModeBasis>> load_mode_cache(const std::string& dir,
                                                               const std::string& key) {
  const auto path = std::filesystem::path(dir) / ("modes_" + key + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const json doc = json::parse(ss.str());
    return std::make_pair(basis_from_doc(doc.at("plus")), basis_from_doc(doc.at("minus")));
  } catch (const json::exception& e) {
    throw ConfigError("corrupt mode cache '" + path.string() + "': " + e.what());
  }
}

}  // namespace guidewave::floquet
