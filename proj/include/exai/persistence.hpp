#pragma once

// Personality documents: canonical XML, optionally sealed with authenticated encryption.
// Links against libsodium.

#include <sodium.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "exai/errors.hpp"
#include "exai/facets.hpp"
#include "exai/text_format.hpp"

namespace exai {

inline constexpr std::string_view kDocumentVersion = "1";
inline constexpr std::string_view kRootElement = "exai-personality";
inline constexpr std::string_view kSealKeyEnv = "EXAI_SEAL_KEY";
inline constexpr std::string_view kXmlSuffix = ".exai.xml";
inline constexpr std::string_view kSealedSuffix = ".exai.sealed";

namespace detail {

inline double quantize3(double v) {
  const double q = std::round(v * 1000.0) / 1000.0;
  return q == 0.0 ? 0.0 : q;
}

inline double storable_rate(double rate) { return std::max(quantize3(rate), 0.001); }

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// The personality as it reads back from a document: every value rounded to 3 decimals.
inline Personality quantized(const Personality& p) {
  FacetVector base;
  for (Facet f : kAllFacets) base.set(f, detail::quantize3(p.base()[f]));
  Personality out(p.id(), base);
  out.set_change_rate(detail::storable_rate(p.change_rate()));
  for (const auto& [actor, offsets] : p.attitudes()) {
    OffsetVector& o = out.attitude(actor);
    for (Facet f : kAllFacets) o.set(f, detail::quantize3(offsets[f]));
  }
  return out;
}

/// Canonical form: facets in taxonomy order, attitudes by actor id, non-zero offsets only,
/// every number with exactly three decimals.
inline std::string serialize(const Personality& p) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<" + std::string(kRootElement) + " version=\"" + std::string(kDocumentVersion) + "\" id=\"" +
         detail::xml_escape(p.id()) + "\">\n";
  out += "  <change-rate>" + text::fixed(detail::storable_rate(p.change_rate()), 3) + "</change-rate>\n";
  out += "  <facets>\n";
  for (Facet f : kAllFacets) {
    out += "    <facet name=\"" + std::string(facet_name(f)) + "\">" + text::fixed(detail::quantize3(p.base()[f]), 3) +
           "</facet>\n";
  }
  out += "  </facets>\n";
  if (p.attitudes().empty()) {
    out += "  <attitudes/>\n";
  } else {
    out += "  <attitudes>\n";
    for (const auto& [actor, offsets] : p.attitudes()) {
      std::string body;
      for (Facet f : kAllFacets) {
        const double v = detail::quantize3(offsets[f]);
        if (v == 0.0) continue;
        body += "      <offset facet=\"" + std::string(facet_name(f)) + "\">" + text::fixed(v, 3) + "</offset>\n";
      }
      const std::string open = "    <attitude actor=\"" + detail::xml_escape(actor) + "\"";
      out += body.empty() ? open + "/>\n" : open + ">\n" + body + "    </attitude>\n";
    }
    out += "  </attitudes>\n";
  }
  out += "</" + std::string(kRootElement) + ">\n";
  return out;
}

namespace detail {

using boost::property_tree::ptree;

inline double parse_value(const std::string& s, const std::string& what) {
  const text::Token tok{s, 1};
  try {
    return text::parse_number(tok, 0);
  } catch (const ParseError&) {
    throw ValidationError(what + ": '" + s + "' is not a number");
  }
}

inline std::map<std::string, std::string> attributes(const ptree& node, std::initializer_list<std::string_view> allowed,
                                                     const std::string& where) {
  std::map<std::string, std::string> out;
  if (auto attrs = node.get_child_optional("<xmlattr>")) {
    for (const auto& [k, v] : *attrs) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        throw ValidationError("unknown attribute '" + k + "' on " + where);
      }
      out[k] = v.data();
    }
  }
  for (auto a : allowed) {
    if (!out.count(std::string(a))) throw ValidationError(where + " is missing attribute '" + std::string(a) + "'");
  }
  return out;
}

inline bool is_markup(const std::string& key) { return key == "<xmlattr>" || key == "<xmlcomment>"; }

}  // namespace detail

inline Personality deserialize(std::string_view bytes) {
  using detail::ptree;
  ptree doc;
  try {
    std::istringstream in{std::string(bytes)};
    boost::property_tree::read_xml(in, doc, boost::property_tree::xml_parser::trim_whitespace);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw ParseError("malformed XML: " + e.message(), static_cast<int>(e.line()), 1);
  }

  const ptree* root = nullptr;
  for (const auto& [k, v] : doc) {
    if (k == "<xmlcomment>") continue;
    if (k != kRootElement || root != nullptr) throw ValidationError("unexpected top-level element '" + k + "'");
    root = &v;
  }
  if (root == nullptr) throw ValidationError("missing <" + std::string(kRootElement) + "> element");

  const auto attrs = detail::attributes(*root, {"version", "id"}, "<" + std::string(kRootElement) + ">");
  if (attrs.at("version") != kDocumentVersion) {
    throw ValidationError("unsupported document version '" + attrs.at("version") + "'");
  }

  FacetVector base;
  std::array<bool, kFacetCount> seen{};
  std::optional<double> rate;
  std::map<std::string, OffsetVector> attitudes;
  bool have_facets = false;

  for (const auto& [key, node] : *root) {
    if (detail::is_markup(key)) continue;
    if (key == "change-rate") {
      if (rate) throw ValidationError("<change-rate> given twice");
      rate = detail::parse_value(node.data(), "change-rate");
      if (!(*rate > 0.0)) throw ValidationError("change-rate must be positive");
    } else if (key == "facets") {
      if (have_facets) throw ValidationError("<facets> given twice");
      have_facets = true;
      for (const auto& [fk, fnode] : node) {
        if (detail::is_markup(fk)) continue;
        if (fk != "facet") throw ValidationError("unknown element <" + fk + "> in <facets>");
        const auto fa = detail::attributes(fnode, {"name"}, "<facet>");
        const Facet f = require_facet(fa.at("name"));
        if (seen[index_of(f)]) throw ValidationError("facet '" + fa.at("name") + "' given twice");
        const double v = detail::parse_value(fnode.data(), "facet '" + fa.at("name") + "'");
        if (!(v >= kFacetMin && v <= kFacetMax)) {
          throw ValidationError("facet '" + fa.at("name") + "' value " + fnode.data() + " outside [0, 99]");
        }
        seen[index_of(f)] = true;
        base.set(f, v);
      }
    } else if (key == "attitudes") {
      for (const auto& [ak, anode] : node) {
        if (detail::is_markup(ak)) continue;
        if (ak != "attitude") throw ValidationError("unknown element <" + ak + "> in <attitudes>");
        const auto aa = detail::attributes(anode, {"actor"}, "<attitude>");
        const std::string& actor = aa.at("actor");
        if (attitudes.count(actor)) throw ValidationError("attitude toward '" + actor + "' given twice");
        OffsetVector& offsets = attitudes[actor];
        std::array<bool, kFacetCount> oseen{};
        for (const auto& [ok, onode] : anode) {
          if (detail::is_markup(ok)) continue;
          if (ok != "offset") throw ValidationError("unknown element <" + ok + "> in <attitude>");
          const auto oa = detail::attributes(onode, {"facet"}, "<offset>");
          const Facet f = require_facet(oa.at("facet"));
          if (oseen[index_of(f)]) throw ValidationError("offset for '" + oa.at("facet") + "' given twice");
          oseen[index_of(f)] = true;
          const double v = detail::parse_value(onode.data(), "offset");
          if (!(v >= -kOffsetBound && v <= kOffsetBound)) {
            throw ValidationError("offset " + onode.data() + " toward '" + actor + "' outside [-40, 40]");
          }
          offsets.set(f, v);
        }
      }
    } else {
      throw ValidationError("unknown element <" + key + ">");
    }
  }

  if (!rate) throw ValidationError("missing <change-rate>");
  if (!have_facets) throw ValidationError("missing <facets>");
  for (Facet f : kAllFacets) {
    if (!seen[index_of(f)]) throw ValidationError("missing facet '" + std::string(facet_name(f)) + "'");
  }

  Personality p(attrs.at("id"), base);
  p.set_change_rate(*rate);
  for (auto& [actor, offsets] : attitudes) p.attitude(actor) = offsets;
  return p;
}

// ---------------------------------------------------------------------------
// Sealing. Layout: header line, then (sealed only) a 24-byte nonce and the secretbox ciphertext.

inline constexpr std::string_view kSealedHeader = "EXAI-SEALED-1\n";
inline constexpr std::string_view kPlainHeader = "EXAI-PLAIN-1\n";

namespace detail {

inline void init_sodium() {
  static const int status = sodium_init();
  if (status < 0) throw Error("libsodium failed to initialise");
}

inline std::array<unsigned char, crypto_secretbox_KEYBYTES> derive_key(std::string_view passphrase) {
  std::array<unsigned char, crypto_secretbox_KEYBYTES> key{};
  crypto_generichash(key.data(), key.size(), reinterpret_cast<const unsigned char*>(passphrase.data()), passphrase.size(),
                     nullptr, 0);
  return key;
}

}  // namespace detail

/// Seals `bytes` with a key derived from `key`; without a key the bytes pass through under a
/// plaintext header.
inline std::string seal(std::string_view bytes, const std::optional<std::string>& key) {
  if (!key) return std::string(kPlainHeader) + std::string(bytes);
  if (key->empty()) throw ValidationError("empty sealing key");
  detail::init_sodium();
  const auto k = detail::derive_key(*key);
  std::string out(kSealedHeader);
  std::array<unsigned char, crypto_secretbox_NONCEBYTES> nonce{};
  randombytes_buf(nonce.data(), nonce.size());
  out.append(reinterpret_cast<const char*>(nonce.data()), nonce.size());
  std::string cipher(bytes.size() + crypto_secretbox_MACBYTES, '\0');
  crypto_secretbox_easy(reinterpret_cast<unsigned char*>(cipher.data()), reinterpret_cast<const unsigned char*>(bytes.data()),
                        bytes.size(), nonce.data(), k.data());
  out += cipher;
  return out;
}

inline std::string unseal(std::string_view sealed, const std::optional<std::string>& key) {
  if (sealed.substr(0, kPlainHeader.size()) == kPlainHeader) return std::string(sealed.substr(kPlainHeader.size()));
  if (sealed.substr(0, kSealedHeader.size()) != kSealedHeader) throw ValidationError("not a sealed personality file");
  if (!key) throw ValidationError("sealed file needs a key (set " + std::string(kSealKeyEnv) + ")");
  detail::init_sodium();
  std::string_view body = sealed.substr(kSealedHeader.size());
  if (body.size() < crypto_secretbox_NONCEBYTES + crypto_secretbox_MACBYTES) throw AuthenticationError("sealed file truncated");
  const auto k = detail::derive_key(*key);
  const auto* nonce = reinterpret_cast<const unsigned char*>(body.data());
  body.remove_prefix(crypto_secretbox_NONCEBYTES);
  std::string plain(body.size() - crypto_secretbox_MACBYTES, '\0');
  if (crypto_secretbox_open_easy(reinterpret_cast<unsigned char*>(plain.data()), reinterpret_cast<const unsigned char*>(body.data()),
                                 body.size(), nonce, k.data()) != 0) {
    throw AuthenticationError("sealed file failed authentication (wrong key or tampered data)");
  }
  return plain;
}

inline std::optional<std::string> key_from_env(std::string_view env_name = kSealKeyEnv) {
  if (const char* v = std::getenv(std::string(env_name).c_str()); v != nullptr && *v != '\0') return std::string(v);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Directory storage: <dir>/<id>.exai.xml, or <dir>/<id>.exai.sealed when a key is given.

inline bool is_storable_id(std::string_view id) {
  return !id.empty() && id.front() != '.' && std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
  });
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::filesystem::path personality_path(const std::filesystem::path& dir, const std::string& id, bool sealed) {
  return dir / (id + std::string(sealed ? kSealedSuffix : kXmlSuffix));
}

inline void save_personality(const Personality& p, const std::filesystem::path& path, const std::optional<std::string>& key) {
  const std::string xml = serialize(p);
  write_file(path, key ? seal(xml, key) : xml);
}

inline Personality load_personality(const std::filesystem::path& path, const std::optional<std::string>& key) {
  const std::string bytes = read_file(path);
  const std::string name = path.filename().string();
  const bool sealed = name.size() >= kSealedSuffix.size() && name.ends_with(kSealedSuffix);
  return deserialize(sealed ? unseal(bytes, key) : bytes);
}

inline void save_all(const std::vector<Personality>& personalities, const std::filesystem::path& dir,
                     const std::optional<std::string>& key = std::nullopt) {
  std::set<std::string> ids;
  for (const auto& p : personalities) {
    if (!is_storable_id(p.id())) throw ValidationError("personality id '" + p.id() + "' is not usable as a file name");
    if (!ids.insert(p.id()).second) throw ValidationError("duplicate personality id '" + p.id() + "'");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& p : personalities) save_personality(p, personality_path(dir, p.id(), key.has_value()), key);
}

inline std::vector<Personality> load_all(const std::filesystem::path& dir, const std::optional<std::string>& key = std::nullopt) {
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.ends_with(kXmlSuffix) || name.ends_with(kSealedSuffix)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, Personality> by_id;
  std::map<std::string, std::filesystem::path> origin;
  for (const auto& path : files) {
    Personality p = load_personality(path, key);
    if (auto found = origin.find(p.id()); found != origin.end()) {
      throw ValidationError("duplicate personality id '" + p.id() + "' in " + found->second.filename().string() + " and " +
                            path.filename().string());
    }
    origin.emplace(p.id(), path);
    by_id.emplace(p.id(), std::move(p));
  }
  std::vector<Personality> out;
  out.reserve(by_id.size());
  for (auto& [id, p] : by_id) out.push_back(std::move(p));
  return out;
}

}  // namespace exai
