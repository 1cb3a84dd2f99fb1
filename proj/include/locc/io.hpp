#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "locc/counterexamples.hpp"
#include "locc/decide.hpp"
#include "locc/errors.hpp"
#include "locc/lp.hpp"
#include "locc/monotones.hpp"
#include "locc/report.hpp"
#include "locc/states.hpp"

namespace locc::io {

using json = nlohmann::ordered_json;

// Malformed JSON text; the message carries line and column.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Parsed JSON plus the source line of every value, keyed by JSON pointer.
struct JsonDocument {
  std::string source;
  json value;
  std::map<std::string, std::size_t> lines;

  std::size_t line_of(const std::string& pointer) const {
    auto it = lines.find(pointer);
    return it == lines.end() ? 0 : it->second;
  }

  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
    std::ostringstream msg;
    msg << source << ":" << line_of(pointer) << ": " << (pointer.empty() ? "/" : pointer) << ": "
        << what;
    throw ValidationError(msg.str());
  }
};

namespace detail {

struct LineState {
  std::size_t line = 1;
  std::size_t token_line = 1;
};

// Forward iterator over the text that counts newlines as the lexer advances
// and remembers the line of the last non-whitespace character read.
class LineCountingIterator {
 public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  LineCountingIterator() = default;
  LineCountingIterator(const char* p, LineState* st) : p_(p), st_(st) {}

  reference operator*() const {
    if (*p_ != ' ' && *p_ != '\n' && *p_ != '\t' && *p_ != '\r') st_->token_line = st_->line;
    return *p_;
  }
  LineCountingIterator& operator++() {
    if (*p_ == '\n') ++st_->line;
    ++p_;
    return *this;
  }
  LineCountingIterator operator++(int) {
    auto tmp = *this;
    ++*this;
    return tmp;
  }
  bool operator==(const LineCountingIterator& o) const { return p_ == o.p_; }
  bool operator!=(const LineCountingIterator& o) const { return p_ != o.p_; }

 private:
  const char* p_ = nullptr;
  LineState* st_ = nullptr;
};

inline std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

class LocatingSax {
 public:
  LocatingSax(JsonDocument& doc, const LineState& st) : doc_(doc), st_(st) {}

  bool null() { return add(nullptr); }
  bool boolean(bool v) { return add(v); }
  bool number_integer(json::number_integer_t v) { return add(v); }
  bool number_unsigned(json::number_unsigned_t v) { return add(v); }
  bool number_float(json::number_float_t v, const std::string&) { return add(v); }
  bool string(json::string_t& v) { return add(v); }
  bool binary(json::binary_t& v) { return add(json::binary(v)); }
  bool start_object(std::size_t) {
    add(json::object());
    stack_.push_back(last_);
    return true;
  }
  bool key(json::string_t& k) {
    key_ = k;
    return true;
  }
  bool end_object() { return pop(); }
  bool start_array(std::size_t) {
    add(json::array());
    stack_.push_back(last_);
    return true;
  }
  bool end_array() { return pop(); }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) {
    throw ParseError(doc_.source + ": " + ex.what());
  }

 private:
  struct Frame {
    json* node;
    std::string pointer;
  };

  template <class V>
  bool add(V&& v) {
    std::string pointer;
    json* slot = nullptr;
    if (stack_.empty()) {
      doc_.value = json(std::forward<V>(v));
      slot = &doc_.value;
    } else {
      Frame& top = stack_.back();
      if (top.node->is_object()) {
        pointer = top.pointer + "/" + escape_token(key_);
        (*top.node)[key_] = json(std::forward<V>(v));
        slot = &(*top.node)[key_];
      } else {
        pointer = top.pointer + "/" + std::to_string(top.node->size());
        top.node->push_back(json(std::forward<V>(v)));
        slot = &top.node->back();
      }
    }
    doc_.lines[pointer] = st_.token_line;
    last_ = Frame{slot, pointer};
    return true;
  }
  bool pop() {
    stack_.pop_back();
    return true;
  }

  JsonDocument& doc_;
  const LineState& st_;
  std::vector<Frame> stack_;
  Frame last_{nullptr, {}};
  std::string key_;
};

}  // namespace detail

inline JsonDocument parse_document(std::string_view text, std::string source = "<input>") {
  JsonDocument doc;
  doc.source = std::move(source);
  detail::LineState st;
  detail::LocatingSax sax(doc, st);
  detail::LineCountingIterator first(text.data(), &st);
  detail::LineCountingIterator last(text.data() + text.size(), &st);
  json::sax_parse(first, last, &sax);
  return doc;
}

inline JsonDocument load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str(), path);
}

namespace detail {

inline const json& member(const JsonDocument& doc, const json& node, const std::string& ptr,
                          const char* key) {
  if (!node.is_object()) doc.fail(ptr, "expected an object");
  auto it = node.find(key);
  if (it == node.end()) doc.fail(ptr, std::string("missing field '") + key + "'");
  return *it;
}

inline double number(const JsonDocument& doc, const json& node, const std::string& ptr) {
  if (!node.is_number()) doc.fail(ptr, "expected a number");
  return node.get<double>();
}

inline std::vector<double> number_array(const JsonDocument& doc, const json& node,
                                        const std::string& ptr) {
  if (!node.is_array()) doc.fail(ptr, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i)
    out.push_back(number(doc, node[i], ptr + "/" + std::to_string(i)));
  return out;
}

template <class F>
auto located(const JsonDocument& doc, const std::string& ptr, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    doc.fail(ptr, e.what());
  } catch (const std::domain_error& e) {
    doc.fail(ptr, e.what());
  }
}

}  // namespace detail

/// {"dim": d, "coeffs": [[[re, im], ...], ...]} or {"schmidt": [l0, ...]}.
inline PureState parse_state(const JsonDocument& doc, const json& node, const std::string& ptr) {
  if (!node.is_object()) doc.fail(ptr, "state must be an object");
  if (node.contains("schmidt")) {
    const std::string sp = ptr + "/schmidt";
    auto lambdas = detail::number_array(doc, node["schmidt"], sp);
    return detail::located(doc, sp, [&] { return from_schmidt(SchmidtVector(lambdas)); });
  }
  const auto& dim_node = detail::member(doc, node, ptr, "dim");
  if (!dim_node.is_number_integer() || dim_node.get<long long>() < 2) {
    doc.fail(ptr + "/dim", "dim must be an integer >= 2");
  }
  const auto d = static_cast<std::size_t>(dim_node.get<long long>());
  const auto& rows = detail::member(doc, node, ptr, "coeffs");
  const std::string cp = ptr + "/coeffs";
  if (!rows.is_array() || rows.size() != d) doc.fail(cp, "expected " + std::to_string(d) + " rows");
  std::vector<Complex> c;
  for (std::size_t a = 0; a < d; ++a) {
    const std::string rp = cp + "/" + std::to_string(a);
    if (!rows[a].is_array() || rows[a].size() != d) {
      doc.fail(rp, "expected " + std::to_string(d) + " amplitudes");
    }
    for (std::size_t b = 0; b < d; ++b) {
      const std::string ap = rp + "/" + std::to_string(b);
      const auto& amp = rows[a][b];
      if (amp.is_number()) {
        c.emplace_back(amp.get<double>(), 0.0);
      } else if (amp.is_array() && amp.size() == 2 && amp[0].is_number() && amp[1].is_number()) {
        c.emplace_back(amp[0].get<double>(), amp[1].get<double>());
      } else {
        doc.fail(ap, "amplitude must be [re, im] or a real number");
      }
    }
  }
  return detail::located(doc, cp, [&] { return PureState(d, std::move(c)); });
}

inline PureState parse_state(const JsonDocument& doc) { return parse_state(doc, doc.value, ""); }

/// {"entries": [{"p": 0.5, "state": {...}}, ...]}.
inline Ensemble parse_ensemble(const JsonDocument& doc) {
  const auto& entries = detail::member(doc, doc.value, "", "entries");
  if (!entries.is_array() || entries.empty()) doc.fail("/entries", "expected a non-empty array");
  std::vector<EnsembleEntry> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string ep = "/entries/" + std::to_string(i);
    const double p = detail::number(doc, detail::member(doc, entries[i], ep, "p"), ep + "/p");
    out.push_back({p, parse_state(doc, detail::member(doc, entries[i], ep, "state"), ep + "/state")});
  }
  return detail::located(doc, "/entries", [&] { return Ensemble(std::move(out)); });
}

/// A file holds an ensemble if it has "entries"; otherwise it is a single
/// state, read as the one-entry ensemble.
inline Ensemble parse_ensemble_or_state(const JsonDocument& doc) {
  if (doc.value.is_object() && doc.value.contains("entries")) return parse_ensemble(doc);
  return Ensemble({{1.0, parse_state(doc)}});
}

/// {"kind": "f_mu", "mu": m} | {"kind": "schmidt"} |
/// {"kind": "piecewise_linear", "knots": [[x, y], ...]} |
/// {"kind": "power", "exponent": a} with 0 < a <= 1.
/// Non-Schmidt profiles must pass validate_profile.
inline MonotoneProfile parse_profile(const JsonDocument& doc, const json& node,
                                     const std::string& ptr) {
  const auto& kind_node = detail::member(doc, node, ptr, "kind");
  if (!kind_node.is_string()) doc.fail(ptr + "/kind", "kind must be a string");
  const std::string kind = kind_node.get<std::string>();
  MonotoneProfile prof;
  if (kind == "schmidt") {
    prof = schmidt_profile();
  } else if (kind == "f_mu") {
    const double mu = detail::number(doc, detail::member(doc, node, ptr, "mu"), ptr + "/mu");
    prof = detail::located(doc, ptr + "/mu", [&] { return f_mu_profile(mu); });
  } else if (kind == "power") {
    const double a =
        detail::number(doc, detail::member(doc, node, ptr, "exponent"), ptr + "/exponent");
    if (!(a > 0.0 && a <= 1.0)) doc.fail(ptr + "/exponent", "exponent must lie in (0, 1]");
    std::ostringstream label;
    label << "x^" << a;
    prof = MonotoneProfile{[a](double x) { return std::pow(std::clamp(x, 0.0, 1.0), a); }, false,
                           label.str()};
  } else if (kind == "piecewise_linear") {
    const std::string kp = ptr + "/knots";
    const auto& knots = detail::member(doc, node, ptr, "knots");
    if (!knots.is_array()) doc.fail(kp, "knots must be an array");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < knots.size(); ++i) {
      auto xy = detail::number_array(doc, knots[i], kp + "/" + std::to_string(i));
      if (xy.size() != 2) doc.fail(kp + "/" + std::to_string(i), "knot must be [x, y]");
      pts.emplace_back(xy[0], xy[1]);
    }
    prof = detail::located(doc, kp, [&] { return piecewise_linear_profile(std::move(pts)); });
  } else {
    doc.fail(ptr + "/kind", "unknown profile kind '" + kind + "'");
  }
  if (node.contains("label") && node["label"].is_string()) prof.label = node["label"].get<std::string>();
  const auto rep = validate_profile(prof);
  if (!rep.passed) doc.fail(ptr, "profile fails " + rep.check + ": " + rep.message);
  return prof;
}

/// {"profiles": [...]} or a bare array of profile objects.
inline std::vector<MonotoneProfile> parse_profile_set(const JsonDocument& doc) {
  const json* arr = &doc.value;
  std::string base;
  if (doc.value.is_object()) {
    arr = &detail::member(doc, doc.value, "", "profiles");
    base = "/profiles";
  }
  if (!arr->is_array() || arr->empty()) doc.fail(base, "expected a non-empty array of profiles");
  std::vector<MonotoneProfile> out;
  for (std::size_t i = 0; i < arr->size(); ++i)
    out.push_back(parse_profile(doc, (*arr)[i], base + "/" + std::to_string(i)));
  return out;
}

// ---------------------------------------------------------------------------
// Serialization.

inline json to_json(const SchmidtVector& s) { return s.values(); }

inline json to_json(const Inequality& q) {
  json j;
  j["name"] = q.name;
  if (q.k) j["k"] = *q.k;
  if (q.mu) j["mu"] = *q.mu;
  j["lhs"] = q.lhs;
  j["rhs"] = q.rhs;
  return j;
}

inline json to_json(const ConditionalChannel& c) { return c.rows(); }

inline json to_json(const Certificate& cert) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        json j;
        if constexpr (std::is_same_v<T, ConditionalChannel>) {
          j["type"] = "channel";
          j["q"] = to_json(c);
        } else if constexpr (std::is_same_v<T, ViolationWitness>) {
          j["type"] = "violation";
          j["inequality"] = to_json(c.inequality);
        } else if constexpr (std::is_same_v<T, FarkasWitness>) {
          j["type"] = "farkas";
          j["rows"] = c.row_labels;
          j["multipliers"] = c.multipliers;
          j["combined_rhs"] = c.combined_rhs;
        } else if constexpr (std::is_same_v<T, MarginTable>) {
          j["type"] = "margins";
          j["rows"] = json::array();
          for (const auto& r : c.rows) j["rows"].push_back(to_json(r));
        } else {
          j["type"] = "trivial";
          j["reason"] = c.reason;
        }
        return j;
      },
      cert);
}

inline json to_json(const DecisionReport& r) {
  json j;
  j["verdict"] = r.verdict;
  j["method"] = r.method;
  j["certificate"] = to_json(r.certificate);
  j["margins"] = json::array();
  for (const auto& m : r.margins) j["margins"].push_back(to_json(m));
  return j;
}

inline json to_json(const CertificationReport& r) {
  json j;
  j["certified"] = r.certified;
  j["kind"] = r.kind;
  j["conditions"] = json::array();
  for (const auto& c : r.conditions) j["conditions"].push_back(to_json(c));
  j["witnesses"] = json::array();
  for (const auto& w : r.witnesses) j["witnesses"].push_back(to_json(w));
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j;
}

/// Debug dump; variables are q_{j|i}, row-major in i.
inline json to_json(const FeasibilityProblem& p) {
  json j;
  j["n1"] = p.n1;
  j["n2"] = p.n2;
  j["p"] = p.p;
  j["q"] = p.q;
  j["variable_order"] = "q[j|i] at index i*n2 + j";
  j["rows"] = json::array();
  for (const auto& r : p.rows) {
    j["rows"].push_back({{"label", r.label},
                         {"kind", r.kind == RowKind::kEquality ? "eq" : "le"},
                         {"coeffs", r.coeffs},
                         {"rhs", r.rhs}});
  }
  return j;
}

inline Inequality inequality_from_json(const json& j) {
  Inequality q;
  q.name = j.at("name").get<std::string>();
  if (j.contains("k")) q.k = j.at("k").get<std::size_t>();
  if (j.contains("mu")) q.mu = j.at("mu").get<double>();
  q.lhs = j.at("lhs").get<double>();
  q.rhs = j.at("rhs").get<double>();
  return q;
}

inline Certificate certificate_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "channel") return ConditionalChannel(j.at("q").get<std::vector<std::vector<double>>>());
  if (type == "violation") return ViolationWitness{inequality_from_json(j.at("inequality"))};
  if (type == "farkas") {
    FarkasWitness w;
    w.row_labels = j.at("rows").get<std::vector<std::string>>();
    w.multipliers = j.at("multipliers").get<std::vector<double>>();
    w.combined_rhs = j.at("combined_rhs").get<double>();
    return w;
  }
  if (type == "margins") {
    MarginTable t;
    for (const auto& r : j.at("rows")) t.rows.push_back(inequality_from_json(r));
    return t;
  }
  if (type == "trivial") return TrivialReason{j.at("reason").get<std::string>()};
  throw ValidationError("unknown certificate type '" + type + "'");
}

inline DecisionReport report_from_json(const json& j) {
  DecisionReport r;
  r.verdict = j.at("verdict").get<bool>();
  r.method = j.at("method").get<std::string>();
  r.certificate = certificate_from_json(j.at("certificate"));
  if (j.contains("margins"))
    for (const auto& m : j.at("margins")) r.margins.push_back(inequality_from_json(m));
  return r;
}

}  // namespace locc::io
