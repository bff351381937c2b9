#include "sideinfo/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "sideinfo/error.hpp"
#include "sideinfo/oracles.hpp"

namespace sideinfo::io {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::SchemaError, "field \"" + path + "\": " + what);
}

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ValidationError, "field \"" + path + "\": " + what);
}

const Json& field(const Json& doc, const std::string& name, const std::string& path = "") {
  const std::string full = path.empty() ? name : path + "." + name;
  if (!doc.is_object() || !doc.contains(name)) schema(full, "missing");
  return doc.at(name);
}

std::size_t as_size(const Json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) schema(path, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::size_t positive(const Json& v, const std::string& path) {
  const std::size_t n = as_size(v, path);
  if (n == 0) invalid(path, "must be positive");
  return n;
}

double as_number(const Json& v, const std::string& path) {
  if (v.is_string()) {
    try {
      return parse_decimal(v.get<std::string>());
    } catch (const Error&) {
      schema(path, "not a decimal: \"" + v.get<std::string>() + "\"");
    }
  }
  if (v.is_number()) return v.get<double>();
  schema(path, "expected a decimal string");
}

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::vector<double> number_list(const Json& v, const std::string& path, std::size_t expected) {
  if (!v.is_array()) schema(path, "expected an array");
  if (v.size() != expected) {
    schema(path, "expected " + std::to_string(expected) + " entries, found " + std::to_string(v.size()));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], index_path(path, i)));
  return out;
}

std::vector<double> number_matrix(const Json& v, const std::string& path, std::size_t rows, std::size_t cols) {
  if (!v.is_array() || v.size() != rows) schema(path, "expected " + std::to_string(rows) + " rows");
  std::vector<double> out;
  out.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = number_list(v[r], index_path(path, r), cols);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

// Runs a validating constructor and reports its failure against `path`.
template <class F>
auto validated(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SchemaError || e.kind() == ErrorKind::ValidationError) throw;
    invalid(path, e.what());
  }
}

Json decimals(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(format_decimal(x));
  return a;
}

Json decimal_rows(std::span<const double> v, std::size_t cols) {
  Json a = Json::array();
  for (std::size_t r = 0; r * cols < v.size(); ++r) a.push_back(decimals(v.subspan(r * cols, cols)));
  return a;
}

Json mat2(const Mat2& m) { return decimal_rows(m, 2); }

Mat2 parse_mat2(const Json& v, const std::string& path) {
  const auto e = number_matrix(v, path, 2, 2);
  return {e[0], e[1], e[2], e[3]};
}

// ------------------------------------------------------------ per kind

Dist parse_dist(const Json& d) {
  const Json& p = field(d, "p");
  if (!p.is_array()) schema("p", "expected an array");
  const auto v = number_list(p, "p", p.size());
  return validated("p", [&] { return Dist::validate(v); });
}

Joint parse_joint(const Json& d) {
  const std::size_t rows = positive(field(d, "rows"), "rows");
  const std::size_t cols = positive(field(d, "cols"), "cols");
  const auto v = number_matrix(field(d, "p"), "p", rows, cols);
  return validated("p", [&] { return Joint::validate(rows, cols, v); });
}

Joint3 parse_joint3(const Json& d) {
  const std::size_t nx = positive(field(d, "x"), "x");
  const std::size_t ny = positive(field(d, "y"), "y");
  const std::size_t nw = positive(field(d, "w"), "w");
  const Json& p = field(d, "p");
  if (!p.is_array() || p.size() != nx) schema("p", "expected " + std::to_string(nx) + " x-blocks");
  std::vector<double> v;
  for (std::size_t x = 0; x < nx; ++x) {
    const auto block = number_matrix(p[x], index_path("p", x), ny, nw);
    v.insert(v.end(), block.begin(), block.end());
  }
  return validated("p", [&] { return Joint3::validate(nx, ny, nw, v); });
}

LossDoc parse_loss(const Json& d) {
  LossDoc l;
  if (d.contains("scale")) {
    l.scale = as_number(d.at("scale"), "scale");
    if (!(l.scale > 0.0) || !std::isfinite(l.scale)) invalid("scale", "must be positive and finite");
  }
  if (d.contains("builtin")) {
    if (!d.at("builtin").is_string()) schema("builtin", "expected a string");
    l.builtin = d.at("builtin").get<std::string>();
    validated("builtin", [&] { return parse_builtin_loss(*l.builtin); });
    return l;
  }
  const Json& m = field(d, "matrix");
  if (!m.is_array() || m.empty() || !m[0].is_array() || m[0].empty()) schema("matrix", "expected a nonempty table");
  l.outcomes = m.size();
  l.actions = m[0].size();
  l.matrix = number_matrix(m, "matrix", l.outcomes, l.actions);
  validated("matrix", [&] { return LossSpec::matrix(l.outcomes, l.actions, l.matrix); });
  return l;
}

Transform parse_transform(const Json& d) {
  const Json& m = field(d, "map");
  if (!m.is_array() || m.empty()) schema("map", "expected a nonempty array");
  std::vector<std::size_t> map;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::size_t t = as_size(m[i], index_path("map", i));
    if (t == 0) invalid(index_path("map", i), "symbols are 1-based");
    map.push_back(t - 1);
  }
  return validated("map", [&] { return Transform(map); });
}

ProcessModel parse_process(const Json& d) {
  const std::size_t nx = positive(field(d, "nx"), "nx");
  const std::size_t ny = positive(field(d, "ny"), "ny");
  const std::size_t k = nx * ny;
  const std::string form = d.contains("form") ? d.at("form").get<std::string>() : "markov";
  if (form == "explicit") {
    const std::size_t horizon = positive(field(d, "horizon"), "horizon");
    const Json& p = field(d, "p");
    if (!p.is_array()) schema("p", "expected an array");
    const auto v = number_list(p, "p", p.size());
    return validated("p", [&] { return ProcessModel::explicit_table(nx, ny, horizon, v); });
  }
  if (form != "markov") schema("form", "expected \"markov\" or \"explicit\"");
  const auto kernel = number_matrix(field(d, "kernel"), "kernel", k, k);
  if (!d.contains("initial")) {
    return validated("kernel", [&] { return ProcessModel::stationary_markov(nx, ny, kernel); });
  }
  const auto init = number_list(d.at("initial"), "initial", k);
  validated("initial", [&] { return Dist::validate(init); });
  return validated("kernel", [&] { return ProcessModel::markov(nx, ny, init, kernel); });
}

VarModel parse_var(const Json& d) {
  const std::size_t order = positive(field(d, "order"), "order");
  const Json& c = field(d, "coefficients");
  if (!c.is_array() || c.size() != order) schema("coefficients", "expected one 2x2 matrix per lag");
  std::vector<Mat2> a;
  for (std::size_t k = 0; k < order; ++k) a.push_back(parse_mat2(c[k], index_path("coefficients", k)));
  const Mat2 noise = parse_mat2(field(d, "noise"), "noise");
  return validated("coefficients", [&] { return VarModel(a, noise); });
}

ConvexGDoc parse_convex_g(const Json& d) {
  const Json& t = field(d, "terms");
  if (!t.is_array() || t.empty()) schema("terms", "expected a nonempty array");
  ConvexGDoc g;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::string path = index_path("terms", i);
    const Json& name = field(t[i], "name", path);
    if (!name.is_string()) schema(path + ".name", "expected a string");
    const double w = t[i].contains("weight") ? as_number(t[i].at("weight"), path + ".weight") : 1.0;
    if (!(w >= 0.0) || !std::isfinite(w)) invalid(path + ".weight", "must be nonnegative and finite");
    validated(path + ".name", [&] { return oracles::by_name(name.get<std::string>()); });
    g.terms.emplace_back(name.get<std::string>(), w);
  }
  return g;
}

struct Serializer {
  Json& d;

  void operator()(const Dist& p) const { d["p"] = decimals(p.probs()); }
  void operator()(const Joint& j) const {
    d["rows"] = j.rows();
    d["cols"] = j.cols();
    d["p"] = decimal_rows(j.data(), j.cols());
  }
  void operator()(const Joint3& j) const {
    d["x"] = j.nx();
    d["y"] = j.ny();
    d["w"] = j.nw();
    Json p = Json::array();
    const std::size_t block = j.ny() * j.nw();
    for (std::size_t x = 0; x < j.nx(); ++x) p.push_back(decimal_rows(j.data().subspan(x * block, block), j.nw()));
    d["p"] = p;
  }
  void operator()(const LossDoc& l) const {
    if (l.builtin) {
      d["builtin"] = *l.builtin;
    } else {
      d["matrix"] = decimal_rows(l.matrix, l.actions);
    }
    if (l.scale != 1.0) d["scale"] = format_decimal(l.scale);
  }
  void operator()(const Transform& t) const {
    Json m = Json::array();
    for (std::size_t v : t.map()) m.push_back(v + 1);
    d["map"] = m;
  }
  void operator()(const ProcessModel& m) const {
    d["nx"] = m.nx();
    d["ny"] = m.ny();
    if (const auto* mj = m.markov_joint()) {
      d["form"] = "markov";
      d["initial"] = decimals(mj->initial);
      d["kernel"] = decimal_rows(mj->kernel, mj->nx * mj->ny);
    } else {
      const auto& e = std::get<ExplicitProcess>(m.variant());
      d["form"] = "explicit";
      d["horizon"] = e.horizon;
      d["p"] = decimals(e.probs);
    }
  }
  void operator()(const VarModel& v) const {
    d["order"] = v.order();
    Json c = Json::array();
    for (const auto& a : v.coefficients()) c.push_back(mat2(a));
    d["coefficients"] = c;
    d["noise"] = mat2(v.noise());
  }
  void operator()(const ConvexGDoc& g) const {
    Json t = Json::array();
    for (const auto& [name, w] : g.terms) t.push_back(Json{{"name", name}, {"weight", format_decimal(w)}});
    d["terms"] = t;
  }
};

}  // namespace

LossSpec LossDoc::to_loss(std::size_t n) const {
  LossSpec l = builtin ? builtin_loss(*builtin, n) : LossSpec::matrix(outcomes, actions, matrix);
  return scale == 1.0 ? l : scaled(l, scale);
}

ConvexOracle ConvexGDoc::to_oracle() const {
  if (terms.size() == 1 && terms[0].second == 1.0) return oracles::by_name(terms[0].first);
  std::vector<std::pair<double, ConvexOracle>> parts;
  for (const auto& [name, w] : terms) parts.emplace_back(w, oracles::by_name(name));
  return oracles::combine(std::move(parts));
}

std::string kind_name(const Model& m) {
  static constexpr const char* names[] = {"dist",      "joint",          "joint3",    "loss",
                                          "transform", "markov_process", "var_model", "convex_g"};
  return names[m.index()];
}

ModelFile parse_model(std::string_view text) {
  Json d;
  try {
    d = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, e.what());
  }
  if (!d.is_object()) schema("", "expected an object");
  int version = kSchemaVersion;
  if (d.contains("version")) {
    if (!d.at("version").is_number_integer()) schema("version", "expected an integer");
    version = d.at("version").get<int>();
    if (version != kSchemaVersion) schema("version", "unsupported version " + std::to_string(version));
  }
  const Json& kind = field(d, "kind");
  if (!kind.is_string()) schema("kind", "expected a string");
  const auto k = kind.get<std::string>();
  auto payload = [&]() -> Model {
    if (k == "dist") return parse_dist(d);
    if (k == "joint") return parse_joint(d);
    if (k == "joint3") return parse_joint3(d);
    if (k == "loss") return parse_loss(d);
    if (k == "transform") return parse_transform(d);
    if (k == "markov_process") return parse_process(d);
    if (k == "var_model") return parse_var(d);
    if (k == "convex_g") return parse_convex_g(d);
    schema("kind", "unknown kind \"" + k + "\"");
  };
  return ModelFile{version, payload()};
}

ModelFile read_model(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_model(text);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + std::string(e.what()).substr(to_string(e.kind()).size() + 2));
  }
}

std::string serialize_model(const ModelFile& m) {
  Json d;
  d["version"] = m.version;
  d["kind"] = kind_name(m.model);
  std::visit(Serializer{d}, m.model);
  return d.dump(2) + "\n";
}

void write_model(const std::filesystem::path& path, const ModelFile& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << serialize_model(m);
}

double parse_decimal(std::string_view s) {
  auto bad = [&] { return Error(ErrorKind::SchemaError, "not a decimal: \"" + std::string(s) + "\""); };
  if (s == "inf" || s == "+inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const double num = parse_decimal(s.substr(0, slash));
    const double den = parse_decimal(s.substr(slash + 1));
    if (den == 0.0 || !std::isfinite(num) || !std::isfinite(den)) throw bad();
    return num / den;
  }
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) throw bad();
  return v;
}

std::string format_decimal(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

EmpiricalJoint empirical_joint(std::span<const std::pair<std::size_t, std::size_t>> samples, std::size_t nx,
                               std::size_t ny) {
  if (samples.empty()) throw Error(ErrorKind::EmptySample, "no samples");
  std::vector<std::size_t> counts(nx * ny, 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [x, y] = samples[i];
    if (x < 1 || x > nx || y < 1 || y > ny) {
      std::ostringstream os;
      os << "sample " << i + 1 << " (" << x << "," << y << ") outside " << nx << "x" << ny;
      throw Error(ErrorKind::UnknownSymbol, os.str());
    }
    ++counts[(x - 1) * ny + (y - 1)];
  }
  std::vector<double> p(counts.size());
  const auto total = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(counts[i]) / total;
  return {Joint::validate(nx, ny, p), samples.size()};
}

std::vector<std::pair<std::size_t, std::size_t>> read_samples_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::EmptySample, path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y") throw Error(ErrorKind::SchemaError, path.string() + ": header must be \"x,y\"");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    std::size_t x = 0, y = 0;
    auto parse = [&](std::string_view s, std::size_t& v) {
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
    };
    const std::string_view sv(line);
    if (comma == std::string::npos || !parse(sv.substr(0, comma), x) || !parse(sv.substr(comma + 1), y)) {
      throw Error(ErrorKind::SchemaError, path.string() + ":" + std::to_string(lineno) + ": expected \"x,y\"");
    }
    out.emplace_back(x, y);
  }
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::SchemaError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sideinfo::io
