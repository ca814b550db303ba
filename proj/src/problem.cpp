#include "ntan/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ntan/error.hpp"

namespace ntan {

namespace {

using json = nlohmann::json;

// Forward iterator over the text that remembers the furthest character the
// JSON lexer has read, so SAX events can be mapped back to lines.
class TrackingIterator {
 public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  TrackingIterator() = default;
  TrackingIterator(const char* p, const char** mark) : p_(p), mark_(mark) {}

  reference operator*() const {
    *mark_ = p_;
    return *p_;
  }
  TrackingIterator& operator++() {
    ++p_;
    return *this;
  }
  TrackingIterator operator++(int) {
    auto old = *this;
    ++p_;
    return old;
  }
  bool operator==(const TrackingIterator& o) const { return p_ == o.p_; }

 private:
  const char* p_ = nullptr;
  const char** mark_ = nullptr;
};

// JSON pointer -> 1-based line of the token that produced it.
class LineLocator : public nlohmann::json_sax<json> {
 public:
  LineLocator(std::string_view text, const char** mark) : begin_(text.data()), mark_(mark) {
    for (std::size_t i = 0; i < text.size(); ++i)
      if (text[i] == '\n') newlines_.push_back(i);
  }

  int line_of(const std::string& pointer) const {
    auto it = lines_.find(pointer);
    return it == lines_.end() ? 0 : it->second;
  }

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override {
    record();
    stack_.push_back({false, 0, {}});
    return true;
  }
  bool key(string_t& k) override {
    stack_.back().key = escape(k);
    record();
    return true;
  }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override {
    record();
    stack_.push_back({true, 0, {}});
    return true;
  }
  bool end_array() override { return close(); }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
    return false;
  }

 private:
  struct Frame {
    bool array;
    int index;
    std::string key;
  };

  static std::string escape(const std::string& k) {
    std::string out;
    for (char ch : k) {
      if (ch == '~') out += "~0";
      else if (ch == '/') out += "~1";
      else out += ch;
    }
    return out;
  }

  std::string pointer() const {
    std::string p;
    for (const auto& f : stack_) p += "/" + (f.array ? std::to_string(f.index) : f.key);
    return p;
  }

  int current_line() const {
    const auto offset = static_cast<std::size_t>(*mark_ - begin_);
    return static_cast<int>(std::lower_bound(newlines_.begin(), newlines_.end(), offset) -
                            newlines_.begin()) +
           1;
  }

  void record() { lines_.emplace(pointer(), current_line()); }

  bool value() {
    record();
    advance();
    return true;
  }
  bool close() {
    stack_.pop_back();
    advance();
    return true;
  }
  void advance() {
    if (!stack_.empty() && stack_.back().array) ++stack_.back().index;
  }

  const char* begin_;
  const char** mark_;
  std::vector<std::size_t> newlines_;
  std::vector<Frame> stack_;
  std::map<std::string, int> lines_;
};

class Reader {
 public:
  Reader(const LineLocator& lines, std::string origin) : lines_(lines), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    int line = lines_.line_of(pointer);
    std::string p = pointer;
    while (line == 0 && !p.empty()) {
      p = p.substr(0, p.rfind('/'));
      line = lines_.line_of(p);
    }
    throw Error(ErrorCode::Validation, origin_ + ":" + std::to_string(line) + ": " + message);
  }

  int line(const std::string& pointer) const { return lines_.line_of(pointer); }

  double number(const json& v, const std::string& ptr, const char* what) const {
    if (!v.is_number()) fail(ptr, std::string(what) + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(ptr, std::string(what) + " must be finite");
    return x;
  }

  int integer(const json& v, const std::string& ptr, const char* what, int lo, int hi) const {
    if (!v.is_number_integer()) fail(ptr, std::string(what) + " must be an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi)
      fail(ptr, std::string(what) + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
  }

  std::array<double, 2> range(const json& v, const std::string& ptr, const char* what) const {
    if (!v.is_array() || v.size() != 2) fail(ptr, std::string(what) + " must be [lo, hi]");
    const double a = number(v[0], ptr + "/0", what);
    const double b = number(v[1], ptr + "/1", what);
    if (!(a < b)) fail(ptr, std::string(what) + " must satisfy lo < hi");
    return {a, b};
  }

  Expr expression(const json& v, const std::string& ptr, const ParseOptions& opts) const {
    if (!v.is_string()) fail(ptr, "expected an expression string");
    try {
      return parse(v.get<std::string>(), opts);
    } catch (const Error& e) {
      fail(ptr, e.what());
    }
  }

  void only_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, _] : obj.items())
      if (!allowed.count(k)) fail(ptr + "/" + k, "unknown field \"" + k + "\"");
  }

 private:
  const LineLocator& lines_;
  std::string origin_;
};

Problem read_problem(const Reader& r, const json& obj, const std::string& ptr, int index) {
  if (!obj.is_object()) r.fail(ptr, "a problem must be an object");
  r.only_keys(obj, ptr,
              {"name", "description", "dimension", "christoffel", "metric", "curve", "frame", "factor",
               "interval", "t0", "scan", "grid", "tolerance", "reference_surface", "seed"});
  Problem p;
  p.line = r.line(ptr);
  p.name = "problem-" + std::to_string(index + 1);
  if (obj.contains("name")) {
    if (!obj["name"].is_string()) r.fail(ptr + "/name", "name must be a string");
    p.name = obj["name"].get<std::string>();
  }
  if (!obj.contains("dimension")) r.fail(ptr, "missing field \"dimension\"");
  const int m = r.integer(obj["dimension"], ptr + "/dimension", "dimension", 2, kMaxDimension);
  p.dimension = m;

  const bool has_gamma = obj.contains("christoffel");
  const bool has_metric = obj.contains("metric");
  if (has_gamma == has_metric)
    r.fail(has_metric ? ptr + "/metric" : ptr,
           "exactly one of \"christoffel\" and \"metric\" must be given");

  ParseOptions space;
  space.dimension = m;
  space.allow_t = false;
  if (has_gamma) {
    const auto& tab = obj["christoffel"];
    const std::string tp = ptr + "/christoffel";
    if (!tab.is_object()) r.fail(tp, "christoffel must be an object of \"l,mu,nu\": expression");
    std::map<std::string, std::string> table;
    for (const auto& [k, v] : tab.items()) {
      const std::string kp = tp + "/" + k;
      static const std::regex key_re(R"(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*)");
      std::smatch mt;
      if (!std::regex_match(k, mt, key_re)) r.fail(kp, "christoffel key \"" + k + "\" is not \"l,mu,nu\"");
      for (int i = 1; i <= 3; ++i) {
        const int idx = std::stoi(mt[i].str());
        if (idx < 1 || idx > m) r.fail(kp, "christoffel index out of range in \"" + k + "\"");
      }
      r.expression(v, kp, space);
      table[k] = v.get<std::string>();
    }
    try {
      p.connection = Connection::from_table(m, table);
    } catch (const Error& e) {
      r.fail(tp, e.what());
    }
  } else {
    const auto& g = obj["metric"];
    const std::string gp = ptr + "/metric";
    if (!g.is_array() || static_cast<int>(g.size()) != m) r.fail(gp, "metric must be an m x m array");
    std::vector<Expr> entries;
    for (int i = 0; i < m; ++i) {
      const auto& row = g[static_cast<std::size_t>(i)];
      const std::string rp = gp + "/" + std::to_string(i);
      if (!row.is_array() || static_cast<int>(row.size()) != m) r.fail(rp, "metric row must have m entries");
      for (int j = 0; j < m; ++j)
        entries.push_back(r.expression(row[static_cast<std::size_t>(j)], rp + "/" + std::to_string(j), space));
    }
    try {
      p.connection = levi_civita(m, std::move(entries));
    } catch (const Error& e) {
      r.fail(gp, e.what());
    }
  }

  std::array<double, 2> interval{-1.0, 1.0};
  if (obj.contains("interval")) interval = r.range(obj["interval"], ptr + "/interval", "interval");

  ParseOptions in_t;
  in_t.allow_space = false;
  const auto read_vector = [&](const char* key) {
    const std::string vp = ptr + "/" + key;
    const auto& v = obj[key];
    if (!v.is_array() || static_cast<int>(v.size()) != m)
      r.fail(vp, std::string(key) + " must have " + std::to_string(m) + " components");
    std::vector<Expr> out;
    for (int i = 0; i < m; ++i)
      out.push_back(r.expression(v[static_cast<std::size_t>(i)], vp + "/" + std::to_string(i), in_t));
    return out;
  };
  if (!obj.contains("curve")) r.fail(ptr, "missing field \"curve\"");
  CurveSpec curve = make_curve(read_vector("curve"), interval[0], interval[1]);

  if (obj.contains("frame") != obj.contains("factor"))
    r.fail(obj.contains("frame") ? ptr + "/frame" : ptr + "/factor",
           "\"frame\" and \"factor\" must be given together");
  if (obj.contains("frame")) {
    auto frame = read_vector("frame");
    const Expr factor = r.expression(obj["factor"], ptr + "/factor", in_t);
    try {
      p.directed = make_directed(std::move(curve), std::move(frame), factor);
    } catch (const Error& e) {
      r.fail(ptr + "/frame", e.what());
    }
    p.has_frame = true;
  } else {
    p.directed = immersed_frame(curve);
  }

  if (obj.contains("t0")) {
    const auto& t = obj["t0"];
    const std::string tp = ptr + "/t0";
    if (t.is_number()) {
      p.t0.push_back(r.number(t, tp, "t0"));
    } else {
      if (!t.is_array()) r.fail(tp, "t0 must be a number or a list of numbers");
      for (std::size_t i = 0; i < t.size(); ++i) p.t0.push_back(r.number(t[i], tp + "/" + std::to_string(i), "t0"));
    }
  }
  if (obj.contains("scan")) {
    const auto& s = obj["scan"];
    const std::string sp = ptr + "/scan";
    if (!s.is_object()) r.fail(sp, "scan must be an object");
    r.only_keys(s, sp, {"n"});
    ScanParams sc;
    if (s.contains("n")) sc.n = r.integer(s["n"], sp + "/n", "scan.n", 2, 1000000);
    p.scan = sc;
  }
  if (obj.contains("grid")) {
    const auto& g = obj["grid"];
    const std::string gp = ptr + "/grid";
    if (!g.is_object()) r.fail(gp, "grid must be an object");
    r.only_keys(g, gp, {"nt", "ns", "t_range", "s_range"});
    GridParams grid;
    if (g.contains("nt")) grid.nt = r.integer(g["nt"], gp + "/nt", "grid.nt", 2, 100000);
    if (g.contains("ns")) grid.ns = r.integer(g["ns"], gp + "/ns", "grid.ns", 2, 100000);
    if (g.contains("t_range")) grid.t_range = r.range(g["t_range"], gp + "/t_range", "grid.t_range");
    if (g.contains("s_range")) grid.s_range = r.range(g["s_range"], gp + "/s_range", "grid.s_range");
    p.grid = grid;
  }
  if (obj.contains("tolerance")) {
    const auto& t = obj["tolerance"];
    const std::string tp = ptr + "/tolerance";
    if (!t.is_object()) r.fail(tp, "tolerance must be an object");
    r.only_keys(t, tp, {"tol", "window"});
    if (t.contains("tol")) {
      p.tol = r.number(t["tol"], tp + "/tol", "tol");
      if (!(*p.tol > 0.0)) r.fail(tp + "/tol", "tol must be positive");
    }
    if (t.contains("window")) {
      p.window = r.number(t["window"], tp + "/window", "window");
      if (!(*p.window > 0.0)) r.fail(tp + "/window", "window must be positive");
    }
  }
  if (obj.contains("seed")) {
    if (!obj["seed"].is_number_unsigned()) r.fail(ptr + "/seed", "seed must be a non-negative integer");
    p.seed = obj["seed"].get<std::uint64_t>();
  }
  if (obj.contains("reference_surface")) {
    const auto& v = obj["reference_surface"];
    const std::string vp = ptr + "/reference_surface";
    if (!v.is_array() || static_cast<int>(v.size()) != m)
      r.fail(vp, "reference_surface must have " + std::to_string(m) + " components");
    ParseOptions ts;
    ts.dimension = 1;
    static const std::regex s_re(R"(\bs\b)");
    static const std::regex x_re(R"(\bx\d+\b)");
    for (int i = 0; i < m; ++i) {
      const auto& e = v[static_cast<std::size_t>(i)];
      const std::string ep = vp + "/" + std::to_string(i);
      if (!e.is_string()) r.fail(ep, "expected an expression string");
      const std::string text = e.get<std::string>();
      if (std::regex_search(text, x_re)) r.fail(ep, "reference_surface takes expressions in t and s only");
      p.reference_surface.push_back(r.expression(json(std::regex_replace(text, s_re, "x1")), ep, ts));
    }
  }
  return p;
}

}  // namespace

ProblemFile parse_problem_file(std::string_view text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    throw Error(ErrorCode::Parse, origin + ": " + msg);
  }
  const char* mark = text.data();
  LineLocator lines(text, &mark);
  json::sax_parse(TrackingIterator(text.data(), &mark), TrackingIterator(text.data() + text.size(), &mark),
                  &lines);
  Reader r(lines, origin);

  ProblemFile file;
  file.origin = origin;
  if (!doc.is_object()) r.fail("", "top level must be an object");
  if (doc.contains("problems")) {
    r.only_keys(doc, "", {"problems", "description"});
    const auto& list = doc["problems"];
    if (!list.is_array() || list.empty()) r.fail("/problems", "problems must be a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i)
      file.problems.push_back(read_problem(r, list[i], "/problems/" + std::to_string(i), static_cast<int>(i)));
  } else {
    file.problems.push_back(read_problem(r, doc, "", 0));
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < file.problems.size(); ++i)
    if (!names.insert(file.problems[i].name).second)
      r.fail("/problems/" + std::to_string(i) + "/name", "duplicate problem name \"" + file.problems[i].name + "\"");
  return file;
}

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem_file(ss.str(), path);
}

double evaluate_reference(const Expr& e, double t, double s) {
  const double x[1] = {s};
  return evaluate(e, Env{t, x});
}

}  // namespace ntan
