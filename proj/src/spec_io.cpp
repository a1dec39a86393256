#include "seqdec/spec_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace seqdec {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Tracks how far the lexer has read so SAX events can be given a line.
class CountingIterator {
 public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  CountingIterator() = default;
  CountingIterator(const char* p, const char** shared) : p_(p), shared_(shared) {}
  reference operator*() const { return *p_; }
  CountingIterator& operator++() {
    ++p_;
    if (shared_) *shared_ = p_;
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator t = *this;
    ++*this;
    return t;
  }
  bool operator==(const CountingIterator& o) const { return p_ == o.p_; }
  bool operator!=(const CountingIterator& o) const { return p_ != o.p_; }

 private:
  const char* p_ = nullptr;
  const char** shared_ = nullptr;
};

struct Position {
  int line = 0, column = 0;
};

Position position_at(const std::string& text, std::size_t offset) {
  Position pos{1, 1};
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

// Records the position of every JSON pointer in the document.
class LocatingSax : public nlohmann::json_sax<json> {
 public:
  LocatingSax(const std::string& text, const char** cursor) : text_(text), cursor_(cursor) {}

  std::map<std::string, Position> positions;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override { return open(false); }
  bool key(string_t& k) override {
    frames_.back().key = escape(k);
    positions[frames_.back().path + "/" + frames_.back().key] = here();
    return true;
  }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override { return open(true); }
  bool end_array() override { return close(); }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

 private:
  struct Frame {
    bool array;
    std::string path;
    std::size_t next = 0;
    std::string key;
  };
  const std::string& text_;
  const char** cursor_;
  std::vector<Frame> frames_;

  static std::string escape(const std::string& k) {
    std::string out;
    for (char c : k) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out += c;
    }
    return out;
  }
  Position here() const { return position_at(text_, static_cast<std::size_t>(*cursor_ - text_.data())); }
  std::string current_path() {
    if (frames_.empty()) return "";
    Frame& f = frames_.back();
    if (f.array) return f.path + "/" + std::to_string(f.next++);
    return f.path + "/" + f.key;
  }
  bool value() {
    std::string p = current_path();
    if (!frames_.empty() && frames_.back().array) positions.emplace(p, here());
    return true;
  }
  bool open(bool array) {
    std::string p = current_path();
    positions.emplace(p, here());
    frames_.push_back({array, p, 0, {}});
    return true;
  }
  bool close() {
    frames_.pop_back();
    return true;
  }
};

class Doc {
 public:
  explicit Doc(const std::string& text) : text_(text) {
    try {
      root_ = json::parse(text);
    } catch (const json::parse_error& e) {
      Position p = position_at(text, e.byte > 0 ? e.byte - 1 : 0);
      std::string msg = e.what();
      auto cut = msg.find("syntax error");
      throw SpecError(cut == std::string::npos ? msg : msg.substr(cut), "", p.line, p.column);
    }
    const char* cursor = text_.data();
    LocatingSax sax(text_, &cursor);
    CountingIterator first(text_.data(), &cursor), last(text_.data() + text_.size(), nullptr);
    json::sax_parse(first, last, &sax);
    positions_ = std::move(sax.positions);
  }

  const json& root() const { return root_; }

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    Position p;
    // Fall back to the nearest recorded ancestor.
    std::string f = field;
    for (;;) {
      auto it = positions_.find(f);
      if (it != positions_.end()) {
        p = it->second;
        break;
      }
      auto cut = f.rfind('/');
      if (cut == std::string::npos) break;
      f = f.substr(0, cut);
    }
    throw SpecError(message, field.empty() ? "/" : field, p.line, p.column);
  }

  const json& field(const json& obj, const std::string& path, const std::string& key) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing field '" + key + "'");
    return *it;
  }

  double number(const json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
  }

  std::vector<double> prob_row(const json& j, const std::string& path, std::size_t size) const {
    if (!j.is_array()) fail(path, "expected an array of probabilities");
    if (j.size() != size) fail(path, "expected " + std::to_string(size) + " probabilities, got " + std::to_string(j.size()));
    std::vector<double> out;
    double sum = 0.0;
    for (std::size_t i = 0; i < j.size(); ++i) {
      double v = number(j[i], path + "/" + std::to_string(i));
      if (v < 0.0) fail(path + "/" + std::to_string(i), "negative probability");
      out.push_back(v);
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail(path, "probabilities sum to " + std::to_string(sum) + ", not 1");
    return out;
  }

  // Nested arrays of total shape `shape`, flattened row-major.
  void flat(const json& j, const std::string& path, const std::vector<std::size_t>& shape, std::size_t level,
            std::vector<double>& out) const {
    if (level == shape.size()) {
      double v = number(j, path);
      if (v < 0.0) fail(path, "negative probability");
      out.push_back(v);
      return;
    }
    if (!j.is_array() || j.size() != shape[level])
      fail(path, "expected an array of length " + std::to_string(shape[level]));
    for (std::size_t i = 0; i < j.size(); ++i) flat(j[i], path + "/" + std::to_string(i), shape, level + 1, out);
  }

  std::vector<double> joint(const json& j, const std::string& path, const std::vector<std::size_t>& shape) const {
    std::vector<double> out;
    flat(j, path, shape, 0, out);
    double sum = 0.0;
    for (double v : out) sum += v;
    if (std::abs(sum - 1.0) > 1e-9) fail(path, "joint probabilities sum to " + std::to_string(sum) + ", not 1");
    return out;
  }

  Matrix op(const json& j, const std::string& path, Index d) const {
    if (!j.is_array() || static_cast<Index>(j.size()) != d) fail(path, "expected " + std::to_string(d) + " rows");
    Matrix m(d, d);
    for (Index r = 0; r < d; ++r) {
      const json& row = j[static_cast<std::size_t>(r)];
      std::string rp = path + "/" + std::to_string(r);
      if (!row.is_array() || static_cast<Index>(row.size()) != d) fail(rp, "expected " + std::to_string(d) + " entries");
      for (Index c = 0; c < d; ++c) {
        const json& e = row[static_cast<std::size_t>(c)];
        std::string ep = rp + "/" + std::to_string(c);
        if (!e.is_array() || e.size() != 2) fail(ep, "expected an [re, im] pair");
        m(r, c) = Complex(number(e[0], ep + "/0"), number(e[1], ep + "/1"));
      }
    }
    if (auto err = DensityOperator::validate(m, false, 1e-8)) fail(path, "invalid density operator: " + *err);
    return m;
  }

 private:
  const std::string& text_;
  json root_;
  std::map<std::string, Position> positions_;
};

Index positive_dim(const Doc& doc, const json& dims, const std::string& key) {
  const json& v = doc.field(dims, "/output_dims", key);
  std::string p = "/output_dims/" + key;
  if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 4096)
    doc.fail(p, "expected an integer dimension in [1, 4096]");
  return static_cast<Index>(v.get<long long>());
}

// States nested by the symbol names of `systems`, collected in row-major
// order over their alphabets.
std::vector<Matrix> nested_states(const Doc& doc, const json& node, const std::string& path,
                                  const std::vector<std::vector<std::string>>& names, std::size_t level, Index d) {
  if (level == names.size()) return {doc.op(node, path, d)};
  if (!node.is_object()) doc.fail(path, "expected an object keyed by symbol name");
  for (auto it = node.begin(); it != node.end(); ++it)
    if (std::find(names[level].begin(), names[level].end(), it.key()) == names[level].end())
      doc.fail(path + "/" + it.key(), "unknown symbol '" + it.key() + "'");
  std::vector<Matrix> out;
  for (const auto& sym : names[level]) {
    const json& child = doc.field(node, path, sym);
    auto part = nested_states(doc, child, path + "/" + sym, names, level + 1, d);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

ordered_json complex_op(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json nested_out(const std::vector<Matrix>& states, const std::vector<std::vector<std::string>>& names,
                        std::size_t level, std::size_t& next) {
  if (level == names.size()) return complex_op(states[next++]);
  ordered_json obj = ordered_json::object();
  for (const auto& sym : names[level]) obj[sym] = nested_out(states, names, level + 1, next);
  return obj;
}

ordered_json table(const std::vector<double>& flat, std::size_t rows, std::size_t cols) {
  ordered_json t = ordered_json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    ordered_json row = ordered_json::array();
    for (std::size_t c = 0; c < cols; ++c) row.push_back(flat[r * cols + c]);
    t.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> default_names(int k) {
  std::vector<std::string> v;
  for (int i = 0; i < k; ++i) v.push_back(std::to_string(i));
  return v;
}

}  // namespace

SpecError::SpecError(const std::string& message, std::string field, int line, int column)
    : std::runtime_error("spec:" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                         (field.empty() ? std::string() : "field " + field + ": ") + message),
      message_(message),
      field_(std::move(field)),
      line_(line),
      column_(column) {}

int ChannelSpec::rate_count() const {
  if (kind == "cq") return 1;
  if (kind == "ccq-mac") return 2;
  if (kind == "cmg-mac") return 3;
  return 4;
}

std::vector<std::string> spec_systems(const std::string& kind) {
  if (kind == "cq") return {"X"};
  if (kind == "ccq-mac") return {"X", "Y"};
  if (kind == "cmg-mac") return {"X", "Z", "Y"};
  if (kind == "ccqq-ic") return {"Q", "U", "X", "V", "Y"};
  throw std::invalid_argument("unknown channel kind '" + kind + "'");
}

std::vector<std::string> spec_state_systems(const std::string& kind) {
  if (kind == "cq") return {"X"};
  if (kind == "cmg-mac") return {"Z", "Y"};
  return {"X", "Y"};
}

ChannelSpec parse_channel_spec(const std::string& text) {
  Doc doc(text);
  const json& root = doc.root();
  if (!root.is_object()) doc.fail("", "expected a top-level object");
  if (auto f = root.find("format"); f != root.end() && (!f->is_string() || f->get<std::string>() != kSpecFormat))
    doc.fail("/format", std::string("unsupported format (expected \"") + kSpecFormat + "\")");
  ChannelSpec spec;
  const json& kind = doc.field(root, "", "kind");
  if (!kind.is_string()) doc.fail("/kind", "expected a string");
  spec.kind = kind.get<std::string>();
  std::vector<std::string> systems;
  try {
    systems = spec_systems(spec.kind);
  } catch (const std::invalid_argument&) {
    doc.fail("/kind", "unknown kind '" + spec.kind + "' (expected cq, ccq-mac, cmg-mac or ccqq-ic)");
  }

  const json& alph = doc.field(root, "", "alphabets");
  if (!alph.is_object()) doc.fail("/alphabets", "expected an object");
  std::map<std::string, std::size_t> size;
  for (const auto& s : systems) {
    const json& a = doc.field(alph, "/alphabets", s);
    std::string p = "/alphabets/" + s;
    if (!a.is_array() || a.empty()) doc.fail(p, "expected a non-empty array of symbol names");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_string()) doc.fail(p + "/" + std::to_string(i), "expected a string");
      std::string nm = a[i].get<std::string>();
      if (std::find(names.begin(), names.end(), nm) != names.end())
        doc.fail(p + "/" + std::to_string(i), "duplicate symbol '" + nm + "'");
      names.push_back(nm);
    }
    size[s] = names.size();
    spec.alphabets[s] = std::move(names);
  }
  for (auto it = alph.begin(); it != alph.end(); ++it)
    if (!spec.alphabets.count(it.key())) doc.fail("/alphabets/" + it.key(), "system not used by kind " + spec.kind);

  const json& dist = doc.field(root, "", "distributions");
  if (!dist.is_object()) doc.fail("/distributions", "expected an object");
  const json& dims = doc.field(root, "", "output_dims");
  const json& states = doc.field(root, "", "states");

  std::vector<std::vector<std::string>> state_names;
  for (const auto& s : spec_state_systems(spec.kind)) state_names.push_back(spec.alphabets[s]);

  auto has = [&](const char* k) { return dist.contains(k); };
  auto row = [&](const char* k) { return doc.prob_row(doc.field(dist, "/distributions", k), std::string("/distributions/") + k, size[k]); };

  try {
    if (spec.kind == "cq") {
      Index d = positive_dim(doc, dims, "B");
      CqChannel c{ClassicalDistribution(row("X")), nested_states(doc, states, "/states", state_names, 0, d)};
      c.validate();
      spec.model = std::move(c);
    } else if (spec.kind == "ccq-mac") {
      Index d = positive_dim(doc, dims, "B");
      auto st = nested_states(doc, states, "/states", state_names, 0, d);
      if (has("XY")) {
        if (has("X") || has("Y")) doc.fail("/distributions", "give either XY or X and Y, not both");
        auto pxy = doc.joint(dist["XY"], "/distributions/XY", {size["X"], size["Y"]});
        try {
          spec.model = MacChannel::from_joint(pxy, static_cast<int>(size["X"]), static_cast<int>(size["Y"]), st);
        } catch (const std::invalid_argument& e) {
          doc.fail("/distributions/XY", e.what());
        }
      } else {
        MacChannel m{ClassicalDistribution(row("X")), ClassicalDistribution(row("Y")), std::move(st)};
        m.validate();
        spec.model = std::move(m);
      }
    } else if (spec.kind == "cmg-mac") {
      Index d = positive_dim(doc, dims, "B");
      auto st = nested_states(doc, states, "/states", state_names, 0, d);
      if (has("XZY")) {
        if (has("X") || has("Z|X") || has("Y")) doc.fail("/distributions", "give either XZY or X, Z|X and Y, not both");
        auto p = doc.joint(dist["XZY"], "/distributions/XZY", {size["X"], size["Z"], size["Y"]});
        try {
          spec.model = CmgChannel::from_joint(p, static_cast<int>(size["X"]), static_cast<int>(size["Z"]),
                                              static_cast<int>(size["Y"]), st);
        } catch (const std::invalid_argument& e) {
          doc.fail("/distributions/XZY", e.what());
        }
      } else {
        CmgChannel c;
        c.px = ClassicalDistribution(row("X"));
        const json& zx = doc.field(dist, "/distributions", "Z|X");
        if (!zx.is_array() || zx.size() != size["X"]) doc.fail("/distributions/Z|X", "expected one row per x");
        for (std::size_t x = 0; x < zx.size(); ++x)
          c.pz_given_x.push_back(doc.prob_row(zx[x], "/distributions/Z|X/" + std::to_string(x), size["Z"]));
        c.py = ClassicalDistribution(row("Y"));
        c.states = std::move(st);
        c.validate();
        spec.model = std::move(c);
      }
    } else {
      IcChannel ic;
      ic.d1 = positive_dim(doc, dims, "B1");
      ic.d2 = positive_dim(doc, dims, "B2");
      ic.pq = ClassicalDistribution(row("Q"));
      ic.nu = static_cast<int>(size["U"]);
      ic.nx = static_cast<int>(size["X"]);
      ic.nv = static_cast<int>(size["V"]);
      ic.ny = static_cast<int>(size["Y"]);
      for (const char* k : {"UX|Q", "VY|Q"}) {
        const json& t = doc.field(dist, "/distributions", k);
        std::string p = std::string("/distributions/") + k;
        if (!t.is_array() || t.size() != size["Q"]) doc.fail(p, "expected one table per q");
        std::size_t a = k[0] == 'U' ? size["U"] : size["V"], b = k[0] == 'U' ? size["X"] : size["Y"];
        for (std::size_t q = 0; q < t.size(); ++q)
          (k[0] == 'U' ? ic.pux_given_q : ic.pvy_given_q).push_back(doc.joint(t[q], p + "/" + std::to_string(q), {a, b}));
      }
      ic.states = nested_states(doc, states, "/states", state_names, 0, ic.d1 * ic.d2);
      ic.validate();
      spec.model = std::move(ic);
    }
  } catch (const std::invalid_argument& e) {
    doc.fail("", e.what());
  }
  for (auto it = dist.begin(); it != dist.end(); ++it) {
    static const std::map<std::string, std::vector<std::string>> allowed{
        {"cq", {"X"}}, {"ccq-mac", {"X", "Y", "XY"}}, {"cmg-mac", {"X", "Z|X", "Y", "XZY"}}, {"ccqq-ic", {"Q", "UX|Q", "VY|Q"}}};
    const auto& ok = allowed.at(spec.kind);
    if (std::find(ok.begin(), ok.end(), it.key()) == ok.end())
      doc.fail("/distributions/" + it.key(), "distribution not used by kind " + spec.kind);
  }
  return spec;
}

ChannelSpec load_channel_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open '" + path + "'", "", 0, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_channel_spec(ss.str());
}

std::string serialize_channel_spec(const ChannelSpec& spec) {
  ordered_json j;
  j["format"] = kSpecFormat;
  j["kind"] = spec.kind;
  ordered_json alph = ordered_json::object();
  for (const auto& s : spec_systems(spec.kind)) {
    auto it = spec.alphabets.find(s);
    alph[s] = it != spec.alphabets.end() ? it->second : std::vector<std::string>{};
  }
  ordered_json dist = ordered_json::object();
  ordered_json dims = ordered_json::object();
  auto names_of = [&](const char* s, int k) {
    auto it = spec.alphabets.find(s);
    return it != spec.alphabets.end() && static_cast<int>(it->second.size()) == k ? it->second : default_names(k);
  };
  std::vector<Matrix> states;
  std::vector<std::vector<std::string>> snames;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CqChannel>) {
          alph["X"] = names_of("X", m.px.size());
          dist["X"] = m.px.p;
          dims["B"] = m.dim();
          snames = {alph["X"].template get<std::vector<std::string>>()};
        } else if constexpr (std::is_same_v<T, MacChannel>) {
          alph["X"] = names_of("X", m.nx());
          alph["Y"] = names_of("Y", m.ny());
          dist["X"] = m.px.p;
          dist["Y"] = m.py.p;
          dims["B"] = m.dim();
          snames = {alph["X"].template get<std::vector<std::string>>(), alph["Y"].template get<std::vector<std::string>>()};
        } else if constexpr (std::is_same_v<T, CmgChannel>) {
          alph["X"] = names_of("X", m.nx());
          alph["Z"] = names_of("Z", m.nz());
          alph["Y"] = names_of("Y", m.ny());
          dist["X"] = m.px.p;
          dist["Z|X"] = m.pz_given_x;
          dist["Y"] = m.py.p;
          dims["B"] = m.dim();
          snames = {alph["Z"].template get<std::vector<std::string>>(), alph["Y"].template get<std::vector<std::string>>()};
        } else {
          alph["Q"] = names_of("Q", m.pq.size());
          alph["U"] = names_of("U", m.nu);
          alph["X"] = names_of("X", m.nx);
          alph["V"] = names_of("V", m.nv);
          alph["Y"] = names_of("Y", m.ny);
          dist["Q"] = m.pq.p;
          ordered_json ux = ordered_json::array(), vy = ordered_json::array();
          for (const auto& r : m.pux_given_q) ux.push_back(table(r, static_cast<std::size_t>(m.nu), static_cast<std::size_t>(m.nx)));
          for (const auto& r : m.pvy_given_q) vy.push_back(table(r, static_cast<std::size_t>(m.nv), static_cast<std::size_t>(m.ny)));
          dist["UX|Q"] = ux;
          dist["VY|Q"] = vy;
          dims["B1"] = m.d1;
          dims["B2"] = m.d2;
          snames = {alph["X"].template get<std::vector<std::string>>(), alph["Y"].template get<std::vector<std::string>>()};
        }
        states = m.states;
      },
      spec.model);
  j["alphabets"] = alph;
  j["distributions"] = dist;
  j["output_dims"] = dims;
  std::size_t next = 0;
  j["states"] = nested_out(states, snames, 0, next);
  return j.dump(2) + "\n";
}

bool same_model(const ChannelSpec& a, const ChannelSpec& b) {
  if (a.kind != b.kind || a.model.index() != b.model.index()) return false;
  for (const auto& s : spec_systems(a.kind)) {
    auto ia = a.alphabets.find(s), ib = b.alphabets.find(s);
    if ((ia == a.alphabets.end()) != (ib == b.alphabets.end())) return false;
    if (ia != a.alphabets.end() && ia->second != ib->second) return false;
  }
  auto eq = [](const std::vector<Matrix>& x, const std::vector<Matrix>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].rows() != y[i].rows() || x[i] != y[i]) return false;
    return true;
  };
  return std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        const T& o = std::get<T>(b.model);
        if constexpr (std::is_same_v<T, CqChannel>) return m.px.p == o.px.p && eq(m.states, o.states);
        else if constexpr (std::is_same_v<T, MacChannel>)
          return m.px.p == o.px.p && m.py.p == o.py.p && eq(m.states, o.states);
        else if constexpr (std::is_same_v<T, CmgChannel>)
          return m.px.p == o.px.p && m.pz_given_x == o.pz_given_x && m.py.p == o.py.p && eq(m.states, o.states);
        else
          return m.pq.p == o.pq.p && m.pux_given_q == o.pux_given_q && m.pvy_given_q == o.pvy_given_q && m.nu == o.nu &&
                 m.nx == o.nx && m.nv == o.nv && m.ny == o.ny && m.d1 == o.d1 && m.d2 == o.d2 && eq(m.states, o.states);
      },
      a.model);
}

void ExperimentConfig::validate(int rate_count) const {
  if (n < 1 || n > 64) throw std::invalid_argument("--n must lie in [1, 64]");
  if (!(delta > 0.0) || delta > 2.0) throw std::invalid_argument("--delta must lie in (0, 2]");
  if (epsilon && (!(*epsilon > 0.0) || *epsilon >= 1.0)) throw std::invalid_argument("--epsilon must lie in (0, 1)");
  if (static_cast<int>(rates.size()) != rate_count)
    throw std::invalid_argument("--rate must be given " + std::to_string(rate_count) + " time(s) for this channel, got " +
                                std::to_string(rates.size()));
  for (double r : rates)
    if (!(r >= 0.0) || r > 16.0) throw std::invalid_argument("--rate values must lie in [0, 16]");
  if (trials < 1 || trials > 1000000) throw std::invalid_argument("--trials must lie in [1, 1000000]");
  if (region != 1 && region != 2) throw std::invalid_argument("--region must be 1 or 2");
}

}  // namespace seqdec
