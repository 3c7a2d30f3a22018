#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "kminlab/errors.hpp"
#include "kminlab/harness.hpp"
#include "kminlab/io.hpp"

#include <json.hpp>

namespace kminlab::harness {

using nlohmann::json;

namespace {

// ---- tokenizer / recursive-descent parser for the block format ----

struct Token {
  enum class Kind { ident, number, string, boolean, punct, end };
  Kind kind = Kind::end;
  std::string text;
  double num = 0;
  bool bval = false;
  int line = 0, col = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else {
        break;
      }
    }
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= s_.size()) {
      tok_.kind = Token::Kind::end;
      return;
    }
    const char c = s_[pos_];
    if (c == '{' || c == '}' || c == '[' || c == ']' || c == ',' || c == '=') {
      tok_.kind = Token::Kind::punct;
      tok_.text = std::string(1, c);
      ++pos_;
      ++col_;
      return;
    }
    if (c == '"') {
      ++pos_;
      ++col_;
      std::string v;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\n') fail("unterminated string");
        v += s_[pos_++];
        ++col_;
      }
      if (pos_ >= s_.size()) fail("unterminated string");
      ++pos_;
      ++col_;
      tok_.kind = Token::Kind::string;
      tok_.text = std::move(v);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string v;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        v += s_[pos_++];
        ++col_;
      }
      if (v == "true" || v == "false") {
        tok_.kind = Token::Kind::boolean;
        tok_.bval = v == "true";
      } else {
        tok_.kind = Token::Kind::ident;
      }
      tok_.text = std::move(v);
      return;
    }
    // number
    {
      size_t end = pos_;
      while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) ||
                                 s_[end] == '+' || s_[end] == '-' || s_[end] == '.' ||
                                 s_[end] == 'e' || s_[end] == 'E')) {
        ++end;
      }
      const std::string v = s_.substr(pos_, end - pos_);
      try {
        size_t used = 0;
        tok_.num = std::stod(v, &used);
        if (used != v.size() || v.empty()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        fail(fmt::format("unexpected character '{}'", c));
      }
      tok_.kind = Token::Kind::number;
      tok_.text = v;
      col_ += static_cast<int>(end - pos_);
      pos_ = end;
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(fmt::format("config:{}:{}: {}", line_, col_, msg));
  }

  const std::string& s_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

[[noreturn]] void fail_at(const Token& t, const std::string& msg) {
  throw ConfigError(fmt::format("config:{}:{}: {}", t.line, t.col, msg));
}

json parse_value(Lexer& lx);

json parse_object(Lexer& lx) {
  Token open = lx.take();  // '{'
  json obj = json::object();
  while (true) {
    if (lx.peek().kind == Token::Kind::punct && lx.peek().text == "}") {
      lx.take();
      return obj;
    }
    if (lx.peek().kind == Token::Kind::punct && lx.peek().text == ",") {
      lx.take();
      continue;
    }
    if (lx.peek().kind != Token::Kind::ident) fail_at(lx.peek(), "expected a key");
    Token key = lx.take();
    if (!(lx.peek().kind == Token::Kind::punct && lx.peek().text == "="))
      fail_at(lx.peek(), fmt::format("expected '=' after key '{}'", key.text));
    lx.take();
    if (obj.contains(key.text)) fail_at(key, fmt::format("duplicate key '{}'", key.text));
    obj[key.text] = parse_value(lx);
  }
  fail_at(open, "unterminated object");
}

json parse_value(Lexer& lx) {
  const Token& t = lx.peek();
  switch (t.kind) {
    case Token::Kind::number:
      return json(lx.take().num);
    case Token::Kind::string:
      return json(lx.take().text);
    case Token::Kind::boolean:
      return json(lx.take().bval);
    case Token::Kind::punct:
      if (t.text == "{") return parse_object(lx);
      if (t.text == "[") {
        lx.take();
        json arr = json::array();
        while (true) {
          if (lx.peek().kind == Token::Kind::punct && lx.peek().text == "]") {
            lx.take();
            return arr;
          }
          if (lx.peek().kind == Token::Kind::punct && lx.peek().text == ",") {
            lx.take();
            continue;
          }
          arr.push_back(parse_value(lx));
        }
      }
      fail_at(t, fmt::format("unexpected '{}'", t.text));
    default:
      fail_at(t, "expected a value");
  }
}

json parse_blocks(const std::string& text) {
  Lexer lx(text);
  json root = json::object();
  while (lx.peek().kind != Token::Kind::end) {
    if (lx.peek().kind != Token::Kind::ident) fail_at(lx.peek(), "expected a block name");
    Token name = lx.take();
    if (!(lx.peek().kind == Token::Kind::punct && lx.peek().text == "{"))
      fail_at(lx.peek(), fmt::format("expected '{{' after block '{}'", name.text));
    if (root.contains(name.text)) fail_at(name, fmt::format("duplicate block '{}'", name.text));
    root[name.text] = parse_object(lx);
  }
  return root;
}

// ---- typed extraction with field-path diagnostics ----

[[noreturn]] void fail_field(const std::string& path, const std::string& msg) {
  throw ConfigError(fmt::format("config field '{}': {}", path, msg));
}

double need_num(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail_field(path + "." + key, "missing");
  if (!obj[key].is_number()) fail_field(path + "." + key, "expected a number");
  return obj[key].get<double>();
}

double opt_num(const json& obj, const std::string& path, const std::string& key, double dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number()) fail_field(path + "." + key, "expected a number");
  return obj[key].get<double>();
}

std::string opt_str(const json& obj, const std::string& path, const std::string& key,
                    const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_string()) fail_field(path + "." + key, "expected a string");
  return obj[key].get<std::string>();
}

bool opt_bool(const json& obj, const std::string& path, const std::string& key, bool dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_boolean()) fail_field(path + "." + key, "expected true/false");
  return obj[key].get<bool>();
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto& [k, v] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (k == a) ok = true;
    if (!ok) fail_field(path + "." + k, "unknown key");
  }
}

}  // namespace

std::vector<double> parse_b_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4)
    throw ConfigError(fmt::format("b_grid '{}': expected start:stop:kind:count", spec));
  double start = 0, stop = 0;
  long count = 0;
  try {
    start = std::stod(parts[0]);
    stop = std::stod(parts[1]);
    count = std::stol(parts[3]);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("b_grid '{}': bad numbers", spec));
  }
  if (!(start > stop) || !(stop > 0))
    throw ConfigError(fmt::format("b_grid '{}': need start > stop > 0", spec));
  if (count < 1) throw ConfigError(fmt::format("b_grid '{}': count must be >= 1", spec));
  std::vector<double> out;
  if (count == 1) {
    out.push_back(start);
  } else if (parts[2] == "geometric") {
    const double q = std::pow(stop / start, 1.0 / (count - 1));
    for (long i = 0; i < count; ++i) out.push_back(start * std::pow(q, double(i)));
  } else if (parts[2] == "linear") {
    for (long i = 0; i < count; ++i)
      out.push_back(start + (stop - start) * double(i) / double(count - 1));
  } else {
    throw ConfigError(fmt::format("b_grid '{}': kind must be geometric|linear", spec));
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  const json root = parse_blocks(text);
  for (auto& [k, v] : root.items()) {
    (void)v;
    static const char* blocks[] = {"domain", "potential", "model",    "groundstate",
                                   "sweep",  "flow",      "analysis", "output"};
    bool ok = false;
    for (const char* b : blocks)
      if (k == b) ok = true;
    if (!ok) fail_field(k, "unknown block");
  }

  RunConfig cfg;

  if (!root.contains("domain")) throw ConfigError("config: missing 'domain' block");
  {
    const json& d = root["domain"];
    const std::string shape = opt_str(d, "domain", "shape", "rect");
    if (shape == "disk") {
      check_keys(d, "domain", {"shape", "center", "radius", "h"});
      if (!d.contains("center") || !d["center"].is_array() || d["center"].size() != 2)
        fail_field("domain.center", "expected [x, y]");
      cfg.shape = geometry::Shape::disk(d["center"][0].get<double>(),
                                        d["center"][1].get<double>(),
                                        need_num(d, "domain", "radius"));
    } else if (shape == "rect") {
      check_keys(d, "domain", {"shape", "a", "b", "c", "d", "h"});
      cfg.shape = geometry::Shape::rectangle(need_num(d, "domain", "a"), need_num(d, "domain", "b"),
                                             need_num(d, "domain", "c"), need_num(d, "domain", "d"));
    } else {
      fail_field("domain.shape", fmt::format("unknown shape '{}' (disk|rect)", shape));
    }
    cfg.resolution = need_num(d, "domain", "h");
    if (!(cfg.resolution > 0)) fail_field("domain.h", "must be > 0");
  }

  if (!root.contains("potential")) throw ConfigError("config: missing 'potential' block");
  {
    const json& pj = root["potential"];
    check_keys(pj, "potential", {"wells", "h"});
    if (!pj.contains("wells") || !pj["wells"].is_array() || pj["wells"].empty())
      fail_field("potential.wells", "expected a nonempty array");
    int wi = 0;
    for (const json& wj : pj["wells"]) {
      const std::string path = fmt::format("potential.wells[{}]", wi++);
      if (!wj.is_object()) fail_field(path, "expected {x=[..], p=..}");
      check_keys(wj, path, {"x", "p"});
      if (!wj.contains("x") || !wj["x"].is_array() || wj["x"].size() != 2)
        fail_field(path + ".x", "expected [x, y]");
      geometry::Well w;
      w.x = wj["x"][0].get<double>();
      w.y = wj["x"][1].get<double>();
      w.p = need_num(wj, path, "p");
      if (!(w.p > 0)) fail_field(path + ".p", "must be > 0");
      cfg.wells.push_back(w);
    }
    cfg.h_kind = geometry::HKind::parse(opt_str(pj, "potential", "h", "const:1"));
  }

  if (root.contains("model")) {
    const json& m = root["model"];
    check_keys(m, "model", {"beta", "beta_ratio"});
    if (m.contains("beta") && m.contains("beta_ratio"))
      fail_field("model", "give exactly one of beta / beta_ratio");
    if (m.contains("beta")) cfg.beta_abs = need_num(m, "model", "beta");
    if (m.contains("beta_ratio")) cfg.beta_ratio = need_num(m, "model", "beta_ratio");
  }
  if (!std::isfinite(cfg.beta_abs) && !std::isfinite(cfg.beta_ratio)) cfg.beta_ratio = 1.0;

  if (root.contains("groundstate")) {
    const json& g = root["groundstate"];
    check_keys(g, "groundstate", {"rmax", "nodes", "tol"});
    cfg.gs_rmax = opt_num(g, "groundstate", "rmax", cfg.gs_rmax);
    cfg.gs_nodes = static_cast<int>(opt_num(g, "groundstate", "nodes", cfg.gs_nodes));
    cfg.gs_tol = opt_num(g, "groundstate", "tol", cfg.gs_tol);
  }

  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    check_keys(s, "sweep", {"b_grid", "warm_start", "workers"});
    cfg.b_grid_spec = opt_str(s, "sweep", "b_grid", cfg.b_grid_spec);
    cfg.warm_start = opt_bool(s, "sweep", "warm_start", cfg.warm_start);
    cfg.workers = static_cast<int>(opt_num(s, "sweep", "workers", cfg.workers));
    if (cfg.workers < 1) fail_field("sweep.workers", "must be >= 1");
  }
  parse_b_grid(cfg.b_grid_spec);  // validate early

  if (root.contains("flow")) {
    const json& fj = root["flow"];
    check_keys(fj, "flow",
               {"step0", "max_iters", "energy_tol", "grad_tol", "backtracking", "stall_window",
                "init", "init_center", "init_width", "seed", "scale_move_every"});
    auto& f = cfg.flow;
    f.step0 = opt_num(fj, "flow", "step0", f.step0);
    f.max_iters = static_cast<int>(opt_num(fj, "flow", "max_iters", f.max_iters));
    f.energy_tol = opt_num(fj, "flow", "energy_tol", f.energy_tol);
    f.grad_tol = opt_num(fj, "flow", "grad_tol", f.grad_tol);
    f.backtracking = opt_num(fj, "flow", "backtracking", f.backtracking);
    f.stall_window = static_cast<int>(opt_num(fj, "flow", "stall_window", f.stall_window));
    f.scale_move_every =
        static_cast<int>(opt_num(fj, "flow", "scale_move_every", f.scale_move_every));
    const std::string init = opt_str(fj, "flow", "init", "gaussian");
    if (init == "gaussian") {
      f.init_kind = minimizer::FlowConfig::Init::gaussian_at_point;
    } else if (init == "eigenmode") {
      f.init_kind = minimizer::FlowConfig::Init::eigenmode;
    } else {
      fail_field("flow.init", fmt::format("unknown init '{}' (gaussian|eigenmode)", init));
    }
    if (fj.contains("init_center")) {
      if (!fj["init_center"].is_array() || fj["init_center"].size() != 2)
        fail_field("flow.init_center", "expected [x, y]");
      f.init_cx = fj["init_center"][0].get<double>();
      f.init_cy = fj["init_center"][1].get<double>();
    }
    f.init_width = opt_num(fj, "flow", "init_width", f.init_width);
    f.seed = static_cast<std::uint64_t>(opt_num(fj, "flow", "seed", 0));
    if (!(f.backtracking > 0) || f.backtracking >= 1)
      fail_field("flow.backtracking", "must lie in (0,1)");
    if (!(f.energy_tol > 0) || !(f.grad_tol > 0))
      fail_field("flow.energy_tol/grad_tol", "must be positive");
  }

  if (root.contains("analysis")) {
    const json& a = root["analysis"];
    check_keys(a, "analysis", {"regime"});
    cfg.regime = opt_str(a, "analysis", "regime", cfg.regime);
  }
  if (root.contains("output")) {
    const json& o = root["output"];
    check_keys(o, "output", {"dir"});
    cfg.out_dir = opt_str(o, "output", "dir", cfg.out_dir);
  }

  for (const auto& w : cfg.wells) {
    bool inside_box = true;
    if (cfg.shape.tag == geometry::ShapeTag::rectangle)
      inside_box = w.x >= cfg.shape.ax && w.x <= cfg.shape.bx && w.y >= cfg.shape.ay &&
                   w.y <= cfg.shape.by;
    else if (cfg.shape.tag == geometry::ShapeTag::disk)
      inside_box = std::hypot(w.x - cfg.shape.cx, w.y - cfg.shape.cy) <=
                   cfg.shape.radius * (1 + 1e-12);
    if (!inside_box)
      throw ConfigError(
          fmt::format("potential.wells: well ({:g},{:g}) lies outside the domain closure", w.x,
                      w.y));
  }
  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg, bool compact) {
  using io::format_double;
  std::string nl = compact ? " " : "\n";
  std::ostringstream out;
  out << "domain { ";
  if (cfg.shape.tag == geometry::ShapeTag::disk) {
    out << "shape=\"disk\", center=[" << format_double(cfg.shape.cx) << ", "
        << format_double(cfg.shape.cy) << "], radius=" << format_double(cfg.shape.radius);
  } else {
    out << "shape=\"rect\", a=" << format_double(cfg.shape.ax)
        << ", b=" << format_double(cfg.shape.bx) << ", c=" << format_double(cfg.shape.ay)
        << ", d=" << format_double(cfg.shape.by);
  }
  out << ", h=" << format_double(cfg.resolution) << " }" << nl;

  out << "potential { wells=[";
  for (size_t i = 0; i < cfg.wells.size(); ++i) {
    if (i) out << ", ";
    out << "{x=[" << format_double(cfg.wells[i].x) << ", " << format_double(cfg.wells[i].y)
        << "], p=" << format_double(cfg.wells[i].p) << "}";
  }
  out << "], h=\"" << cfg.h_kind.to_string() << "\" }" << nl;

  out << "model { ";
  if (std::isfinite(cfg.beta_abs))
    out << "beta=" << format_double(cfg.beta_abs);
  else
    out << "beta_ratio=" << format_double(cfg.beta_ratio);
  out << " }" << nl;

  out << "groundstate { rmax=" << format_double(cfg.gs_rmax) << ", nodes=" << cfg.gs_nodes
      << ", tol=" << format_double(cfg.gs_tol) << " }" << nl;

  out << "sweep { b_grid=\"" << cfg.b_grid_spec << "\", warm_start="
      << (cfg.warm_start ? "true" : "false") << ", workers=" << cfg.workers << " }" << nl;

  const auto& f = cfg.flow;
  out << "flow { step0=" << format_double(f.step0) << ", max_iters=" << f.max_iters
      << ", energy_tol=" << format_double(f.energy_tol)
      << ", grad_tol=" << format_double(f.grad_tol)
      << ", backtracking=" << format_double(f.backtracking)
      << ", stall_window=" << f.stall_window << ", scale_move_every=" << f.scale_move_every
      << ", init=\""
      << (f.init_kind == minimizer::FlowConfig::Init::eigenmode ? "eigenmode" : "gaussian")
      << "\"";
  if (std::isfinite(f.init_cx) && std::isfinite(f.init_cy))
    out << ", init_center=[" << format_double(f.init_cx) << ", " << format_double(f.init_cy)
        << "]";
  if (std::isfinite(f.init_width)) out << ", init_width=" << format_double(f.init_width);
  out << ", seed=" << f.seed << " }" << nl;

  out << "analysis { regime=\"" << cfg.regime << "\" }" << nl;
  out << "output { dir=\"" << cfg.out_dir << "\" }" << (compact ? "" : "\n");
  return out.str();
}

namespace {
bool same_or_both_nan(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}
}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  const auto& s = shape;
  const auto& t = o.shape;
  bool shapes_equal = s.tag == t.tag;
  if (shapes_equal) {
    if (s.tag == geometry::ShapeTag::disk)
      shapes_equal = s.cx == t.cx && s.cy == t.cy && s.radius == t.radius;
    else if (s.tag == geometry::ShapeTag::rectangle)
      shapes_equal = s.ax == t.ax && s.bx == t.bx && s.ay == t.ay && s.by == t.by;
  }
  bool wells_equal = wells.size() == o.wells.size();
  for (size_t i = 0; wells_equal && i < wells.size(); ++i)
    wells_equal = wells[i].x == o.wells[i].x && wells[i].y == o.wells[i].y &&
                  wells[i].p == o.wells[i].p;
  const auto& f = flow;
  const auto& g = o.flow;
  return shapes_equal && wells_equal && resolution == o.resolution &&
         h_kind.to_string() == o.h_kind.to_string() &&
         same_or_both_nan(beta_abs, o.beta_abs) && same_or_both_nan(beta_ratio, o.beta_ratio) &&
         gs_rmax == o.gs_rmax && gs_nodes == o.gs_nodes && gs_tol == o.gs_tol &&
         b_grid_spec == o.b_grid_spec && warm_start == o.warm_start && workers == o.workers &&
         regime == o.regime && out_dir == o.out_dir && f.step0 == g.step0 &&
         f.max_iters == g.max_iters && f.energy_tol == g.energy_tol &&
         f.grad_tol == g.grad_tol && f.backtracking == g.backtracking &&
         f.stall_window == g.stall_window && f.scale_move_every == g.scale_move_every &&
         f.init_kind == g.init_kind && same_or_both_nan(f.init_cx, g.init_cx) &&
         same_or_both_nan(f.init_cy, g.init_cy) &&
         same_or_both_nan(f.init_width, g.init_width) && f.seed == g.seed;
}

std::string cache_key(const std::string& normalized_text) {
  return io::content_hash(normalized_text);
}

}  // namespace kminlab::harness
