#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "folia/fixtures.hpp"
#include "folia/scenario.hpp"

namespace folia {

using nlohmann::json;

namespace {

// Line of the first occurrence of `needle` in the raw text, 0 if absent.
int line_of(const std::string& text, const std::string& needle) {
  const auto pos = text.find(needle);
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ull ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

class Parser {
 public:
  Parser(const std::string& text, std::optional<std::uint64_t> seed) : text_(text), seed_override_(seed) {}

  Scenario parse() {
    json root;
    try {
      root = json::parse(text_);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("syntax error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("scenario must be a JSON object");
    static const std::set<std::string> known{"id", "description", "chart", "seed", "quadrature", "conventions",
                                             "forms", "connections", "morphisms", "simplices", "checks"};
    for (const auto& [k, v] : root.items())
      if (!known.count(k)) fail("unknown key '" + k + "'", "\"" + k + "\"");

    sc_.id = get<std::string>(root, "id", "id");
    sc_.seed = root.contains("seed") ? get<std::uint64_t>(root, "seed", "seed") : 0;
    if (seed_override_) sc_.seed = *seed_override_;
    const json& chart = require(root, "chart", "chart");
    try {
      sc_.chart = Chart(get<int>(chart, "n", "chart.n"), chart.contains("q") ? get<int>(chart, "q", "chart.q") : 0);
    } catch (const ConfigError& e) {
      fail(std::string("chart: ") + e.what(), "\"chart\"");
    }
    sc_.rule = default_rule();
    if (root.contains("quadrature")) {
      const json& q = root["quadrature"];
      if (q.contains("gauss_order")) sc_.rule.order = get<int>(q, "gauss_order", "quadrature.gauss_order");
      if (q.contains("subdiv_depth")) sc_.rule.depth = get<int>(q, "subdiv_depth", "quadrature.subdiv_depth");
    }
    if (root.contains("conventions")) parse_conventions(root["conventions"]);
    if (root.contains("forms"))
      for (const auto& [name, v] : root["forms"].items()) sc_.forms[name] = parse_form(name, v);
    if (root.contains("connections"))
      for (const auto& [name, v] : root["connections"].items())
        sc_.connections.emplace(name, parse_connection(name, v));
    if (root.contains("morphisms"))
      for (const auto& [name, v] : root["morphisms"].items()) sc_.morphisms.emplace(name, parse_morphism(name, v));
    if (root.contains("simplices"))
      for (const auto& [name, v] : root["simplices"].items()) sc_.simplices[name] = parse_simplices(name, v);
    std::set<std::string> names;
    if (root.contains("checks")) {
      if (!root["checks"].is_array()) fail("'checks' must be a list", "\"checks\"");
      for (const auto& c : root["checks"]) {
        CheckSpec spec = parse_check(c);
        if (!names.insert(spec.name).second) fail("duplicate check name '" + spec.name + "'", spec.name);
        validate(spec);
        sc_.checks.push_back(std::move(spec));
      }
    }
    return std::move(sc_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg, const std::string& needle) const {
    const int line = line_of(text_, needle);
    throw ConfigError(line ? msg + " (line " + std::to_string(line) + ")" : msg);
  }

  const json& require(const json& obj, const std::string& key, const std::string& where) const {
    if (!obj.is_object() || !obj.contains(key)) fail("missing key '" + where + "'", "\"" + key + "\"");
    return obj.at(key);
  }

  template <class T>
  T get(const json& obj, const std::string& key, const std::string& where) const {
    const json& v = require(obj, key, where);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      fail("key '" + where + "' has the wrong type", "\"" + key + "\"");
    }
  }

  Expr expr(const std::string& text, char prefix, int count, const std::string& where) const {
    try {
      return parse_expr(text, indexed_names(prefix, count));
    } catch (const ConfigError& e) {
      fail(where + ": " + e.what(), text);
    }
  }

  Expr expr_u(const std::string& text, const std::string& where) const {
    try {
      return parse_expr(text, [](std::string_view n) { return n == "u" ? 0 : -1; });
    } catch (const ConfigError& e) {
      fail(where + ": " + e.what(), text);
    }
  }

  Rng rng_for(const std::string& name) const { return Rng(fnv1a(name, sc_.seed)); }

  void parse_conventions(const json& c) {
    if (c.contains("orientation")) {
      const auto o = get<std::string>(c, "orientation", "conventions.orientation");
      if (o != "standard" && o != "reversed") fail("orientation must be 'standard' or 'reversed'", o);
      sc_.conv.reverse_orientation = o == "reversed";
    }
    if (c.contains("mc_variant")) {
      const auto v = get<std::string>(c, "mc_variant", "conventions.mc_variant");
      if (v != "verbatim" && v != "commutator") fail("mc_variant must be 'verbatim' or 'commutator'", v);
      sc_.conv.mc = v == "verbatim" ? McVariant::Verbatim : McVariant::Commutator;
    }
    if (c.contains("psi_signs"))
      for (const auto& [k, v] : c["psi_signs"].items()) {
        const int s = v.get<int>();
        if (s != 1 && s != -1) fail("psi sign must be +1 or -1", "\"psi_signs\"");
        sc_.conv.psi_sign[std::stoi(k)] = s;
      }
  }

  LeafForm parse_form(const std::string& name, const json& v) {
    const std::string where = "form '" + name + "'";
    const int degree = get<int>(v, "degree", where + ".degree");
    if (degree < 0 || degree > sc_.chart.leaf_dim())
      fail(where + ": degree " + std::to_string(degree) + " outside 0.." + std::to_string(sc_.chart.leaf_dim()),
           "\"" + name + "\"");
    if (v.contains("random")) {
      int max_poly = 2;
      if (v["random"].is_object() && v["random"].contains("max_poly_degree"))
        max_poly = v["random"]["max_poly_degree"].get<int>();
      Rng rng = rng_for("form:" + name);
      return random_form(rng, sc_.chart, degree, max_poly);
    }
    LeafForm a(sc_.chart, degree);
    const json& terms = require(v, "terms", where + ".terms");
    for (const auto& t : terms) {
      std::vector<int> idx;
      if (t.contains("idx"))
        for (int i : t["idx"].get<std::vector<int>>()) {
          if (!sc_.chart.is_leaf(i - 1)) fail(where + ": dx" + std::to_string(i) + " is not a leaf coordinate", "\"" + name + "\"");
          idx.push_back(i - 1);
        }
      if (static_cast<int>(idx.size()) != degree)
        fail(where + ": degree mismatch, term has " + std::to_string(idx.size()) + " differentials but degree is " +
                 std::to_string(degree),
             "\"" + name + "\"");
      const json& coef = require(t, "coef", where + ".coef");
      Expr c = coef.is_number() ? Expr(coef.get<double>())
                                : expr(coef.get<std::string>(), 'x', sc_.chart.n, where);
      a = a + LeafForm::monomial(sc_.chart, idx, c);
    }
    return a;
  }

  const LeafForm& form_ref(const std::string& name, const std::string& where) const {
    auto it = sc_.forms.find(name);
    if (it == sc_.forms.end()) fail(where + ": undefined form '" + name + "'", "\"" + name + "\"");
    return it->second;
  }

  EndValuedForm parse_entries(const json& list, const GradedVectorSpace& V, int endo, int form_deg,
                              const std::string& where) {
    EndValuedForm A(sc_.chart, V, endo, form_deg);
    for (const auto& e : list) {
      const auto ab = get<std::vector<int>>(e, "entry", where + ".entry");
      if (ab.size() != 2 || ab[0] < 0 || ab[1] < 0 || ab[0] >= V.dim() || ab[1] >= V.dim())
        fail(where + ": entry index out of range", where);
      const LeafForm& f = form_ref(get<std::string>(e, "form", where + ".form"), where);
      if (f.degree() != form_deg)
        fail(where + ": degree mismatch, entry form has degree " + std::to_string(f.degree()) + ", expected " +
                 std::to_string(form_deg),
             get<std::string>(e, "form", where));
      try {
        A.set(ab[0], ab[1], A.at(ab[0], ab[1]) + f);
      } catch (const ConfigError& err) {
        fail(where + ": " + err.what(), where);
      }
    }
    return A;
  }

  ZConnection fixture(const std::string& kind, const json& v, const std::string& where) const {
    ZConnection c;
    if (kind == "abelian")
      c = abelian_fixture(v.contains("c") ? v["c"].get<double>() : 0.7);
    else if (kind == "gauge")
      c = gauge_fixture();
    else if (kind == "curved")
      c = curved_fixture();
    else if (kind == "graded")
      c = graded_fixture();
    else if (kind == "gauged")
      c = gauged_fixture();
    else if (kind == "gauged_source")
      c = gauged_source();
    else
      fail(where + ": unknown fixture '" + kind + "'", kind);
    if (!(c.chart() == sc_.chart))
      fail(where + ": fixture '" + kind + "' lives on the chart n=" + std::to_string(c.chart().n) +
               ", q=" + std::to_string(c.chart().q),
           kind);
    return c;
  }

  ZConnection parse_connection(const std::string& name, const json& v) {
    const std::string where = "connection '" + name + "'";
    if (v.contains("fixture")) return fixture(v["fixture"].get<std::string>(), v, where);
    GradedVectorSpace V{get<std::vector<int>>(v, "degrees", where + ".degrees")};
    if (V.dim() == 0) fail(where + ": empty degree list", "\"" + name + "\"");
    try {
      if (v.contains("gauge")) {
        const json& g = v["gauge"];
        auto matrix = [&](const char* key) {
          std::vector<Expr> m;
          const json& rows = require(g, key, where + ".gauge." + key);
          if (static_cast<int>(rows.size()) != V.dim()) fail(where + ": " + key + " has the wrong size", key);
          for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != V.dim()) fail(where + ": " + key + " has the wrong size", key);
            for (const auto& x : row)
              m.push_back(x.is_number() ? Expr(x.get<double>()) : expr(x.get<std::string>(), 'x', sc_.chart.n, where));
          }
          return m;
        };
        return gauge_connection(sc_.chart, V, matrix("g"), matrix("g_inv"));
      }
      std::vector<EndValuedForm> comps;
      const json& cs = require(v, "components", where + ".components");
      for (const auto& [key, list] : cs.items()) {
        if (key.size() < 2 || key[0] != 'A') fail(where + ": component keys are A0, A1, ...", key);
        const int i = std::stoi(key.substr(1));
        if (i < 0 || i > sc_.chart.leaf_dim()) fail(where + ": component " + key + " out of range", key);
        if (static_cast<int>(comps.size()) <= i) comps.resize(i + 1);
        comps[i] = parse_entries(list, V, 1 - i, i, where + "." + key);
      }
      return ZConnection(sc_.chart, V, comps);
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      if (msg.rfind(where, 0) == 0) throw;
      fail(where + ": " + msg, "\"" + name + "\"");
    }
  }

  ConeConnection parse_morphism(const std::string& name, const json& v) {
    const std::string where = "morphism '" + name + "'";
    if (v.contains("fixture")) {
      if (v["fixture"].get<std::string>() != "gauged") fail(where + ": unknown fixture", "\"" + name + "\"");
      if (!(sc_.chart == Chart(3, 0))) fail(where + ": fixture 'gauged' lives on the chart n=3, q=0", "gauged");
      return cone(gauged_morphism(), gauged_source(), gauged_fixture());
    }
    auto conn = [&](const char* key) -> const ZConnection& {
      const std::string ref = get<std::string>(v, key, where + "." + key);
      auto it = sc_.connections.find(ref);
      if (it == sc_.connections.end()) fail(where + ": undefined connection '" + ref + "'", "\"" + ref + "\"");
      return it->second;
    };
    const ZConnection& E = conn("source");
    const ZConnection& F = conn("target");
    std::vector<MorphismBlock> blocks;
    for (const auto& [key, list] : require(v, "blocks", where + ".blocks").items()) {
      if (key.size() < 2 || key[0] != 'e') fail(where + ": block keys are e0, e1, ...", key);
      MorphismBlock b{std::stoi(key.substr(1)), F.dim(), E.dim(), {}};
      for (int i = 0; i < F.dim() * E.dim(); ++i) b.entries.emplace_back(sc_.chart, b.form_degree);
      for (const auto& e : list) {
        const auto ab = get<std::vector<int>>(e, "entry", where + ".entry");
        if (ab.size() != 2 || ab[0] < 0 || ab[1] < 0 || ab[0] >= F.dim() || ab[1] >= E.dim())
          fail(where + ": entry index out of range", key);
        const LeafForm& f = form_ref(get<std::string>(e, "form", where + ".form"), where);
        if (f.degree() != b.form_degree) fail(where + ": degree mismatch in " + key, key);
        b.entries[ab[0] * E.dim() + ab[1]] = b.entries[ab[0] * E.dim() + ab[1]] + f;
      }
      blocks.push_back(std::move(b));
    }
    try {
      return cone(blocks, E, F);
    } catch (const ConfigError& e) {
      fail(where + ": " + e.what(), "\"" + name + "\"");
    }
  }

  std::vector<SimplexMap> parse_simplices(const std::string& name, const json& v) {
    const std::string where = "simplex '" + name + "'";
    const int k = get<int>(v, "dim", where + ".dim");
    if (k < 0 || k > 6) fail(where + ": dimension must be in 0..6", "\"" + name + "\"");
    std::vector<SimplexMap> out;
    try {
      if (v.contains("random")) {
        const json& r = v["random"];
        const int count = r.value("count", 1);
        const double radius = r.value("radius", 1.0);
        const bool curved = r.value("curved", true);
        Rng rng = rng_for("simplex:" + name);
        for (int i = 0; i < count; ++i) out.push_back(random_simplex(rng, sc_.chart, k, curved, radius));
      } else if (v.contains("vertices")) {
        auto verts = v["vertices"].get<std::vector<std::vector<double>>>();
        if (static_cast<int>(verts.size()) != k + 1) fail(where + ": needs " + std::to_string(k + 1) + " vertices", "\"" + name + "\"");
        for (const auto& p : verts)
          if (static_cast<int>(p.size()) != sc_.chart.n) fail(where + ": vertex has the wrong length", "\"" + name + "\"");
        out.push_back(SimplexMap::affine(sc_.chart, verts));
      } else {
        const auto comps = get<std::vector<std::string>>(v, "components", where + ".components");
        std::vector<Expr> e;
        for (const auto& s : comps) e.push_back(expr(s, 't', k, where));
        out.emplace_back(sc_.chart, k, e);
      }
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      if (msg.rfind(where, 0) == 0) throw;
      fail(where + ": " + msg, "\"" + name + "\"");
    }
    for (const auto& s : out)
      if (!s.leafwise()) fail(where + ": simplex is not contained in a leaf", "\"" + name + "\"");
    return out;
  }

  CheckSpec parse_check(const json& c) {
    CheckSpec s;
    s.name = get<std::string>(c, "name", "checks[].name");
    const std::string where = "check '" + s.name + "'";
    s.type = get<std::string>(c, "type", where + ".type");
    s.tol = c.contains("tol") ? get<double>(c, "tol", where + ".tol") : 1e-6;
    if (c.contains("gauss_order")) s.gauss_order = get<int>(c, "gauss_order", where + ".gauss_order");
    if (c.contains("subdiv_depth")) s.subdiv_depth = get<int>(c, "subdiv_depth", where + ".subdiv_depth");
    if (c.contains("form")) s.form = get<std::string>(c, "form", where + ".form");
    if (c.contains("word")) s.word = get<std::vector<std::string>>(c, "word", where + ".word");
    if (c.contains("connection")) s.connection = get<std::string>(c, "connection", where + ".connection");
    if (c.contains("morphism")) s.morphism = get<std::string>(c, "morphism", where + ".morphism");
    if (c.contains("simplex")) {
      if (c["simplex"].is_array())
        s.simplices = c["simplex"].get<std::vector<std::string>>();
      else
        s.simplices.push_back(get<std::string>(c, "simplex", where + ".simplex"));
    }
    if (c.contains("phi")) s.phi = get<std::string>(c, "phi", where + ".phi");
    if (c.contains("step")) s.step = get<double>(c, "step", where + ".step");
    return s;
  }

  // Name resolution and degree bookkeeping for one check.
  void validate(const CheckSpec& s) const {
    const std::string where = "check '" + s.name + "'";
    auto need = [&](bool ok, const std::string& what) {
      if (!ok) fail(where + ": missing " + what, s.name);
    };
    auto dangling = [&](const std::string& kind, const std::string& ref) {
      fail(where + " references undefined " + kind + " '" + ref + "'", s.name);
    };
    BarWord word;
    for (const auto& w : s.word) {
      auto it = sc_.forms.find(w);
      if (it == sc_.forms.end()) dangling("form", w);
      word.push_back(it->second);
    }
    if (!s.form.empty() && !sc_.forms.count(s.form)) dangling("form", s.form);
    if (!s.connection.empty() && !sc_.connections.count(s.connection)) dangling("connection", s.connection);
    if (!s.morphism.empty() && !sc_.morphisms.count(s.morphism)) dangling("morphism", s.morphism);
    std::vector<int> dims;
    for (const auto& name : s.simplices) {
      auto it = sc_.simplices.find(name);
      if (it == sc_.simplices.end()) dangling("simplex", name);
      for (const auto& sm : it->second) dims.push_back(sm.dim());
    }
    auto dims_are = [&](auto pred, const std::string& expected) {
      need(!dims.empty(), "simplex");
      for (int d : dims)
        if (!pred(d))
          fail(where + ": degree mismatch, simplex of dimension " + std::to_string(d) + " but " + expected, s.name);
    };
    auto eq = [](int want) { return [want](int d) { return d == want; }; };
    if (s.tol < 0) fail(where + ": negative tolerance", s.name);

    const std::string& t = s.type;
    if (t == "theta_identity" || t == "derham") {
      need(!s.form.empty(), "form");
      const int deg = sc_.forms.at(s.form).degree();
      if (t == "theta_identity") {
        if (deg < 1) fail(where + ": degree mismatch, theta identity needs a form of positive degree", s.name);
        dims_are(eq(deg), "the form has degree " + std::to_string(deg));
      } else {
        dims_are(eq(deg + 1), "d of the form has degree " + std::to_string(deg + 1));
      }
    } else if (t == "ainfty" || t == "degree_zero" || t == "reparam" || t == "normalization" || t == "homotopy") {
      need(!word.empty(), "word");
      const int deg = phi_degree(word);
      if (t == "ainfty") dims_are(eq(deg + 1), "the relation lives in degree " + std::to_string(deg + 1));
      if (t == "degree_zero") {
        bool has_zero = false;
        for (const auto& a : word) has_zero = has_zero || a.degree() == 0;
        if (!has_zero || word.size() < 2) fail(where + ": degree_zero needs a word of length >= 2 with a 0-form", s.name);
        dims_are(eq(deg), "phi has degree " + std::to_string(deg));
      }
      if (t == "reparam") {
        need(!s.phi.empty(), "phi");
        expr_u(s.phi, where);
        dims_are([&](int d) { return d >= 1 && degree_balanced(word, d - 1); },
                 "the word needs a simplex of dimension " + std::to_string(deg));
      }
      if (t == "normalization") dims_are(eq(deg - 1), "phi has degree " + std::to_string(deg));
      if (t == "homotopy") dims_are(eq(deg), "phi has degree " + std::to_string(deg));
    } else if (t == "flatness") {
      need(!s.connection.empty(), "connection");
    } else if (t == "holonomy_ode" || t == "envelope" || t == "mc" || t == "concat") {
      need(!s.connection.empty(), "connection");
      if (t == "holonomy_ode") dims_are(eq(1), "the transport oracle runs along 1-simplices");
      if (t == "concat") dims_are(eq(2), "concatenation uses 2-simplices");
      if (t == "envelope" || t == "mc") dims_are([](int d) { return d >= 1; }, "it must be at least 1");
      if (t == "holonomy_ode" && s.step <= 0) fail(where + ": step must be positive", s.name);
    } else if (t == "rh1_chain") {
      need(!s.morphism.empty(), "morphism");
      dims_are([](int d) { return d >= 1; }, "it must be at least 1");
    } else {
      fail(where + ": unknown check type '" + t + "'", t);
    }
  }

  const std::string& text_;
  std::optional<std::uint64_t> seed_override_;
  Scenario sc_;
};

}  // namespace

Scenario parse_scenario_text(const std::string& text, std::optional<std::uint64_t> seed_override) {
  return Parser(text, seed_override).parse();
}

Scenario parse_scenario(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), seed_override);
}

}  // namespace folia
