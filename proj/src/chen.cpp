#include "folia/chen.hpp"

#include <cmath>

#include "folia/iterated.hpp"

namespace folia {

int spade_sign(std::span<const int> total_degrees) {
  const int n = static_cast<int>(total_degrees.size());
  long spade = 0;
  for (int i = 1; i < n; ++i) spade += static_cast<long>(total_degrees[i - 1] - 1) * (n - i);
  return (spade % 2 == 0) ? 1 : -1;
}

int spade_sign(const BarWord& word) {
  std::vector<int> t;
  for (const auto& a : word) t.push_back(a.degree());
  return spade_sign(t);
}

bool degree_balanced(const BarWord& word, int s_dim) {
  int total = 0;
  for (const auto& a : word) {
    if (a.degree() == 0 || a.is_zero()) return false;
    total += a.degree() - 1;
  }
  return total == s_dim;
}

namespace {

// Ordered generator lists for every mask of the given grade.
std::vector<std::pair<int, std::vector<int>>> masks_of_grade(const Grassmann& gr, int grade) {
  std::vector<std::pair<int, std::vector<int>>> out;
  for (int S = 0; S < gr.size; ++S) {
    if (gr.grade[S] != grade) continue;
    std::vector<int> gens;
    for (int i = 0; i < gr.g; ++i)
      if (S >> i & 1) gens.push_back(i);
    out.emplace_back(S, gens);
  }
  return out;
}

std::vector<int> reversed_levels(int n) {
  std::vector<int> lf(n + 1, 0);
  for (int m = 1; m <= n; ++m) lf[m] = n - m;
  return lf;
}

}  // namespace

double chen_eval(const BarWord& word, const PathFamily& fam, const QuadratureRule& rule) {
  if (word.empty()) throw ConfigError("empty bar word");
  for (const auto& a : word)
    if (!(a.chart() == fam.chart())) throw ConfigError("word and family live on different charts");
  const int G = fam.s_dim();
  if (!degree_balanced(word, G)) return 0.0;
  const int n = static_cast<int>(word.size());
  const Grassmann& gr = Grassmann::get(G);

  std::vector<CompiledForm> forms;
  std::vector<std::vector<std::pair<int, std::vector<int>>>> slots;
  std::size_t max_coefs = 0;
  for (const auto& a : word) {
    forms.emplace_back(a);
    slots.push_back(masks_of_grade(gr, a.degree() - 1));
    max_coefs = std::max(max_coefs, forms.back().num_coefs());
  }
  std::vector<double> coefs(max_coefs);
  std::vector<const double*> vecs(G + 1);
  auto factors = [&](const FamilySample& smp, std::vector<Super<ScalarRing>>& out) {
    vecs[0] = smp.du.data();
    for (int i = 0; i < n; ++i) {
      forms[i].eval_coefs(smp.x, coefs);
      for (const auto& [mask, gens] : slots[i]) {
        for (std::size_t g = 0; g < gens.size(); ++g) vecs[g + 1] = smp.ds[gens[g]].data();
        out[i][mask] = forms[i].contract(coefs, std::span<const double* const>(vecs.data(), gens.size() + 1));
      }
    }
  };
  const std::vector<int> lf = reversed_levels(n);
  ScalarRing ring;
  CompensatedSum total;
  for (const auto& sp : fam.s_points(rule)) {
    auto J = nested_integrals(ring, gr, fam, sp.x, lf, n, factors, rule);
    total.add(sp.w * J[n][gr.top()]);
  }
  return total.value();
}

double chen_eval(const BarWord& word, const SimplexMap& sigma, const QuadratureRule& rule) {
  if (sigma.dim() == 0) {
    if (word.size() == 1 && word[0].degree() == 0) {
      std::vector<double> x = sigma.vertex(0);
      return word[0].coefficient({}).eval(x);
    }
    return 0.0;
  }
  ThetaFamily fam(sigma);
  return chen_eval(word, fam, rule);
}

Eigen::MatrixXd chen_eval_endo(const std::vector<EndValuedForm>& word, const PathFamily& fam,
                               const QuadratureRule& rule) {
  if (word.empty()) throw ConfigError("empty bar word");
  const GradedVectorSpace& space = word[0].space();
  const int d = space.dim();
  const int G = fam.s_dim();
  int total = 0;
  for (const auto& a : word) {
    if (!(a.space() == space)) throw ConfigError("word factors act on different spaces");
    if (a.form_degree() == 0) return Eigen::MatrixXd::Zero(d, d);
    total += a.form_degree() - 1;
  }
  if (total != G) return Eigen::MatrixXd::Zero(d, d);
  const int n = static_cast<int>(word.size());
  const Grassmann& gr = Grassmann::get(G);

  struct Entry {
    int a, b;
    CompiledForm form;
  };
  std::vector<std::vector<Entry>> entries(n);
  std::vector<std::vector<std::pair<int, std::vector<int>>>> slots;
  std::size_t max_coefs = 0;
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        if (!word[i].at(a, b).is_zero()) {
          entries[i].push_back({a, b, CompiledForm(word[i].at(a, b))});
          max_coefs = std::max(max_coefs, entries[i].back().form.num_coefs());
        }
    slots.push_back(masks_of_grade(gr, word[i].form_degree() - 1));
  }
  std::vector<double> coefs(max_coefs);
  std::vector<const double*> vecs(G + 1);
  auto factors = [&](const FamilySample& smp, std::vector<Super<MatrixRing>>& out) {
    vecs[0] = smp.du.data();
    for (int i = 0; i < n; ++i) {
      for (const auto& e : entries[i]) {
        e.form.eval_coefs(smp.x, coefs);
        for (const auto& [mask, gens] : slots[i]) {
          for (std::size_t g = 0; g < gens.size(); ++g) vecs[g + 1] = smp.ds[gens[g]].data();
          out[i][mask](e.a, e.b) =
              e.form.contract(coefs, std::span<const double* const>(vecs.data(), gens.size() + 1));
        }
      }
    }
  };
  MatrixRing ring{space.degrees};
  Eigen::MatrixXd result = Eigen::MatrixXd::Zero(d, d);
  for (const auto& sp : fam.s_points(rule)) {
    auto J = nested_integrals(ring, gr, fam, sp.x, reversed_levels(n), n, factors, rule);
    result += sp.w * J[n][gr.top()];
  }
  return result;
}

std::vector<BarTerm> bar_differential(const BarWord& word) {
  std::vector<BarTerm> out;
  const int n = static_cast<int>(word.size());
  int prefix = 0;
  for (int i = 0; i < n; ++i) {
    LeafForm da = leaf_d(word[i]);
    if (!da.is_zero()) {
      BarWord w = word;
      w[i] = -da;
      out.push_back({prefix % 2 == 0 ? 1.0 : -1.0, std::move(w)});
    }
    prefix += suspended_degree(word[i]);
    if (i + 1 < n) {
      LeafForm prod = wedge(word[i], word[i + 1]);
      if (!prod.is_zero()) {
        BarWord w;
        for (int j = 0; j < i; ++j) w.push_back(word[j]);
        w.push_back(prod);
        for (int j = i + 2; j < n; ++j) w.push_back(word[j]);
        out.push_back({prefix % 2 == 0 ? 1.0 : -1.0, std::move(w)});
      }
    }
  }
  return out;
}

std::vector<BarTerm> bar_differential(const std::vector<BarTerm>& sum) {
  std::vector<BarTerm> out;
  for (const auto& t : sum)
    for (auto& u : bar_differential(t.word)) out.push_back({t.coef * u.coef, std::move(u.word)});
  return out;
}

double reparam_invariance_defect(const BarWord& word, const PathFamily& fam, const Expr& phi,
                                 const QuadratureRule& rule) {
  ReparamFamily re(fam, phi);
  return std::abs(chen_eval(word, fam, rule) - chen_eval(word, re, rule));
}

}  // namespace folia
