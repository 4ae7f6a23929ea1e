#include "folia/forms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace folia {

Chart::Chart(int n_, int q_) : n(n_), q(q_) {
  if (n < 1) throw ConfigError("chart dimension n must be positive");
  if (q < 0 || q > n) throw ConfigError("chart codimension q must lie in [0, n]");
}

int sort_sign(std::vector<int>& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  return sign;
}

LeafForm::LeafForm(const Chart& chart, int degree) : chart_(chart), degree_(degree) {
  if (degree < 0) throw ConfigError("form degree must be nonnegative");
}

LeafForm LeafForm::function(const Chart& chart, const Expr& f) {
  LeafForm a(chart, 0);
  a.add({}, f);
  return a;
}

LeafForm LeafForm::monomial(const Chart& chart, std::vector<int> idx, const Expr& coef) {
  LeafForm a(chart, static_cast<int>(idx.size()));
  for (int i : idx)
    if (!chart.is_leaf(i))
      throw ConfigError("index x" + std::to_string(i + 1) + " is not a leaf coordinate");
  int s = sort_sign(idx);
  if (s != 0) a.add(idx, s > 0 ? coef : -coef);
  return a;
}

void LeafForm::add(const MultiIndex& idx, const Expr& coef) {
  if (static_cast<int>(idx.size()) != degree_) throw ConfigError("form term has wrong degree");
  if (coef.is_zero()) return;
  auto it = terms_.find(idx);
  if (it == terms_.end()) {
    terms_.emplace(idx, coef);
    return;
  }
  Expr sum = it->second + coef;
  if (sum.is_zero())
    terms_.erase(it);
  else
    it->second = sum;
}

Expr LeafForm::coefficient(const MultiIndex& idx) const {
  auto it = terms_.find(idx);
  return it == terms_.end() ? Expr() : it->second;
}

LeafForm LeafForm::operator+(const LeafForm& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  if (!(chart_ == o.chart_) || degree_ != o.degree_)
    throw ConfigError("adding forms of different chart or degree");
  LeafForm r = *this;
  for (const auto& [idx, c] : o.terms_) r.add(idx, c);
  return r;
}

LeafForm LeafForm::operator-() const {
  LeafForm r(chart_, degree_);
  for (const auto& [idx, c] : terms_) r.terms_.emplace(idx, -c);
  return r;
}

LeafForm LeafForm::operator-(const LeafForm& o) const { return *this + (-o); }

LeafForm LeafForm::scaled(const Expr& f) const {
  LeafForm r(chart_, degree_);
  for (const auto& [idx, c] : terms_) r.add(idx, f * c);
  return r;
}

double small_det(std::span<const double> m, int p) {
  switch (p) {
    case 0:
      return 1.0;
    case 1:
      return m[0];
    case 2:
      return m[0] * m[3] - m[1] * m[2];
    case 3:
      return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
             m[2] * (m[3] * m[7] - m[4] * m[6]);
    default: {
      std::vector<double> a(m.begin(), m.end());
      double det = 1.0;
      for (int c = 0; c < p; ++c) {
        int piv = c;
        for (int r = c + 1; r < p; ++r)
          if (std::abs(a[r * p + c]) > std::abs(a[piv * p + c])) piv = r;
        if (a[piv * p + c] == 0.0) return 0.0;
        if (piv != c) {
          for (int k = 0; k < p; ++k) std::swap(a[c * p + k], a[piv * p + k]);
          det = -det;
        }
        det *= a[c * p + c];
        for (int r = c + 1; r < p; ++r) {
          double f = a[r * p + c] / a[c * p + c];
          for (int k = c; k < p; ++k) a[r * p + k] -= f * a[c * p + k];
        }
      }
      return det;
    }
  }
}

CompiledForm::CompiledForm(const LeafForm& a) : degree_(a.degree()) {
  std::vector<Expr> coefs;
  for (const auto& [idx, c] : a.terms()) {
    index_.push_back(idx);
    coefs.push_back(c);
  }
  prog_ = Program(coefs);
}

void CompiledForm::eval_coefs(std::span<const double> x, std::span<double> coefs) const {
  if (!index_.empty()) prog_.eval(x, coefs);
}

double CompiledForm::contract(std::span<const double> coefs, std::span<const double* const> vecs) const {
  const int p = degree_;
  double m[64];
  double total = 0.0;
  for (std::size_t t = 0; t < index_.size(); ++t) {
    const MultiIndex& idx = index_[t];
    for (int r = 0; r < p; ++r)
      for (int c = 0; c < p; ++c) m[r * p + c] = vecs[c][idx[r]];
    total += coefs[t] * small_det(std::span<const double>(m, p * p), p);
  }
  return total;
}

double LeafForm::eval(std::span<const double> x, std::span<const std::vector<double>> vecs) const {
  if (static_cast<int>(vecs.size()) != degree_)
    throw ConfigError("form evaluated on the wrong number of vectors");
  double total = 0.0;
  std::vector<double> m(degree_ * degree_);
  for (const auto& [idx, c] : terms_) {
    for (int r = 0; r < degree_; ++r)
      for (int col = 0; col < degree_; ++col) m[r * degree_ + col] = vecs[col][idx[r]];
    total += c.eval(x) * small_det(m, degree_);
  }
  return total;
}

LeafForm wedge(const LeafForm& a, const LeafForm& b) {
  if (!(a.chart() == b.chart())) throw ConfigError("wedge of forms on different charts");
  LeafForm r(a.chart(), a.degree() + b.degree());
  if (r.degree() > a.chart().leaf_dim()) return r;
  for (const auto& [ia, ca] : a.terms()) {
    for (const auto& [ib, cb] : b.terms()) {
      std::vector<int> idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      int s = sort_sign(idx);
      if (s == 0) continue;
      Expr c = ca * cb;
      r.add(idx, s > 0 ? c : -c);
    }
  }
  return r;
}

LeafForm leaf_d(const LeafForm& a) {
  LeafForm r(a.chart(), a.degree() + 1);
  if (r.degree() > a.chart().leaf_dim()) return r;
  for (const auto& [idx, c] : a.terms()) {
    for (int l = 0; l < a.chart().leaf_dim(); ++l) {
      if (std::find(idx.begin(), idx.end(), l) != idx.end()) continue;
      Expr dc = c.diff(l);
      if (dc.is_zero()) continue;
      std::vector<int> full{l};
      full.insert(full.end(), idx.begin(), idx.end());
      int s = sort_sign(full);
      r.add(full, s > 0 ? dc : -dc);
    }
  }
  return r;
}

bool forms_equal(const LeafForm& a, const LeafForm& b, double tol) {
  if (a.degree() != b.degree() && !(a.is_zero() && b.is_zero())) return false;
  LeafForm diff = a - b;
  for (const auto& [idx, c] : diff.terms())
    if (!numerically_equal(c, Expr(), a.chart().n, tol)) return false;
  return true;
}

namespace {

// Determinant of a small matrix of expressions by Laplace expansion.
Expr expr_det(const std::vector<std::vector<Expr>>& m) {
  const std::size_t p = m.size();
  if (p == 0) return Expr(1.0);
  if (p == 1) return m[0][0];
  Expr total;
  for (std::size_t c = 0; c < p; ++c) {
    if (m[0][c].is_zero()) continue;
    std::vector<std::vector<Expr>> minor;
    for (std::size_t r = 1; r < p; ++r) {
      std::vector<Expr> row;
      for (std::size_t k = 0; k < p; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(std::move(row));
    }
    Expr term = m[0][c] * expr_det(minor);
    total = (c % 2 == 0) ? total + term : total - term;
  }
  return total;
}

void for_each_subset(int k, int p, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  if (p > k) return;
  for (;;) {
    f(idx);
    int i = p - 1;
    while (i >= 0 && idx[i] == k - p + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < p; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

LeafForm pullback(const LeafForm& a, std::span<const Expr> m, int k) {
  const Chart& ch = a.chart();
  if (static_cast<int>(m.size()) != ch.n)
    throw ConfigError("pullback map has the wrong number of components");
  Chart target(std::max(k, 1), 0);
  target.n = k;
  LeafForm r(target, a.degree());
  if (a.is_zero()) return r;
  if (a.degree() > 0) {
    for (int i = ch.leaf_dim(); i < ch.n; ++i)
      if (!m[i].is_constant_expr())
        throw ConfigError("pullback along a map that is not leafwise");
  }
  if (a.degree() > k) return r;
  std::vector<std::vector<Expr>> jac(ch.n, std::vector<Expr>(k));
  for (int i = 0; i < ch.leaf_dim(); ++i)
    for (int j = 0; j < k; ++j) jac[i][j] = m[i].diff(j);
  const int p = a.degree();
  for (const auto& [idx, c] : a.terms()) {
    Expr cc = c.substitute(m);
    if (cc.is_zero()) continue;
    for_each_subset(k, p, [&](const std::vector<int>& cols) {
      std::vector<std::vector<Expr>> minor(p, std::vector<Expr>(p));
      for (int r2 = 0; r2 < p; ++r2)
        for (int c2 = 0; c2 < p; ++c2) minor[r2][c2] = jac[idx[r2]][cols[c2]];
      Expr det = expr_det(minor);
      if (!det.is_zero()) r.add(cols, cc * det);
    });
  }
  return r;
}

// ---------------------------------------------------------------------------

std::map<int, int> GradedVectorSpace::dims() const {
  std::map<int, int> out;
  for (int d : degrees) ++out[d];
  return out;
}

EndValuedForm::EndValuedForm(const Chart& chart, GradedVectorSpace space, int endo_degree,
                             int form_degree)
    : chart_(chart), space_(std::move(space)), j_(endo_degree), p_(form_degree) {
  entries_.assign(static_cast<std::size_t>(dim() * dim()), LeafForm(chart_, p_));
}

bool EndValuedForm::entry_allowed(int a, int b) const {
  return space_.degrees[a] - space_.degrees[b] == j_;
}

void EndValuedForm::set(int a, int b, LeafForm f) {
  if (a < 0 || b < 0 || a >= dim() || b >= dim()) throw ConfigError("matrix entry out of range");
  if (f.is_zero()) {
    entries_[a * dim() + b] = LeafForm(chart_, p_);
    return;
  }
  if (f.degree() != p_) throw ConfigError("matrix entry has the wrong form degree");
  if (!entry_allowed(a, b))
    throw ConfigError("matrix entry (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                      ") violates the endomorphism degree " + std::to_string(j_));
  entries_[a * dim() + b] = std::move(f);
}

bool EndValuedForm::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const LeafForm& f) { return f.is_zero(); });
}

EndValuedForm EndValuedForm::operator+(const EndValuedForm& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  if (!(space_ == o.space_) || j_ != o.j_ || p_ != o.p_)
    throw ConfigError("adding endomorphism forms of different type");
  EndValuedForm r = *this;
  for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] = entries_[i] + o.entries_[i];
  return r;
}

EndValuedForm EndValuedForm::operator-() const {
  EndValuedForm r = *this;
  for (auto& e : r.entries_) e = -e;
  return r;
}

EndValuedForm EndValuedForm::scaled(double c) const {
  EndValuedForm r = *this;
  for (auto& e : r.entries_) e = e.scaled(Expr(c));
  return r;
}

std::vector<double> EndValuedForm::eval(std::span<const double> x,
                                        std::span<const std::vector<double>> vecs) const {
  std::vector<double> out(entries_.size(), 0.0);
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (!entries_[i].is_zero()) out[i] = entries_[i].eval(x, vecs);
  return out;
}

EndValuedForm endo_compose(const EndValuedForm& u, const EndValuedForm& v) {
  if (!(u.space() == v.space())) throw ConfigError("composing endomorphisms of different spaces");
  const int n = u.dim();
  EndValuedForm r(u.chart(), u.space(), u.endo_degree() + v.endo_degree(),
                  u.form_degree() + v.form_degree());
  const bool neg = (u.form_degree() * v.endo_degree()) % 2 != 0;
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < n; ++c) {
      LeafForm sum(u.chart(), r.form_degree());
      for (int b = 0; b < n; ++b) {
        if (u.at(a, b).is_zero() || v.at(b, c).is_zero()) continue;
        sum = sum + wedge(u.at(a, b), v.at(b, c));
      }
      if (!sum.is_zero()) r.set(a, c, neg ? -sum : sum);
    }
  }
  return r;
}

EndValuedForm endo_d(const EndValuedForm& u) {
  const int n = u.dim();
  EndValuedForm r(u.chart(), u.space(), u.endo_degree(), u.form_degree() + 1);
  const bool neg = u.endo_degree() % 2 != 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (u.at(a, b).is_zero()) continue;
      LeafForm d = leaf_d(u.at(a, b));
      r.set(a, b, neg ? -d : d);
    }
  return r;
}

bool endo_equal(const EndValuedForm& a, const EndValuedForm& b, double tol) {
  if (a.dim() != b.dim()) return false;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      if (!forms_equal(a.at(i, j), b.at(i, j), tol)) return false;
  return true;
}

ZConnection::ZConnection(const Chart& chart, GradedVectorSpace space,
                         std::vector<EndValuedForm> comps)
    : chart_(chart), space_(std::move(space)), comps_(std::move(comps)) {
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    const int ii = static_cast<int>(i);
    if (comps_[i].dim() == 0) comps_[i] = EndValuedForm(chart_, space_, 1 - ii, ii);
    if (!(comps_[i].space() == space_)) throw ConfigError("connection component has the wrong space");
    if (comps_[i].endo_degree() != 1 - ii || comps_[i].form_degree() != ii)
      throw ConfigError("connection component A" + std::to_string(i) +
                        " must have endo degree " + std::to_string(1 - ii) +
                        " and form degree " + std::to_string(i));
  }
}

EndValuedForm ZConnection::component(int i) const {
  if (i >= 0 && i < static_cast<int>(comps_.size())) return comps_[i];
  return EndValuedForm(chart_, space_, 1 - i, i);
}

std::vector<EndValuedForm> flatness_defect(const ZConnection& c) {
  const int m = c.max_degree();
  std::vector<EndValuedForm> out;
  for (int r = 0; r <= 2 * m; ++r) {
    EndValuedForm acc(c.chart(), c.space(), 2 - r, r);
    if (r >= 1 && r - 1 <= m) acc = acc + (-endo_d(c.component(r - 1)));
    for (int i = 0; i <= m; ++i) {
      int j = r - i;
      if (j < 0 || j > m) continue;
      acc = acc + endo_compose(c.component(i), c.component(j));
    }
    out.push_back(acc);
  }
  return out;
}

double flatness_defect_norm(const ZConnection& c, int samples) {
  double worst = 0.0;
  for (const auto& blk : flatness_defect(c)) {
    for (int a = 0; a < blk.dim(); ++a)
      for (int b = 0; b < blk.dim(); ++b)
        for (const auto& [idx, coef] : blk.at(a, b).terms()) {
          for (int s = 0; s < samples; ++s) {
            auto x = halton_point(s, c.chart().n);
            for (double& v : x) v = 2.0 * v - 1.0;
            worst = std::max(worst, std::abs(coef.eval(x)));
          }
        }
  }
  return worst;
}

ZConnection shift(const ZConnection& c, int m) {
  GradedVectorSpace sp = c.space();
  for (int& d : sp.degrees) d -= m;
  std::vector<EndValuedForm> comps;
  for (int i = 0; i <= c.max_degree(); ++i) {
    const EndValuedForm& a = c.components()[i];
    EndValuedForm r(c.chart(), sp, a.endo_degree(), a.form_degree());
    const bool neg = ((m * (i + 1)) % 2) != 0;
    for (int x = 0; x < a.dim(); ++x)
      for (int y = 0; y < a.dim(); ++y)
        if (!a.at(x, y).is_zero()) r.set(x, y, neg ? -a.at(x, y) : a.at(x, y));
    comps.push_back(r);
  }
  return ZConnection(c.chart(), sp, comps);
}

}  // namespace folia
